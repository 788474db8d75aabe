import math
import random

import pytest
from scipy.integrate import quad
from scipy.optimize import brentq
from scipy.special import ellipj, ellipk, ellipkm1

from billiard_knots.errors import EllipticDomainError
from billiard_knots.modules.elliptic_engine import (
    Modulus,
    complete_K,
    incomplete_F,
    jacobi_am,
    jacobi_sn_cn_dn,
    sine_amplitude_lhs,
    sine_amplitude_rhs,
)


def _quad_F(phi: float, k: float) -> float:
    value, _ = quad(
        lambda t: 1.0 / math.sqrt(1.0 - (k * math.sin(t)) ** 2),
        0.0,
        phi,
        epsabs=1e-14,
        epsrel=1e-14,
        limit=500,
    )
    return value


def test_complete_K_is_half_pi_for_zero_modulus() -> None:
    assert complete_K(0.0) == pytest.approx(math.pi / 2, abs=1e-15)
    assert Modulus(0.0).K == pytest.approx(math.pi / 2, abs=1e-15)


@pytest.mark.parametrize("k", [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9])
def test_complete_K_matches_quadrature(k: float) -> None:
    assert abs(complete_K(k) - _quad_F(math.pi / 2, k)) < 1e-10


def test_complete_K_near_one() -> None:
    k = 0.999999
    value = complete_K(k)
    assert value > 7.0
    assert abs(value - _quad_F(math.pi / 2, k)) < 1e-8
    assert value == pytest.approx(float(ellipk(k * k)), rel=1e-10)


def test_complete_K_is_increasing() -> None:
    values = [complete_K(k / 100) for k in range(0, 100)]
    assert all(b > a for a, b in zip(values, values[1:]))


def test_incomplete_F_examples() -> None:
    assert incomplete_F(1.234, 0.0) == pytest.approx(1.234, abs=1e-15)
    assert incomplete_F(-7.5, 0.0) == pytest.approx(-7.5, abs=1e-13)
    for k in (0.3, 0.7, 0.95):
        assert incomplete_F(math.pi / 2, k) == pytest.approx(complete_K(k), abs=1e-12)
    assert abs(incomplete_F(0.5, 0.8) - _quad_F(0.5, 0.8)) < 1e-10


def test_incomplete_F_advances_by_two_K_per_half_turn() -> None:
    rng = random.Random(11)
    for _ in range(200):
        k = rng.uniform(0.0, 0.98)
        phi = rng.uniform(-10.0, 10.0)
        step = incomplete_F(phi + math.pi, k) - incomplete_F(phi, k)
        assert step == pytest.approx(2.0 * complete_K(k), abs=1e-11)


def test_jacobi_am_examples() -> None:
    assert jacobi_am(0.0, 0.5) == 0.0
    for k in (0.0, 0.4, 0.9, 0.999):
        assert jacobi_am(complete_K(k), k) == pytest.approx(math.pi / 2, abs=1e-12)

    target = brentq(lambda phi: _quad_F(phi, 0.6) - 1.0, 0.0, 2.0, xtol=1e-15)
    assert abs(jacobi_am(1.0, 0.6) - target) < 1e-10


def test_jacobi_am_inverts_incomplete_F() -> None:
    rng = random.Random(5)
    for _ in range(300):
        k = rng.uniform(0.0, 0.99)
        u = rng.uniform(-30.0, 30.0)
        assert incomplete_F(jacobi_am(u, k), k) == pytest.approx(u, abs=1e-10)


def test_jacobi_am_quasi_periodicity() -> None:
    rng = random.Random(17)
    for _ in range(300):
        k = rng.uniform(0.0, 0.99)
        K = complete_K(k)
        u = rng.uniform(-20.0, 20.0)
        assert jacobi_am(u + 2 * K, k) - jacobi_am(u, k) == pytest.approx(math.pi, abs=1e-10)


def test_sn_cn_dn_degenerate_to_circular_functions() -> None:
    triple = jacobi_sn_cn_dn(1.234, 0.0)
    assert triple.sn == pytest.approx(math.sin(1.234), abs=1e-15)
    assert triple.cn == pytest.approx(math.cos(1.234), abs=1e-15)
    assert triple.dn == 1.0


def test_sn_cn_dn_at_quarter_period() -> None:
    k = 0.7
    triple = jacobi_sn_cn_dn(complete_K(k), k)
    assert triple.sn == pytest.approx(1.0, abs=1e-12)
    assert triple.cn == pytest.approx(0.0, abs=1e-12)
    assert triple.dn == pytest.approx(math.sqrt(1 - 0.49), abs=1e-12)


def test_sn_cn_dn_identities_and_half_period_signs() -> None:
    rng = random.Random(3)
    for _ in range(10_000):
        k = rng.uniform(0.0, 0.999)
        u = rng.uniform(-50.0, 50.0)
        triple = jacobi_sn_cn_dn(u, k)
        assert abs(triple.sn ** 2 + triple.cn ** 2 - 1.0) < 1e-12
        assert abs(triple.dn ** 2 + k * k * triple.sn ** 2 - 1.0) < 1e-12
        assert triple.dn >= math.sqrt(1 - k * k) - 1e-12

    for _ in range(300):
        k = rng.uniform(0.0, 0.99)
        u = rng.uniform(-10.0, 10.0)
        shifted = jacobi_sn_cn_dn(u + 2 * complete_K(k), k)
        base = jacobi_sn_cn_dn(u, k)
        assert shifted.sn == pytest.approx(-base.sn, abs=1e-11)
        assert shifted.cn == pytest.approx(-base.cn, abs=1e-11)


def test_sn_cn_dn_agree_with_scipy() -> None:
    rng = random.Random(23)
    for _ in range(200):
        k = rng.uniform(0.0, 0.95)
        u = rng.uniform(-5.0, 5.0)
        sn, cn, dn, _ = ellipj(u, k * k)
        triple = jacobi_sn_cn_dn(u, k)
        assert triple.sn == pytest.approx(float(sn), abs=1e-12)
        assert triple.cn == pytest.approx(float(cn), abs=1e-12)
        assert triple.dn == pytest.approx(float(dn), abs=1e-12)


def test_addition_formulas() -> None:
    rng = random.Random(29)
    for _ in range(2000):
        k = rng.uniform(0.0, 0.95)
        K = complete_K(k)
        x = rng.uniform(-4 * K, 4 * K)
        y = rng.uniform(-4 * K, 4 * K)
        a = jacobi_sn_cn_dn(x, k)
        b = jacobi_sn_cn_dn(y, k)
        total = jacobi_sn_cn_dn(x + y, k)
        denominator = 1 - k * k * a.sn ** 2 * b.sn ** 2
        sn_sum = (a.sn * b.cn * b.dn + b.sn * a.cn * a.dn) / denominator
        cn_sum = (a.cn * b.cn - a.sn * b.sn * a.dn * b.dn) / denominator
        assert abs(total.sn - sn_sum) <= 1e-9 * max(1.0, abs(sn_sum))
        assert abs(total.cn - cn_sum) <= 1e-9 * max(1.0, abs(cn_sum))


def test_sine_amplitude_formula() -> None:
    rng = random.Random(31)
    for _ in range(2000):
        k = rng.uniform(0.0, 0.95)
        u = rng.uniform(-6.0, 6.0)
        v = rng.uniform(-6.0, 6.0)
        lhs = sine_amplitude_lhs(u, v, k)
        rhs = sine_amplitude_rhs(u, v, k)
        assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(rhs))


@pytest.mark.parametrize("k", [-0.1, 1.0, 1.2, float("nan")])
def test_rejects_modulus_outside_unit_interval(k: float) -> None:
    with pytest.raises(EllipticDomainError, match="Modulus"):
        complete_K(k)
    with pytest.raises(EllipticDomainError):
        jacobi_sn_cn_dn(0.5, k)


def test_from_squared_matches_direct_construction() -> None:
    assert Modulus.from_squared(0.36).K == pytest.approx(Modulus(0.6).K, abs=1e-15)
    with pytest.raises(EllipticDomainError, match="k\\^2"):
        Modulus.from_squared(1.0)


@pytest.mark.parametrize("m1", [1e-6, 1e-10, 1e-14])
def test_complementary_modulus_keeps_K_near_one(m1: float) -> None:
    modulus = Modulus.from_complementary_squared(m1)
    assert modulus.complementary_squared == pytest.approx(m1, rel=1e-15)
    assert modulus.K == pytest.approx(ellipkm1(m1), rel=1e-13)
    assert incomplete_F(math.pi / 2, modulus) == pytest.approx(modulus.K, rel=1e-13)


def test_complementary_modulus_is_validated() -> None:
    with pytest.raises(EllipticDomainError, match="k'\\^2"):
        Modulus.from_complementary_squared(0.0)
    with pytest.raises(EllipticDomainError, match="k\\^2 \\+ k'\\^2 = 1"):
        Modulus(0.6, 0.7)
    assert Modulus(0.6, 0.8).K == pytest.approx(Modulus(0.6).K, rel=1e-14)
