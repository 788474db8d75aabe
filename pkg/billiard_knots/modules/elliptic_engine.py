"""Real-argument Jacobi elliptic functions and elliptic integrals.

The quarter period K comes from the arithmetic-geometric mean, the
amplitude from the descending AGM phase recursion, and the incomplete
integral from Carlson's R_F.  Arguments are reduced modulo the half
period (2K for the amplitude, π for the integral) before evaluation, so
long walks of θ-steps keep their digits.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache

from billiard_knots.constants import (
    AGM_MAX_ITERATIONS,
    AGM_TOLERANCE,
    CARLSON_ERRTOL,
    HALF_PI,
)
from billiard_knots.errors import EllipticDomainError

logger = logging.getLogger(__name__)

_RF_C1 = 1.0 / 24.0
_RF_C2 = 0.1
_RF_C3 = 3.0 / 44.0
_RF_C4 = 1.0 / 14.0


@dataclass(frozen=True)
class Modulus:
    """Elliptic modulus k with k' = √(1−k²), k² and the quarter period K.

    Near k = 1 the complementary modulus cannot be recovered from k; build
    it with :meth:`from_complementary_squared` so K keeps its digits.
    """

    k: float
    complementary: float | None = None
    k_squared: float = field(init=False)
    K: float = field(init=False)

    def __post_init__(self) -> None:
        k = _check_modulus(self.k)
        if self.complementary is None:
            k_prime = math.sqrt((1.0 - k) * (1.0 + k))
        else:
            k_prime = float(self.complementary)
            if not 0.0 < k_prime <= 1.0 or abs(k * k + k_prime * k_prime - 1.0) > 1e-12:
                raise EllipticDomainError(f"k={k} and k'={k_prime} do not satisfy k^2 + k'^2 = 1.")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "complementary", k_prime)
        object.__setattr__(self, "k_squared", k * k)
        object.__setattr__(self, "K", _quarter_period(k, k_prime))

    @classmethod
    def from_squared(cls, k_squared: float) -> "Modulus":
        """Build a modulus from k² (the parameter m)."""
        value = float(k_squared)
        if not math.isfinite(value) or value < 0.0 or value >= 1.0:
            raise EllipticDomainError(f"Parameter k^2 must satisfy 0 <= k^2 < 1, got {value}.")
        return cls(math.sqrt(value))

    @classmethod
    def from_complementary_squared(cls, k_prime_squared: float) -> "Modulus":
        """Build a modulus from k'² = 1 − k², exact for k'² far below rounding of 1."""
        value = float(k_prime_squared)
        if not math.isfinite(value) or value <= 0.0 or value > 1.0:
            raise EllipticDomainError(f"Parameter k'^2 must satisfy 0 < k'^2 <= 1, got {value}.")
        return cls(math.sqrt(1.0 - value), math.sqrt(value))

    @property
    def complementary_squared(self) -> float:
        return self.complementary * self.complementary


@dataclass(frozen=True)
class JacobiTriple:
    """Values of sn, cn, dn (and the amplitude) at one argument."""

    sn: float
    cn: float
    dn: float
    am: float


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def _check_modulus(k: float) -> float:
    value = float(k)
    if not math.isfinite(value) or value < 0.0 or value >= 1.0:
        raise EllipticDomainError(f"Modulus must satisfy 0 <= k < 1, got {value}.")
    return value


def _check_argument(u: float, label: str = "u") -> float:
    value = float(u)
    if not math.isfinite(value):
        raise EllipticDomainError(f"Argument {label} must be finite, got {value}.")
    return value


def _as_modulus(k: float | Modulus) -> Modulus:
    if isinstance(k, Modulus):
        return k
    return Modulus(k)


@lru_cache(maxsize=256)
def _agm_sequence(k: float, k_prime: float) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """Return the AGM sequences (a_n) and (c_n) started from (1, k', k)."""
    a = 1.0
    b = k_prime
    c = k
    a_values = [a]
    c_values = [c]
    for _ in range(AGM_MAX_ITERATIONS):
        if abs(c) <= AGM_TOLERANCE * a:
            break
        a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
        a_values.append(a)
        c_values.append(c)
    else:
        logger.debug("AGM hit the iteration cap for k=%r (c=%g)", k, c)
    return tuple(a_values), tuple(c_values)


def _quarter_period(k: float, k_prime: float) -> float:
    a_values, _ = _agm_sequence(k, k_prime)
    return math.pi / (2.0 * a_values[-1])


def _amplitude_core(r: float, modulus: Modulus) -> float:
    """Amplitude for |r| <= K by the descending AGM phase recursion."""
    a_values, c_values = _agm_sequence(modulus.k, modulus.complementary)
    steps = len(a_values) - 1
    phase = (2.0 ** steps) * a_values[-1] * r
    for index in range(steps, 0, -1):
        ratio = c_values[index] / a_values[index]
        phase = 0.5 * (phase + math.asin(ratio * math.sin(phase)))
    return phase


def _carlson_rf(x: float, y: float, z: float) -> float:
    """Carlson's symmetric integral R_F(x, y, z) by duplication."""
    xt, yt, zt = x, y, z
    for _ in range(AGM_MAX_ITERATIONS * 4):
        sqrt_x, sqrt_y, sqrt_z = math.sqrt(xt), math.sqrt(yt), math.sqrt(zt)
        lam = sqrt_x * (sqrt_y + sqrt_z) + sqrt_y * sqrt_z
        xt = 0.25 * (xt + lam)
        yt = 0.25 * (yt + lam)
        zt = 0.25 * (zt + lam)
        average = (xt + yt + zt) / 3.0
        dx = (average - xt) / average
        dy = (average - yt) / average
        dz = (average - zt) / average
        if max(abs(dx), abs(dy), abs(dz)) <= CARLSON_ERRTOL:
            break
    e2 = dx * dy - dz * dz
    e3 = dx * dy * dz
    return (1.0 + (_RF_C1 * e2 - _RF_C2 - _RF_C3 * e3) * e2 + _RF_C4 * e3) / math.sqrt(average)


# ---------------------------------------------------------------------------
# Public API
# ---------------------------------------------------------------------------

def complete_K(k: float) -> float:
    """Complete elliptic integral of the first kind K(k) = F(π/2, k)."""
    k = _check_modulus(k)
    if k == 0.0:
        return HALF_PI
    return Modulus(k).K


def incomplete_F(phi: float, k: float | Modulus) -> float:
    """Incomplete integral F(φ, k) = ∫₀^φ dt / √(1 − k² sin² t).

    Reduces φ modulo π so that F(φ + π) = F(φ) + 2K holds to rounding.
    """
    modulus = _as_modulus(k)
    phi = _check_argument(phi, "phi")
    turns = round(phi / math.pi)
    r = phi - turns * math.pi
    s = math.sin(r)
    c = math.cos(r)
    core = s * _carlson_rf(c * c, c * c + modulus.complementary_squared * s * s, 1.0)
    return 2.0 * turns * modulus.K + core


def jacobi_am(u: float, k: float | Modulus) -> float:
    """Jacobi amplitude am(u), the inverse of :func:`incomplete_F`."""
    modulus = _as_modulus(k)
    u = _check_argument(u)
    half_periods = round(u / (2.0 * modulus.K))
    r = u - 2.0 * half_periods * modulus.K
    return half_periods * math.pi + _amplitude_core(r, modulus)


def jacobi_sn_cn_dn(u: float, k: float | Modulus) -> JacobiTriple:
    """Evaluate sn, cn and dn at the real argument *u*."""
    modulus = _as_modulus(k)
    amplitude = jacobi_am(u, modulus)
    sn = math.sin(amplitude)
    cn = math.cos(amplitude)
    dn = math.sqrt(cn * cn + modulus.complementary_squared * sn * sn)
    return JacobiTriple(sn=sn, cn=cn, dn=dn, am=amplitude)


def sine_amplitude_lhs(u: float, v: float, k: float | Modulus) -> float:
    """sin(am(u+v) + am(u−v))."""
    modulus = _as_modulus(k)
    return math.sin(jacobi_am(u + v, modulus) + jacobi_am(u - v, modulus))


def sine_amplitude_rhs(u: float, v: float, k: float | Modulus) -> float:
    """2 sn u cn u dn v / (1 − k² sn²u sn²v), Jacobi's closed form of the lhs."""
    modulus = _as_modulus(k)
    at_u = jacobi_sn_cn_dn(u, modulus)
    at_v = jacobi_sn_cn_dn(v, modulus)
    denominator = 1.0 - modulus.k_squared * at_u.sn ** 2 * at_v.sn ** 2
    return 2.0 * at_u.sn * at_u.cn * at_v.dn / denominator
