import math
import random

import numpy as np
import pytest

from billiard_knots.errors import NoRootError, NonCoprimeError, OddPolygonError, PonceletError
from billiard_knots.modules.elliptic_engine import jacobi_sn_cn_dn
from billiard_knots.modules.geometry_engine import Ellipse, simulate, tangency_residual
from billiard_knots.modules.poncelet_engine import (
    birkhoff_angles,
    birkhoff_polygon,
    build_frame,
    central_symmetry_residual,
    darboux_point,
    darboux_residual,
    graves_spread,
    link_polygons,
    polygon,
    rotation_number,
    solve_caustic,
)

TABLE = Ellipse(2.0, 1.0)
PAIRS = [(3, 1), (5, 1), (5, 2), (7, 2), (7, 3), (9, 2)]


def _winding_estimate(ellipse: Ellipse, lam: float, steps: int) -> float:
    frame = build_frame(ellipse, lam)
    start = frame.outer_point(0.5 + frame.beta)
    toward = frame.outer_point(0.5 + 3 * frame.beta)
    points = simulate(ellipse, start, toward - start, steps)
    total = 0.0
    for first, second in zip(points, points[1:]):
        total += math.atan2(first[0] * second[1] - first[1] * second[0], float(first @ second))
    return abs(total) / (2 * math.pi * steps)


def test_frame_relations_hold() -> None:
    for lam in (0.01, 0.2, 0.5, 0.8, 0.99):
        frame = build_frame(TABLE, lam)
        triple = jacobi_sn_cn_dn(frame.beta, frame.modulus)
        assert frame.a_star > frame.b_star > 1.0
        assert 0.0 < frame.modulus.k_squared < 1.0
        assert abs(triple.cn - 1.0 / frame.a_star) < 1e-10
        assert abs(triple.dn - frame.b_star / frame.a_star) < 1e-10
        assert frame.theta == pytest.approx(2 * frame.beta)
        assert 0.0 < frame.rho < 0.5


def test_frame_maps_caustic_to_unit_circle_and_table_to_outer_ellipse() -> None:
    frame = build_frame(TABLE, 0.6)
    for t in np.linspace(0.0, 2 * math.pi, 37):
        caustic = np.array([frame.c1 * math.cos(t), frame.c2 * math.sin(t)])
        assert float(np.linalg.norm(frame.to_normalized(caustic))) == pytest.approx(1.0, abs=1e-10)
        table = TABLE.point_at(t)
        x, y = frame.to_normalized(table)
        assert (x / frame.a_star) ** 2 + (y / frame.b_star) ** 2 == pytest.approx(1.0, abs=1e-10)
        assert np.allclose(frame.from_normalized(frame.to_normalized(table)), table, atol=1e-14)
    assert np.allclose(frame.forward_matrix @ frame.inverse_matrix, np.eye(2))


def test_circle_tangent_meets_outer_ellipse_a_half_step_away() -> None:
    rng = random.Random(2)
    for _ in range(1000):
        frame = build_frame(Ellipse(rng.uniform(1.2, 4.0), 1.0), rng.uniform(0.01, 0.99))
        phi = rng.uniform(-20.0, 20.0)
        here = jacobi_sn_cn_dn(phi, frame.modulus)
        for shift in (frame.beta, -frame.beta):
            there = jacobi_sn_cn_dn(phi + shift, frame.modulus)
            x, y = frame.a_star * there.cn, frame.b_star * there.sn
            assert abs(x * here.cn + y * here.sn - 1.0) < 1e-9


def test_rotation_number_in_near_circle_limit() -> None:
    A = 1.0 + 1e-6
    lam = 0.5
    expected = math.acos(math.sqrt(1.0 - lam / A ** 2)) / math.pi
    assert abs(rotation_number(Ellipse(A, 1.0), lam) - expected) < 1e-4


def test_rotation_number_matches_long_simulation() -> None:
    rho = rotation_number(TABLE, 0.5)
    assert 0.0 < rho < 0.5
    assert abs(_winding_estimate(TABLE, 0.5, 2000) - rho) < 1e-3


def test_rotation_number_shrinks_with_lambda_and_is_monotone() -> None:
    assert 0.0 < rotation_number(TABLE, 1e-10) < 1e-3
    samples = [rotation_number(TABLE, TABLE.B ** 2 * i / 65) for i in range(1, 65)]
    assert all(b > a for a, b in zip(samples, samples[1:]))


@pytest.mark.parametrize("n,p", PAIRS)
def test_polygons_close_for_every_start_and_match_simulation(n: int, p: int) -> None:
    frame = solve_caustic(TABLE, n, p)
    assert abs(frame.rho - p / n) < 1e-12
    rng = random.Random(n * 10 + p)
    for _ in range(8):
        poly = polygon(frame, n, p, rng.uniform(0.0, 4 * frame.modulus.K))
        assert poly.closure_gap() < 1e-9
        assert np.all(np.abs([TABLE.value(v) - 1.0 for v in poly.vertices]) < 1e-9)
        bounced = simulate(TABLE, poly.vertices[0], poly.vertices[1] - poly.vertices[0], n)
        assert np.allclose(bounced[:n], poly.vertices, atol=1e-7)
        assert np.linalg.norm(bounced[n] - bounced[0]) < 1e-8


@pytest.mark.parametrize("n,p", [(7, 3), (9, 4)])
def test_solve_caustic_resolves_thin_caustics_at_default_tolerance(n: int, p: int) -> None:
    frame = solve_caustic(TABLE, n, p)
    assert abs(frame.rho - p / n) < 1e-12
    assert 0.0 < TABLE.B ** 2 - frame.lam < 1e-5
    assert frame.c2 ** 2 == pytest.approx(TABLE.B ** 2 - frame.lam, rel=1e-6)
    for phi in (0.0, 0.4, 2.5):
        poly = polygon(frame, n, p, phi)
        assert poly.closure_gap() < 1e-9
        assert np.all(np.abs([TABLE.value(v) - 1.0 for v in poly.vertices]) < 1e-9)


def test_pentagram_sides_touch_the_caustic() -> None:
    frame = solve_caustic(TABLE, 5, 2)
    poly = polygon(frame, 5, 2, 0.3)
    caustic = frame.caustic
    for j, line in enumerate(poly.side_lines()):
        assert tangency_residual(caustic, line) < 1e-8
        assert abs(line.evaluate(poly.tangency_points[(j + 1) % 5])) < 1e-9
        assert caustic.value(poly.tangency_points[j]) == pytest.approx(1.0, abs=1e-10)


def test_solve_caustic_rejects_bad_requests() -> None:
    with pytest.raises(NonCoprimeError, match="coprime"):
        solve_caustic(TABLE, 4, 2)
    with pytest.raises(PonceletError, match="n >= 2p \\+ 1"):
        solve_caustic(TABLE, 5, 3)
    with pytest.raises(PonceletError, match="not a circle"):
        solve_caustic(Ellipse(1.0, 1.0), 5, 2)


def test_solve_caustic_reports_unreachable_rotation_number() -> None:
    with pytest.raises(NoRootError) as info:
        solve_caustic(TABLE, 21, 10)
    low, high = info.value.rho_range
    assert 0.0 < low < high < 10 / 21


def test_polygon_rejects_frame_for_other_pair() -> None:
    frame = solve_caustic(TABLE, 5, 2)
    with pytest.raises(PonceletError, match="rotation number"):
        polygon(frame, 7, 3, 0.0)


@pytest.mark.parametrize("n,p", [(3, 1), (5, 2)])
def test_birkhoff_agrees_with_jacobi_caustic(n: int, p: int) -> None:
    start = TABLE.point_at(0.7)
    result = birkhoff_angles(TABLE, n, p, start)
    assert result.reflection_residual < 1e-6
    assert result.focal_angles.sum() == pytest.approx(2 * math.pi * p, abs=1e-12)

    poly = birkhoff_polygon(TABLE, n, p, start)
    assert abs(poly.frame.lam - solve_caustic(TABLE, n, p).lam) < 1e-6
    assert np.allclose(poly.vertices[0], start)
    for line in poly.side_lines():
        assert tangency_residual(poly.frame.caustic, line) < 1e-6


def test_birkhoff_on_circle_is_regular_star() -> None:
    result = birkhoff_angles(Ellipse(1.0, 1.0), 5, 2, (1.0, 0.0))
    assert np.allclose(result.focal_angles, 4 * math.pi / 5, atol=1e-6)
    assert result.perimeter == pytest.approx(10 * math.sin(2 * math.pi / 5), abs=1e-9)


def test_graves_spread_is_tiny_for_one_caustic() -> None:
    frame = solve_caustic(TABLE, 5, 2)
    rng = random.Random(16)
    phis = [rng.uniform(0.0, 4 * frame.modulus.K) for _ in range(16)]
    perimeter = polygon(frame, 5, 2, 0.0).perimeter
    assert graves_spread(frame, 5, 2, phis) < 1e-8 * perimeter
    assert graves_spread(frame, 5, 2, [0.4]) == 0.0

    other = solve_caustic(TABLE, 3, 1)
    assert abs(polygon(other, 3, 1, 0.0).perimeter - perimeter) > 1e-3


@pytest.mark.parametrize("n", [4, 6])
def test_even_polygons_are_centrally_symmetric_with_concurrent_diagonals(n: int) -> None:
    frame = solve_caustic(TABLE, n, 1)
    first = polygon(frame, n, 1, 0.37)
    second = polygon(frame, n, 1, 1.91)
    for poly in (first, second):
        assert central_symmetry_residual(poly) < 1e-9
        assert darboux_residual(poly) < 1e-8
    assert np.allclose(darboux_point(first), [0.0, 0.0], atol=1e-8)
    assert np.allclose(darboux_point(first), darboux_point(second), atol=1e-8)


def test_odd_polygons_have_no_main_diagonals() -> None:
    poly = polygon(solve_caustic(TABLE, 5, 2), 5, 2, 0.0)
    with pytest.raises(OddPolygonError, match="even"):
        darboux_residual(poly)
    with pytest.raises(OddPolygonError):
        central_symmetry_residual(poly)


def test_link_polygons_are_rotated_by_a_fraction_of_a_step() -> None:
    frame = solve_caustic(TABLE, 3, 1)
    copies = link_polygons(frame, 3, 1, 0.2, 2)
    assert len(copies) == 2
    assert copies[1].phi - copies[0].phi == pytest.approx(frame.theta / 2)
    assert copies[0].perimeter == pytest.approx(copies[1].perimeter, rel=1e-9)
