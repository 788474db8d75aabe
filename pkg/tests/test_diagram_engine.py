import math
from dataclasses import replace

import numpy as np
import pytest
import sympy

from billiard_knots.errors import CrossCheckError, DiagramError, TooManyCrossingsError
from billiard_knots.modules.braid_engine import ClosureDiagram, closure_crossings, parse_word, toric
from billiard_knots.modules.diagram_engine import (
    A,
    assign_signs,
    bracket_polynomial,
    build_diagram,
    diagram_code,
    elliptic_cross_check,
    genericity_report,
    is_toric_cyclic,
    letter_word,
    relation_search,
)
from billiard_knots.modules.elliptic_engine import incomplete_F
from billiard_knots.modules.geometry_engine import Ellipse
from billiard_knots.modules.poncelet_engine import link_polygons, polygon, solve_caustic

TABLE = Ellipse(2.0, 1.0)
PHI = 0.37
TREFOIL_SIGNS = (1, 1, 1, 1, -1)


def _star(n: int, p: int, mu: int = 1, phi: float = PHI):
    frame = solve_caustic(TABLE, n, p)
    return build_diagram(link_polygons(frame, n, p, phi, mu))


def _trefoil_diagram():
    return assign_signs(_star(5, 2), TREFOIL_SIGNS)


def _same(first: sympy.Expr, second: sympy.Expr) -> bool:
    return sympy.expand(first - second) == 0


def test_pentagram_has_five_level_one_crossings() -> None:
    d = _star(5, 2)
    assert len(d.crossings) == 5
    assert letter_word(d) == (1,) * 5
    assert all(crossing.is_self_crossing for crossing in d.crossings)
    assert d.signs is None


@pytest.mark.parametrize(("n", "p"), [(5, 2), (7, 2), (7, 3)])
def test_crossing_count_and_sweep_word(n: int, p: int) -> None:
    d = _star(n, p)
    assert len(d.crossings) == n * (p - 1)
    assert is_toric_cyclic(letter_word(d), p, n)
    assert sorted(crossing.level for crossing in d.crossings) == sorted(toric(p, n).indices)


def test_heptagram_levels_follow_the_offset() -> None:
    d = _star(7, 3)
    assert all(crossing.level == crossing.offset for crossing in d.crossings)
    angles = [crossing.angle for crossing in d.crossings]
    assert angles == sorted(angles)


def test_triangle_has_no_crossings() -> None:
    d = _star(3, 1)
    assert d.crossings == ()
    assert letter_word(d) == ()
    assert is_toric_cyclic((), 1, 3)


def test_passage_times_are_normalised_arc_lengths() -> None:
    d = _star(7, 3)
    for crossing in d.crossings:
        for passage in crossing.passages:
            assert 0.0 < passage.t < 1.0
            assert np.linalg.norm(passage.direction) == pytest.approx(1.0)
    assert d.vertex_arcs[0][0] == 0.0
    assert np.all(np.diff(d.vertex_arcs[0]) > 0.0)
    assert d.lengths[0] == pytest.approx(d.polygon.perimeter)


def test_is_toric_cyclic_accepts_rotations_and_commuting_letters() -> None:
    assert is_toric_cyclic((2, 1, 2, 1, 2, 1), 3, 3)
    # σ1 and σ3 commute in τ_{4,2}.
    assert is_toric_cyclic((1, 3, 2, 1, 3, 2), 4, 2)
    assert not is_toric_cyclic((1, 1, 2, 2, 1, 2), 3, 3)
    assert not is_toric_cyclic((1, 2), 3, 3)


def test_two_triangles_form_a_star_of_david() -> None:
    d = _star(3, 1, mu=2)
    assert (d.n, d.p, d.mu) == (6, 2, 2)
    assert len(d.crossings) == 6
    assert not any(crossing.is_self_crossing for crossing in d.crossings)


def test_link_copies_interleave_at_equal_parameter_steps() -> None:
    frame = solve_caustic(TABLE, 5, 2)
    copies = link_polygons(frame, 5, 2, PHI, 2)
    period = 4.0 * frame.modulus.K
    params = []
    for poly in copies:
        for point in poly.tangency_points:
            x, y = frame.to_normalized(point)
            params.append((incomplete_F(math.atan2(y, x), frame.modulus) - PHI) % period)
    params = np.sort(params)
    steps = np.diff(np.append(params, params[0] + period))
    assert steps == pytest.approx(np.full(10, period / 10), abs=1e-8)


def test_build_diagram_rejects_mismatched_components() -> None:
    first = polygon(solve_caustic(TABLE, 5, 2), 5, 2, PHI)
    second = polygon(solve_caustic(TABLE, 7, 2), 7, 2, PHI)
    with pytest.raises(DiagramError, match="share n, p"):
        build_diagram([first, second])
    with pytest.raises(DiagramError, match="at least one"):
        build_diagram([])


def test_assign_signs_sets_handedness_by_slot() -> None:
    d = _star(7, 3)
    signs = tuple(1 if k % 3 else -1 for k in range(14))
    signed = assign_signs(d, signs)
    for crossing in signed.crossings:
        assert crossing.handedness == signs[crossing.slot * 2 + crossing.offset - 1]
    assert signed.signs is not None
    with pytest.raises(DiagramError, match="Need 14 signs"):
        assign_signs(d, signs[:-1])
    with pytest.raises(DiagramError, match="\\+1 or -1"):
        assign_signs(d, (0,) * 14)


def test_unsigned_crossings_have_no_over_strand() -> None:
    crossing = _star(5, 2).crossings[0]
    assert crossing.handedness is None
    with pytest.raises(DiagramError, match="no over/under"):
        crossing.over_passage
    with pytest.raises(DiagramError, match="Assign signs"):
        diagram_code(_star(5, 2))


def test_bracket_of_one_kink_is_the_unknot() -> None:
    for text in ("s1", "s1^-1"):
        result = bracket_polynomial(closure_crossings(parse_word(text)))
        assert _same(result.normalized, sympy.Integer(1))


def test_bracket_of_the_trefoil_closure() -> None:
    right = bracket_polynomial(closure_crossings(parse_word("s1 s1 s1")))
    left = bracket_polynomial(closure_crossings(parse_word("s1^-1 s1^-1 s1^-1")))
    trefoils = (-A ** -16 + A ** -12 + A ** -4, -A ** 16 + A ** 12 + A ** 4)
    assert right.writhe == 3
    assert any(_same(right.normalized, option) for option in trefoils)
    assert _same(left.normalized, right.normalized.subs(A, 1 / A))
    assert not _same(left.normalized, right.normalized)


def test_bracket_of_the_hopf_link() -> None:
    result = bracket_polynomial(closure_crossings(parse_word("s1 s1")))
    options = (-A ** -2 - A ** -10, -A ** 10 - A ** 2)
    assert any(_same(result.normalized, option) for option in options)


def test_bracket_counts_free_loops() -> None:
    two_circles = bracket_polynomial(ClosureDiagram(crossings=(), free_loops=2))
    assert _same(two_circles.bracket, -A ** 2 - A ** -2)
    with pytest.raises(DiagramError, match="empty diagram"):
        bracket_polynomial(ClosureDiagram(crossings=()))


def test_bracket_refuses_large_state_sums() -> None:
    with pytest.raises(TooManyCrossingsError, match="25 crossings"):
        bracket_polynomial(closure_crossings(toric(2, 25)))


def test_star_trefoil_matches_braid_closure() -> None:
    star = bracket_polynomial(_trefoil_diagram())
    braid = bracket_polynomial(closure_crossings(parse_word("s1 s1 s1")))
    assert star.writhe == 3
    assert _same(star.normalized, braid.normalized)


def test_alternating_pentagram_is_the_unknot() -> None:
    d = assign_signs(_star(5, 2), (1, -1, 1, -1, 1))
    assert _same(bracket_polynomial(d).normalized, sympy.Integer(1))


@pytest.mark.parametrize(("n", "p"), [(5, 2), (7, 3)])
def test_elliptic_cross_check_matches_geometry(n: int, p: int) -> None:
    result = elliptic_cross_check(solve_caustic(TABLE, n, p), n, p, PHI)
    assert result.checked > 0
    assert result.max_residual < 1e-7
    assert result.sine_amplitude_residual < 1e-9
    assert result.passed


def test_elliptic_cross_check_rejects_zero_offset() -> None:
    with pytest.raises(CrossCheckError) as info:
        elliptic_cross_check(solve_caustic(TABLE, 5, 2), 5, 2, PHI, offsets=[5])
    assert info.value.offending[1] == 5


def test_relation_search_finds_small_relations() -> None:
    relation = relation_search([math.sqrt(2) - 1, 0.5], 20, 1e-9)
    assert relation is not None
    assert relation.labels == ("1",)
    assert abs(relation.coefficients[0] + relation.coefficients[1] * 0.5) < 1e-9

    duplicated = relation_search([math.pi - 3, math.pi - 3], 20, 1e-9, labels=["a", "b"])
    assert duplicated is not None
    assert duplicated.labels == ("a", "b")
    assert "t[a]" in str(duplicated)


def test_relation_search_reports_near_zero_values() -> None:
    relation = relation_search([0.3, 1e-12], 20, 1e-9)
    assert relation is not None
    assert relation.coefficients == (0, 1)


def test_relation_search_passes_independent_values() -> None:
    assert relation_search([math.sqrt(2) - 1, math.pi - 3, math.e - 2], 20, 1e-9) is None
    with pytest.raises(DiagramError, match="support"):
        relation_search([0.1], 20, 1e-9, max_support=3)


@pytest.mark.parametrize(("n", "p"), [(5, 2), (7, 2)])
def test_genericity_passes_at_random_starts(n: int, p: int) -> None:
    frame = solve_caustic(TABLE, n, p)
    rng = np.random.default_rng(n * 10 + p)
    for phi in rng.uniform(0.0, 4.0 * frame.modulus.K, size=4):
        report = genericity_report(build_diagram(polygon(frame, n, p, float(phi))), qmax=20, eps=1e-9)
        assert report.passed, report.relation
        # Sides i and n - 1 - i give one crossing whose times sum to 1.
        assert report.mirror_pairs == 1
        assert report.checked_values == (n - 1) + 2 * n * (p - 1) - 1
        assert report.to_dict()["relation"] is None


def test_mirror_crossing_times_sum_to_one() -> None:
    d = _star(5, 2)
    mirrored = [c for c in d.crossings if (c.first.side + c.second.side) % 5 == 4]
    assert len(mirrored) == 1
    assert mirrored[0].first.t + mirrored[0].second.t == pytest.approx(1.0, abs=1e-12)


def test_genericity_fails_for_equal_sided_star() -> None:
    # Equal sides, as for the regular {5/2} star of a circle.
    d = _star(5, 2)
    regular = replace(d, vertex_arcs=(np.arange(5) / 5.0,))
    report = genericity_report(regular, qmax=20, eps=1e-9)
    assert not report.passed
    relation = report.relation
    assert relation.labels == ("c0:v1",)
    assert abs(relation.coefficients[0] + relation.coefficients[1] * 0.2) < 1e-9
    assert "t[c0:v1]" in report.to_dict()["relation"]


def test_genericity_fails_for_duplicated_arc_length() -> None:
    d = _star(5, 2)
    arcs = d.vertex_arcs[0].copy()
    arcs[3] = d.crossings[0].first.t
    report = genericity_report(replace(d, vertex_arcs=(arcs,)), qmax=20, eps=1e-9)
    assert not report.passed
    relation = report.relation
    assert relation.labels == ("c0:v3", "c0:x0.0")
    assert relation.coefficients[0] == 0
    assert relation.coefficients[1] == -relation.coefficients[2]
    assert relation.residual <= 1e-9
