import pytest
import sympy

from billiard_knots.errors import (
    GenericityExhaustedError,
    InvariantMismatchError,
    PaddingError,
    RequestError,
    TooManyCrossingsError,
)
from billiard_knots.models import KnotRequest
from billiard_knots.modules import knot_pipeline
from billiard_knots.modules.braid_engine import toric
from billiard_knots.modules.diagram_engine import (
    assign_signs,
    bracket_polynomial,
    build_diagram,
    is_toric_cyclic,
    letter_word,
)
from billiard_knots.modules.geometry_engine import Ellipse
from billiard_knots.modules.knot_pipeline import BRACKET_METHOD, COARSE_METHOD, coarse_invariant, run
from billiard_knots.modules.poncelet_engine import polygon, solve_caustic


def test_trefoil_request_builds_a_verified_knot() -> None:
    build = run(KnotRequest(p=2, n=5, signs=(1, 1, 1, 1, -1)))
    assert len(build.knot.components) == 1
    assert build.report.passed
    assert build.genericity.passed
    assert build.cross_check.max_residual < 1e-7
    assert build.invariant_checked
    assert build.invariant.method == BRACKET_METHOD
    assert build.summary()["invariant"] == BRACKET_METHOD
    assert build.bracket.writhe == 3
    assert sympy.expand(build.bracket.normalized - build.reference_bracket.normalized) == 0
    assert is_toric_cyclic(letter_word(build.diagram), 2, 5)
    summary = build.summary()
    assert summary["crossings"] == 5
    assert summary["padded"] is False
    assert summary["frequencies"][0] >= 1


def test_unknot_request_has_trivial_invariant() -> None:
    build = run(KnotRequest(p=2, n=5, signs=(1, -1, 1, -1, 1)))
    assert build.report.passed
    assert sympy.expand(build.bracket.normalized - 1) == 0


def test_short_trefoil_word_is_padded() -> None:
    build = run(KnotRequest(p=2, n=3, signs=(1, 1, 1)))
    assert (build.spec.p, build.spec.n) == (2, 5)
    assert build.summary()["padded"] is True
    assert build.report.passed
    assert build.bracket.writhe == 3


def test_two_component_link_request() -> None:
    build = run(KnotRequest(p=2, n=4, signs=(1, 1, 1, 1)))
    assert (build.spec.p, build.spec.n) == (2, 6)
    assert len(build.knot.components) == 2
    assert len(build.diagram.crossings) == 6
    assert build.report.passed
    assert sympy.expand(build.bracket.normalized - build.reference_bracket.normalized) == 0


def test_identical_seed_gives_identical_knot() -> None:
    request = KnotRequest(p=2, n=5, signs=(1, 1, 1, 1, -1))
    first = run(request, seed=11)
    second = run(request, seed=11)
    assert first.phi == second.phi
    assert first.knot.to_dict() == second.knot.to_dict()


def test_circle_and_wide_unpaddable_requests_are_rejected() -> None:
    with pytest.raises(RequestError, match="not a circle"):
        run(KnotRequest(p=2, n=5, signs=(1,) * 5, A=1.0, B=1.0))
    with pytest.raises(PaddingError):
        run(KnotRequest(p=3, n=4, signs=(1,) * 8))


def test_exhausted_sampling_is_reported(monkeypatch: pytest.MonkeyPatch) -> None:
    def never_generic(*args, **kwargs):
        raise knot_pipeline.DegenerateDiagramError("forced")

    monkeypatch.setattr(knot_pipeline, "build_diagram", never_generic)
    with pytest.raises(GenericityExhaustedError, match="3 attempts"):
        run(KnotRequest(p=2, n=5, signs=(1,) * 5, retries=3))


def test_large_diagrams_fall_back_to_components_and_exponent_sum() -> None:
    frame = solve_caustic(Ellipse(2.0, 1.0), 25, 2)
    star = assign_signs(build_diagram(polygon(frame, 25, 2, 0.37)), (1,) * 25)
    assert len(star.crossings) == 25
    with pytest.raises(TooManyCrossingsError):
        bracket_polynomial(star)
    check = coarse_invariant(star, toric(2, 25)).to_dict()
    assert check["method"] == COARSE_METHOD
    assert check["complete"] is False
    assert check["knot"] == check["braid_closure"] == {"components": 1, "exponent_sum": 25}

    flipped = assign_signs(star, (-1,) + (1,) * 24)
    with pytest.raises(InvariantMismatchError, match="components/writhe"):
        coarse_invariant(flipped, toric(2, 25))


def _refuse_state_sum(*args, **kwargs):
    raise TooManyCrossingsError("forced")


def test_coarse_invariant_still_catches_a_wrong_writhe(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setattr(knot_pipeline, "bracket_polynomial", _refuse_state_sum)
    build = run(KnotRequest(p=2, n=5, signs=(1, 1, 1, 1, -1)))
    assert build.invariant.method == COARSE_METHOD
    assert not build.invariant_checked
    assert build.invariant.knot == {"components": 1, "exponent_sum": 3}

    monkeypatch.setattr(knot_pipeline, "exponent_sum", lambda word: 5)
    with pytest.raises(InvariantMismatchError, match="components/writhe"):
        run(KnotRequest(p=2, n=5, signs=(1, 1, 1, 1, -1)))
