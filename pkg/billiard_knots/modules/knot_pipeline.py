"""End-to-end construction of a billiard knot from a quasitoric braid request.

pad → caustic → sampled start parameter (until the diagram is generic) →
signs → heights → 3D trajectory → verify → invariant comparison with the
closure of the requested braid (the bracket, or component count and
exponent sum past the state-sum bound).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any

import numpy as np
import sympy

from billiard_knots.config_registry import setting
from billiard_knots.errors import (
    DegenerateDiagramError,
    DiagramError,
    GenericityExhaustedError,
    InvariantMismatchError,
    RequestError,
    TooManyCrossingsError,
)
from billiard_knots.models import BilliardKnot3D, KnotRequest
from billiard_knots.modules.braid_engine import (
    BraidWord,
    QuasitoricSpec,
    closure_components,
    closure_crossings,
    exponent_sum,
    pad,
    quasitoric,
)
from billiard_knots.modules.diagram_engine import (
    BracketResult,
    CrossCheckResult,
    GenericityReport,
    StarDiagram,
    assign_signs,
    bracket_polynomial,
    build_diagram,
    elliptic_cross_check,
    genericity_report,
    is_toric_cyclic,
    letter_word,
)
from billiard_knots.modules.geometry_engine import Ellipse
from billiard_knots.modules.lift_engine import VerifyReport, assign_all_heights, build_knot3d, verify
from billiard_knots.modules.poncelet_engine import JacobiFrame, link_polygons, solve_caustic

logger = logging.getLogger(__name__)

BRACKET_METHOD = "bracket"
COARSE_METHOD = "components+exponent_sum"


@dataclass(frozen=True)
class InvariantCheck:
    """The invariant on which the knot was compared with the braid closure.

    Above the state-sum bound only the component count and the exponent
    sum (the writhe of the closure) are compared, and ``complete`` is false.
    """

    method: str
    knot: dict[str, Any]
    braid_closure: dict[str, Any]

    @property
    def complete(self) -> bool:
        return self.method == BRACKET_METHOD

    def to_dict(self) -> dict[str, Any]:
        return {
            "method": self.method,
            "complete": self.complete,
            "knot": self.knot,
            "braid_closure": self.braid_closure,
        }


@dataclass
class KnotBuild:
    """Everything produced for one request."""

    request: KnotRequest
    spec: QuasitoricSpec
    frame: JacobiFrame
    phi: float
    attempts: int
    diagram: StarDiagram
    genericity: GenericityReport
    cross_check: CrossCheckResult
    knot: BilliardKnot3D
    report: VerifyReport
    invariant: InvariantCheck
    bracket: BracketResult | None
    reference_bracket: BracketResult | None

    @property
    def invariant_checked(self) -> bool:
        return self.invariant.complete

    def summary(self) -> dict[str, Any]:
        return {
            "p": self.spec.p,
            "n": self.spec.n,
            "padded": self.spec.n != self.request.n,
            "components": len(self.knot.components),
            "lambda": self.frame.lam,
            "phi": self.phi,
            "attempts": self.attempts,
            "crossings": len(self.diagram.crossings),
            "frequencies": [component.plan.m for component in self.knot.components],
            "genericity": self.genericity.to_dict(),
            "cross_check_residual": self.cross_check.max_residual,
            "invariant": self.invariant.method,
        }


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def _sample_diagram(
    frame: JacobiFrame, n: int, p: int, mu: int, seed: int, retries: int
) -> tuple[float, int, StarDiagram, GenericityReport]:
    rng = np.random.default_rng(seed)
    for attempt in range(1, retries + 1):
        phi = float(rng.uniform(0.0, 4.0 * frame.modulus.K))
        try:
            diagram = build_diagram(link_polygons(frame, n, p, phi, mu))
        except DegenerateDiagramError as exc:
            logger.warning("Attempt %d (phi=%.6f) degenerate: %s", attempt, phi, exc)
            continue
        report = genericity_report(diagram)
        if report.passed:
            return phi, attempt, diagram, report
        logger.warning("Attempt %d (phi=%.6f) not generic: %s", attempt, phi, report.relation)
    raise GenericityExhaustedError(f"No generic start parameter in {retries} attempts (seed {seed}).")


def _same_invariant(first: BracketResult, second: BracketResult) -> bool:
    return sympy.expand(first.normalized - second.normalized) == 0


# ---------------------------------------------------------------------------
# Public API
# ---------------------------------------------------------------------------

def coarse_invariant(signed: StarDiagram, word: BraidWord) -> InvariantCheck:
    """Compare component count and writhe with the closure of *word*."""
    knot_side = {"components": signed.mu, "exponent_sum": sum(signed.signs)}
    braid_side = {"components": closure_components(word), "exponent_sum": exponent_sum(word)}
    if knot_side != braid_side:
        raise InvariantMismatchError(
            f"Knot components/writhe {knot_side} differ from the braid closure's {braid_side}."
        )
    return InvariantCheck(COARSE_METHOD, knot_side, braid_side)


def run(
    request: KnotRequest,
    *,
    seed: int | None = None,
    delta: float | None = None,
    m_max: int | None = None,
) -> KnotBuild:
    """Build and verify the billiard knot of *request*."""
    seed = int(setting("pipeline", "seed", override=seed if seed is not None else request.seed))
    retries = int(setting("pipeline", "retries", override=request.retries))
    delta = delta if delta is not None else request.delta
    m_max = m_max if m_max is not None else request.m_max

    requested = QuasitoricSpec(request.p, request.n, request.signs)
    spec = pad(requested)
    mu = math.gcd(spec.p, spec.n)
    n0, p0 = spec.n // mu, spec.p // mu
    ellipse = Ellipse(request.A, request.B)
    if ellipse.is_circle or ellipse.A < ellipse.B:
        raise RequestError("The billiard table must be an ellipse which is not a circle, with A > B.")
    logger.info("Request p=%d n=%d -> %d component(s) of (%d, %d) polygons", spec.p, spec.n, mu, n0, p0)

    frame = solve_caustic(ellipse, n0, p0)
    phi, attempts, diagram, genericity = _sample_diagram(frame, n0, p0, mu, seed, retries)
    if not is_toric_cyclic(letter_word(diagram), spec.p, spec.n):
        raise DiagramError("Sweep word of the star diagram is not the toric braid.")
    cross_check = elliptic_cross_check(frame, n0, p0, phi)

    signed = assign_signs(diagram, spec.signs)
    plans = assign_all_heights(signed, delta, m_max)
    knot = build_knot3d(signed, plans)
    report = verify(knot)

    word = quasitoric(requested)
    bracket = reference = None
    try:
        bracket = bracket_polynomial(signed)
        reference = bracket_polynomial(closure_crossings(word))
    except TooManyCrossingsError as exc:
        logger.warning("Comparing components and exponent sum only: %s", exc)
        bracket = reference = None
        invariant = coarse_invariant(signed, word)
    else:
        if not _same_invariant(bracket, reference):
            raise InvariantMismatchError(
                f"Knot invariant {bracket.normalized} differs from the braid closure's {reference.normalized}."
            )
        invariant = InvariantCheck(BRACKET_METHOD, bracket.to_dict(), reference.to_dict())
    return KnotBuild(
        request=request,
        spec=spec,
        frame=frame,
        phi=phi,
        attempts=attempts,
        diagram=signed,
        genericity=genericity,
        cross_check=cross_check,
        knot=knot,
        report=report,
        invariant=invariant,
        bracket=bracket,
        reference_bracket=reference,
    )
