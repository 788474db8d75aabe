"""Lift a signed star diagram to a billiard trajectory in the cylinder E × [0, 1].

Each component is parameterised by normalised arc length t ∈ [0, 1) and
given the sawtooth height z(t) = 2|frac(m t + φ) − 1/2|.  Wall bounces keep
the vertical speed and cap bounces flip it, so the polyline through the
polygon vertices plus one cap vertex per sawtooth extremum is a periodic
billiard trajectory.  The search picks the smallest m (and a phase φ) for
which every crossing has its designated over-strand higher by δ.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np
from scipy.optimize import minimize_scalar

from billiard_knots.config_registry import setting
from billiard_knots.errors import (
    DegenerateArcLengthError,
    DiagramError,
    GeometryError,
    InfeasibleHeightsError,
    LiftError,
)
from billiard_knots.models import BilliardKnot3D, ExpectedCrossing, HeightPlan, KnotComponent, VertexEvent
from billiard_knots.modules.diagram_engine import StarDiagram, assign_signs
from billiard_knots.modules.geometry_engine import Ellipse, reflect_direction
from billiard_knots.utils import cross2, frac, sign_of

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HeightProblem:
    """Height constraints of one component, as normalised arc-length times."""

    component: int
    pairs: np.ndarray
    high_times: np.ndarray
    low_times: np.ndarray
    vertex_times: np.ndarray
    passage_times: np.ndarray

    @property
    def constraint_count(self) -> int:
        return len(self.vertex_times) + len(self.passage_times)


@dataclass(frozen=True)
class VerifyReport:
    """Residuals of a 3D billiard trajectory against its expected diagram."""

    wall_residual: float
    cap_residual: float
    closure_residual: float
    containment_residual: float
    crossings_expected: int
    crossings_found: int
    crossing_mismatches: int
    clearance: float
    residual_tolerance: float
    clearance_minimum: float
    closure_tolerance: float
    containment_tolerance: float

    @property
    def passed(self) -> bool:
        return (
            self.wall_residual < self.residual_tolerance
            and self.cap_residual < self.residual_tolerance
            and self.closure_residual < self.closure_tolerance
            and self.containment_residual <= self.containment_tolerance
            and self.crossings_found == self.crossings_expected
            and self.crossing_mismatches == 0
            and self.clearance > self.clearance_minimum
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "passed": self.passed,
            "wall_residual": self.wall_residual,
            "cap_residual": self.cap_residual,
            "closure_residual": self.closure_residual,
            "containment_residual": self.containment_residual,
            "crossings_expected": self.crossings_expected,
            "crossings_found": self.crossings_found,
            "crossing_mismatches": self.crossing_mismatches,
            "clearance": self.clearance,
        }


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def _slack(problem: HeightProblem, m: int, phis: np.ndarray, delta: float, clearance: float) -> np.ndarray:
    """Smallest constraint slack for every phase in *phis* (feasible iff ≥ 0)."""
    phis = np.atleast_1d(phis)[:, None]
    worst = np.full(phis.shape[0], np.inf)
    if len(problem.pairs):
        over = sawtooth(problem.pairs[:, 0][None, :], m, phis)
        under = sawtooth(problem.pairs[:, 1][None, :], m, phis)
        worst = np.minimum(worst, (over - under - delta).min(axis=1))
    if len(problem.high_times):
        worst = np.minimum(worst, (sawtooth(problem.high_times[None, :], m, phis) - 0.5 - delta / 2).min(axis=1))
    if len(problem.low_times):
        worst = np.minimum(worst, (0.5 - delta / 2 - sawtooth(problem.low_times[None, :], m, phis)).min(axis=1))
    z = sawtooth(problem.vertex_times[None, :], m, phis)
    worst = np.minimum(worst, np.minimum(z - delta, 1.0 - delta - z).min(axis=1))
    if len(problem.passage_times):
        z = sawtooth(problem.passage_times[None, :], m, phis)
        worst = np.minimum(worst, (np.minimum(z, 1.0 - z) - 2 * m * clearance).min(axis=1))
    return worst


def _cap_times(plan: HeightPlan) -> list[tuple[float, VertexEvent]]:
    """Extrema of the sawtooth in [0, 1): z = 1 for even k, z = 0 for odd k."""
    m, phi = plan.m, plan.phi_z
    caps = []
    for k in range(math.ceil(2 * phi), math.ceil(2 * m + 2 * phi)):
        t = (k / 2 - phi) / m
        if 0.0 <= t < 1.0:
            caps.append((t, VertexEvent.CAP_TOP if k % 2 == 0 else VertexEvent.CAP_BOTTOM))
    return caps


def _point_at(vertices: np.ndarray, arcs: np.ndarray, t: float) -> np.ndarray:
    closed = np.vstack([vertices, vertices[:1]])
    knots = np.append(arcs, 1.0)
    side = min(int(np.searchsorted(knots, t, side="right")) - 1, len(vertices) - 1)
    fraction = (t - knots[side]) / (knots[side + 1] - knots[side])
    return closed[side] + fraction * (closed[side + 1] - closed[side])


def _segment_distances(p1: np.ndarray, q1: np.ndarray, p2: np.ndarray, q2: np.ndarray) -> np.ndarray:
    """Row-wise closest distance between 3D segments [p1, q1] and [p2, q2]."""
    d1, d2, r = q1 - p1, q2 - p2, p1 - p2
    a = np.einsum("ij,ij->i", d1, d1)
    e = np.einsum("ij,ij->i", d2, d2)
    b = np.einsum("ij,ij->i", d1, d2)
    c = np.einsum("ij,ij->i", d1, r)
    f = np.einsum("ij,ij->i", d2, r)
    denom = a * e - b * b
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(denom > 1e-30, np.clip((b * f - c * e) / denom, 0.0, 1.0), 0.0)
        t = (b * s + f) / e
        s = np.where(t < 0.0, np.clip(-c / a, 0.0, 1.0), np.where(t > 1.0, np.clip((b - c) / a, 0.0, 1.0), s))
        t = np.clip(t, 0.0, 1.0)
    gap = (p1 + s[:, None] * d1) - (p2 + t[:, None] * d2)
    return np.linalg.norm(gap, axis=1)


def _horizontal_step(first: np.ndarray, second: np.ndarray) -> tuple[np.ndarray, float, float]:
    """Unit xy direction, xy length and z-rise of the segment first → second."""
    step = second[:2] - first[:2]
    length = float(np.linalg.norm(step))
    return step / length, length, float(second[2] - first[2])


def _bounce_residuals(knot: BilliardKnot3D, ellipse: Ellipse) -> tuple[float, float]:
    wall, cap = 0.0, 0.0
    for component in knot.components:
        points = component.points[:-1]
        count = len(points)
        perimeter = float(np.sum(np.linalg.norm(np.diff(component.points[:, :2], axis=0), axis=1)))
        slope_scale = 2 * component.plan.m / perimeter
        for i, event in enumerate(component.events):
            before, here, after = points[i - 1], points[i], points[(i + 1) % count]
            d_in, len_in, rise_in = _horizontal_step(before, here)
            d_out, len_out, rise_out = _horizontal_step(here, after)
            slope_in, slope_out = rise_in / len_in, rise_out / len_out
            if event is VertexEvent.WALL:
                try:
                    expected = reflect_direction(ellipse, here[:2], d_in)
                    turn = float(np.linalg.norm(d_out - expected))
                except GeometryError:
                    turn = math.inf
                height = 0.0 if 0.0 < here[2] < 1.0 else 1.0
                wall = max(
                    wall,
                    turn,
                    abs(slope_out - slope_in) / slope_scale,
                    abs(ellipse.value(here[:2]) - 1.0),
                    height,
                )
            else:
                target = 1.0 if event is VertexEvent.CAP_TOP else 0.0
                inside = 0.0 if ellipse.value(here[:2]) < 1.0 else 1.0
                cap = max(
                    cap,
                    float(np.linalg.norm(d_out - d_in)),
                    abs(slope_out + slope_in) / slope_scale,
                    abs(here[2] - target),
                    inside,
                )
    return wall, cap


def _projected_crossings(knot: BilliardKnot3D) -> list[tuple[np.ndarray, int, float]]:
    """Proper xy crossings of non-adjacent segments: point, handedness, height gap."""
    starts, ends, owners = [], [], []
    for c, component in enumerate(knot.components):
        count = len(component.points) - 1
        for i in range(count):
            starts.append(component.points[i])
            ends.append(component.points[i + 1])
            owners.append((c, i, count))
    starts_arr, ends_arr = np.array(starts), np.array(ends)
    r = ends_arr[:, :2] - starts_arr[:, :2]
    found: list[tuple[np.ndarray, int, float]] = []
    for a in range(len(starts)):
        diff = starts_arr[a + 1:, :2] - starts_arr[a, :2]
        denom = r[a, 0] * r[a + 1:, 1] - r[a, 1] * r[a + 1:, 0]
        with np.errstate(divide="ignore", invalid="ignore"):
            s = (diff[:, 0] * r[a + 1:, 1] - diff[:, 1] * r[a + 1:, 0]) / denom
            u = (diff[:, 0] * r[a, 1] - diff[:, 1] * r[a, 0]) / denom
        hits = np.nonzero((np.abs(denom) > 1e-15) & (s > 0.0) & (s < 1.0) & (u > 0.0) & (u < 1.0))[0]
        for offset in hits:
            b = a + 1 + int(offset)
            (ca, ia, count), (cb, ib, _) = owners[a], owners[b]
            if ca == cb and (ib - ia) % count in (1, count - 1):
                continue
            za = starts_arr[a, 2] + s[offset] * (ends_arr[a, 2] - starts_arr[a, 2])
            zb = starts_arr[b, 2] + u[offset] * (ends_arr[b, 2] - starts_arr[b, 2])
            over, under = (a, b) if za > zb else (b, a)
            handedness = sign_of(cross2(r[over], r[under]))
            point = starts_arr[a, :2] + s[offset] * r[a]
            found.append((point, handedness, float(abs(za - zb))))
    return found


def _min_clearance(knot: BilliardKnot3D) -> float:
    segments = []
    for c, component in enumerate(knot.components):
        count = len(component.points) - 1
        segments += [(c, i, count, component.points[i], component.points[i + 1]) for i in range(count)]
    left, right = [], []
    for x in range(len(segments)):
        cx, ix, count, _, _ = segments[x]
        for y in range(x + 1, len(segments)):
            cy, iy, _, _, _ = segments[y]
            if cx == cy and (iy - ix) % count in (0, 1, count - 1):
                continue
            left.append(x)
            right.append(y)
    if not left:
        return math.inf
    p = np.array([segment[3] for segment in segments])
    q = np.array([segment[4] for segment in segments])
    return float(_segment_distances(p[left], q[left], p[right], q[right]).min())


# ---------------------------------------------------------------------------
# Public API
# ---------------------------------------------------------------------------

def sawtooth(t: float | np.ndarray, m: int, phi_z: float | np.ndarray) -> float | np.ndarray:
    """z(t) = 2|frac(m t + φ) − 1/2|, in [0, 1] with period 1/m."""
    if m < 1:
        raise LiftError(f"Sawtooth frequency must be >= 1, got {m}.")
    return 2.0 * np.abs(frac(m * np.asarray(t) + phi_z) - 0.5)


def height_problem(d: StarDiagram, component: int = 0) -> HeightProblem:
    """Collect the timed constraints of *component* from a signed diagram."""
    if not 0 <= component < d.mu:
        raise LiftError(f"Diagram has no component {component}.")
    pairs, high, low, passages = [], [], [], []
    for crossing in d.crossings:
        if crossing.over is None:
            raise DiagramError("Assign signs before lifting the diagram.")
        over, under = crossing.over_passage, crossing.under_passage
        if over.component == component:
            passages.append(over.t)
        if under.component == component:
            passages.append(under.t)
        if over.component == under.component == component:
            pairs.append((over.t, under.t))
        elif over.component == component:
            high.append(over.t)
        elif under.component == component:
            low.append(under.t)
    vertex_times = np.asarray(d.vertex_arcs[component], dtype=float)
    times = np.sort(np.concatenate([vertex_times, passages]))
    if len(times) > 1 and float(np.min(np.diff(times))) < 1e-12:
        raise DegenerateArcLengthError(f"Two constraint times of component {component} coincide.")
    return HeightProblem(
        component=component,
        pairs=np.array(pairs, dtype=float).reshape(-1, 2),
        high_times=np.array(high, dtype=float),
        low_times=np.array(low, dtype=float),
        vertex_times=vertex_times,
        passage_times=np.array(passages, dtype=float),
    )


def solve_heights(problem: HeightProblem, delta: float | None = None, m_max: int | None = None) -> HeightPlan:
    """Smallest m ≤ m_max with a phase satisfying every constraint of *problem*."""
    delta = float(setting("lift", "delta", override=delta))
    m_max = int(setting("lift", "m_max", override=m_max))
    if not 0.0 < delta < 0.25:
        raise LiftError(f"delta must satisfy 0 < delta < 1/4, got {delta}.")
    if m_max < 1:
        raise LiftError("m_max must be >= 1.")
    grid_factor = int(setting("lift", "grid_factor"))
    max_points = int(setting("lift", "max_grid_points"))
    clearance = float(setting("lift", "extremum_clearance"))

    best = (0, 0.0, -math.inf)
    for m in range(1, m_max + 1):
        points = min(grid_factor * m * max(problem.constraint_count, 1), max_points)
        grid = np.arange(points) / points
        values = _slack(problem, m, grid, delta, clearance)
        index = int(np.argmax(values))
        phi, value = float(grid[index]), float(values[index])
        if value < 0.0:
            step = 1.0 / points
            refined = minimize_scalar(
                lambda x: -float(_slack(problem, m, np.array([x]), delta, clearance)[0]),
                bounds=(phi - step, phi + step),
                method="bounded",
                options={"xatol": 1e-12},
            )
            if -refined.fun > value:
                phi, value = float(refined.x) % 1.0, float(-refined.fun)
        if value > best[2]:
            best = (m, phi, delta + value)
        if value >= 0.0:
            logger.info(
                "Heights for component %d: m=%d phi=%.12f margin=%.4g",
                problem.component, m, phi, delta + value,
            )
            return HeightPlan(m=m, phi_z=phi, margin=delta + value, component_index=problem.component)
    raise InfeasibleHeightsError(
        f"No frequency m <= {m_max} realises the crossing pattern of component {problem.component} "
        f"(best m={best[0]}, phi={best[1]:.6f}, margin={best[2]:.4g}).",
        best,
    )


def assign_heights(
    d: StarDiagram,
    pattern: Sequence[int] | None = None,
    delta: float | None = None,
    m_max: int | None = None,
    *,
    component: int = 0,
) -> HeightPlan:
    """Height plan for one component; *pattern* gives braid-letter signs if not yet assigned."""
    if pattern is not None:
        d = assign_signs(d, pattern)
    return solve_heights(height_problem(d, component), delta, m_max)


def assign_all_heights(d: StarDiagram, delta: float | None = None, m_max: int | None = None) -> list[HeightPlan]:
    return [solve_heights(height_problem(d, c), delta, m_max) for c in range(d.mu)]


def build_knot3d(d: StarDiagram, plans: Sequence[HeightPlan]) -> BilliardKnot3D:
    """Wall vertices at the polygon corners, cap vertices at the sawtooth extrema."""
    if len(plans) != d.mu:
        raise LiftError(f"Need one height plan per component ({d.mu}), got {len(plans)}.")
    if d.signs is None:
        raise DiagramError("Assign signs before building the trajectory.")
    components = []
    for c, (poly, plan) in enumerate(zip(d.polygons, plans)):
        arcs = np.asarray(d.vertex_arcs[c], dtype=float)
        events = [(float(t), VertexEvent.WALL) for t in arcs] + _cap_times(plan)
        events.sort(key=lambda item: item[0])
        points = []
        for t, kind in events:
            if kind is VertexEvent.WALL:
                xy = poly.vertices[int(np.searchsorted(arcs, t))]
            else:
                xy = _point_at(poly.vertices, arcs, t)
            points.append((float(xy[0]), float(xy[1]), float(sawtooth(t, plan.m, plan.phi_z))))
        points.append(points[0])
        components.append(
            KnotComponent(points=np.array(points), events=[kind for _, kind in events], plan=plan)
        )
    expected = [
        ExpectedCrossing(x=float(crossing.point[0]), y=float(crossing.point[1]), handedness=int(crossing.handedness))
        for crossing in d.crossings
    ]
    base = d.frame.base
    return BilliardKnot3D(A=base.A, B=base.B, components=components, expected_crossings=expected)


def project(k: BilliardKnot3D) -> list[np.ndarray]:
    """Per-component xy polylines (closed, coordinate erasure)."""
    return [component.points[:, :2].copy() for component in k.components]


def verify(k: BilliardKnot3D) -> VerifyReport:
    """Check reflection laws, closure, containment, crossing signs and clearance.

    The closure residual compares the repeated closing point with the
    first one.  :func:`build_knot3d` appends a copy of the first point, so
    the term is zero for a fresh knot and only catches knots loaded from
    or edited in a file.
    """
    config = setting("lift", "verify")
    ellipse = Ellipse(k.A, k.B)
    wall, cap = _bounce_residuals(k, ellipse)

    closure = max(float(np.linalg.norm(c.points[-1] - c.points[0])) for c in k.components)
    stacked = np.vstack([c.points for c in k.components])
    containment = max(
        0.0,
        float(-stacked[:, 2].min()),
        float(stacked[:, 2].max() - 1.0),
        float(((stacked[:, 0] / k.A) ** 2 + (stacked[:, 1] / k.B) ** 2).max() - 1.0),
    )

    match_tolerance = float(config["crossing_match_tolerance"])
    found: list[tuple[np.ndarray, int, float]] = []
    for point, handedness, gap in _projected_crossings(k):
        if all(np.linalg.norm(point - other) > match_tolerance for other, _, _ in found):
            found.append((point, handedness, gap))
    mismatches = 0
    for crossing in k.expected_crossings:
        target = np.array([crossing.x, crossing.y])
        matches = [h for point, h, _ in found if np.linalg.norm(point - target) <= match_tolerance]
        if len(matches) != 1 or matches[0] != crossing.handedness:
            mismatches += 1

    report = VerifyReport(
        wall_residual=wall,
        cap_residual=cap,
        closure_residual=closure,
        containment_residual=containment,
        crossings_expected=len(k.expected_crossings),
        crossings_found=len(found),
        crossing_mismatches=mismatches,
        clearance=_min_clearance(k),
        residual_tolerance=float(config["residual_tolerance"]),
        clearance_minimum=float(config["clearance_minimum"]),
        closure_tolerance=float(config["closure_tolerance"]),
        containment_tolerance=float(config["containment_tolerance"]),
    )
    if not report.passed:
        logger.warning("Knot verification failed: %s", report.to_dict())
    return report
