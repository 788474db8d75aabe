"""Star-polygon knot diagrams built from billiard polygons.

The sides of one polygon (or of the μ polygons of a link) are tangent to
the caustic, which the Jacobi frame maps to the unit circle.  Ordering
the sides by the angle of their tangency point gives N = μn slots; side
``s`` crosses exactly the sides ``s ± j`` with 1 ≤ j ≤ P − 1 (P = μp), and
that crossing sits on radial level j.  Read along the angular sweep the
levels spell the toric braid τ_{P,N} up to commuting letters, which is
how braid signs are attached to crossings.

The module also carries the two independent checks of a diagram: the
elliptic closed form of the crossing positions and a finite integer
relation search over the arc lengths.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass, replace
from typing import Any

import mpmath
import numpy as np
import sympy

from billiard_knots.config_registry import setting
from billiard_knots.constants import MAX_STATE_SUM_CROSSINGS
from billiard_knots.errors import (
    CrossCheckError,
    DegenerateDiagramError,
    DiagramError,
    GeometryError,
    TooManyCrossingsError,
)
from billiard_knots.modules.braid_engine import ClosureDiagram, OrientedCrossing
from billiard_knots.modules.elliptic_engine import jacobi_sn_cn_dn, sine_amplitude_rhs
from billiard_knots.modules.poncelet_engine import JacobiFrame, PonceletPolygon, polygon
from billiard_knots.utils import Point, cross2, sign_of

logger = logging.getLogger(__name__)

A = sympy.Symbol("A")
"""Variable of the bracket polynomial."""

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Passage:
    """One strand through a crossing."""

    component: int
    side: int
    t: float
    direction: np.ndarray


@dataclass(frozen=True)
class Crossing:
    """Proper intersection of the sides in slots ``slot`` and ``slot + offset``."""

    point: Point
    first: Passage
    second: Passage
    slot: int
    offset: int
    level: int
    angle: float
    over: int | None = None

    @property
    def h(self) -> int:
        return self.slot

    @property
    def j(self) -> int:
        return self.offset

    @property
    def passages(self) -> tuple[Passage, Passage]:
        return (self.first, self.second)

    @property
    def over_passage(self) -> Passage:
        if self.over is None:
            raise DiagramError("Crossing has no over/under assignment yet.")
        return self.passages[self.over]

    @property
    def under_passage(self) -> Passage:
        if self.over is None:
            raise DiagramError("Crossing has no over/under assignment yet.")
        return self.passages[1 - self.over]

    @property
    def handedness(self) -> int | None:
        if self.over is None:
            return None
        return sign_of(cross2(self.over_passage.direction, self.under_passage.direction))

    @property
    def is_self_crossing(self) -> bool:
        return self.first.component == self.second.component

    def to_dict(self) -> dict[str, Any]:
        return {
            "point": [float(self.point[0]), float(self.point[1])],
            "slot": self.slot,
            "offset": self.offset,
            "level": self.level,
            "angle": self.angle,
            "passages": [
                {"component": item.component, "side": item.side, "t": repr(item.t)}
                for item in self.passages
            ],
            "handedness": self.handedness,
        }


@dataclass(frozen=True)
class StarDiagram:
    """Crossings of a star diagram in sweep order, with normalised arc lengths."""

    polygons: tuple[PonceletPolygon, ...]
    n: int
    p: int
    crossings: tuple[Crossing, ...]
    vertex_arcs: tuple[np.ndarray, ...]
    lengths: tuple[float, ...]
    cut_angle: float
    orientation: int

    @property
    def polygon(self) -> PonceletPolygon:
        return self.polygons[0]

    @property
    def frame(self) -> JacobiFrame:
        return self.polygons[0].frame

    @property
    def mu(self) -> int:
        return len(self.polygons)

    @property
    def signs(self) -> tuple[int, ...] | None:
        if any(crossing.over is None for crossing in self.crossings):
            return None
        return tuple(int(crossing.handedness) for crossing in self.crossings)

    def to_dict(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "p": self.p,
            "lengths": list(self.lengths),
            "vertex_arcs": [[repr(float(t)) for t in arcs] for arcs in self.vertex_arcs],
            "crossings": [crossing.to_dict() for crossing in self.crossings],
        }


@dataclass(frozen=True)
class CrossCheckResult:
    max_residual: float
    worst: tuple[int, int]
    sine_amplitude_residual: float
    checked: int
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_residual < self.tolerance


@dataclass(frozen=True)
class IntegerRelation:
    """q₀ + Σ qᵢ tᵢ ≈ 0 over the labelled arc lengths."""

    coefficients: tuple[int, ...]
    labels: tuple[str, ...]
    residual: float

    def __str__(self) -> str:
        terms = [str(self.coefficients[0])]
        terms += [f"{q}*t[{label}]" for q, label in zip(self.coefficients[1:], self.labels)]
        return " + ".join(terms) + " = 0"


@dataclass(frozen=True)
class GenericityReport:
    """Outcome of the finite integer-relation search over arc lengths."""

    relation: IntegerRelation | None
    checked_values: int
    mirror_pairs: int
    qmax: int
    eps: float
    caustic_ratio: float
    eccentricity_hypothesis: bool

    @property
    def passed(self) -> bool:
        return self.relation is None

    def to_dict(self) -> dict[str, Any]:
        return {
            "passed": self.passed,
            "relation": None if self.relation is None else str(self.relation),
            "checked_values": self.checked_values,
            "mirror_pairs": self.mirror_pairs,
            "qmax": self.qmax,
            "eps": self.eps,
            "caustic_ratio": self.caustic_ratio,
            "eccentricity_hypothesis": self.eccentricity_hypothesis,
        }


@dataclass(frozen=True)
class BracketResult:
    bracket: sympy.Expr
    writhe: int
    normalized: sympy.Expr

    def to_dict(self) -> dict[str, Any]:
        return {"bracket": str(self.bracket), "writhe": self.writhe, "normalized": str(self.normalized)}


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def _proper_hits(starts: np.ndarray, ends: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Index pairs (i < j) of segments meeting at interior points, with both parameters."""
    r = ends - starts
    denom = r[:, None, 0] * r[None, :, 1] - r[:, None, 1] * r[None, :, 0]
    diff = starts[None, :, :] - starts[:, None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        s = (diff[..., 0] * r[None, :, 1] - diff[..., 1] * r[None, :, 0]) / denom
        u = (diff[..., 0] * r[:, None, 1] - diff[..., 1] * r[:, None, 0]) / denom
    hit = (np.abs(denom) > 1e-15) & (s > 0.0) & (s < 1.0) & (u > 0.0) & (u < 1.0)
    hit &= np.triu(np.ones_like(hit, dtype=bool), k=1)
    i, j = np.nonzero(hit)
    return i, j, s[i, j], u[i, j]


def _crossing_count(point: Point, starts: np.ndarray, ends: np.ndarray, skip: tuple[int, int]) -> int:
    """Sides met properly by the open segment from the centre to *point*."""
    r = ends - starts
    denom = point[0] * r[:, 1] - point[1] * r[:, 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        s = (starts[:, 0] * r[:, 1] - starts[:, 1] * r[:, 0]) / denom
        u = (starts[:, 0] * point[1] - starts[:, 1] * point[0]) / denom
    hit = (np.abs(denom) > 1e-15) & (s > 0.0) & (s < 1.0) & (u > 0.0) & (u < 1.0)
    hit[list(skip)] = False
    return int(np.count_nonzero(hit))


def _scaled(value: float, reference: float) -> float:
    return abs(value - reference) / max(1.0, abs(reference))


def _trace_equal(word: Sequence[int], other: Sequence[int], strands: int) -> bool:
    """Equal up to commuting σ_i, σ_k with |i − k| ≥ 2 (projection test)."""
    if Counter(word) != Counter(other):
        return False
    for i in range(1, strands - 1):
        pair = (i, i + 1)
        if [x for x in word if x in pair] != [x for x in other if x in pair]:
            return False
    return True


def _pd_tuple(crossing: OrientedCrossing) -> tuple[int, int, int, int]:
    """Edge labels counterclockwise from the incoming under-strand."""
    if crossing.sign > 0:
        return (crossing.under_in, crossing.over_out, crossing.under_out, crossing.over_in)
    return (crossing.under_in, crossing.over_in, crossing.under_out, crossing.over_out)


def _count_loops(pd: list[tuple[int, int, int, int]], state: int, size: int) -> int:
    parent = list(range(size))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x: int, y: int) -> None:
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[rx] = ry

    for k, (a, b, c, d) in enumerate(pd):
        if state >> k & 1:
            union(a, d)
            union(b, c)
        else:
            union(a, b)
            union(c, d)
    return len({find(x) for x in range(size)})


def _is_mirror_pair(crossing: Crossing, n0: int, eps: float) -> bool:
    """Sides i and n0 − 1 − i of one polygon, with passage times summing to 1.

    Equal-length billiard paths from V₀ to such a crossing force
    t_a + t_b = 1 for every start parameter.
    """
    first, second = crossing.passages
    return (
        crossing.is_self_crossing
        and (first.side + second.side) % n0 == n0 - 1
        and abs(first.t + second.t - 1.0) <= eps
    )


def _component_values(d: StarDiagram, component: int, eps: float) -> tuple[list[float], list[str], int]:
    """Vertex and passage times of one component; a mirror pair contributes one time."""
    n0 = d.polygons[component].n
    values = [float(t) for t in d.vertex_arcs[component][1:]]
    labels = [f"c{component}:v{i}" for i in range(1, len(d.vertex_arcs[component]))]
    mirrored = 0
    for index, crossing in enumerate(d.crossings):
        if crossing.first.component == component and _is_mirror_pair(crossing, n0, eps):
            mirrored += 1
            values.append(crossing.first.t)
            labels.append(f"c{component}:x{index}.0")
            continue
        for role, passage in enumerate(crossing.passages):
            if passage.component == component:
                values.append(passage.t)
                labels.append(f"c{component}:x{index}.{role}")
    return values, labels, mirrored


# ---------------------------------------------------------------------------
# Public API
# ---------------------------------------------------------------------------

def build_diagram(
    polygons: PonceletPolygon | Sequence[PonceletPolygon],
    *,
    tolerance: float | None = None,
) -> StarDiagram:
    """Enumerate, level and sweep-sort the crossings of one polygon or a link."""
    polys = (polygons,) if isinstance(polygons, PonceletPolygon) else tuple(polygons)
    if not polys:
        raise DiagramError("Need at least one polygon.")
    head = polys[0]
    if any(poly.n != head.n or poly.p != head.p or poly.frame != head.frame for poly in polys):
        raise DiagramError("Link components must share n, p and the caustic frame.")
    if head.n % 2 == 0:
        logger.warning("Even n=%d: the diagram is built for inspection only.", head.n)
    tolerance = float(setting("diagram", "degeneracy_tolerance", override=tolerance))
    frame = head.frame
    n0 = head.n
    N, P = len(polys) * n0, len(polys) * head.p

    starts, ends, touches, owners = [], [], [], []
    cumulative, seg_lengths, lengths, vertex_arcs = [], [], [], []
    for c, poly in enumerate(polys):
        ahead = np.roll(poly.vertices, -1, axis=0)
        segments = np.linalg.norm(ahead - poly.vertices, axis=1)
        total = float(segments.sum())
        cum = np.concatenate([[0.0], np.cumsum(segments)[:-1]])
        lengths.append(total)
        vertex_arcs.append(cum / total)
        cumulative.append(cum)
        seg_lengths.append(segments)
        for i in range(n0):
            starts.append(poly.vertices[i])
            ends.append(ahead[i])
            touches.append(poly.tangency_points[(i + 1) % n0])
            owners.append((c, i))
    starts_arr, ends_arr = np.array(starts), np.array(ends)

    normalized_touches = np.array(touches) @ frame.forward_matrix.T
    cut_x, cut_y = frame.to_normalized(head.tangency_points[0])
    cut = math.atan2(cut_y, cut_x)
    first_two = head.normalized_vertices()[:2]
    orientation = sign_of(cross2(first_two[0], first_two[1]))

    def sweep(angle: float | np.ndarray) -> float | np.ndarray:
        return np.mod(orientation * (angle - cut), TWO_PI)

    touch_angles = sweep(np.arctan2(normalized_touches[:, 1], normalized_touches[:, 0]))
    slot_of = np.empty(N, dtype=int)
    slot_of[np.argsort(touch_angles, kind="stable")] = np.arange(N)

    def passage(side: int, fraction: float) -> Passage:
        c, i = owners[side]
        t = (cumulative[c][i] + fraction * seg_lengths[c][i]) / lengths[c]
        vector = ends_arr[side] - starts_arr[side]
        return Passage(component=c, side=i, t=float(t), direction=vector / np.linalg.norm(vector))

    crossings = []
    for a, b, s, u in zip(*_proper_hits(starts_arr, ends_arr)):
        (ca, ia), (cb, ib) = owners[a], owners[b]
        if ca == cb and (ib - ia) % n0 in (1, n0 - 1):
            continue
        point = starts_arr[a] + s * (ends_arr[a] - starts_arr[a])
        gap = int(slot_of[b] - slot_of[a]) % N
        if 1 <= gap <= P - 1:
            first, second, offset = passage(a, s), passage(b, u), gap
            slot = int(slot_of[a])
        elif 1 <= N - gap <= P - 1:
            first, second, offset = passage(b, u), passage(a, s), N - gap
            slot = int(slot_of[b])
        else:
            raise DiagramError(f"Sides in slots {slot_of[a]} and {slot_of[b]} cross outside the star band.")
        normalized = frame.to_normalized(point)
        crossings.append(
            Crossing(
                point=point,
                first=first,
                second=second,
                slot=slot,
                offset=offset,
                level=1 + _crossing_count(point, starts_arr, ends_arr, (int(a), int(b))),
                angle=float(sweep(math.atan2(normalized[1], normalized[0]))),
            )
        )

    expected = N * (P - 1)
    if len(crossings) != expected:
        raise DegenerateDiagramError(f"Found {len(crossings)} crossings, expected n(p-1) = {expected}.")
    if crossings:
        points = np.array([crossing.point for crossing in crossings])
        pairwise = np.linalg.norm(points[:, None, :] - points[None, :, :], axis=2)
        np.fill_diagonal(pairwise, np.inf)
        if float(pairwise.min()) < tolerance:
            raise DegenerateDiagramError(f"Two crossings coincide within {tolerance:g}.")
        if float(np.linalg.norm(points[:, None, :] - starts_arr[None, :, :], axis=2).min()) < tolerance:
            raise DegenerateDiagramError(f"A crossing lies within {tolerance:g} of a vertex.")
    crossings.sort(key=lambda crossing: (crossing.angle, crossing.level))
    logger.debug("Star diagram N=%d P=%d: %d crossings, cut %.6f", N, P, len(crossings), cut)
    return StarDiagram(
        polygons=polys,
        n=N,
        p=P,
        crossings=tuple(crossings),
        vertex_arcs=tuple(vertex_arcs),
        lengths=tuple(lengths),
        cut_angle=cut,
        orientation=orientation,
    )


def letter_word(d: StarDiagram) -> tuple[int, ...]:
    """Crossing levels in sweep order."""
    return tuple(crossing.level for crossing in d.crossings)


def is_toric_cyclic(levels: Sequence[int], p: int, n: int) -> bool:
    """Whether *levels* is a cyclic rotation of τ_{p,n} up to commuting letters."""
    toric_levels = [k % (p - 1) + 1 for k in range(n * (p - 1))]
    if len(levels) != len(toric_levels):
        return False
    if not toric_levels:
        return True
    word = list(levels)
    targets = [toric_levels[k:] + toric_levels[:k] for k in range(p - 1)]
    return any(
        _trace_equal(word[shift:] + word[:shift], target, p)
        for shift in range(len(word))
        for target in targets
    )


def assign_signs(d: StarDiagram, signs: Sequence[int]) -> StarDiagram:
    """Choose over/under so the crossing (slot s, offset j) has the sign of letter (s, j).

    Letter (s, j) is σ_j in period s of τ_{P,N}; rotating the cut only
    conjugates the braid, so the alignment is fixed by slot.
    """
    expected = d.n * (d.p - 1)
    if len(signs) != expected:
        raise DiagramError(f"Need {expected} signs for this diagram, got {len(signs)}.")
    if any(sign not in (1, -1) for sign in signs):
        raise DiagramError("Signs must all be +1 or -1.")
    updated = []
    for crossing in d.crossings:
        wanted = int(signs[crossing.slot * (d.p - 1) + crossing.offset - 1])
        geometric = sign_of(cross2(crossing.first.direction, crossing.second.direction))
        updated.append(replace(crossing, over=0 if geometric == wanted else 1))
    return replace(d, crossings=tuple(updated))


def diagram_code(d: StarDiagram) -> ClosureDiagram:
    """Oriented crossing code; edges run between consecutive passages of a component."""
    incoming: dict[tuple[int, int], int] = {}
    outgoing: dict[tuple[int, int], int] = {}
    next_label = 1
    free_loops = 0
    for component in range(d.mu):
        events = sorted(
            (passage.t, index, role)
            for index, crossing in enumerate(d.crossings)
            for role, passage in enumerate(crossing.passages)
            if passage.component == component
        )
        if not events:
            free_loops += 1
            continue
        labels = list(range(next_label, next_label + len(events)))
        next_label += len(events)
        for k, (_, index, role) in enumerate(events):
            outgoing[(index, role)] = labels[k]
            incoming[(index, role)] = labels[k - 1]

    crossings = []
    for index, crossing in enumerate(d.crossings):
        if crossing.over is None:
            raise DiagramError("Assign signs before encoding the diagram.")
        over, under = (index, crossing.over), (index, 1 - crossing.over)
        crossings.append(
            OrientedCrossing(
                over_in=incoming[over],
                over_out=outgoing[over],
                under_in=incoming[under],
                under_out=outgoing[under],
                sign=int(crossing.handedness),
            )
        )
    return ClosureDiagram(crossings=tuple(crossings), free_loops=free_loops)


def bracket_polynomial(diagram: StarDiagram | ClosureDiagram) -> BracketResult:
    """Kauffman bracket by the 2^c state sum, with the writhe-normalised form."""
    code = diagram_code(diagram) if isinstance(diagram, StarDiagram) else diagram
    crossings = code.crossings
    if not crossings and code.free_loops == 0:
        raise DiagramError("The empty diagram has no bracket.")
    if len(crossings) > MAX_STATE_SUM_CROSSINGS:
        raise TooManyCrossingsError(
            f"{len(crossings)} crossings exceed the state-sum bound of {MAX_STATE_SUM_CROSSINGS}."
        )
    labels = sorted({label for crossing in crossings for label in _pd_tuple(crossing)})
    index = {label: k for k, label in enumerate(labels)}
    pd = [tuple(index[label] for label in _pd_tuple(crossing)) for crossing in crossings]

    count = len(pd)
    tally: Counter[tuple[int, int]] = Counter()
    for state in range(1 << count):
        b_smoothings = bin(state).count("1")
        loops = _count_loops(pd, state, len(labels)) + code.free_loops
        tally[(count - 2 * b_smoothings, loops)] += 1

    delta = -A ** 2 - A ** -2
    bracket = sympy.expand(
        sum((weight * A ** power * delta ** (loops - 1) for (power, loops), weight in tally.items()), sympy.Integer(0))
    )
    writhe = sum(crossing.sign for crossing in crossings)
    normalized = sympy.expand((-A ** 3) ** (-writhe) * bracket)
    logger.debug("Bracket over %d states: writhe %d, normalized %s", 1 << count, writhe, normalized)
    return BracketResult(bracket=bracket, writhe=writhe, normalized=normalized)


def elliptic_cross_check(
    frame: JacobiFrame,
    n: int,
    p: int,
    phi: float,
    *,
    offsets: Sequence[int] | None = None,
    min_sn: float | None = None,
) -> CrossCheckResult:
    """Compare the closed-form crossing positions with plane geometry.

    In the frame (y, x)/c₂ the caustic is (cn z, c sn z) with c = c₁/c₂ and
    the tangents at z and z + jθ meet at abscissa F_j(z); the distance
    along ℓ_h from its vertex follows from F_{−1}(z) − F_j(z).
    """
    poly = polygon(frame, n, p, phi)
    min_sn = float(setting("diagram", "min_sn", override=min_sn))
    tolerance = float(setting("diagram", "cross_check_tolerance"))
    if offsets is None:
        offsets = [j for j in range(1, n) if 2 * j != n]
    modulus = frame.modulus
    theta, beta = frame.theta, frame.beta
    c = frame.c1 / frame.c2
    lines = poly.side_lines()

    def determinant(z: float, j: int) -> tuple[float, float]:
        here = jacobi_sn_cn_dn(z, modulus)
        there = jacobi_sn_cn_dn(z + j * theta, modulus)
        return there.sn * here.cn - there.cn * here.sn, there.sn - here.sn

    worst, max_residual, amplitude_residual, checked = (0, 0), 0.0, 0.0, 0
    for h in range(n):
        z = phi + h * theta
        sn_z = jacobi_sn_cn_dn(z, modulus).sn
        if abs(sn_z) < min_sn:
            logger.debug("Skipping h=%d: sn(z) = %.3g", h, sn_z)
            continue
        d_back, rise_back = determinant(z, -1)
        x_vertex = rise_back / d_back
        stretch = math.sqrt(c * c + (1.0 - c * c) * sn_z * sn_z) / abs(sn_z)
        vertex = poly.vertices[(h - 1) % n]
        for j in offsets:
            if j % n == 0:
                raise CrossCheckError(f"Offset j={j} is a multiple of n={n}.", (h, j))
            d_j, rise = determinant(z, j)
            amplitude_residual = max(
                amplitude_residual, abs(d_j - sine_amplitude_rhs(j * beta, z + j * beta, modulus))
            )
            if abs(d_j) < 1e-12:
                raise CrossCheckError(f"Tangents h={h} and h+{j} are parallel.", (h, j))
            x_cross = rise / d_j
            try:
                q = lines[(h - 1) % n].intersection(lines[(h + j - 1) % n])
            except GeometryError as exc:
                raise CrossCheckError(f"Tangents h={h} and h+{j} are parallel.", (h, j)) from exc
            distance = stretch * abs(x_vertex - x_cross) * frame.c2
            residual = max(
                _scaled(distance, float(np.linalg.norm(q - vertex))),
                _scaled(x_cross, float(q[1]) / frame.c2),
            )
            checked += 1
            if residual > max_residual:
                max_residual, worst = residual, (h, j)
    if max_residual >= tolerance:
        logger.warning("Elliptic cross-check residual %.3g at (h, j) = %s", max_residual, worst)
    return CrossCheckResult(
        max_residual=max_residual,
        worst=worst,
        sine_amplitude_residual=amplitude_residual,
        checked=checked,
        tolerance=tolerance,
    )


def relation_search(
    values: Sequence[float],
    qmax: int,
    eps: float,
    *,
    max_support: int = 2,
    labels: Sequence[str] | None = None,
) -> IntegerRelation | None:
    """First relation q₀ + Σ qᵢtᵢ = 0, |qᵢ| ≤ qmax, over at most *max_support* values."""
    if max_support not in (1, 2):
        raise DiagramError("Relation support must be 1 or 2 values.")
    labels = list(labels) if labels is not None else [str(i) for i in range(len(values))]
    if len(labels) != len(values):
        raise DiagramError("Need one label per value.")
    for i, value in enumerate(values):
        if abs(value) < eps:
            return IntegerRelation((0, 1), (labels[i],), abs(float(value)))

    supports: list[tuple[int, ...]] = [(i,) for i in range(len(values))]
    if max_support == 2:
        supports += list(itertools.combinations(range(len(values)), 2))
    with mpmath.workdps(int(setting("diagram", "genericity", "working_dps"))):
        for support in supports:
            vector = [mpmath.mpf(1)] + [mpmath.mpf(values[i]) for i in support]
            found = mpmath.pslq(vector, tol=mpmath.mpf(eps), maxcoeff=qmax + 1, maxsteps=10_000)
            if found is None or max(abs(int(q)) for q in found) > qmax:
                continue
            coefficients = tuple(int(q) for q in found)
            residual = abs(coefficients[0] + sum(q * values[i] for q, i in zip(coefficients[1:], support)))
            if residual <= eps:
                return IntegerRelation(coefficients, tuple(labels[i] for i in support), float(residual))
    return None


def genericity_report(d: StarDiagram, qmax: int | None = None, eps: float | None = None) -> GenericityReport:
    """Heuristic check that 1 and the arc lengths of each component are independent.

    Arc lengths are measured from V₀, so a crossing of sides i and n − 1 − i
    has t_a + t_b = 1 for every φ.  Only one time of such a pair enters the
    search, and ``GenericityReport.mirror_pairs`` counts the pairs dropped.
    """
    qmax = int(setting("diagram", "genericity", "qmax", override=qmax))
    eps = float(setting("diagram", "genericity", "eps", override=eps))
    max_support = int(setting("diagram", "genericity", "max_support"))
    ratio = d.frame.c2 / d.frame.c1
    hypothesis = 2.0 * ratio * ratio > 1.0
    if not hypothesis:
        logger.warning("Caustic ratio %.4g violates 2c^2 > 1; continuing anyway.", ratio)

    relation = None
    checked = 0
    mirrored = 0
    for component in range(d.mu):
        values, labels, pairs = _component_values(d, component, eps)
        checked += len(values)
        mirrored += pairs
        relation = relation_search(values, qmax, eps, max_support=max_support, labels=labels)
        if relation is not None:
            logger.info("Arc-length relation found: %s", relation)
            break
    return GenericityReport(
        relation=relation,
        checked_values=checked,
        mirror_pairs=mirrored,
        qmax=qmax,
        eps=eps,
        caustic_ratio=ratio,
        eccentricity_hypothesis=hypothesis,
    )
