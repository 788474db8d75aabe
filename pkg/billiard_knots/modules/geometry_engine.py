"""Axis-aligned conics, the billiard reflection law, and caustic lookup.

Everything works in plain cylinder coordinates: the table is
x²/A² + y²/B² ≤ 1 and confocal conics are x²/(A²−λ) + y²/(B²−λ) = 1.
The direct simulator here is the independent oracle for the Jacobi
constructions in :mod:`poncelet_engine`.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from enum import Enum

import numpy as np

from billiard_knots.constants import (
    CENTRE_TOLERANCE,
    GRAZING_THRESHOLD,
    KIND_TOLERANCE,
    ON_CONIC_TOLERANCE,
)
from billiard_knots.errors import DegenerateCausticError, GeometryError, GrazingRayError
from billiard_knots.utils import Point, as_point, cross2, unit

logger = logging.getLogger(__name__)


class ConicKind(str, Enum):
    ELLIPSE = "ellipse"
    HYPERBOLA = "hyperbola"
    DEGENERATE_FOCAL = "degenerate-focal"


@dataclass(frozen=True)
class Ellipse:
    """Billiard table x²/A² + y²/B² ≤ 1."""

    A: float
    B: float

    def __post_init__(self) -> None:
        for label, value in (("A", self.A), ("B", self.B)):
            if not math.isfinite(value) or value <= 0.0:
                raise GeometryError(f"Semi-axis {label} must be a positive number, got {value}.")
        object.__setattr__(self, "A", float(self.A))
        object.__setattr__(self, "B", float(self.B))

    @property
    def is_circle(self) -> bool:
        return self.A == self.B

    @property
    def focal_distance(self) -> float:
        return math.sqrt(abs(self.A * self.A - self.B * self.B))

    @property
    def foci(self) -> tuple[Point, Point]:
        """Foci on the major axis (x-axis when A ≥ B)."""
        f = self.focal_distance
        if self.A >= self.B:
            return as_point((f, 0.0)), as_point((-f, 0.0))
        return as_point((0.0, f)), as_point((0.0, -f))

    def value(self, point: Sequence[float] | np.ndarray) -> float:
        x, y = float(point[0]), float(point[1])
        return (x / self.A) ** 2 + (y / self.B) ** 2

    def point_at(self, t: float) -> Point:
        return as_point((self.A * math.cos(t), self.B * math.sin(t)))

    def outward_normal(self, point: Sequence[float] | np.ndarray) -> np.ndarray:
        return unit((float(point[0]) / self.A ** 2, float(point[1]) / self.B ** 2))

    def require_on(self, point: Sequence[float] | np.ndarray, tolerance: float = ON_CONIC_TOLERANCE) -> Point:
        """Return *point* as an array or raise if it is off the ellipse."""
        array = as_point(point)
        residual = abs(self.value(array) - 1.0)
        if residual > tolerance:
            raise GeometryError(
                f"Point ({array[0]:.6g}, {array[1]:.6g}) is not on the ellipse "
                f"(A={self.A:.6g}, B={self.B:.6g}); residual {residual:.3g}."
            )
        return array

    def project(self, point: Sequence[float] | np.ndarray) -> Point:
        """Radial projection onto the ellipse."""
        array = as_point(point)
        return array / math.sqrt(self.value(array))

    def to_dict(self) -> dict[str, float]:
        return {"A": self.A, "B": self.B}


@dataclass(frozen=True)
class Line2:
    """Line {ax + by = c}, stored with a² + b² = 1 and c ≥ 0."""

    a: float
    b: float
    c: float

    def __post_init__(self) -> None:
        norm = math.hypot(self.a, self.b)
        if norm == 0.0 or not math.isfinite(norm) or not math.isfinite(self.c):
            raise GeometryError("A line needs a finite, non-zero normal (a, b).")
        a, b, c = self.a / norm, self.b / norm, self.c / norm
        if c < 0.0 or (c == 0.0 and (a < 0.0 or (a == 0.0 and b < 0.0))):
            a, b, c = -a, -b, -c
        object.__setattr__(self, "a", float(a))
        object.__setattr__(self, "b", float(b))
        object.__setattr__(self, "c", float(abs(c)) if c == 0.0 else float(c))

    @classmethod
    def through(cls, first: Sequence[float] | np.ndarray, second: Sequence[float] | np.ndarray) -> "Line2":
        dx = float(second[0]) - float(first[0])
        dy = float(second[1]) - float(first[1])
        if dx == 0.0 and dy == 0.0:
            raise GeometryError("A line through two points needs two distinct points.")
        a, b = -dy, dx
        return cls(a, b, a * float(first[0]) + b * float(first[1]))

    @property
    def normal(self) -> np.ndarray:
        return as_point((self.a, self.b))

    def evaluate(self, point: Sequence[float] | np.ndarray) -> float:
        return self.a * float(point[0]) + self.b * float(point[1]) - self.c

    def intersection(self, other: "Line2") -> Point:
        det = self.a * other.b - self.b * other.a
        if abs(det) < 1e-15:
            raise GeometryError("Parallel lines have no intersection point.")
        x = (self.c * other.b - self.b * other.c) / det
        y = (self.a * other.c - self.c * other.a) / det
        return as_point((x, y))


@dataclass(frozen=True)
class ConfocalConic:
    """x²/(A²−λ) + y²/(B²−λ) = 1, confocal with ``base``."""

    base: Ellipse
    lam: float
    kind: ConicKind

    @property
    def semi_axes_squared(self) -> tuple[float, float]:
        return self.base.A ** 2 - self.lam, self.base.B ** 2 - self.lam

    def value(self, point: Sequence[float] | np.ndarray) -> float:
        first, second = self.semi_axes_squared
        return float(point[0]) ** 2 / first + float(point[1]) ** 2 / second


@dataclass(frozen=True)
class SimulationTrace:
    """Bounce points and the direction leaving each of them."""

    points: np.ndarray
    directions: np.ndarray


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def classify_lambda(base: Ellipse, lam: float) -> ConicKind:
    """Kind of the confocal conic with parameter *lam*."""
    if base.is_circle:
        return ConicKind.ELLIPSE
    gap = lam - base.B ** 2
    if abs(gap) < KIND_TOLERANCE:
        return ConicKind.DEGENERATE_FOCAL
    return ConicKind.ELLIPSE if gap < 0.0 else ConicKind.HYPERBOLA


def confocal_conic(base: Ellipse, lam: float) -> ConfocalConic:
    if not math.isfinite(lam) or lam >= base.A ** 2:
        raise GeometryError(f"Confocal parameter must be below A^2={base.A ** 2:.6g}, got {lam}.")
    return ConfocalConic(base=base, lam=float(lam), kind=classify_lambda(base, lam))


def _unit_direction(direction: Sequence[float] | np.ndarray) -> np.ndarray:
    try:
        return unit(direction)
    except ValueError as exc:
        raise GeometryError("Direction must be a non-zero finite vector.") from exc


# ---------------------------------------------------------------------------
# Public API
# ---------------------------------------------------------------------------

def reflect_direction(ellipse: Ellipse, point: Sequence[float] | np.ndarray, d_in: Sequence[float] | np.ndarray) -> np.ndarray:
    """Reflect the arrival direction *d_in* at *point* on the boundary.

    *d_in* is the direction of travel along the chord that ends at *point*,
    so it leaves the interior (d_in·n̂ > 0).  The result points back inside.
    """
    at = ellipse.require_on(point)
    direction = _unit_direction(d_in)
    normal = ellipse.outward_normal(at)
    incidence = float(direction @ normal)
    if incidence <= GRAZING_THRESHOLD:
        raise GrazingRayError(
            f"Arrival direction must leave the interior at the bounce point (d.n = {incidence:.3g})."
        )
    return unit(direction - 2.0 * incidence * normal)


def advance(ellipse: Ellipse, point: Sequence[float] | np.ndarray, direction: Sequence[float] | np.ndarray) -> Point:
    """Second intersection of the ray from *point* along *direction* with the ellipse."""
    start = ellipse.require_on(point)
    d = _unit_direction(direction)
    inv_a2 = 1.0 / ellipse.A ** 2
    inv_b2 = 1.0 / ellipse.B ** 2
    quad = d[0] ** 2 * inv_a2 + d[1] ** 2 * inv_b2
    half_linear = start[0] * d[0] * inv_a2 + start[1] * d[1] * inv_b2
    offset = ellipse.value(start) - 1.0
    discriminant = half_linear ** 2 - quad * offset
    if discriminant < 0.0:
        raise GrazingRayError("Ray does not meet the ellipse again.")
    s = (-half_linear + math.sqrt(discriminant)) / quad
    if s < GRAZING_THRESHOLD:
        raise GrazingRayError(f"Forward root {s:.3g} is below the grazing threshold.")
    return ellipse.project(start + s * d)


def simulate_chords(
    ellipse: Ellipse,
    start: Sequence[float] | np.ndarray,
    direction: Sequence[float] | np.ndarray,
    steps: int,
) -> SimulationTrace:
    """Run *steps* bounces, keeping each point and its outgoing direction."""
    if steps < 1:
        raise GeometryError("Steps must be >= 1.")
    point = ellipse.require_on(start)
    d = _unit_direction(direction)
    points = [point]
    directions = []
    for _ in range(steps):
        directions.append(d)
        point = advance(ellipse, point, d)
        d = reflect_direction(ellipse, point, d)
        points.append(point)
    return SimulationTrace(points=np.array(points), directions=np.array(directions))


def simulate(
    ellipse: Ellipse,
    start: Sequence[float] | np.ndarray,
    direction: Sequence[float] | np.ndarray,
    steps: int,
) -> np.ndarray:
    """Return the ``steps + 1`` bounce points of a billiard trajectory."""
    return simulate_chords(ellipse, start, direction, steps).points


def caustic_from_chord(ellipse: Ellipse, line: Line2) -> ConfocalConic:
    """The confocal conic tangent to *line* (the caustic of that chord)."""
    if ellipse.A < ellipse.B:
        raise GeometryError("Caustic lookup expects the major axis along x (A >= B).")
    support = ellipse.A ** 2 * line.a ** 2 + ellipse.B ** 2 * line.b ** 2
    if line.c ** 2 > support * (1.0 + ON_CONIC_TOLERANCE):
        raise GeometryError("Line does not meet the ellipse.")
    if line.c < CENTRE_TOLERANCE:
        raise DegenerateCausticError("Chord passes through the centre; its caustic is tangent at infinity.")
    lam = support - line.c ** 2
    conic = ConfocalConic(base=ellipse, lam=lam, kind=classify_lambda(ellipse, lam))
    logger.debug("caustic_from_chord: lambda=%.15g kind=%s", lam, conic.kind.value)
    return conic


def tangency_residual(conic: ConfocalConic, line: Line2) -> float:
    """|c² − (A²−λ)a² − (B²−λ)b²|; zero exactly when *line* touches *conic*."""
    if conic.kind is ConicKind.DEGENERATE_FOCAL:
        raise GeometryError("The degenerate focal conic has no tangent lines.")
    first, second = conic.semi_axes_squared
    return abs(line.c ** 2 - first * line.a ** 2 - second * line.b ** 2)


def tangent_contacts(ellipse: Ellipse, point: Sequence[float] | np.ndarray) -> tuple[Point, Point]:
    """Contact points of the two tangents from an exterior *point*."""
    at = as_point(point)
    if ellipse.value(at) <= 1.0 + ON_CONIC_TOLERANCE:
        raise GeometryError("Tangents need a point strictly outside the ellipse.")
    u, v = at[0] / ellipse.A, at[1] / ellipse.B
    base = math.atan2(v, u)
    spread = math.acos(1.0 / math.hypot(u, v))
    return ellipse.point_at(base + spread), ellipse.point_at(base - spread)


def bisector_residual(ellipse: Ellipse, point: Sequence[float] | np.ndarray) -> float:
    """Angle between the bisectors of ∠M₁PM₂ (tangent contacts) and ∠F₁PF₂."""
    at = as_point(point)
    first, second = tangent_contacts(ellipse, at)
    focus_one, focus_two = ellipse.foci
    tangents = unit(first - at) + unit(second - at)
    focal = unit(focus_one - at) + unit(focus_two - at)
    return math.atan2(abs(cross2(tangents, focal)), abs(float(tangents @ focal)))
