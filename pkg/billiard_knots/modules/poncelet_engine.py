"""Periodic billiard polygons in an ellipse.

A ``JacobiFrame`` maps the caustic x²/(A²−λ) + y²/(B²−λ) = 1 to the unit
circle and the table to x²/a*² + y²/b*² = 1 (a* > b* > 1, axes swapped).
In that frame the tangent to the circle at (cn φ, sn φ) meets the outer
ellipse at (a* cn(φ±β), b* sn(φ±β)), so a trajectory is a walk in steps
of θ = 2β and closes after n sides exactly when β = 2pK/n.

Besides the Jacobi construction this module has an independent Birkhoff
generator (perimeter maximisation over focal polar angles) and the
Graves, Darboux and central-symmetry checks.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize

from billiard_knots.config_registry import setting
from billiard_knots.errors import (
    BirkhoffConvergenceError,
    NoRootError,
    NonCoprimeError,
    OddPolygonError,
    PonceletError,
)
from billiard_knots.modules.elliptic_engine import Modulus, incomplete_F, jacobi_sn_cn_dn
from billiard_knots.modules.geometry_engine import (
    ConfocalConic,
    Ellipse,
    Line2,
    caustic_from_chord,
    confocal_conic,
)
from billiard_knots.utils import Point, as_point

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class JacobiFrame:
    """Normalising frame for the caustic with parameter ``lam``."""

    base: Ellipse
    lam: float
    c1: float
    c2: float
    a_star: float
    b_star: float
    modulus: Modulus
    beta: float

    @property
    def theta(self) -> float:
        return 2.0 * self.beta

    @property
    def rho(self) -> float:
        """Rotation number β / 2K."""
        return self.beta / (2.0 * self.modulus.K)

    @property
    def caustic(self) -> ConfocalConic:
        return confocal_conic(self.base, self.lam)

    @property
    def forward_matrix(self) -> np.ndarray:
        return np.array([[0.0, 1.0 / self.c2], [1.0 / self.c1, 0.0]])

    @property
    def inverse_matrix(self) -> np.ndarray:
        return np.array([[0.0, self.c1], [self.c2, 0.0]])

    def to_normalized(self, point: Sequence[float] | np.ndarray) -> Point:
        return as_point((float(point[1]) / self.c2, float(point[0]) / self.c1))

    def from_normalized(self, point: Sequence[float] | np.ndarray) -> Point:
        return as_point((self.c1 * float(point[1]), self.c2 * float(point[0])))

    def outer_point(self, psi: float) -> Point:
        """Table point with normalized coordinates (a* cn ψ, b* sn ψ)."""
        triple = jacobi_sn_cn_dn(psi, self.modulus)
        return as_point((self.base.A * triple.sn, self.base.B * triple.cn))

    def caustic_point(self, phi: float) -> Point:
        """Caustic point with normalized coordinates (cn φ, sn φ)."""
        triple = jacobi_sn_cn_dn(phi, self.modulus)
        return as_point((self.c1 * triple.sn, self.c2 * triple.cn))

    def parameter_of(self, point: Sequence[float] | np.ndarray) -> float:
        """ψ with ``outer_point(ψ) == point`` for a point on the table."""
        amplitude = math.atan2(float(point[0]) / self.base.A, float(point[1]) / self.base.B)
        return incomplete_F(amplitude, self.modulus)


@dataclass(frozen=True)
class PonceletPolygon:
    """Closed (n, p) billiard polygon.

    Side ``[V[j-1], V[j]]`` touches the caustic at ``tangency_points[j]``.
    """

    frame: JacobiFrame
    n: int
    p: int
    phi: float
    vertices: np.ndarray
    tangency_points: np.ndarray
    perimeter: float

    def side_lines(self) -> list[Line2]:
        return [
            Line2.through(self.vertices[j], self.vertices[(j + 1) % self.n])
            for j in range(self.n)
        ]

    def normalized_vertices(self) -> np.ndarray:
        return self.vertices @ self.frame.forward_matrix.T

    def closure_gap(self) -> float:
        """|V_n − V_0| with V_n evaluated from the frame, not by wrap-around."""
        end = self.frame.outer_point(self.phi + self.frame.beta + self.n * self.frame.theta)
        return float(np.linalg.norm(end - self.vertices[0]))


@dataclass(frozen=True)
class BirkhoffResult:
    """Maximal-perimeter (n, p) polygon through a fixed first vertex."""

    ellipse: Ellipse
    n: int
    p: int
    focal_angles: np.ndarray
    vertices: np.ndarray
    perimeter: float
    reflection_residual: float
    iterations: int


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def _check_pair(n: int, p: int) -> None:
    if n < 3:
        raise PonceletError("Polygon needs n >= 3 sides.")
    if p < 1:
        raise PonceletError("Winding number p must be >= 1.")
    if math.gcd(n, p) != 1:
        raise NonCoprimeError(f"n={n} and p={p} must be coprime.")
    if n < 2 * p + 1:
        raise PonceletError(f"Need n >= 2p + 1, got n={n}, p={p}.")


def _check_frame_base(ellipse: Ellipse) -> None:
    if ellipse.A <= ellipse.B:
        raise PonceletError(
            "Jacobi frames need an ellipse that is not a circle with the major axis along x (A > B)."
        )


def _perimeter(vertices: np.ndarray) -> float:
    closed = np.vstack([vertices, vertices[:1]])
    return float(np.sum(np.linalg.norm(np.diff(closed, axis=0), axis=1)))


def _circle_foot(frame: JacobiFrame, first: Point, second: Point) -> Point:
    """Touch point on the caustic of the chord first→second."""
    start = frame.to_normalized(first)
    direction = frame.to_normalized(second) - start
    foot = start - (start @ direction) / (direction @ direction) * direction
    return frame.from_normalized(foot)


def _focal_curve(ellipse: Ellipse) -> tuple[float, float, float]:
    """Focus abscissa f, eccentricity e and semi-latus rectum ℓ."""
    f = ellipse.focal_distance
    return f, f / ellipse.A, ellipse.B ** 2 / ellipse.A


def _focal_points(omega: np.ndarray, f: float, e: float, ell: float) -> tuple[np.ndarray, np.ndarray]:
    """Points r(ω)(cos ω, sin ω) + (f, 0) and their ω-derivatives."""
    denominator = 1.0 + e * np.cos(omega)
    r = ell / denominator
    dr = ell * e * np.sin(omega) / denominator ** 2
    cos_w, sin_w = np.cos(omega), np.sin(omega)
    points = np.column_stack([f + r * cos_w, r * sin_w])
    tangents = np.column_stack([dr * cos_w - r * sin_w, dr * sin_w + r * cos_w])
    return points, tangents


def _reflection_defects(points: np.ndarray, tangents: np.ndarray) -> np.ndarray:
    """(u_in − u_out)·P'(ω) at every vertex of the closed polygon."""
    ahead = np.roll(points, -1, axis=0) - points
    chords = ahead / np.linalg.norm(ahead, axis=1)[:, None]
    arriving = np.roll(chords, 1, axis=0)
    return np.einsum("ij,ij->i", arriving - chords, tangents)


def _frame_from_gap(ellipse: Ellipse, gap: float) -> JacobiFrame:
    """Frame for the caustic with B² − λ = *gap*, which keeps its relative digits near B²."""
    A2, B2 = ellipse.A ** 2, ellipse.B ** 2
    if not math.isfinite(gap) or not 0.0 < gap < B2:
        raise PonceletError(f"Caustic parameter must satisfy 0 < lambda < B^2={B2:.6g}, got {B2 - gap}.")
    lam = B2 - gap
    spread = A2 - B2
    c1 = math.sqrt(spread + gap)
    c2 = math.sqrt(gap)
    modulus = Modulus.from_complementary_squared(gap / (spread + gap))
    beta = incomplete_F(math.atan2(math.sqrt(lam), c2), modulus)
    return JacobiFrame(
        base=ellipse,
        lam=float(lam),
        c1=c1,
        c2=c2,
        a_star=ellipse.B / c2,
        b_star=ellipse.A / c1,
        modulus=modulus,
        beta=beta,
    )


# ---------------------------------------------------------------------------
# Public API
# ---------------------------------------------------------------------------

def build_frame(ellipse: Ellipse, lam: float) -> JacobiFrame:
    """Jacobi frame for the confocal caustic with parameter *lam*."""
    _check_frame_base(ellipse)
    if not math.isfinite(lam):
        raise PonceletError(f"Caustic parameter must be finite, got {lam}.")
    return _frame_from_gap(ellipse, ellipse.B ** 2 - lam)


def rotation_number(ellipse: Ellipse, lam: float) -> float:
    """ρ(λ) = β / 2K, in (0, 1/2)."""
    return build_frame(ellipse, lam).rho


def solve_caustic(ellipse: Ellipse, n: int, p: int, tol: float | None = None) -> JacobiFrame:
    """Frame whose rotation number is p/n."""
    _check_pair(n, p)
    _check_frame_base(ellipse)
    tol = setting("poncelet", "closure_tolerance", override=tol)
    scan_points = int(setting("poncelet", "scan_points"))
    edge = float(setting("poncelet", "edge_fraction"))
    target = p / n
    B2 = ellipse.B ** 2

    def excess(lam: float) -> float:
        return rotation_number(ellipse, lam) - target

    samples = [B2 * i / (scan_points + 1) for i in range(1, scan_points + 1)]
    lams = [B2 * edge, *samples, B2 * (1.0 - edge)]
    values = [excess(lam) for lam in lams]
    if any(b <= a for a, b in zip(values, values[1:])):
        logger.warning("Rotation number is not increasing on the lambda scan for %s.", ellipse)
    logger.debug("solve_caustic scan: rho in [%.6g, %.6g]", values[0] + target, values[-1] + target)

    bracket = next(
        ((lams[i], lams[i + 1]) for i in range(len(lams) - 1) if values[i] <= 0.0 <= values[i + 1]),
        None,
    )
    if bracket is None:
        rho_range = (values[0] + target, values[-1] + target)
        raise NoRootError(
            f"Rotation number {p}/{n} is outside the scanned range "
            f"[{rho_range[0]:.6g}, {rho_range[1]:.6g}].",
            rho_range,
        )

    # Root in s = log(B² − λ); ρ has slope ~1/(B² − λ) in λ.
    def excess_log_gap(s: float) -> float:
        return _frame_from_gap(ellipse, math.exp(s)).rho - target

    s = brentq(excess_log_gap, math.log(B2 - bracket[1]), math.log(B2 - bracket[0]), xtol=1e-15, rtol=8.9e-16)
    frame = _frame_from_gap(ellipse, math.exp(s))
    residual = abs(frame.rho - target)
    if residual > tol:
        below = excess_log_gap(math.nextafter(s, -math.inf))
        above = excess_log_gap(math.nextafter(s, math.inf))
        at_float_limit = below * above <= 0.0 and residual <= float(setting("poncelet", "frame_match_tolerance"))
        if not at_float_limit:
            raise PonceletError(f"Caustic solve stalled at |rho - p/n| = {residual:.3g}.")
        logger.warning("Caustic for (n=%d, p=%d) resolved to the float limit: |rho - p/n| = %.3g", n, p, residual)
    logger.info(
        "Caustic for (n=%d, p=%d): lambda=%.15g, B^2 - lambda=%.6g, k^2=%.6g",
        n, p, frame.lam, frame.c2 ** 2, frame.modulus.k_squared,
    )
    return frame


def polygon(frame: JacobiFrame, n: int, p: int, phi: float) -> PonceletPolygon:
    """Vertices V_j at ψ_j = φ + β + jθ and tangency points at φ + jθ."""
    _check_pair(n, p)
    match_tolerance = float(setting("poncelet", "frame_match_tolerance"))
    if abs(frame.rho - p / n) > match_tolerance:
        raise PonceletError(f"Frame has rotation number {frame.rho:.12g}, not {p}/{n}.")
    vertices = np.array([frame.outer_point(phi + frame.beta + j * frame.theta) for j in range(n)])
    tangency = np.array([frame.caustic_point(phi + j * frame.theta) for j in range(n)])
    return PonceletPolygon(
        frame=frame,
        n=n,
        p=p,
        phi=float(phi),
        vertices=vertices,
        tangency_points=tangency,
        perimeter=_perimeter(vertices),
    )


def link_polygons(frame: JacobiFrame, n: int, p: int, phi: float, mu: int) -> list[PonceletPolygon]:
    """The μ copies at φ + cτ, τ = θ/(μp) = 4K/(μn), of one (n, p) polygon.

    With this offset the μn tangency points are distinct for every μ and
    the union is a {μn/μp} star.  The coarser offset θ/μ puts copy c on top
    of copy 0 whenever μ divides cp, e.g. for every c when μ | p.
    """
    if mu < 1:
        raise PonceletError("Component count mu must be >= 1.")
    tau = frame.theta / (mu * p)
    return [polygon(frame, n, p, phi + c * tau) for c in range(mu)]


def birkhoff_angles(
    ellipse: Ellipse,
    n: int,
    p: int,
    start: Sequence[float] | np.ndarray,
    *,
    max_iterations: int | None = None,
) -> BirkhoffResult:
    """Maximise the perimeter over focal polar angles with the first vertex fixed."""
    _check_pair(n, p)
    if ellipse.A < ellipse.B:
        raise PonceletError("Birkhoff generator expects the major axis along x (A >= B).")
    config = setting("poncelet", "birkhoff")
    max_iterations = int(max_iterations or config["max_iterations"])
    first = ellipse.require_on(start)
    f, e, ell = _focal_curve(ellipse)
    omega_0 = math.atan2(first[1], first[0] - f)
    turn = 2.0 * math.pi * p

    def full(free: np.ndarray) -> np.ndarray:
        return np.concatenate([[omega_0], free])

    def negative_perimeter(free: np.ndarray) -> tuple[float, np.ndarray]:
        omega = full(free)
        points, tangents = _focal_points(omega, f, e, ell)
        return -_perimeter(points), -_reflection_defects(points, tangents)[1:]

    initial = omega_0 + turn * np.arange(1, n) / n
    result = minimize(
        negative_perimeter,
        initial,
        jac=True,
        method="BFGS",
        options={"gtol": float(config["gradient_tolerance"]), "maxiter": max_iterations},
    )
    omega = full(result.x)
    points, tangents = _focal_points(omega, f, e, ell)
    defects = _reflection_defects(points, tangents)
    residual = float(np.max(np.abs(defects) / np.linalg.norm(tangents, axis=1)))
    alphas = np.diff(np.concatenate([omega, [omega_0 + turn]]))
    logger.debug(
        "birkhoff (n=%d, p=%d): %d iterations, residual %.3g, %s",
        n, p, result.nit, residual, result.message,
    )

    margin = float(config["angle_margin"])
    if np.any(alphas < margin) or np.any(alphas > math.pi - margin):
        raise BirkhoffConvergenceError(
            f"Focal angles left [{margin:g}, pi - {margin:g}] during perimeter maximisation.",
            residual,
        )
    if residual > float(config["residual_tolerance"]):
        raise BirkhoffConvergenceError(
            f"Reflection law residual {residual:.3g} after {result.nit} iterations.", residual
        )
    if not result.success:
        logger.warning("Perimeter maximiser stopped early (%s); residual %.3g accepted.", result.message, residual)
    return BirkhoffResult(
        ellipse=ellipse,
        n=n,
        p=p,
        focal_angles=alphas,
        vertices=points,
        perimeter=_perimeter(points),
        reflection_residual=residual,
        iterations=int(result.nit),
    )


def birkhoff_polygon(ellipse: Ellipse, n: int, p: int, start: Sequence[float] | np.ndarray) -> PonceletPolygon:
    """Birkhoff polygon through *start*, attached to the frame of its own caustic."""
    result = birkhoff_angles(ellipse, n, p, start)
    lam = caustic_from_chord(ellipse, Line2.through(result.vertices[0], result.vertices[1])).lam
    frame = build_frame(ellipse, lam)
    vertices = result.vertices
    tangency = np.array([_circle_foot(frame, vertices[j - 1], vertices[j]) for j in range(n)])
    logger.info("Birkhoff caustic for (n=%d, p=%d): lambda=%.15g", n, p, lam)
    return PonceletPolygon(
        frame=frame,
        n=n,
        p=p,
        phi=frame.parameter_of(vertices[0]) - frame.beta,
        vertices=vertices,
        tangency_points=tangency,
        perimeter=result.perimeter,
    )


def graves_spread(frame: JacobiFrame, n: int, p: int, phis: Sequence[float]) -> float:
    """Spread (max − min) of perimeters over start parameters."""
    if len(phis) == 0:
        raise PonceletError("Need at least one start parameter.")
    perimeters = [polygon(frame, n, p, phi).perimeter for phi in phis]
    return max(perimeters) - min(perimeters)


def _diagonal_crossings(poly: PonceletPolygon) -> list[Point]:
    if poly.n % 2:
        raise OddPolygonError(f"Main diagonals need an even number of vertices, got n={poly.n}.")
    half = poly.n // 2
    diagonals = [Line2.through(poly.vertices[j], poly.vertices[j + half]) for j in range(half)]
    return [
        diagonals[i].intersection(diagonals[j])
        for i in range(half)
        for j in range(i + 1, half)
    ]


def darboux_residual(poly: PonceletPolygon) -> float:
    """Largest distance between pairwise crossings of the main diagonals."""
    crossings = _diagonal_crossings(poly)
    return max(
        (float(np.linalg.norm(a - b)) for i, a in enumerate(crossings) for b in crossings[i + 1:]),
        default=0.0,
    )


def darboux_point(poly: PonceletPolygon) -> Point:
    """Common point of the main diagonals (mean of their crossings)."""
    crossings = _diagonal_crossings(poly)
    return as_point(np.mean(crossings, axis=0))


def central_symmetry_residual(poly: PonceletPolygon) -> float:
    """max_j |V_{j+n/2} + V_j| in the normalized frame."""
    if poly.n % 2:
        raise OddPolygonError(f"Central symmetry needs an even number of vertices, got n={poly.n}.")
    normalized = poly.normalized_vertices()
    half = poly.n // 2
    return float(np.max(np.linalg.norm(normalized[half:] + normalized[:half], axis=1)))
