"""Exception hierarchy shared by every engine.

All errors derive from ``ValueError`` so callers that only care about
"bad input" can keep catching that.
"""

from __future__ import annotations


class BilliardKnotError(ValueError):
    """Root of all billiard-knots errors."""


# ---------------------------------------------------------------------------
# Numerics and geometry
# ---------------------------------------------------------------------------

class EllipticDomainError(BilliardKnotError):
    """Raised for a modulus outside [0, 1) or a non-finite argument."""


class GeometryError(BilliardKnotError):
    """Raised for invalid conics, lines, or points off their conic."""


class GrazingRayError(GeometryError):
    """Raised when a ray is tangent to the boundary instead of crossing it."""


class DegenerateCausticError(GeometryError):
    """Raised when a chord through the centre has no finite caustic."""


# ---------------------------------------------------------------------------
# Poncelet polygons
# ---------------------------------------------------------------------------

class PonceletError(BilliardKnotError):
    """Raised for invalid polygon requests or frame preconditions."""


class NonCoprimeError(PonceletError):
    """Raised when n and p share a factor."""


class NoRootError(PonceletError):
    """Raised when the requested rotation number is outside the scanned range."""

    def __init__(self, message: str, rho_range: tuple[float, float]) -> None:
        super().__init__(message)
        self.rho_range = rho_range


class BirkhoffConvergenceError(PonceletError):
    """Raised when perimeter maximisation does not reach a billiard polygon."""

    def __init__(self, message: str, best_residual: float) -> None:
        super().__init__(message)
        self.best_residual = best_residual


class OddPolygonError(PonceletError):
    """Raised when a construction needs an even number of sides."""


# ---------------------------------------------------------------------------
# Braids and diagrams
# ---------------------------------------------------------------------------

class BraidError(BilliardKnotError):
    """Raised for malformed braid words or quasitoric specs."""


class PaddingError(BraidError):
    """Raised when a spec cannot be padded with a certified trivial braid."""


class DiagramError(BilliardKnotError):
    """Raised for diagrams that cannot be built or evaluated."""


class DegenerateDiagramError(DiagramError):
    """Raised when crossings coincide or hit a vertex."""


class TooManyCrossingsError(DiagramError):
    """Raised when the state sum would exceed the crossing bound."""


class CrossCheckError(DiagramError):
    """Raised when an elliptic formula cannot be evaluated for some (h, j)."""

    def __init__(self, message: str, offending: tuple[int, int]) -> None:
        super().__init__(message)
        self.offending = offending


# ---------------------------------------------------------------------------
# Lift and pipeline
# ---------------------------------------------------------------------------

class LiftError(BilliardKnotError):
    """Raised when heights cannot be assigned."""


class InfeasibleHeightsError(LiftError):
    """Raised when no frequency up to ``m_max`` realises the crossing pattern."""

    def __init__(self, message: str, best: tuple[int, float, float]) -> None:
        super().__init__(message)
        self.best = best


class DegenerateArcLengthError(LiftError):
    """Raised when two constraint times coincide."""


class PipelineError(BilliardKnotError):
    """Raised by the end-to-end knot pipeline."""


class RequestError(PipelineError):
    """Raised for schema-invalid knot requests."""


class GenericityExhaustedError(PipelineError):
    """Raised when no sampled start parameter gives a generic diagram."""


class InvariantMismatchError(PipelineError):
    """Raised when the built knot's invariant differs from the braid closure's."""


class ExportError(BilliardKnotError):
    """Raised when knot files are invalid, missing, or cannot be written."""
