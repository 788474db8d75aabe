"""Shared numerical constants.

Centralises tolerances and fixed limits that are referenced by several
engines so they have a single source of truth.  Tunable pipeline
parameters (search bounds, retries, margins) live in ``config/*.json``
instead.
"""

from __future__ import annotations

import math

# ---------------------------------------------------------------------------
# Elliptic functions
# ---------------------------------------------------------------------------
IDENTITY_TOLERANCE: float = 1e-12
"""Bound on sn²+cn²−1 and dn²+k²sn²−1 for every evaluated triple."""

AGM_TOLERANCE: float = 1e-16
"""Relative gap |a−b|/a at which the arithmetic-geometric mean stops."""

AGM_MAX_ITERATIONS: int = 64
"""Hard cap on AGM / Landen iterations (convergence is quadratic)."""

CARLSON_ERRTOL: float = 0.0025
"""Duplication stopping threshold for Carlson's R_F (gives ~1e-16)."""

HALF_PI: float = math.pi / 2.0
"""Complete quarter period for modulus zero."""

# ---------------------------------------------------------------------------
# Plane geometry
# ---------------------------------------------------------------------------
ON_CONIC_TOLERANCE: float = 1e-9
"""Allowed |x²/A²+y²/B²−1| for a point declared to lie on an ellipse."""

GRAZING_THRESHOLD: float = 1e-12
"""Forward ray parameter (or incidence cosine) below which a ray grazes."""

KIND_TOLERANCE: float = 1e-10
"""Band around λ = B² classified as the degenerate focal caustic."""

CENTRE_TOLERANCE: float = 1e-12
"""Normalised line offset below which a chord passes through the centre."""

# ---------------------------------------------------------------------------
# Diagrams and invariants
# ---------------------------------------------------------------------------
MAX_STATE_SUM_CROSSINGS: int = 24
"""Largest crossing count accepted by the 2^c bracket state sum."""

# ---------------------------------------------------------------------------
# File formats
# ---------------------------------------------------------------------------
KNOT_FORMAT_VERSION: int = 1
"""Serialised knot-file format version."""

LOG_LEVEL_ENV: str = "BILLIARD_KNOTS_LOG_LEVEL"
"""Environment variable read by the CLI to set the log level."""
