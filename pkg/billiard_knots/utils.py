"""Shared numeric helpers used across billiard-knots engines."""

from __future__ import annotations

import math
from collections.abc import Sequence

import numpy as np

Point = np.ndarray
"""A 2D (or 3D) point stored as a float64 array."""


def as_point(value: Sequence[float] | np.ndarray) -> Point:
    """Return *value* as a fresh float64 array."""
    return np.array(value, dtype=float)


def unit(vector: Sequence[float] | np.ndarray) -> np.ndarray:
    """Normalise *vector*; raises ``ValueError`` for the zero vector."""
    array = np.asarray(vector, dtype=float)
    norm = float(np.linalg.norm(array))
    if norm == 0.0 or not math.isfinite(norm):
        raise ValueError("Cannot normalise a zero or non-finite vector.")
    return array / norm


def cross2(u: Sequence[float] | np.ndarray, v: Sequence[float] | np.ndarray) -> float:
    """Z-component of the cross product of two plane vectors."""
    return float(u[0] * v[1] - u[1] * v[0])


def frac(value: float | np.ndarray) -> float | np.ndarray:
    """Fractional part in ``[0, 1)`` (also for negative input)."""
    return np.mod(value, 1.0)


def sign_of(value: float) -> int:
    """Return ``+1`` for non-negative values and ``-1`` otherwise."""
    return 1 if value >= 0.0 else -1
