"""Billiard knots in an elliptic cylinder, built from quasitoric braids."""

from .cli import main
from .modules.knot_pipeline import run

__all__ = ["main", "run"]
