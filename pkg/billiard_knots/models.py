"""Core data models for the billiard-knot pipeline.

Holds the knot request read from JSON, the per-component height plans,
and the 3D trajectory with its serialisation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np

from billiard_knots.errors import ExportError, RequestError


@dataclass(frozen=True)
class HeightPlan:
    """Sawtooth z(t) = 2|frac(m t + phi_z) − 1/2| chosen for one component."""

    m: int
    phi_z: float
    margin: float
    component_index: int = 0

    def to_dict(self) -> dict[str, Any]:
        return {
            "m": self.m,
            "phi_z": self.phi_z,
            "margin": self.margin,
            "component_index": self.component_index,
        }

    @classmethod
    def from_dict(cls, payload: dict[str, Any]) -> "HeightPlan":
        return cls(
            m=int(payload["m"]),
            phi_z=float(payload["phi_z"]),
            margin=float(payload["margin"]),
            component_index=int(payload.get("component_index", 0)),
        )


class VertexEvent(str, Enum):
    WALL = "wall"
    CAP_BOTTOM = "cap-bottom"
    CAP_TOP = "cap-top"


@dataclass
class KnotComponent:
    """Closed 3D polyline; ``points[-1]`` repeats ``points[0]``."""

    points: np.ndarray
    events: list[VertexEvent]
    plan: HeightPlan

    def to_dict(self) -> dict[str, Any]:
        return {
            "points": self.points.tolist(),
            "events": [event.value for event in self.events],
            "plan": self.plan.to_dict(),
        }

    @classmethod
    def from_dict(cls, payload: dict[str, Any]) -> "KnotComponent":
        points = np.array(payload["points"], dtype=float)
        if points.ndim != 2 or points.shape[1] != 3:
            raise ValueError("Component points must be a list of [x, y, z] triples.")
        events = [VertexEvent(value) for value in payload["events"]]
        if len(events) != len(points) - 1:
            raise ValueError("Component needs one event per point before the closing point.")
        return cls(points=points, events=events, plan=HeightPlan.from_dict(payload["plan"]))


@dataclass(frozen=True)
class ExpectedCrossing:
    """Projected crossing point and the handedness it must have."""

    x: float
    y: float
    handedness: int

    def to_dict(self) -> dict[str, Any]:
        return {"x": self.x, "y": self.y, "handedness": self.handedness}

    @classmethod
    def from_dict(cls, payload: dict[str, Any]) -> "ExpectedCrossing":
        return cls(x=float(payload["x"]), y=float(payload["y"]), handedness=int(payload["handedness"]))


@dataclass
class BilliardKnot3D:
    """Periodic billiard trajectory in the cylinder E × [0, 1]."""

    A: float
    B: float
    components: list[KnotComponent]
    expected_crossings: list[ExpectedCrossing] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "ellipse": {"A": self.A, "B": self.B},
            "components": [component.to_dict() for component in self.components],
            "expected_crossings": [crossing.to_dict() for crossing in self.expected_crossings],
        }

    @classmethod
    def from_dict(cls, payload: dict[str, Any]) -> "BilliardKnot3D":
        try:
            return cls(
                A=float(payload["ellipse"]["A"]),
                B=float(payload["ellipse"]["B"]),
                components=[KnotComponent.from_dict(item) for item in payload["components"]],
                expected_crossings=[
                    ExpectedCrossing.from_dict(item) for item in payload.get("expected_crossings", [])
                ],
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ExportError(f"Knot payload is invalid: {exc}") from exc


@dataclass(frozen=True)
class KnotRequest:
    """User request for a billiard knot realising a quasitoric braid closure."""

    p: int
    n: int
    signs: tuple[int, ...]
    A: float = 2.0
    B: float = 1.0
    delta: float | None = None
    m_max: int | None = None
    seed: int | None = None
    retries: int | None = None

    def __post_init__(self) -> None:
        if not (math.isfinite(self.A) and math.isfinite(self.B)) or self.A <= 0 or self.B <= 0:
            raise RequestError("Ellipse semi-axes must be positive numbers.")
        if self.A == self.B:
            raise RequestError("The billiard table must be an ellipse which is not a circle (A != B).")
        if self.A < self.B:
            raise RequestError("Put the major axis along x (A > B).")
        if self.delta is not None and not 0.0 < self.delta < 0.25:
            raise RequestError("delta must satisfy 0 < delta < 1/4.")
        if self.m_max is not None and self.m_max < 1:
            raise RequestError("m_max must be >= 1.")
        if self.retries is not None and self.retries < 1:
            raise RequestError("retries must be >= 1.")

    def to_dict(self) -> dict[str, Any]:
        payload: dict[str, Any] = {
            "p": self.p,
            "n": self.n,
            "signs": list(self.signs),
            "ellipse": {"A": self.A, "B": self.B},
        }
        for key in ("delta", "m_max", "seed", "retries"):
            value = getattr(self, key)
            if value is not None:
                payload[key] = value
        return payload

    @classmethod
    def from_dict(cls, payload: dict[str, Any]) -> "KnotRequest":
        try:
            signs = payload["signs"]
            if not isinstance(signs, list) or any(sign not in (1, -1) for sign in signs):
                raise RequestError("signs must be a list of +1/-1 values.")
            ellipse = payload.get("ellipse", {"A": 2.0, "B": 1.0})
            return cls(
                p=int(payload["p"]),
                n=int(payload["n"]),
                signs=tuple(int(sign) for sign in signs),
                A=float(ellipse["A"]),
                B=float(ellipse["B"]),
                delta=None if payload.get("delta") is None else float(payload["delta"]),
                m_max=None if payload.get("m_max") is None else int(payload["m_max"]),
                seed=None if payload.get("seed") is None else int(payload["seed"]),
                retries=None if payload.get("retries") is None else int(payload["retries"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, RequestError):
                raise
            raise RequestError(f"Knot request is invalid: {exc}") from exc
