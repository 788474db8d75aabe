"""Write and read knot artifacts: knot JSON, OBJ polylines and SVG diagrams.

JSON is written atomically (temp file, fsync, replace) and carries a
format version so older readers reject newer files.
"""

from __future__ import annotations

import json
import os
from pathlib import Path
from tempfile import NamedTemporaryFile
from typing import Any

import svg

from billiard_knots.config_registry import setting
from billiard_knots.constants import KNOT_FORMAT_VERSION
from billiard_knots.errors import ExportError
from billiard_knots.models import BilliardKnot3D

# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def _write_atomic(text: str, target_path: Path) -> Path:
    target_path.parent.mkdir(parents=True, exist_ok=True)
    temp_path: Path | None = None
    try:
        with NamedTemporaryFile(
            "w", encoding="utf-8",
            dir=target_path.parent, prefix=f"{target_path.stem}.", suffix=".tmp",
            delete=False,
        ) as handle:
            temp_path = Path(handle.name)
            handle.write(text)
            handle.flush()
            os.fsync(handle.fileno())
        temp_path.replace(target_path)
    except OSError as exc:
        raise ExportError(f"Failed to write {target_path.name}: {exc}") from exc
    finally:
        if temp_path is not None and temp_path.exists():
            temp_path.unlink(missing_ok=True)
    return target_path


def _under_gaps(
    knot: BilliardKnot3D, component: int, segment: int, gap: float, scale: float
) -> tuple[list[float], float]:
    """Parameters where a projected segment passes under another strand, and the half gap."""
    points = knot.components[component].points
    start, end = points[segment, :2], points[segment + 1, :2]
    direction = end - start
    length = float((direction @ direction) ** 0.5)
    hits = []
    for other_index, other in enumerate(knot.components):
        count = len(other.points) - 1
        for j in range(count):
            if other_index == component and (abs(j - segment) <= 1 or {j, segment} == {0, count - 1}):
                continue
            a, b = other.points[j], other.points[j + 1]
            other_direction = b[:2] - a[:2]
            denom = direction[0] * other_direction[1] - direction[1] * other_direction[0]
            if abs(denom) < 1e-15:
                continue
            diff = a[:2] - start
            s = (diff[0] * other_direction[1] - diff[1] * other_direction[0]) / denom
            u = (diff[0] * direction[1] - diff[1] * direction[0]) / denom
            if not (0.0 < s < 1.0 and 0.0 < u < 1.0):
                continue
            z_here = points[segment, 2] + s * (points[segment + 1, 2] - points[segment, 2])
            z_there = a[2] + u * (b[2] - a[2])
            if z_here < z_there:
                hits.append(float(s))
    half = gap / (2.0 * scale * length) if length > 0.0 else 0.0
    return sorted(hits), half


# ---------------------------------------------------------------------------
# Public API
# ---------------------------------------------------------------------------

def knot_payload(knot: BilliardKnot3D, **sections: Any) -> dict[str, Any]:
    payload: dict[str, Any] = {"version": KNOT_FORMAT_VERSION, "knot": knot.to_dict()}
    for name, value in sections.items():
        if value is not None:
            payload[name] = value
    return payload


def save_knot_json(knot: BilliardKnot3D, path: Path, **sections: Any) -> Path:
    """Persist *knot* (plus optional request/bracket/verify sections) atomically."""
    text = json.dumps(knot_payload(knot, **sections), indent=2, sort_keys=True) + "\n"
    return _write_atomic(text, Path(path))


def load_knot_json(path: Path) -> BilliardKnot3D:
    """Load and validate a knot file."""
    source_path = Path(path)
    if not source_path.exists():
        raise ExportError(f"Knot file not found: {source_path}")
    try:
        with source_path.open("r", encoding="utf-8") as handle:
            payload = json.load(handle)
    except json.JSONDecodeError as exc:
        raise ExportError("Knot file is not valid JSON.") from exc
    except OSError as exc:
        raise ExportError(f"Failed to read knot file: {exc}") from exc

    if not isinstance(payload, dict):
        raise ExportError("Knot file is invalid.")
    try:
        version = int(payload.get("version", 1))
    except (TypeError, ValueError) as exc:
        raise ExportError("Knot file version is invalid.") from exc
    if version > KNOT_FORMAT_VERSION:
        raise ExportError(
            f"Knot format version {version} is newer than supported version {KNOT_FORMAT_VERSION}."
        )
    if not isinstance(payload.get("knot"), dict):
        raise ExportError("Knot file missing knot payload.")
    return BilliardKnot3D.from_dict(payload["knot"])


def obj_text(knot: BilliardKnot3D) -> str:
    """Wavefront OBJ: one ``v`` per vertex and one closed ``l`` per component."""
    lines = ["# billiard knot"]
    offset = 1
    for index, component in enumerate(knot.components):
        lines.append(f"o component_{index}")
        open_points = component.points[:-1]
        lines += [f"v {x!r} {y!r} {z!r}" for x, y, z in open_points.tolist()]
        indices = list(range(offset, offset + len(open_points)))
        lines.append("l " + " ".join(str(i) for i in indices + indices[:1]))
        offset += len(open_points)
    return "\n".join(lines) + "\n"


def save_obj(knot: BilliardKnot3D, path: Path) -> Path:
    return _write_atomic(obj_text(knot), Path(path))


def svg_diagram(knot: BilliardKnot3D) -> svg.SVG:
    """Projected diagram inside the table outline, under-strands broken at crossings."""
    config = setting("pipeline", "svg")
    width = float(config["width"])
    margin = float(config["margin"])
    height = width * knot.B / knot.A
    scale = (width - 2 * margin) / (2 * knot.A)

    def to_canvas(x: float, y: float) -> tuple[float, float]:
        return width / 2 + scale * x, height / 2 - scale * y

    elements: list[svg.Element] = [
        svg.Ellipse(
            cx=width / 2, cy=height / 2, rx=scale * knot.A, ry=scale * knot.B,
            fill="none", stroke="#999999", stroke_width=1,
        )
    ]
    for index, component in enumerate(knot.components):
        points = component.points
        for segment in range(len(points) - 1):
            hits, half = _under_gaps(knot, index, segment, float(config["gap"]), scale)
            cuts = [0.0]
            for s in hits:
                cuts += [max(0.0, s - half), min(1.0, s + half)]
            cuts.append(1.0)
            for start, end in zip(cuts[::2], cuts[1::2]):
                if end <= start:
                    continue
                a = points[segment, :2] + start * (points[segment + 1, :2] - points[segment, :2])
                b = points[segment, :2] + end * (points[segment + 1, :2] - points[segment, :2])
                x1, y1 = to_canvas(*a)
                x2, y2 = to_canvas(*b)
                elements.append(
                    svg.Line(
                        x1=x1, y1=y1, x2=x2, y2=y2,
                        stroke="black", stroke_width=float(config["stroke_width"]), stroke_linecap="round",
                    )
                )
    return svg.SVG(width=width, height=height, viewBox=svg.ViewBoxSpec(0, 0, width, height), elements=elements)


def save_svg(knot: BilliardKnot3D, path: Path) -> Path:
    return _write_atomic(str(svg_diagram(knot)) + "\n", Path(path))
