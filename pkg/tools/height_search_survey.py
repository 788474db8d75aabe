#!/usr/bin/env python3
"""Sawtooth frequency survey for billiard-knot requests.

Builds the same quasitoric request under many seeds (each seed picks a
different start parameter on the caustic) and reports the distribution of
the sawtooth frequency m chosen for each component and of the achieved
height margin.  Small m means short 3D trajectories; the margin is the
vertical gap actually obtained at the tightest crossing.
"""

from __future__ import annotations

import argparse
import statistics
import sys
from dataclasses import dataclass
from pathlib import Path


def _bootstrap_project_path() -> None:
    root = Path(__file__).resolve().parents[1]
    candidate = str(root)
    if candidate not in sys.path:
        sys.path.insert(0, candidate)


_bootstrap_project_path()

from billiard_knots.errors import BilliardKnotError
from billiard_knots.models import KnotRequest
from billiard_knots.modules.braid_engine import parse_word
from billiard_knots.modules.knot_pipeline import run


@dataclass(frozen=True)
class SurveySample:
    seed: int
    frequencies: tuple[int, ...]
    margin: float
    attempts: int
    vertices: int
    verified: bool


def survey_seed(request: KnotRequest, seed: int, *, delta: float | None, m_max: int | None) -> SurveySample | None:
    try:
        build = run(request, seed=seed, delta=delta, m_max=m_max)
    except BilliardKnotError as exc:
        print(f"seed {seed}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return None
    plans = [component.plan for component in build.knot.components]
    return SurveySample(
        seed=seed,
        frequencies=tuple(plan.m for plan in plans),
        margin=min(plan.margin for plan in plans),
        attempts=build.attempts,
        vertices=sum(len(component.points) - 1 for component in build.knot.components),
        verified=build.report.passed,
    )


def _percentile(values: list[float], p: float) -> float:
    if not values:
        return 0.0
    idx = int((len(values) - 1) * p)
    return sorted(values)[idx]


def summarize(samples: list[SurveySample]) -> dict[str, float]:
    frequencies = [float(m) for s in samples for m in s.frequencies]
    margins = [s.margin for s in samples]
    vertices = [float(s.vertices) for s in samples]
    attempts = [float(s.attempts) for s in samples]
    return {
        "m_avg": statistics.mean(frequencies),
        "m_median": statistics.median(frequencies),
        "m_p10": _percentile(frequencies, 0.1),
        "m_p90": _percentile(frequencies, 0.9),
        "m_max": max(frequencies),
        "margin_avg": statistics.mean(margins),
        "margin_min": min(margins),
        "vertices_avg": statistics.mean(vertices),
        "attempts_avg": statistics.mean(attempts),
        "verified_pct": sum(s.verified for s in samples) / len(samples),
    }


def _print_report(label: str, report: dict[str, float], *, runs: int, built: int) -> None:
    print(f"\n== {label} ==")
    print(f"Built {built}/{runs} | verified {report['verified_pct']:.1%}")
    print(
        "Frequency m "
        f"avg {report['m_avg']:.2f} | "
        f"median {report['m_median']:.0f} "
        f"(p10={report['m_p10']:.0f}, p90={report['m_p90']:.0f}, max={report['m_max']:.0f})"
    )
    print(f"Margin avg {report['margin_avg']:.4f} | min {report['margin_min']:.4f}")
    print(f"3D vertices avg {report['vertices_avg']:.1f} | start samples avg {report['attempts_avg']:.2f}")


def parse_args() -> argparse.Namespace:
    parser = argparse.ArgumentParser(description="Survey sawtooth frequencies over many seeds.")
    parser.add_argument(
        "--word",
        default="s1 s1 s1 s1 s1^-1",
        help="Quasitoric word on two strands, e.g. 's1 s1 s1^-1' (default: the padded trefoil).",
    )
    parser.add_argument("-A", type=float, default=2.0, help="Semi-major axis (default: 2).")
    parser.add_argument("-B", type=float, default=1.0, help="Semi-minor axis (default: 1).")
    parser.add_argument(
        "--runs",
        type=int,
        default=50,
        help="Number of deterministic seeds to run (default: 50).",
    )
    parser.add_argument("--delta", type=float, default=None, help="Height margin override.")
    parser.add_argument("--m-max", type=int, default=None, help="Frequency bound override.")
    return parser.parse_args()


def main() -> None:
    args = parse_args()
    if args.runs < 1:
        raise SystemExit("--runs must be >= 1")
    try:
        word = parse_word(args.word, strands=2)
        request = KnotRequest(p=2, n=len(word), signs=word.signs, A=args.A, B=args.B)
    except BilliardKnotError as exc:
        raise SystemExit(str(exc)) from exc

    samples = [
        sample
        for seed in range(args.runs)
        if (sample := survey_seed(request, seed, delta=args.delta, m_max=args.m_max)) is not None
    ]
    if not samples:
        raise SystemExit("No seed produced a knot.")

    print(
        "Sawtooth frequency survey.\n"
        f"Word: {args.word} | table A={args.A:g}, B={args.B:g} | runs: {args.runs}"
    )
    _print_report("Height search", summarize(samples), runs=args.runs, built=len(samples))


if __name__ == "__main__":
    main()
