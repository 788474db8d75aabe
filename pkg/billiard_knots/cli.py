"""Command-line front end.

Subcommands: ``elliptic``, ``poncelet``, ``simulate``, ``knot``, ``verify``
and ``export``.  Results go to stdout; logging goes to stderr at the level
named by ``BILLIARD_KNOTS_LOG_LEVEL``.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from billiard_knots.config_registry import setting
from billiard_knots.constants import LOG_LEVEL_ENV
from billiard_knots.errors import (
    BilliardKnotError,
    BirkhoffConvergenceError,
    DegenerateArcLengthError,
    DegenerateCausticError,
    DiagramError,
    EllipticDomainError,
    GenericityExhaustedError,
    InfeasibleHeightsError,
    InvariantMismatchError,
    NoRootError,
    RequestError,
)
from billiard_knots.models import KnotRequest
from billiard_knots.modules.elliptic_engine import Modulus, jacobi_sn_cn_dn
from billiard_knots.modules.exporters import load_knot_json, save_knot_json, save_obj, save_svg
from billiard_knots.modules.geometry_engine import Ellipse, Line2, caustic_from_chord, simulate, simulate_chords
from billiard_knots.modules.knot_pipeline import run
from billiard_knots.modules.lift_engine import verify
from billiard_knots.modules.poncelet_engine import (
    birkhoff_polygon,
    central_symmetry_residual,
    darboux_point,
    darboux_residual,
    graves_spread,
    polygon,
    solve_caustic,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NO_ROOT = 3
EXIT_CHECK_FAILED = 4
EXIT_INFEASIBLE_HEIGHTS = 5
EXIT_GENERICITY_EXHAUSTED = 6
EXIT_INVARIANT_MISMATCH = 7

# First match wins.
_EXIT_CODES: tuple[tuple[type[Exception], int], ...] = (
    (NoRootError, EXIT_NO_ROOT),
    (BirkhoffConvergenceError, EXIT_CHECK_FAILED),
    (InfeasibleHeightsError, EXIT_INFEASIBLE_HEIGHTS),
    (DegenerateArcLengthError, EXIT_CHECK_FAILED),
    (GenericityExhaustedError, EXIT_GENERICITY_EXHAUSTED),
    (InvariantMismatchError, EXIT_INVARIANT_MISMATCH),
    (DiagramError, EXIT_CHECK_FAILED),
    (BilliardKnotError, EXIT_INPUT),
    (OSError, EXIT_INPUT),
)


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def _configure_logging() -> None:
    name = os.environ.get(LOG_LEVEL_ENV, "WARNING").strip().upper()
    level = getattr(logging, name, None)
    logging.basicConfig(
        level=level if isinstance(level, int) else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def exit_code_for(exc: Exception) -> int:
    for kind, code in _EXIT_CODES:
        if isinstance(exc, kind):
            return code
    raise exc


def _parse_argument(text: str, modulus: Modulus) -> float:
    """A float, or a multiple of the quarter period written ``K``, ``2K``, ``-0.5K``."""
    cleaned = text.strip()
    try:
        if cleaned.endswith("K"):
            factor = cleaned[:-1].strip().rstrip("*")
            scale = {"": 1.0, "+": 1.0, "-": -1.0}.get(factor)
            return (float(factor) if scale is None else scale) * modulus.K
        return float(cleaned)
    except ValueError as exc:
        raise EllipticDomainError(f"Cannot read argument {text!r}; use a number or a multiple of K.") from exc


def _print_json(payload: dict[str, Any]) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True))


def _check(residual: float, tolerance: float) -> dict[str, Any]:
    return {"residual": residual, "tolerance": tolerance, "passed": residual < tolerance}


def _load_request(path: Path) -> KnotRequest:
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise RequestError(f"Request file {path.name} is not valid JSON.") from exc
    if not isinstance(payload, dict):
        raise RequestError("Request file must hold a JSON object.")
    return KnotRequest.from_dict(payload)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_elliptic(args: argparse.Namespace) -> int:
    modulus = Modulus(args.k)
    u = _parse_argument(args.u, modulus)
    triple = jacobi_sn_cn_dn(u, modulus)
    print(f"u={u!r}")
    print(f"k={modulus.k!r}")
    print(f"sn={triple.sn!r}")
    print(f"cn={triple.cn!r}")
    print(f"dn={triple.dn!r}")
    print(f"am={triple.am!r}")
    print(f"K={modulus.K!r}")
    return EXIT_OK


def cmd_poncelet(args: argparse.Namespace) -> int:
    ellipse = Ellipse(args.A, args.B)
    frame = solve_caustic(ellipse, args.n, args.p)
    poly = polygon(frame, args.n, args.p, args.phi)
    limits = setting("poncelet", "checks")
    checks: dict[str, dict[str, Any]] = {}

    if args.check_simulator:
        start, toward = poly.vertices[0], poly.vertices[1]
        bounced = simulate(ellipse, start, toward - start, args.n)
        expected = np.vstack([poly.vertices, poly.vertices[:1]])
        residual = float(np.max(np.linalg.norm(bounced - expected, axis=1)))
        checks["simulator"] = _check(residual, float(limits["simulator"]))
    if args.check_graves:
        rng = np.random.default_rng(args.seed)
        phis = rng.uniform(0.0, 4.0 * frame.modulus.K, int(limits["graves_samples"]))
        spread = graves_spread(frame, args.n, args.p, phis.tolist()) / poly.perimeter
        checks["graves"] = _check(spread, float(limits["graves_relative"]))
    if args.check_darboux:
        checks["darboux"] = _check(darboux_residual(poly), float(limits["darboux"]))
        checks["darboux"]["point"] = darboux_point(poly).tolist()
        checks["central_symmetry"] = _check(central_symmetry_residual(poly), float(limits["symmetry"]))
    if args.check_birkhoff:
        lam = birkhoff_polygon(ellipse, args.n, args.p, poly.vertices[0]).frame.lam
        checks["birkhoff"] = _check(abs(lam - frame.lam), float(limits["birkhoff_lambda"]))

    _print_json(
        {
            "ellipse": ellipse.to_dict(),
            "n": args.n,
            "p": args.p,
            "phi": poly.phi,
            "lambda": frame.lam,
            "k_squared": frame.modulus.k_squared,
            "perimeter": poly.perimeter,
            "closure_gap": poly.closure_gap(),
            "vertices": poly.vertices.tolist(),
            "tangency_points": poly.tangency_points.tolist(),
            "checks": checks,
        }
    )
    failed = [name for name, check in checks.items() if not check["passed"]]
    if failed:
        logger.warning("Failed checks: %s", ", ".join(failed))
        return EXIT_CHECK_FAILED
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    ellipse = Ellipse(args.A, args.B)
    trace = simulate_chords(ellipse, (args.x, args.y), (args.dx, args.dy), args.steps)
    lams: list[float] = []
    print(f"{'#':>5} {'x':>20} {'y':>20} {'lambda':>20}")
    for index, (first, second) in enumerate(zip(trace.points, trace.points[1:])):
        try:
            lam = caustic_from_chord(ellipse, Line2.through(first, second)).lam
            lams.append(lam)
            shown = f"{lam:20.15f}"
        except DegenerateCausticError:
            shown = f"{'centre':>20}"
        print(f"{index:>5} {first[0]:20.15f} {first[1]:20.15f} {shown}")
    last = trace.points[-1]
    print(f"{len(trace.points) - 1:>5} {last[0]:20.15f} {last[1]:20.15f}")
    if lams:
        print(f"lambda spread: {max(lams) - min(lams):.3e}")
    return EXIT_OK


def cmd_knot(args: argparse.Namespace) -> int:
    request = _load_request(args.request)
    build = run(request, seed=args.seed, delta=args.delta, m_max=args.m_max)
    out_dir = args.out_dir if args.out_dir is not None else args.request.parent
    stem = args.request.stem
    json_path = save_knot_json(
        build.knot,
        out_dir / f"{stem}.knot.json",
        request=request.to_dict(),
        invariant=build.invariant.to_dict(),
        verify=build.report.to_dict(),
        build=build.summary(),
    )
    svg_path = save_svg(build.knot, out_dir / f"{stem}.svg")
    obj_path = save_obj(build.knot, out_dir / f"{stem}.obj")
    _print_json(
        {
            "summary": build.summary(),
            "verify": build.report.to_dict(),
            "invariant": build.invariant.to_dict(),
            "files": [str(json_path), str(svg_path), str(obj_path)],
        }
    )
    return EXIT_OK if build.report.passed else EXIT_CHECK_FAILED


def cmd_verify(args: argparse.Namespace) -> int:
    report = verify(load_knot_json(args.knot))
    _print_json(report.to_dict())
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def cmd_export(args: argparse.Namespace) -> int:
    if args.svg is None and args.obj is None:
        raise RequestError("Nothing to export; pass --svg and/or --obj.")
    knot = load_knot_json(args.knot)
    if args.svg is not None:
        print(save_svg(knot, args.svg))
    if args.obj is not None:
        print(save_obj(knot, args.obj))
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="billiard-knots",
        description="Billiard trajectories in an elliptic cylinder realising quasitoric braid closures.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    elliptic = commands.add_parser("elliptic", help="Evaluate Jacobi elliptic functions.")
    elliptic.add_argument("--u", default="0", help="Argument; a number or a multiple of K such as 'K' or '2K'.")
    elliptic.add_argument("--k", type=float, required=True, help="Modulus, 0 <= k < 1.")
    elliptic.set_defaults(handler=cmd_elliptic)

    poncelet = commands.add_parser("poncelet", help="Build a periodic (n, p) billiard polygon.")
    poncelet.add_argument("-A", type=float, default=2.0, help="Semi-major axis (default: 2).")
    poncelet.add_argument("-B", type=float, default=1.0, help="Semi-minor axis (default: 1).")
    poncelet.add_argument("-n", type=int, required=True, help="Number of sides.")
    poncelet.add_argument("-p", type=int, required=True, help="Winding number.")
    poncelet.add_argument("--phi", type=float, default=0.0, help="Start parameter (default: 0).")
    poncelet.add_argument("--seed", type=int, default=0, help="Seed for the Graves samples (default: 0).")
    poncelet.add_argument("--check-simulator", action="store_true", help="Compare with the billiard simulator.")
    poncelet.add_argument("--check-graves", action="store_true", help="Perimeter independence of the start.")
    poncelet.add_argument("--check-darboux", action="store_true", help="Diagonal concurrency (even n).")
    poncelet.add_argument("--check-birkhoff", action="store_true", help="Caustic of the maximal-perimeter polygon.")
    poncelet.set_defaults(handler=cmd_poncelet)

    sim = commands.add_parser("simulate", help="Bounce a ray inside the ellipse.")
    sim.add_argument("-A", type=float, default=2.0, help="Semi-major axis (default: 2).")
    sim.add_argument("-B", type=float, default=1.0, help="Semi-minor axis (default: 1).")
    sim.add_argument("--x", type=float, required=True, help="Start point x (on the ellipse).")
    sim.add_argument("--y", type=float, required=True, help="Start point y (on the ellipse).")
    sim.add_argument("--dx", type=float, required=True, help="Initial direction x.")
    sim.add_argument("--dy", type=float, required=True, help="Initial direction y.")
    sim.add_argument("--steps", type=int, default=10, help="Number of bounces (default: 10).")
    sim.set_defaults(handler=cmd_simulate)

    knot = commands.add_parser("knot", help="Build a billiard knot from a request JSON file.")
    knot.add_argument("request", type=Path, help="Request JSON: {p, n, signs, ellipse: {A, B}, ...}.")
    knot.add_argument("--out-dir", type=Path, default=None, help="Output directory (default: next to the request).")
    knot.add_argument("--seed", type=int, default=None, help="Seed for start-parameter sampling.")
    knot.add_argument("--delta", type=float, default=None, help="Height margin, 0 < delta < 1/4.")
    knot.add_argument("--m-max", type=int, default=None, help="Largest sawtooth frequency to try.")
    knot.set_defaults(handler=cmd_knot)

    check = commands.add_parser("verify", help="Re-verify a saved knot file.")
    check.add_argument("knot", type=Path, help="Knot JSON written by 'knot'.")
    check.set_defaults(handler=cmd_verify)

    export = commands.add_parser("export", help="Regenerate SVG/OBJ artifacts from a saved knot.")
    export.add_argument("knot", type=Path, help="Knot JSON written by 'knot'.")
    export.add_argument("--svg", type=Path, default=None, help="SVG diagram path.")
    export.add_argument("--obj", type=Path, default=None, help="OBJ polyline path.")
    export.set_defaults(handler=cmd_export)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    _configure_logging()
    args = build_parser().parse_args(argv)
    handler: Callable[[argparse.Namespace], int] = args.handler
    try:
        return handler(args)
    except (BilliardKnotError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exit_code_for(exc)


if __name__ == "__main__":
    raise SystemExit(main())
