"""Command-line interface: ``interlock {generate,check,unlock,sweep,export}``.

Exit codes: 0 success, 1 a checked predicate failed, 2 usage or input
error, 3 infeasible construction.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from .checks import sweep_csv, sweep_epsilon, validate_construction
from .construction import (InfeasibleError, TangleSpec, build_full_scene, build_positive_control,
                           build_tangle, build_ten_chain, equilateral_frame)
from .geom import GeometryError
from .planner import PlannerConfig, campaign_csv, run_campaign
from .sceneio import SceneFormatError, read_scene, witness_to_dict, write_json, write_obj, write_scene

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3

KINDS = ("tangle", "ten-chain", "full", "control-two-vs-four", "control-three-vs-three")


class UsageError(Exception):
    pass


def _err(msg: str) -> None:
    print(f"interlock: {msg}", file=sys.stderr)


def _write_text(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _load(path: str):
    try:
        return read_scene(path)
    except SceneFormatError as exc:
        raise UsageError(str(exc)) from None


# ---------------------------------------------------------------------------
# commands


def cmd_generate(args) -> int:
    if args.epsilon is not None and not args.epsilon > 0:
        raise UsageError("--epsilon must be positive")
    if args.side is not None and not args.side > 0:
        raise UsageError("--side must be positive")
    eps = args.epsilon if args.epsilon is not None else (0.6 if args.kind == "tangle" else 0.01)
    side = args.side if args.side is not None else 1.0
    leg = args.leg if args.leg is not None else 5.0
    try:
        if args.kind == "tangle":
            scene = build_tangle(TangleSpec(eps))
        elif args.kind == "ten-chain":
            scene = build_ten_chain(equilateral_frame(side, eps))
        elif args.kind == "full":
            scene = build_full_scene(equilateral_frame(side, eps), leg)
        else:
            scene = build_positive_control(args.kind.removeprefix("control-").replace("-", "_"))
        report = validate_construction(scene)
    except (InfeasibleError, ValueError, GeometryError) as exc:
        _err(f"infeasible construction: {exc}")
        return EXIT_INFEASIBLE
    if not report.all_passed:
        _err(f"infeasible construction: {', '.join(report.failed)}")
        return EXIT_INFEASIBLE
    write_scene(scene, args.out)
    if args.plot:
        from .plotting import plot_scene

        plot_scene(scene, args.plot, title=f"{args.kind} (eps = {scene.eps:g})")
    return EXIT_OK


def cmd_check(args) -> int:
    scene = _load(args.scene)
    try:
        report = validate_construction(scene)
    except (KeyError, GeometryError, ValueError) as exc:
        raise UsageError(f"cannot check scene: {exc}") from None
    print(report.format())
    print("all predicates pass" if report.all_passed else f"{len(report.failed)} predicate(s) fail")
    if args.report:
        write_json(report.to_dict(), args.report)
    if args.plot:
        from .plotting import plot_scene

        plot_scene(scene, args.plot)
    return EXIT_OK if report.all_passed else EXIT_FAIL


def cmd_unlock(args) -> int:
    scene = _load(args.scene)
    if args.seeds < 0 or args.budget < 0 or args.workers < 1:
        raise UsageError("--seeds and --budget must be non-negative and --workers positive")
    try:
        cfg = PlannerConfig(budget=args.budget, step_size=args.step, R_sep=args.r_sep, goal_bias=args.goal_bias)
        reports = run_campaign(scene, cfg, range(args.seeds), workers=args.workers)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _write_text(campaign_csv(reports), args.out)
    if args.witness_out:
        first = next((r for r in reports if r.separated), None)
        if first is not None:
            write_json(witness_to_dict(first, scene), args.witness_out)
        else:
            _err("no seed separated the chains; no witness written")
    if args.plot:
        from .plotting import plot_campaign

        plot_campaign(reports, args.plot)
    return EXIT_OK


def _eps_list(text: str) -> list[float]:
    parts = [p.strip() for p in text.split(",") if p.strip()]
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise UsageError(f"bad --epsilons value {text!r}") from None
    if not values:
        raise UsageError("--epsilons is empty")
    if any(not v > 0 for v in values):
        raise UsageError("--epsilons must be positive")
    if any(b >= a for a, b in zip(values, values[1:])):
        raise UsageError("--epsilons must be strictly descending")
    return values


def cmd_sweep(args) -> int:
    eps = _eps_list(args.epsilons)
    if args.samples < 0:
        raise UsageError("--samples must be non-negative")
    rows = sweep_epsilon("equilateral", eps, args.samples, args.seed)
    _write_text(sweep_csv(rows), args.out)
    if args.plot:
        from .plotting import plot_sweep

        plot_sweep(rows, args.plot)
    return EXIT_OK


def cmd_export(args) -> int:
    scene = _load(args.scene)
    write_obj(scene, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="interlock", description="Interlocked chain constructions, checks and experiments.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="build a scene and write it as JSON")
    g.add_argument("--kind", required=True, choices=KINDS)
    g.add_argument("--epsilon", type=float, help="corner ball radius (default 0.01; 0.6 for tangle)")
    g.add_argument("--side", type=float, help="side of the equilateral frame (default 1)")
    g.add_argument("--leg", type=float, help="2-chain leg length (default 5)")
    g.add_argument("--out", required=True)
    g.add_argument("--plot", help="also render the scene to this image file")
    g.set_defaults(func=cmd_generate)

    c = sub.add_parser("check", help="validate a scene file")
    c.add_argument("--scene", required=True)
    c.add_argument("--report", help="write the validation report as JSON")
    c.add_argument("--plot", help="also render the scene to this image file")
    c.set_defaults(func=cmd_check)

    u = sub.add_parser("unlock", help="run the randomized unlock planner over several seeds")
    u.add_argument("--scene", required=True)
    u.add_argument("--seeds", type=int, default=10, help="run seeds 0..n-1")
    u.add_argument("--budget", type=int, default=10_000)
    u.add_argument("--step", type=float, default=1.0, help="step size (capped at clearance/2)")
    u.add_argument("--r-sep", type=float, default=None, help="separation radius (default: twice the anchor diameter)")
    u.add_argument("--goal-bias", type=float, default=0.2)
    u.add_argument("--workers", type=int, default=1)
    u.add_argument("--witness-out", help="write the first successful witness as JSON")
    u.add_argument("--out", help="CSV output path (default: stdout)")
    u.add_argument("--plot", help="also plot best separation per seed")
    u.set_defaults(func=cmd_unlock)

    s = sub.add_parser("sweep", help="|vN| envelope over a descending list of eps")
    s.add_argument("--epsilons", required=True, help="comma-separated, strictly descending")
    s.add_argument("--samples", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", help="CSV output path (default: stdout)")
    s.add_argument("--plot", help="also plot the envelope against the bounds")
    s.set_defaults(func=cmd_sweep)

    e = sub.add_parser("export", help="export a scene for offline viewing")
    e.add_argument("--scene", required=True)
    e.add_argument("--format", required=True, choices=("obj",))
    e.add_argument("--out", required=True)
    e.set_defaults(func=cmd_export)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        _err(str(exc))
        return EXIT_USAGE
    except OSError as exc:
        _err(str(exc))
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
