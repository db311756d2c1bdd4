"""Command line front end: single runs and benchmark batches."""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys

from .harness import (
    ConfigError,
    ScenarioError,
    aggregate,
    generate_scenario,
    load_config,
    run_batch,
    write_metrics_csv,
    write_trace,
    write_world_snapshot,
)
from .planners import PlannerKind, run_planner

log = logging.getLogger(__name__)


def _parse_start(text: str):
    try:
        x, y = text.split(",")
        return (int(x), int(y))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x,y integers, got {text!r}")


def _fmt(value) -> str:
    if value is None:
        return "N/A"
    return f"{value:.2f}"


def _print_summary(summary) -> None:
    planners = sorted(summary)
    width = max(len(p) for p in planners) + 2
    print(f"{'metric':<26}" + "".join(f"{p:>{width + 8}}" for p in planners))
    metric_rows = [
        ("runs", "runs"),
        ("TtL total", "ttl_total"),
        ("TtL non-trivial", "ttl_nontrivial"),
        ("TtL search area", "ttl_search_area"),
        ("TtV total", "ttv_total"),
        ("TtV non-trivial", "ttv_nontrivial"),
        ("TtV search area", "ttv_search_area"),
        ("compute ms", "compute_ms"),
    ]
    for label, attr in metric_rows:
        cells = []
        for p in planners:
            v = getattr(summary[p], attr)
            cells.append(str(v) if attr == "runs" else _fmt(v))
        print(f"{label:<26}" + "".join(f"{c:>{width + 8}}" for c in cells))


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    world = generate_scenario(cfg)
    start = args.start
    kind = PlannerKind(args.planner)
    handle = world.fresh_handle()
    outcome, trace = run_planner(handle, start, kind)

    print(f"outcome: {outcome.kind.value}")
    print(f"t_validate: {outcome.t_validate}  t_localize: {outcome.t_localize}")
    print(f"timestamps: {trace.t_end}  phase1_end: {trace.phase1_end_t}  "
          f"compute_ms: {trace.compute_ms:.3f}")
    if args.trace:
        write_trace(trace, args.trace)
        print(f"trace written to {args.trace}")
    if args.world:
        write_world_snapshot(args.world, handle.grid, world.sensors, world.wind,
                             trace.final_area or {}, start, kind.value,
                             outcome.kind.value)
        print(f"world snapshot written to {args.world}")
    return 0


def cmd_batch(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    starts = "all" if args.starts == "all" else int(args.starts)
    planners = [PlannerKind(p) for p in args.planners.split(",")] if args.planners \
        else list(PlannerKind)
    rows = run_batch(cfg, args.fires, planners, starts=starts,
                     traces_dir=args.traces_dir, workers=args.workers)
    write_metrics_csv(rows, args.out)
    failed = sum(1 for r in rows if r.outcome == "failed")
    print(f"{len(rows)} rows written to {args.out} ({failed} failed)")
    _print_summary(aggregate(rows))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="firescout",
        description="Wildfire validation/localization planners on a grid world",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one planner on one scenario")
    sim.add_argument("--config", required=True, help="scenario config JSON")
    sim.add_argument("--planner", required=True,
                     choices=[k.value for k in PlannerKind])
    sim.add_argument("--start", required=True, type=_parse_start,
                     help="UAV start cell as x,y")
    sim.add_argument("--trace", help="write the run trace (JSON lines)")
    sim.add_argument("--world", help="write a world snapshot JSON for plotting")
    sim.add_argument("--seed", type=int, help="override the config seed")
    sim.set_defaults(func=cmd_simulate)

    batch = sub.add_parser("batch", help="sweep fires x perimeter starts x planners")
    batch.add_argument("--config", required=True, help="scenario config JSON")
    batch.add_argument("--fires", type=int, required=True)
    batch.add_argument("--starts", default="all",
                       help='"all" perimeter starts or an even sample size K')
    batch.add_argument("--out", required=True, help="metrics CSV path")
    batch.add_argument("--traces-dir", help="directory for per-run trace files")
    batch.add_argument("--planners",
                       help="comma-separated subset (default: all three)")
    batch.add_argument("--seed", type=int, help="override the config seed")
    batch.add_argument("--workers", type=int, default=1,
                       help="parallel worker processes, one fire per task")
    batch.set_defaults(func=cmd_batch)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ScenarioError, FileNotFoundError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
