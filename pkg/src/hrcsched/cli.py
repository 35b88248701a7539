"""Command line interface: solve one job, simulate or compare a shift, or
serve the live API."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .assignment import DEFAULT_NODE_BUDGET, solve_job
from .model import MetricState, load_shift
from .monitor import TraceSet
from .sim import SimOptions, compare_policies, run_shift


def _options_from_args(args) -> SimOptions:
    return SimOptions(
        reschedule=not args.no_reschedule,
        comms=not args.no_comms,
        seed=args.seed,
        node_budget=args.node_budget,
    )


def cmd_solve(args) -> int:
    shift = load_shift(args.scenario)
    job = shift.job(args.job)
    state = MetricState.zero(shift.metrics)
    if args.state:
        with open(args.state) as fh:
            state = MetricState.from_json(json.load(fh))
    report = solve_job(job, state, shift.metrics, args.node_budget)
    doc = report.assignment.to_json()
    if args.out:
        Path(args.out).write_text(json.dumps(doc, indent=2) + "\n")
    else:
        json.dump(doc, sys.stdout, indent=2)
        print()
    print(
        f"job {args.job}: objective {report.objective:.6g}, "
        f"{report.nodes_explored} nodes, {report.wall_time * 1000:.1f} ms, "
        f"optimal={report.proven_optimal}",
        file=sys.stderr,
    )
    return 0


def cmd_simulate(args) -> int:
    shift = load_shift(args.scenario)
    trace = TraceSet.load(args.trace) if args.trace else TraceSet()
    report = run_shift(shift, trace, _options_from_args(args))
    doc = report.to_json()
    if args.report:
        Path(args.report).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    else:
        json.dump(doc, sys.stdout, indent=2, sort_keys=True)
        print()
    return 0


def cmd_compare(args) -> int:
    shift = load_shift(args.scenario)
    trace = TraceSet.load(args.trace) if args.trace else TraceSet()
    diff = compare_policies(shift, trace, _options_from_args(args))
    print(diff.format_text())
    if args.json:
        Path(args.json).write_text(json.dumps(diff.to_json(), indent=2, sort_keys=True) + "\n")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    console = Path(args.console) if args.console else None
    app = create_app(console_dir=console)
    if args.scenario:
        # preload so the console finds shift "1" ready to start
        from fastapi.testclient import TestClient  # light local call, no socket

        with open(args.scenario) as fh:
            body = {"scenario": json.load(fh)}
        if args.trace:
            with open(args.trace) as fh:
                body["trace"] = json.load(fh)
        TestClient(app).post("/shift", json=body)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="hrcsched")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve the assignment for one job")
    p.add_argument("scenario")
    p.add_argument("--job", required=True)
    p.add_argument("--state", help="metric state JSON carried in from earlier jobs")
    p.add_argument("--out", help="write the assignment JSON here")
    p.add_argument("--node-budget", type=int, default=DEFAULT_NODE_BUDGET)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("simulate", help="run a whole shift against a trace")
    p.add_argument("scenario")
    p.add_argument("--trace")
    p.add_argument("--no-reschedule", action="store_true")
    p.add_argument("--no-comms", action="store_true")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--report", help="write the shift report JSON here")
    p.add_argument("--node-budget", type=int, default=DEFAULT_NODE_BUDGET)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="same trace with rescheduling on vs off")
    p.add_argument("scenario")
    p.add_argument("--trace")
    p.add_argument("--no-reschedule", action="store_true", help=argparse.SUPPRESS)
    p.add_argument("--no-comms", action="store_true")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--json", help="also write the diff as JSON")
    p.add_argument("--node-budget", type=int, default=DEFAULT_NODE_BUDGET)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("serve", help="serve the live-shift HTTP API")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--scenario", help="preload this scenario as shift 1")
    p.add_argument("--trace", help="trace for the preloaded scenario (failures etc.)")
    p.add_argument("--console", help="serve the operator console from this directory")
    p.set_defaults(func=cmd_serve)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
