#!/usr/bin/env python3
"""Benchmark the assignment search: numba-compiled kernel vs the identical
code interpreted by CPython.

The interpreted path is what HRCSCHED_NO_NUMBA=1 selects at import time; here
both callables are exercised side by side in one process.

Usage:
    python benchmarks/bench_solver.py [--repeats 5] [--seeds 12]
"""

import argparse
import statistics
import time

import numpy as np

from hrcsched import golden
from hrcsched.assignment import build_milp, solve
from hrcsched.assignment import solver as solver_mod
from hrcsched.assignment.kernel import _search, search
from hrcsched.model import MetricState


def bench(instance, kernel, repeats):
    original = solver_mod.kernel.search
    solver_mod.kernel.search = kernel
    try:
        times = []
        report = None
        for _ in range(repeats):
            started = time.perf_counter()
            report = solve(instance)
            times.append(time.perf_counter() - started)
        return min(times), statistics.median(times), report
    finally:
        solver_mod.kernel.search = original


def random_instance(seed):
    import sys
    from pathlib import Path

    sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))
    from helpers import random_job

    rng = np.random.default_rng(seed)
    job, metrics, state = random_job(rng, n=6, n_metrics=1)
    return build_milp(job, state, metrics)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--seeds", type=int, default=8)
    args = parser.parse_args()

    shift = golden.table2_shift()
    cases = [("table2-J1", build_milp(shift.jobs[0], MetricState.zero(shift.metrics), shift.metrics))]
    for seed in range(args.seeds):
        cases.append((f"random-n6-{seed}", random_instance(seed)))

    # warm the JIT outside the timed region
    solve(cases[0][1])

    print(f"{'case':<14}{'nodes':>10}{'jit best':>12}{'pure best':>12}{'speedup':>9}")
    for name, instance in cases:
        jit_best, _, jit_report = bench(instance, search, args.repeats)
        pure_best, _, pure_report = bench(instance, _search, 1)
        assert jit_report.assignment.levels == pure_report.assignment.levels
        assert jit_report.nodes_explored == pure_report.nodes_explored
        print(
            f"{name:<14}{jit_report.nodes_explored:>10}"
            f"{jit_best * 1000:>10.2f}ms{pure_best * 1000:>10.2f}ms"
            f"{pure_best / jit_best:>8.1f}x"
        )


if __name__ == "__main__":
    main()
