"""Full-shift simulation: assignment, execution, quality feedback, and the
rescheduling ablation.

A shift run solves each job against the metric state accumulated so far,
executes it through the dynamic scheduler, folds the realized durations back
into the state, and moves on.  The whole pipeline is deterministic for a
given (scenario, trace, seed): reports serialize byte-identically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from . import quality
from .assignment import DEFAULT_NODE_BUDGET, SolveReport, solve_job
from .dynamics import JobEngine, JobReport, Options
from .model import MetricState, ShiftSpec
from .monitor import Monitor, ScriptedMessage, TraceSet


@dataclass
class SimOptions:
    reschedule: bool = True
    comms: bool = True
    seed: Optional[int] = None  # overrides the trace seed
    stochastic: bool = True
    node_budget: int = DEFAULT_NODE_BUDGET
    t_home_s: float = 5.0


@dataclass
class ShiftReport:
    job_reports: tuple[JobReport, ...]
    solve_reports: tuple[SolveReport, ...]
    events: tuple[dict, ...]
    final_state: MetricState
    total_cycle_ms: int
    seed: int

    def to_json(self) -> dict:
        # wall times are excluded: the report must replay byte-identically
        return {
            "seed": self.seed,
            "total_cycle": self.total_cycle_ms,
            "jobs": [r.to_json() for r in self.job_reports],
            "solves": [
                {
                    "assignment": s.assignment.to_json(),
                    "objective": s.objective,
                    "nodes": s.nodes_explored,
                    "proven_optimal": s.proven_optimal,
                }
                for s in self.solve_reports
            ],
            "events": list(self.events),
            "final_state": self.final_state.to_json(),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))


class ShiftRun:
    """Steps a shift job by job; the batch runner and the live service both
    drive their engines through this object."""

    def __init__(self, shift: ShiftSpec, trace: TraceSet, options: SimOptions = None):
        self.shift = shift
        self.options = options or SimOptions()
        seed = self.options.seed if self.options.seed is not None else trace.seed
        self.trace = TraceSet(trace.human, trace.robot, trace.messages, seed)
        self.state = MetricState.zero(shift.metrics)
        self.clock = 0
        self.events: list[dict] = []
        self.job_reports: list[JobReport] = []
        self.solve_reports: list[SolveReport] = []
        self.job_index = 0
        self._pending: tuple[ScriptedMessage, ...] = trace.messages
        self._h_cursor: dict = {}
        self._r_cursor: dict = {}
        self.engine: Optional[JobEngine] = None

    @property
    def finished(self) -> bool:
        return self.job_index >= len(self.shift.jobs) and self.engine is None

    def start_next_job(self) -> Optional[JobEngine]:
        if self.job_index >= len(self.shift.jobs):
            return None
        job = self.shift.jobs[self.job_index]
        report = solve_job(job, self.state, self.shift.metrics, self.options.node_budget)
        self.solve_reports.append(report)
        # trace occurrences are consumed in execution order across the whole
        # shift, so the cursors are owned here and shared with every monitor
        monitor = Monitor(
            job,
            self.trace,
            job_index=self.job_index,
            stochastic=self.options.stochastic,
            _h_cursor=self._h_cursor,
            _r_cursor=self._r_cursor,
        )
        self.engine = JobEngine(
            job,
            report.assignment,
            monitor,
            self.shift.metrics,
            self.state,
            Options(
                reschedule=self.options.reschedule,
                comms=self.options.comms,
                t_home_ms=int(round(self.options.t_home_s * 1000)),
            ),
            scripted=self._pending,
            start_clock=self.clock,
            events=self.events,
            job_index=self.job_index,
        )
        return self.engine

    def finish_job(self):
        engine = self.engine
        assert engine is not None and engine.done
        self.job_reports.append(engine.report)
        self.state = engine.state_after
        self.clock = engine.clock
        self._pending = tuple(
            m for i, m in enumerate(engine.pending) if i not in engine._consumed
        )
        self.job_index += 1
        self.engine = None

    def report(self) -> ShiftReport:
        return ShiftReport(
            job_reports=tuple(self.job_reports),
            solve_reports=tuple(self.solve_reports),
            events=tuple(self.events),
            final_state=self.state,
            total_cycle_ms=self.clock,
            seed=self.trace.seed,
        )


def run_shift(shift: ShiftSpec, trace: TraceSet, options: SimOptions = None) -> ShiftReport:
    """Simulate the whole shift and return the aggregated report."""
    run = ShiftRun(shift, trace, options)
    while not run.finished:
        engine = run.start_next_job()
        if engine is None:
            break
        engine.run()
        run.finish_job()
    return run.report()


@dataclass
class PolicyDiff:
    """Same trace executed with rescheduling on and off."""

    on: ShiftReport
    off: ShiftReport
    per_job: list = field(init=False)

    def __post_init__(self):
        self.per_job = []
        for a, b in zip(self.on.job_reports, self.off.job_reports):
            self.per_job.append(
                {
                    "job": a.job_id,
                    "c_on": a.cycle_ms,
                    "c_off": b.cycle_ms,
                    "delta_c": a.cycle_ms - b.cycle_ms,
                    "idle_on": dict(a.idle_ms),
                    "idle_off": dict(b.idle_ms),
                    "delta_idle": {
                        k: a.idle_ms[k] - b.idle_ms[k] for k in a.idle_ms
                    },
                }
            )

    def to_json(self) -> dict:
        return {
            "jobs": self.per_job,
            "total_c_on": self.on.total_cycle_ms,
            "total_c_off": self.off.total_cycle_ms,
        }

    def format_text(self) -> str:
        lines = [
            f"{'job':<8}{'c on':>10}{'c off':>10}{'dC':>8}"
            f"{'idleR on':>10}{'idleR off':>10}{'idleH on':>10}{'idleH off':>10}"
        ]
        for row in self.per_job:
            lines.append(
                f"{row['job']:<8}"
                f"{row['c_on'] / 1000:>10.1f}{row['c_off'] / 1000:>10.1f}"
                f"{row['delta_c'] / 1000:>8.1f}"
                f"{row['idle_on']['robot'] / 1000:>10.1f}{row['idle_off']['robot'] / 1000:>10.1f}"
                f"{row['idle_on']['human'] / 1000:>10.1f}{row['idle_off']['human'] / 1000:>10.1f}"
            )
        lines.append(
            f"total c: {self.on.total_cycle_ms / 1000:.1f} s (on) vs "
            f"{self.off.total_cycle_ms / 1000:.1f} s (off)"
        )
        return "\n".join(lines)


def compare_policies(shift: ShiftSpec, trace: TraceSet, options: SimOptions = None) -> PolicyDiff:
    """Run the identical trace with and without rescheduling."""
    base = options or SimOptions()
    on = run_shift(shift, trace, SimOptions(**{**base.__dict__, "reschedule": True}))
    off = run_shift(shift, trace, SimOptions(**{**base.__dict__, "reschedule": False}))
    return PolicyDiff(on, off)


def recompute_metrics(shift: ShiftSpec, report: ShiftReport) -> list[list[quality.MetricEvaluation]]:
    """Re-derive every job's realized metrics from the report alone
    (cross-checks the values the engines produced)."""
    state = MetricState.zero(shift.metrics)
    out = []
    for job_report in report.job_reports:
        job = shift.job(job_report.job_id)
        evals = quality.evaluate_realized(
            job, shift.metrics, state, job_report.realized, job_report.cycle_ms / 1000.0
        )
        out.append(evals)
        state = quality.update_jq(
            state, job, shift.metrics, job_report.realized, job_report.cycle_ms / 1000.0
        )
    return out
