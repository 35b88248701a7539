"""Job-quality metrics: summed and time-averaged human load, plus the
cross-job state update that feeds the next assignment.

The raw-cost convention is used throughout: an average metric accumulates
``duration * load`` for every task the human actually executed, and its value
over a horizon is ``(C0 + sum(duration_i * k_i)) / (t_m + c)``.  A summed
metric accumulates the plain loads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .errors import MissingRealization, UnknownMetric, ZeroHorizon
from .model import AgentId, Assignment, JobSpec, MetricDef, MetricKind, MetricState


@dataclass(frozen=True)
class MetricEvaluation:
    metric_id: str
    kind: MetricKind
    value: float
    bound: float

    @property
    def satisfied(self) -> bool:
        return self.value <= self.bound + 1e-9

    def to_json(self) -> dict:
        return {
            "id": self.metric_id,
            "kind": self.kind.value,
            "value": self.value,
            "bound": self.bound,
            "satisfied": self.satisfied,
        }


def _metric_index(job: JobSpec, metrics: tuple[MetricDef, ...], metric_id: str) -> int:
    for idx, m in enumerate(metrics):
        if m.metric_id == metric_id:
            return idx
    raise UnknownMetric(metric_id)


def summed_metric(
    job: JobSpec,
    metrics: tuple[MetricDef, ...],
    state: MetricState,
    metric_id: str,
    human_tasks,
) -> float:
    """Cumulative cost plus the loads of the tasks assigned to the human."""
    idx = _metric_index(job, metrics, metric_id)
    total = state.c0(metric_id)
    for tid in human_tasks:
        total += job.task(tid).quality_load[idx]
    return total


def average_metric(
    job: JobSpec,
    metrics: tuple[MetricDef, ...],
    state: MetricState,
    metric_id: str,
    human_durations: Mapping[int, float],
    cycle: float,
) -> float:
    """Time-averaged load over the metric horizon.

    ``human_durations`` maps each human task to the duration used for the
    evaluation: nominal times when estimating a fresh schedule, realized times
    when re-evaluating after execution.  ``cycle`` is the corresponding job
    cycle time c.
    """
    idx = _metric_index(job, metrics, metric_id)
    horizon = state.t_m(metric_id) + cycle
    if horizon <= 0:
        raise ZeroHorizon(f"metric {metric_id}: t_m + c = 0")
    num = state.c0(metric_id)
    for tid, dur in human_durations.items():
        num += float(dur) * job.task(tid).quality_load[idx]
    return num / horizon


def estimate_assignment(
    job: JobSpec,
    metrics: tuple[MetricDef, ...],
    state: MetricState,
    assignment: Assignment,
) -> list[MetricEvaluation]:
    """Evaluate every metric for a nominal schedule, using nominal human times."""
    human = assignment.human_tasks
    nominal = {tid: job.task(tid).nominal_time[AgentId.HUMAN] for tid in human}
    out = []
    for m in metrics:
        if m.kind is MetricKind.SUMMED:
            value = summed_metric(job, metrics, state, m.metric_id, human)
        else:
            value = average_metric(job, metrics, state, m.metric_id, nominal, assignment.total_cycle)
        out.append(MetricEvaluation(m.metric_id, m.kind, value, m.bound))
    return out


def evaluate_realized(
    job: JobSpec,
    metrics: tuple[MetricDef, ...],
    state: MetricState,
    realized: Mapping[int, tuple[AgentId, float]],
    realized_cycle: float,
) -> list[MetricEvaluation]:
    """Evaluate every metric from what actually happened during the job."""
    human = {tid: dur for tid, (agent, dur) in realized.items() if agent is AgentId.HUMAN}
    out = []
    for m in metrics:
        if m.kind is MetricKind.SUMMED:
            value = summed_metric(job, metrics, state, m.metric_id, human.keys())
        else:
            value = average_metric(job, metrics, state, m.metric_id, human, realized_cycle)
        out.append(MetricEvaluation(m.metric_id, m.kind, value, m.bound))
    return out


def update_jq(
    state: MetricState,
    job: JobSpec,
    metrics: tuple[MetricDef, ...],
    realized: Mapping[int, tuple[AgentId, float]],
    realized_cycle: float,
) -> MetricState:
    """Fold one executed job into the metric state.

    Human-executed tasks contribute ``k`` (summed metrics) or
    ``realized_duration * k`` (average metrics); robot-executed tasks,
    including delegated ones, contribute nothing.  The elapsed horizon grows
    by the realized job cycle for every metric.
    """
    executed = set(realized)
    missing = set(job.task_ids) - executed
    if missing:
        raise MissingRealization(f"job {job.job_id}: no realization for tasks {sorted(missing)}")
    cumulative = dict(state.cumulative)
    elapsed = dict(state.elapsed)
    for idx, m in enumerate(metrics):
        add = 0.0
        for tid, (agent, dur) in realized.items():
            if agent is not AgentId.HUMAN:
                continue
            load = job.task(tid).quality_load[idx]
            add += load if m.kind is MetricKind.SUMMED else float(dur) * load
        cumulative[m.metric_id] = cumulative.get(m.metric_id, 0.0) + add
        elapsed[m.metric_id] = elapsed.get(m.metric_id, 0.0) + float(realized_cycle)
    return MetricState(cumulative, elapsed)
