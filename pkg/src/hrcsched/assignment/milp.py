"""Construction of the task-assignment MILP for one job.

The instance is the explicit coefficient form of the multi-objective program:
minimize the summed agent weights plus the normalized total cycle time,
subject to unique assignment, per-level per-agent workload bounds, strict
level precedence, and the summed/average quality bounds carried in from the
running metric state.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import InfeasibleStructure
from ..model import AgentId, JobSpec, MetricDef, MetricKind, MetricState, validate_dag

#: Human/robot indices used by the search kernel (human first: the canonical
#: tie-break orders human tuples ahead of robot tuples at equal level).
H, R = 0, 1


@dataclass
class MilpInstance:
    """Array form of the assignment program for one job.

    Binary variables x[a, i, l] (2 * n * level_cap of them) select agent and
    level per task; one continuous cycle time per level.  Times are seconds.
    """

    job: JobSpec
    task_ids: tuple[int, ...]
    t: np.ndarray            # (2, n) nominal seconds, +inf where incapable
    w: np.ndarray            # (2, n) weights
    cap: np.ndarray          # (2, n) uint8
    k: np.ndarray            # (n, M) quality loads
    metric_kinds: np.ndarray  # (M,) uint8, 1 = average
    metric_bounds: np.ndarray  # (M,)
    metric_c0: np.ndarray    # (M,) cumulative raw cost entering this job
    metric_tm: np.ndarray    # (M,) elapsed horizon entering this job
    pred_ptr: np.ndarray     # CSR over predecessor lists, task order
    pred_idx: np.ndarray
    t_a_max: float
    level_cap: int
    metrics: tuple[MetricDef, ...] = field(default_factory=tuple)

    @property
    def n_tasks(self) -> int:
        return len(self.task_ids)

    @property
    def n_binaries(self) -> int:
        return 2 * self.n_tasks * self.level_cap

    @property
    def n_continuous(self) -> int:
        return self.level_cap

    @property
    def n_metric_constraints(self) -> int:
        return len(self.metric_bounds)


def build_milp(job: JobSpec, state: MetricState, metrics: tuple[MetricDef, ...]) -> MilpInstance:
    """Assemble the instance arrays; rejects tasks no agent can execute."""
    validate_dag(job)
    ids = tuple(sorted(job.task_ids))
    n = len(ids)
    pos = {tid: i for i, tid in enumerate(ids)}

    t = np.full((2, n), np.inf)
    w = np.zeros((2, n))
    cap = np.zeros((2, n), dtype=np.uint8)
    m_count = len(metrics)
    k = np.zeros((n, m_count))
    for tid in ids:
        task = job.task(tid)
        i = pos[tid]
        for agent, ai in ((AgentId.HUMAN, H), (AgentId.ROBOT, R)):
            if task.capable(agent):
                cap[ai, i] = 1
                t[ai, i] = float(task.nominal_time[agent])
            w[ai, i] = task.cost(agent)
        if not cap[:, i].any():
            raise InfeasibleStructure(f"task {tid} cannot be executed by either agent")
        if m_count:
            k[i, :] = task.quality_load

    finite = t[np.isfinite(t)]
    t_a_max = float(finite.max()) if finite.size else 1.0

    preds: list[list[int]] = [[] for _ in range(n)]
    for a, b in job.precedence:
        preds[pos[b]].append(pos[a])
    pred_ptr = np.zeros(n + 1, dtype=np.int32)
    flat: list[int] = []
    for i in range(n):
        preds[i].sort()
        flat.extend(preds[i])
        pred_ptr[i + 1] = len(flat)
    pred_idx = np.array(flat, dtype=np.int32) if flat else np.zeros(0, dtype=np.int32)

    return MilpInstance(
        job=job,
        task_ids=ids,
        t=t,
        w=w,
        cap=cap,
        k=k,
        metric_kinds=np.array(
            [1 if m.kind is MetricKind.AVERAGE else 0 for m in metrics], dtype=np.uint8
        ),
        metric_bounds=np.array([m.bound for m in metrics]),
        metric_c0=np.array([state.c0(m.metric_id) for m in metrics]),
        metric_tm=np.array([state.t_m(m.metric_id) for m in metrics]),
        pred_ptr=pred_ptr,
        pred_idx=pred_idx,
        t_a_max=t_a_max,
        level_cap=n,
        metrics=tuple(metrics),
    )


def choose_level_count(job: JobSpec) -> int:
    """Level budget for the search: one level per task is always sufficient.

    The search only builds gap-free level prefixes, and trailing empty levels
    are dropped from the returned assignment, so the budget is not a tuning
    knob, just an upper bound.
    """
    validate_dag(job)
    return len(job.tasks)
