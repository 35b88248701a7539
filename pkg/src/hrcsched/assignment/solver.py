"""Exact solver: proves optimality of the assignment MILP by implicit
enumeration and reports the schedule in canonical form."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from ..errors import Infeasible, NodeBudgetExceeded
from ..model import Assignment, JobSpec, MetricDef, MetricKind, MetricState
from . import kernel
from .milp import H, R, MilpInstance, build_milp

DEFAULT_NODE_BUDGET = 10_000_000


@dataclass(frozen=True)
class SolveReport:
    assignment: Assignment
    objective: float
    nodes_explored: int
    wall_time: float
    proven_optimal: bool

    def to_json(self) -> dict:
        return {
            "assignment": self.assignment.to_json(),
            "objective": self.objective,
            "nodes_explored": self.nodes_explored,
            "wall_time": self.wall_time,
            "proven_optimal": self.proven_optimal,
        }


def _empty_report() -> SolveReport:
    return SolveReport(Assignment((), (), 0.0), 0.0, 0, 0.0, True)


def solve(instance: MilpInstance, node_budget: int = DEFAULT_NODE_BUDGET) -> SolveReport:
    """Search the labeling space depth-first and return the proven optimum.

    Ties between equal-objective labelings are broken by the lexicographically
    smallest sorted (level, agent, task id) vector with the human ranked
    before the robot, which pins a unique canonical schedule.
    """
    n = instance.n_tasks
    if n == 0:
        return _empty_report()

    # quick completeness check for summed bounds: human-forced loads are the
    # unavoidable minimum, so violation here means no labeling exists
    m_count = instance.n_metric_constraints
    forced = np.full(n, -1, dtype=np.int8)
    for i in range(n):
        if instance.cap[H, i] and not instance.cap[R, i]:
            forced[i] = H
        elif instance.cap[R, i] and not instance.cap[H, i]:
            forced[i] = R
    for m in range(m_count):
        if instance.metric_kinds[m] == 0:
            floor = instance.metric_c0[m] + instance.k[forced == H, m].sum()
            if floor > instance.metric_bounds[m] + kernel.EPS:
                raise Infeasible(
                    f"summed metric {instance.metrics[m].metric_id} exceeds its bound "
                    f"even with every delegable task on the robot"
                )

    contrib = np.zeros((n, m_count))
    t_human = np.where(np.isfinite(instance.t[H, :]), instance.t[H, :], 0.0)
    for m in range(m_count):
        if instance.metric_kinds[m] == 1:
            contrib[:, m] = t_human * instance.k[:, m]
        else:
            contrib[:, m] = instance.k[:, m]

    min_w = np.empty(n)
    min_t = np.empty(n)
    agent_order = np.zeros((n, 2), dtype=np.int8)
    for i in range(n):
        ws = [instance.w[a, i] for a in (H, R) if instance.cap[a, i]]
        ts = [instance.t[a, i] for a in (H, R) if instance.cap[a, i]]
        min_w[i] = min(ws)
        min_t[i] = min(ts)
        # try the cheaper agent first so the first incumbent is already good
        if instance.cap[R, i] and (not instance.cap[H, i] or instance.w[R, i] < instance.w[H, i]):
            agent_order[i] = (R, H)
        else:
            agent_order[i] = (H, R)

    started = time.perf_counter()
    status, best_obj, best_level, best_agent, nodes = kernel.search(
        n,
        instance.t,
        instance.w,
        instance.cap,
        contrib,
        instance.metric_kinds,
        instance.metric_bounds,
        instance.metric_c0,
        instance.metric_tm,
        instance.pred_ptr,
        instance.pred_idx,
        agent_order,
        min_w,
        min_t,
        forced,
        instance.t_a_max,
        node_budget,
    )
    elapsed = time.perf_counter() - started

    if status == kernel.STATUS_BUDGET:
        raise NodeBudgetExceeded(nodes, node_budget)
    if status == kernel.STATUS_INFEASIBLE:
        raise Infeasible("no labeling satisfies the quality bounds")

    assignment = _extract_assignment(instance, best_level, best_agent)
    return SolveReport(
        assignment=assignment,
        objective=float(best_obj),
        nodes_explored=int(nodes),
        wall_time=elapsed,
        proven_optimal=True,
    )


def _extract_assignment(instance: MilpInstance, level_of, agent_of) -> Assignment:
    n = instance.n_tasks
    n_levels = int(level_of.max())
    levels = []
    cycles = []
    for lv in range(1, n_levels + 1):
        s_h = tuple(instance.task_ids[i] for i in range(n) if level_of[i] == lv and agent_of[i] == H)
        s_r = tuple(instance.task_ids[i] for i in range(n) if level_of[i] == lv and agent_of[i] == R)
        wl_h = sum(instance.t[H, i] for i in range(n) if level_of[i] == lv and agent_of[i] == H)
        wl_r = sum(instance.t[R, i] for i in range(n) if level_of[i] == lv and agent_of[i] == R)
        levels.append((s_h, s_r))
        cycles.append(float(max(wl_h, wl_r)))

    # any pause demanded by an average bound is appended to the last level
    total = sum(cycles)
    required = total
    for m in range(instance.n_metric_constraints):
        if instance.metric_kinds[m] == 1:
            num = instance.metric_c0[m] + sum(
                instance.t[H, i] * instance.k[i, m] for i in range(n) if agent_of[i] == H
            )
            floor = num / instance.metric_bounds[m] - instance.metric_tm[m]
            required = max(required, floor)
    if required > total and cycles:
        cycles[-1] += required - total

    objective = sum(
        instance.w[agent_of[i], i] for i in range(n)
    ) + sum(cycles) / instance.t_a_max
    return Assignment(tuple(levels), tuple(cycles), float(objective))


def solve_job(
    job: JobSpec,
    state: MetricState,
    metrics: tuple[MetricDef, ...],
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> SolveReport:
    """Convenience wrapper: build the instance for ``job`` and solve it."""
    return solve(build_milp(job, state, metrics), node_budget)
