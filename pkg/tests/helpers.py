"""Shared test machinery: independent oracles and invariant checkers.

Everything here is deliberately written from the problem definition, not from
the implementation under test: the brute-force optimum enumerates raw
(agent, level) labelings, the assignment checker re-evaluates every
constraint from scratch, and the event-log validator replays a run without
consulting any engine internals.
"""

from __future__ import annotations

import itertools

import numpy as np

from hrcsched.model import (
    AgentId,
    Assignment,
    JobSpec,
    MetricDef,
    MetricKind,
    MetricState,
    make_task,
)

H, R = 0, 1


# ---------------------------------------------------------------------------
# random instances
# ---------------------------------------------------------------------------

def random_job(rng: np.random.Generator, n: int = None, n_metrics: int = None):
    """A random job plus metric definitions and an entry metric state."""
    if n is None:
        n = int(rng.integers(2, 7))
    if n_metrics is None:
        n_metrics = int(rng.integers(0, 3))
    ids = list(range(1, n + 1))
    edges = []
    for i, j in itertools.combinations(ids, 2):
        if rng.random() < 0.25:
            edges.append((i, j))
    tasks = []
    forced_loads = [0.0] * n_metrics
    loads = {}
    for tid in ids:
        t_h = float(np.round(rng.uniform(4, 30), 1))
        t_r = float(np.round(rng.uniform(4, 30), 1))
        shape = rng.random()
        human_only = shape < 0.15
        robot_only = shape > 0.9
        k = [float(np.round(rng.uniform(0, 8), 1)) if rng.random() < 0.5 else 0.0
             for _ in range(n_metrics)]
        loads[tid] = k
        if human_only:
            for m in range(n_metrics):
                forced_loads[m] += k[m]
        tasks.append(
            make_task(
                tid,
                t_human=None if robot_only else t_h,
                t_robot=None if human_only else t_r,
                weight_human=None if robot_only else float(np.round(rng.uniform(0.05, 2.0), 2)),
                weight_robot=None if human_only else float(np.round(rng.uniform(0.05, 2.0), 2)),
                quality_load=k,
            )
        )
    job = JobSpec(f"rand{rng.integers(1 << 30)}", tuple(tasks), tuple(edges))
    metrics = []
    cumulative = {}
    elapsed = {}
    for m in range(n_metrics):
        kind = MetricKind.SUMMED if rng.random() < 0.4 else MetricKind.AVERAGE
        if kind is MetricKind.SUMMED:
            # keep most instances feasible but leave the bound biting
            bound = forced_loads[m] + float(np.round(rng.uniform(0.5, 25.0), 1))
            c0 = float(np.round(rng.uniform(0, 5), 1))
        else:
            bound = float(np.round(rng.uniform(0.3, 4.0), 2))
            c0 = float(np.round(rng.uniform(0, 150), 1))
        metrics.append(MetricDef(f"m{m}", kind, bound))
        cumulative[f"m{m}"] = c0
        elapsed[f"m{m}"] = float(np.round(rng.uniform(0, 200), 1))
    return job, tuple(metrics), MetricState(cumulative, elapsed)


# ---------------------------------------------------------------------------
# brute-force optimum (the A-grade oracle: every labeling, no pruning)
# ---------------------------------------------------------------------------

def oracle_optimum(job: JobSpec, state: MetricState, metrics) -> float:
    """Minimum objective over every (agent, level) labeling with L = N.

    Returns +inf when no labeling satisfies capability and summed bounds.
    """
    ids = sorted(job.task_ids)
    n = len(ids)
    pos = {tid: i for i, tid in enumerate(ids)}
    t_h = np.full(n, np.inf)
    t_r = np.full(n, np.inf)
    w_h = np.zeros(n)
    w_r = np.zeros(n)
    cap_h = np.zeros(n, bool)
    cap_r = np.zeros(n, bool)
    for tid in ids:
        task = job.task(tid)
        i = pos[tid]
        if task.capable(AgentId.HUMAN):
            cap_h[i] = True
            t_h[i] = task.nominal_time[AgentId.HUMAN]
        if task.capable(AgentId.ROBOT):
            cap_r[i] = True
            t_r[i] = task.nominal_time[AgentId.ROBOT]
        w_h[i] = task.weight[AgentId.HUMAN]
        w_r[i] = task.weight[AgentId.ROBOT]
    finite = np.concatenate([t_h[np.isfinite(t_h)], t_r[np.isfinite(t_r)]])
    t_a_max = finite.max() if finite.size else 1.0

    masks = np.arange(1 << n, dtype=np.int64)
    robot = ((masks[:, None] >> np.arange(n)) & 1).astype(bool)  # True -> robot
    ok = np.ones(1 << n, bool)
    for i in range(n):
        if not cap_r[i]:
            ok &= ~robot[:, i]
        if not cap_h[i]:
            ok &= robot[:, i]
    weight = np.where(robot, w_r, w_h).sum(axis=1)

    floors = np.zeros(1 << n)
    for m, metric in enumerate(metrics):
        k_m = np.array([job.task(tid).quality_load[m] for tid in ids])
        if metric.kind is MetricKind.SUMMED:
            total = state.c0(metric.metric_id) + ((~robot) * k_m).sum(axis=1)
            ok &= total <= metric.bound + 1e-9
        else:
            contrib = np.where(np.isfinite(t_h), t_h, 0.0) * k_m
            num = state.c0(metric.metric_id) + ((~robot) * contrib).sum(axis=1)
            floors = np.maximum(floors, num / metric.bound - state.t_m(metric.metric_id))
    if not ok.any():
        return float("inf")

    edges = [(pos[i], pos[j]) for i, j in job.precedence]
    level_vectors = np.array(list(itertools.product(range(n), repeat=n)), dtype=np.int8)
    keep = np.ones(len(level_vectors), bool)
    for a, b in edges:
        keep &= level_vectors[:, a] < level_vectors[:, b]
    level_vectors = level_vectors[keep]

    th0 = np.where(np.isfinite(t_h), t_h, 0.0)
    tr0 = np.where(np.isfinite(t_r), t_r, 0.0)
    human_time = (~robot) * th0  # (2^n, n)
    robot_time = robot * tr0
    best = float("inf")
    chunk = 4096
    for lo in range(0, len(level_vectors), chunk):
        lv = level_vectors[lo:lo + chunk]
        total = np.zeros((len(lv), 1 << n))
        for level in range(n):
            member = (lv == level).astype(float)  # (K, n)
            c_h = member @ human_time.T
            c_r = member @ robot_time.T
            total += np.maximum(c_h, c_r)
        c_eff = np.maximum(total, floors[None, :])
        obj = weight[None, :] + c_eff / t_a_max
        obj[:, ~ok] = np.inf
        best = min(best, float(obj.min()))
    return best


# ---------------------------------------------------------------------------
# constraint re-evaluation for solver outputs (C1-C5, from the definitions)
# ---------------------------------------------------------------------------

def check_assignment(job: JobSpec, state: MetricState, metrics, assignment: Assignment):
    placed = {}
    for level, (s_h, s_r) in enumerate(assignment.levels, start=1):
        for tid in s_h:
            assert tid not in placed, f"task {tid} placed twice"
            placed[tid] = (AgentId.HUMAN, level)
        for tid in s_r:
            assert tid not in placed, f"task {tid} placed twice"
            placed[tid] = (AgentId.ROBOT, level)
    assert set(placed) == set(job.task_ids), "C1: not a partition of the job"

    for tid, (agent, _) in placed.items():
        assert job.task(tid).capable(agent), f"task {tid} on incapable agent"

    for i, j in job.precedence:
        assert placed[i][1] < placed[j][1], f"C3: edge {i}->{j} not strictly ordered"

    total_c = 0.0
    for level, (s_h, s_r) in enumerate(assignment.levels, start=1):
        wl_h = sum(job.task(t).nominal_time[AgentId.HUMAN] for t in s_h)
        wl_r = sum(job.task(t).nominal_time[AgentId.ROBOT] for t in s_r)
        c = assignment.cycle_times[level - 1]
        assert c >= max(wl_h, wl_r) - 1e-9, f"C2: c_{level} below workload"
        total_c += c

    for m, metric in enumerate(metrics):
        human = [tid for tid, (agent, _) in placed.items() if agent is AgentId.HUMAN]
        if metric.kind is MetricKind.SUMMED:
            value = state.c0(metric.metric_id) + sum(job.task(t).quality_load[m] for t in human)
        else:
            num = state.c0(metric.metric_id) + sum(
                job.task(t).nominal_time[AgentId.HUMAN] * job.task(t).quality_load[m]
                for t in human
            )
            horizon = state.t_m(metric.metric_id) + total_c
            value = 0.0 if horizon <= 0 else num / horizon
        assert value <= metric.bound + 1e-6, (
            f"C4/C5: metric {metric.metric_id} = {value} > {metric.bound}"
        )


# ---------------------------------------------------------------------------
# event-log replay (conservation, disjointness, precedence order)
# ---------------------------------------------------------------------------

def validate_event_log(events, jobs_by_id):
    """Replay the event stream and assert the scheduler's safety invariants.

    Tracks queue membership and executions exactly the way a console client
    would: from job_start assignments and the move/pull events alone.
    """
    job = None
    h_set: set = set()
    r_set: set = set()
    executing = {}
    completed: set = set()
    starts: dict = {}
    for event in events:
        kind = event["kind"]
        if kind == "job_start":
            job = jobs_by_id[event["job"]]
            h_set = {t for lv in event["assignment"]["levels"] for t in lv["S_H"]}
            r_set = {t for lv in event["assignment"]["levels"] for t in lv["S_R"]}
            executing = {}
            completed = set()
            starts = {}
            assert not h_set & r_set, "assignment tuples overlap"
        elif kind == "task_moved":
            task = event["task"]
            if event["from"] == "robot":
                r_set.discard(task)
                h_set.add(task)
            else:
                h_set.discard(task)
                r_set.add(task)
            assert not h_set & r_set
        elif kind == "home_enqueued":
            r_set.add(-1)
        elif kind == "task_start":
            task = event["task"]
            agent = event["agent"]
            owner = h_set if agent == "human" else r_set
            assert task in owner, f"task {task} started while not in {agent} schedule"
            owner.discard(task)
            assert task not in completed, f"task {task} restarted after completion"
            starts[task] = starts.get(task, 0) + 1
            executing[agent] = task
            if task != -1:
                for p in job.predecessors(task):
                    assert p in completed, (
                        f"task {task} started before predecessor {p} completed"
                    )
        elif kind == "robot_abort":
            task = event["task"]
            assert executing.get("robot") == task
            executing.pop("robot", None)
        elif kind == "task_complete":
            task = event["task"]
            agent = event["agent"]
            assert executing.get(agent) == task, f"{agent} completed task it never ran"
            executing.pop(agent, None)
            if task != -1:
                assert task not in completed, f"task {task} completed twice"
                completed.add(task)
        elif kind == "job_end":
            assert completed == set(job.task_ids), (
                f"conservation: completed {sorted(completed)} != job {sorted(job.task_ids)}"
            )
            assert not h_set and not r_set, "schedule queues not drained at job end"
