"""Domain model: agents, tasks, jobs, shifts, metrics and precedence utilities.

All types are immutable value objects once constructed; they can be shared
freely between threads.  Durations are stored in seconds.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Optional, Sequence

from .errors import CycleError

#: Weight assigned to an agent that is not capable of executing a task.
INCAPABLE_WEIGHT = 1000.0

#: Robot weight per meter of motion required by a task.
DISTANCE_WEIGHT = 0.7


class AgentId(Enum):
    """The two agents of the collaborative cell."""

    HUMAN = "human"
    ROBOT = "robot"

    @property
    def index(self) -> int:
        """Stable array index: human tuples sort before robot tuples."""
        return 0 if self is AgentId.HUMAN else 1

    @classmethod
    def from_json(cls, value: str) -> "AgentId":
        return cls(value)


AGENTS = (AgentId.HUMAN, AgentId.ROBOT)


def derive_weights(robot_distance: float, robot_capable: bool, attractiveness: float) -> tuple[float, float]:
    """Intrinsic execution costs (w_R, w_H) from the task's raw attributes.

    The robot weight grows with travel distance and is pushed past the
    incapability threshold when the robot cannot perform the task at all;
    the human weight is the task's attractiveness factor.
    """
    w_r = DISTANCE_WEIGHT * robot_distance + INCAPABLE_WEIGHT * (1 - int(bool(robot_capable)))
    w_h = float(attractiveness)
    return (w_r, w_h)


@dataclass(frozen=True)
class Task:
    """An atomic unit of work with per-agent costs and quality loads."""

    id: int
    description: str = ""
    nominal_time: Mapping[AgentId, Optional[float]] = field(default_factory=dict)
    weight: Mapping[AgentId, float] = field(default_factory=dict)
    quality_load: tuple[float, ...] = ()
    capability: Mapping[AgentId, bool] = field(default_factory=dict)
    attractiveness: float = 0.0
    robot_distance: float = 0.0

    def __post_init__(self):
        if not any(self.nominal_time.get(a) is not None for a in AGENTS):
            raise ValueError(f"task {self.id}: nominal time missing for both agents")
        for a in AGENTS:
            t = self.nominal_time.get(a)
            if t is not None and t <= 0:
                raise ValueError(f"task {self.id}: nominal time for {a.value} must be > 0")
        if any(k < 0 for k in self.quality_load):
            raise ValueError(f"task {self.id}: quality loads must be >= 0")

    def capable(self, agent: AgentId) -> bool:
        cap = self.capability.get(agent)
        if cap is None:
            cap = self.nominal_time.get(agent) is not None
        return bool(cap) and self.nominal_time.get(agent) is not None

    def time(self, agent: AgentId) -> Optional[float]:
        return self.nominal_time.get(agent)

    def cost(self, agent: AgentId) -> float:
        return float(self.weight[agent])


def make_task(
    task_id: int,
    *,
    description: str = "",
    t_human: Optional[float],
    t_robot: Optional[float],
    robot_distance: float = 0.0,
    robot_capable: Optional[bool] = None,
    attractiveness: float = 0.0,
    quality_load: Sequence[float] = (),
    weight_human: Optional[float] = None,
    weight_robot: Optional[float] = None,
) -> Task:
    """Build a Task, deriving weights from distance/attractiveness when not given.

    ``robot_capable`` defaults to the presence of a robot nominal time.  Explicit
    weights override the derivation (used by randomized tests).
    """
    if robot_capable is None:
        robot_capable = t_robot is not None
    robot_capable = bool(robot_capable) and t_robot is not None
    w_r, w_h = derive_weights(robot_distance, robot_capable, attractiveness)
    if weight_robot is not None:
        w_r = float(weight_robot)
    if weight_human is not None:
        w_h = float(weight_human)
    human_capable = t_human is not None
    if not robot_capable and w_r < INCAPABLE_WEIGHT:
        w_r = INCAPABLE_WEIGHT
    if not human_capable and w_h < INCAPABLE_WEIGHT:
        w_h = INCAPABLE_WEIGHT
    return Task(
        id=int(task_id),
        description=description,
        nominal_time={AgentId.HUMAN: t_human, AgentId.ROBOT: t_robot},
        weight={AgentId.HUMAN: w_h, AgentId.ROBOT: w_r},
        quality_load=tuple(float(k) for k in quality_load),
        capability={AgentId.HUMAN: human_capable, AgentId.ROBOT: robot_capable},
        attractiveness=float(attractiveness),
        robot_distance=float(robot_distance),
    )


@dataclass(frozen=True)
class JobSpec:
    """A set of tasks plus a precedence DAG (edge (i, j): i finishes before j starts)."""

    job_id: str
    tasks: tuple[Task, ...]
    precedence: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        ids = [t.id for t in self.tasks]
        if len(set(ids)) != len(ids):
            raise ValueError(f"job {self.job_id}: duplicate task ids")
        known = set(ids)
        for i, j in self.precedence:
            if i not in known or j not in known:
                raise ValueError(f"job {self.job_id}: precedence edge ({i}, {j}) references unknown task")
            if i == j:
                raise CycleError([i, j])
        validate_dag_edges(known, self.precedence)

    @property
    def task_ids(self) -> tuple[int, ...]:
        return tuple(t.id for t in self.tasks)

    def task(self, task_id: int) -> Task:
        for t in self.tasks:
            if t.id == task_id:
                return t
        raise KeyError(task_id)

    def predecessors(self, task_id: int) -> tuple[int, ...]:
        return tuple(i for i, j in self.precedence if j == task_id)

    def successors(self, task_id: int) -> tuple[int, ...]:
        return tuple(j for i, j in self.precedence if i == task_id)


class MetricKind(Enum):
    SUMMED = "summed"
    AVERAGE = "average"


@dataclass(frozen=True)
class MetricDef:
    """One job-quality metric: a cumulative or time-averaged human load with a bound."""

    metric_id: str
    kind: MetricKind
    bound: float

    def __post_init__(self):
        if self.bound <= 0:
            raise ValueError(f"metric {self.metric_id}: bound must be > 0")


@dataclass(frozen=True)
class MetricState:
    """Cross-job accumulator: raw cumulative cost C0 and elapsed time t_m per metric."""

    cumulative: Mapping[str, float] = field(default_factory=dict)
    elapsed: Mapping[str, float] = field(default_factory=dict)

    def c0(self, metric_id: str) -> float:
        return float(self.cumulative.get(metric_id, 0.0))

    def t_m(self, metric_id: str) -> float:
        return float(self.elapsed.get(metric_id, 0.0))

    @classmethod
    def zero(cls, metrics: Iterable[MetricDef]) -> "MetricState":
        mids = [m.metric_id for m in metrics]
        return cls({m: 0.0 for m in mids}, {m: 0.0 for m in mids})

    def to_json(self) -> dict:
        return {
            "metrics": [
                {"id": mid, "C0": self.cumulative.get(mid, 0.0), "t_m": self.elapsed.get(mid, 0.0)}
                for mid in sorted(set(self.cumulative) | set(self.elapsed))
            ]
        }

    @classmethod
    def from_json(cls, doc: Mapping) -> "MetricState":
        cum = {}
        ela = {}
        for entry in doc.get("metrics", []):
            mid = str(entry["id"])
            cum[mid] = float(entry.get("C0", 0.0))
            ela[mid] = float(entry.get("t_m", 0.0))
        return cls(cum, ela)


@dataclass(frozen=True)
class ShiftSpec:
    """An ordered sequence of jobs plus the metric definitions they share."""

    jobs: tuple[JobSpec, ...]
    metrics: tuple[MetricDef, ...] = ()

    def __post_init__(self):
        if not self.jobs:
            raise ValueError("a shift needs at least one job")
        ids = [j.job_id for j in self.jobs]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate job ids in shift")
        mids = [m.metric_id for m in self.metrics]
        if len(set(mids)) != len(mids):
            raise ValueError("duplicate metric ids in shift")

    def job(self, job_id: str) -> JobSpec:
        for j in self.jobs:
            if j.job_id == job_id:
                return j
        raise KeyError(job_id)

    def metric(self, metric_id: str) -> MetricDef:
        for m in self.metrics:
            if m.metric_id == metric_id:
                return m
        raise KeyError(metric_id)


@dataclass(frozen=True)
class Assignment:
    """Nominal schedule of one job: per level, the ordered human/robot tuples.

    ``cycle_times`` carries the planned duration c_l of every level; any pause
    needed to satisfy an average quality bound is folded into the last level.
    """

    levels: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]  # (S_H, S_R) per level
    cycle_times: tuple[float, ...]
    objective: float

    def __post_init__(self):
        if len(self.levels) != len(self.cycle_times):
            raise ValueError("level/cycle length mismatch")

    @property
    def level_count(self) -> int:
        return len(self.levels)

    def human_tuple(self, level: int) -> tuple[int, ...]:
        return self.levels[level - 1][0]

    def robot_tuple(self, level: int) -> tuple[int, ...]:
        return self.levels[level - 1][1]

    def agent_of(self, task_id: int) -> AgentId:
        for s_h, s_r in self.levels:
            if task_id in s_h:
                return AgentId.HUMAN
            if task_id in s_r:
                return AgentId.ROBOT
        raise KeyError(task_id)

    def level_of(self, task_id: int) -> int:
        for idx, (s_h, s_r) in enumerate(self.levels, start=1):
            if task_id in s_h or task_id in s_r:
                return idx
        raise KeyError(task_id)

    @property
    def human_tasks(self) -> tuple[int, ...]:
        out = []
        for s_h, _ in self.levels:
            out.extend(s_h)
        return tuple(out)

    @property
    def robot_tasks(self) -> tuple[int, ...]:
        out = []
        for _, s_r in self.levels:
            out.extend(s_r)
        return tuple(out)

    @property
    def total_cycle(self) -> float:
        return float(sum(self.cycle_times))

    def to_json(self) -> dict:
        return {
            "levels": [
                {"S_H": list(s_h), "S_R": list(s_r), "c": c}
                for (s_h, s_r), c in zip(self.levels, self.cycle_times)
            ],
            "objective": self.objective,
        }

    @classmethod
    def from_json(cls, doc: Mapping) -> "Assignment":
        levels = []
        cycles = []
        for lv in doc["levels"]:
            levels.append((tuple(int(t) for t in lv["S_H"]), tuple(int(t) for t in lv["S_R"])))
            cycles.append(float(lv["c"]))
        return cls(tuple(levels), tuple(cycles), float(doc["objective"]))


# ---------------------------------------------------------------------------
# Precedence utilities
# ---------------------------------------------------------------------------

def validate_dag_edges(task_ids: Iterable[int], edges: Iterable[tuple[int, int]]) -> None:
    """Raise CycleError when the edge set has a directed cycle.

    Iterative DFS with a grey/black coloring; the reported cycle is the first
    one closed along the search.
    """
    succ: dict[int, list[int]] = {t: [] for t in task_ids}
    for i, j in edges:
        succ[i].append(j)
    WHITE, GREY, BLACK = 0, 1, 2
    color = {t: WHITE for t in succ}
    for root in sorted(succ):
        if color[root] != WHITE:
            continue
        stack = [(root, iter(sorted(succ[root])))]
        color[root] = GREY
        path = [root]
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                if color[nxt] == GREY:
                    cycle = path[path.index(nxt):] + [nxt]
                    raise CycleError(cycle)
                if color[nxt] == WHITE:
                    color[nxt] = GREY
                    path.append(nxt)
                    stack.append((nxt, iter(sorted(succ[nxt]))))
                    advanced = True
                    break
            if not advanced:
                color[node] = BLACK
                path.pop()
                stack.pop()


def validate_dag(job: JobSpec) -> None:
    """Accept iff the job's precedence relation is acyclic."""
    validate_dag_edges(job.task_ids, job.precedence)


def longest_path_levels(job: JobSpec) -> dict[int, int]:
    """Minimal feasible level per task: 1 for sources, 1 + max over predecessors."""
    validate_dag(job)
    preds: dict[int, list[int]] = {t: [] for t in job.task_ids}
    for i, j in job.precedence:
        preds[j].append(i)
    level: dict[int, int] = {}

    def resolve(t: int) -> int:
        if t in level:
            return level[t]
        # precedence is acyclic, so plain recursion terminates
        lv = 1 + max((resolve(p) for p in preds[t]), default=0)
        level[t] = lv
        return lv

    for t in job.task_ids:
        resolve(t)
    return level


# ---------------------------------------------------------------------------
# Scenario JSON
# ---------------------------------------------------------------------------

def task_from_json(doc: Mapping, n_metrics: int) -> Task:
    t_r = doc.get("t_R")
    k = list(doc.get("k", []))
    if len(k) != n_metrics:
        raise ValueError(f"task {doc.get('id')}: expected {n_metrics} quality loads, got {len(k)}")
    return make_task(
        int(doc["id"]),
        description=str(doc.get("desc", "")),
        t_human=float(doc["t_H"]),
        t_robot=None if t_r is None else float(t_r),
        robot_distance=float(doc.get("D_R", 0.0)),
        robot_capable=bool(doc.get("capability_R", t_r is not None)),
        attractiveness=float(doc.get("u", 0.0)),
        quality_load=k,
    )


def shift_from_json(doc: Mapping) -> ShiftSpec:
    metrics = tuple(
        MetricDef(str(m["id"]), MetricKind(m["kind"]), float(m["bound"]))
        for m in doc.get("metrics", [])
    )
    jobs = []
    for jdoc in doc["jobs"]:
        tasks = tuple(task_from_json(t, len(metrics)) for t in jdoc["tasks"])
        prec = tuple((int(i), int(j)) for i, j in jdoc.get("precedence", []))
        jobs.append(JobSpec(str(jdoc["id"]), tasks, prec))
    return ShiftSpec(tuple(jobs), metrics)


def shift_to_json(shift: ShiftSpec) -> dict:
    return {
        "jobs": [
            {
                "id": job.job_id,
                "tasks": [
                    {
                        "id": t.id,
                        "desc": t.description,
                        "t_R": t.nominal_time.get(AgentId.ROBOT),
                        "t_H": t.nominal_time.get(AgentId.HUMAN),
                        "D_R": t.robot_distance,
                        "capability_R": t.capable(AgentId.ROBOT),
                        "u": t.attractiveness,
                        "k": list(t.quality_load),
                    }
                    for t in job.tasks
                ],
                "precedence": [[i, j] for i, j in job.precedence],
            }
            for job in shift.jobs
        ],
        "metrics": [
            {"id": m.metric_id, "kind": m.kind.value, "bound": m.bound} for m in shift.metrics
        ],
    }


def load_shift(path) -> ShiftSpec:
    with open(path) as fh:
        return shift_from_json(json.load(fh))
