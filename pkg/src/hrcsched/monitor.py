"""Simulated execution monitoring: human progress estimation and robot
completion/failure tracking.

The perception stack is replaced by scripted traces that expose the same
interface the scheduler consumes: a completion percentage for the human's
current task and a done/failed signal for the robot.  The remaining-time
estimate is deliberately biased by the nominal duration, matching the live
estimator it stands in for: ``t_res = (1 - pct) * t_nominal``.

All engine-facing times are integer milliseconds.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Optional, Sequence

import numpy as np

from .errors import TraceMismatch
from .model import AgentId, JobSpec

MS = 1000

#: Spread of the lognormal multiplier applied to nominal human durations when
#: the trace does not script a task occurrence.
DEFAULT_SIGMA = 0.25


def to_ms(seconds: float) -> int:
    return int(round(float(seconds) * MS))


class RobotSignal(Enum):
    RUNNING = "running"
    DONE = "done"
    FAILED = "failed"


@dataclass(frozen=True)
class HumanTaskTrace:
    """One scripted human execution: realized duration plus a progress profile."""

    task: int
    duration_ms: int
    profile: Optional[tuple[tuple[int, float], ...]] = None  # (elapsed_ms, pct), monotone

    def __post_init__(self):
        if self.duration_ms <= 0:
            raise TraceMismatch(f"task {self.task}: realized duration must be > 0")
        if self.profile is not None:
            pts = self.profile
            if pts[0] != (0, 0.0) or pts[-1][0] != self.duration_ms or pts[-1][1] != 1.0:
                raise TraceMismatch(f"task {self.task}: profile must span (0,0) to (duration,1)")
            for (t0, p0), (t1, p1) in zip(pts, pts[1:]):
                if t1 < t0 or p1 < p0:
                    raise TraceMismatch(f"task {self.task}: profile must be nondecreasing")

    def pct_complete(self, elapsed_ms: int) -> float:
        if elapsed_ms <= 0:
            return 0.0
        if elapsed_ms >= self.duration_ms:
            return 1.0
        if self.profile is None:
            return elapsed_ms / self.duration_ms
        pts = self.profile
        for (t0, p0), (t1, p1) in zip(pts, pts[1:]):
            if t0 <= elapsed_ms <= t1:
                if t1 == t0:
                    return p1
                return p0 + (p1 - p0) * (elapsed_ms - t0) / (t1 - t0)
        return 1.0


@dataclass(frozen=True)
class RobotTaskTrace:
    """One scripted robot execution; ``fail_after_ms`` injects a timeout."""

    task: int
    duration_ms: Optional[int] = None  # None: nominal
    fail_after_ms: Optional[int] = None

    def __post_init__(self):
        if self.fail_after_ms is not None and self.fail_after_ms < 0:
            raise TraceMismatch(f"task {self.task}: fail_after must be >= 0")


@dataclass(frozen=True)
class ScriptedMessage:
    at_ms: int
    sender: AgentId
    kind: str  # "delegate" | "reassign"
    task: int


@dataclass(frozen=True)
class TraceSet:
    """Scripted realizations for a whole shift, consumed occurrence by occurrence."""

    human: tuple[HumanTaskTrace, ...] = ()
    robot: tuple[RobotTaskTrace, ...] = ()
    messages: tuple[ScriptedMessage, ...] = ()
    seed: int = 0

    @classmethod
    def from_json(cls, doc: Mapping) -> "TraceSet":
        human = []
        for entry in doc.get("human", []):
            dur = to_ms(entry["duration"])
            profile = entry.get("profile", "linear")
            pts = None
            if profile != "linear":
                pts = tuple((to_ms(t), float(p)) for t, p in profile)
            human.append(HumanTaskTrace(int(entry["task"]), dur, pts))
        robot = []
        for entry in doc.get("robot", []):
            robot.append(
                RobotTaskTrace(
                    int(entry["task"]),
                    to_ms(entry["duration"]) if "duration" in entry else None,
                    to_ms(entry["fail_after"]) if "fail_after" in entry else None,
                )
            )
        messages = tuple(
            ScriptedMessage(
                to_ms(m["at"]),
                AgentId.from_json(m["sender"]),
                str(m["kind"]),
                int(m["task"]),
            )
            for m in doc.get("messages", [])
        )
        return cls(tuple(human), tuple(robot), messages, int(doc.get("seed", 0)))

    @classmethod
    def load(cls, path) -> "TraceSet":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def _keyed_lognormal(
    seed: int, job_index: int, task: int, occurrence: int, sigma: float = DEFAULT_SIGMA
) -> float:
    """Reproducible multiplier independent of draw order (paired runs must agree)."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(job_index, task, occurrence))
    z = np.random.default_rng(ss).standard_normal()
    return float(np.exp(sigma * z))


@dataclass
class Monitor:
    """Per-job view over the trace; hands the engine realized durations and
    progress estimates, drawing seeded stochastic durations where the trace
    is silent."""

    job: JobSpec
    trace: TraceSet
    job_index: int = 0
    stochastic: bool = True
    sigma: float = DEFAULT_SIGMA
    _h_cursor: dict = field(default_factory=dict)
    _r_cursor: dict = field(default_factory=dict)
    _h_occurrence: dict = field(default_factory=dict)
    _active_h: dict = field(default_factory=dict)

    def start_human(self, task: int) -> Optional[HumanTaskTrace]:
        """Select the trace record for this occurrence; None means the duration
        is unknown to the simulation (live mode: completion arrives externally)."""
        nominal = self.job.task(task).nominal_time[AgentId.HUMAN]
        if nominal is None:
            raise TraceMismatch(f"human cannot execute task {task}")
        entries = [h for h in self.trace.human if h.task == task]
        cursor = self._h_cursor.get(task, 0)
        occ = self._h_occurrence.get(task, 0)
        self._h_occurrence[task] = occ + 1
        if cursor < len(entries):
            self._h_cursor[task] = cursor + 1
            rec = entries[cursor]
        elif self.stochastic:
            mult = _keyed_lognormal(self.trace.seed, self.job_index, task, occ, self.sigma)
            rec = HumanTaskTrace(task, max(1, int(round(to_ms(nominal) * mult))))
        else:
            return None
        self._active_h[task] = rec
        return rec

    def human_record(self, task: int) -> HumanTaskTrace:
        return self._active_h[task]

    def t_res_ms(self, task: int, elapsed_ms: int) -> int:
        """Estimated remaining time of the human's current task.

        Biased estimator: percentage completion comes from the realized
        profile, the scale from the nominal duration.
        """
        nominal_ms = to_ms(self.job.task(task).nominal_time[AgentId.HUMAN])
        rec = self._active_h.get(task)
        if rec is None:
            # live mode: progress is tracked against the nominal duration
            pct = min(1.0, elapsed_ms / nominal_ms) if nominal_ms else 1.0
        else:
            pct = rec.pct_complete(elapsed_ms)
        return int(round((1.0 - pct) * nominal_ms))

    def start_robot(self, task: int) -> RobotTaskTrace:
        nominal = self.job.task(task).nominal_time[AgentId.ROBOT]
        if nominal is None:
            raise TraceMismatch(f"robot cannot execute task {task}")
        entries = [r for r in self.trace.robot if r.task == task]
        cursor = self._r_cursor.get(task, 0)
        if cursor < len(entries):
            self._r_cursor[task] = cursor + 1
            rec = entries[cursor]
            if rec.duration_ms is None:
                rec = RobotTaskTrace(task, to_ms(nominal), rec.fail_after_ms)
            return rec
        return RobotTaskTrace(task, to_ms(nominal), None)


def monitor_h(monitor: Monitor, task: int, elapsed_ms: int) -> float:
    """Remaining-time estimate in seconds for an in-progress human task."""
    return monitor.t_res_ms(task, elapsed_ms) / MS


def monitor_r(rec: RobotTaskTrace, elapsed_ms: int) -> RobotSignal:
    """Robot execution status at ``elapsed_ms`` into the task."""
    if rec.fail_after_ms is not None and elapsed_ms >= rec.fail_after_ms:
        return RobotSignal.FAILED
    if rec.duration_ms is not None and elapsed_ms >= rec.duration_ms:
        return RobotSignal.DONE
    return RobotSignal.RUNNING


def sample_human_durations(
    job: JobSpec, seed: int, job_index: int, sigma: float = DEFAULT_SIGMA
) -> dict[int, int]:
    """Deterministic stochastic durations for every human-capable task (ms)."""
    out = {}
    for task in job.tasks:
        nominal = task.nominal_time.get(AgentId.HUMAN)
        if nominal is None:
            continue
        mult = _keyed_lognormal(seed, job_index, task.id, 0, sigma)
        out[task.id] = max(1, int(round(to_ms(nominal) * mult)))
    return out
