"""Dynamic scheduler: drives one job's nominal schedule against monitored
execution, local rescheduling and human/robot messages.

The per-level loop is realized as a discrete-event machine over integer
milliseconds.  Every tick processes, in order: completions and failures,
at most one pending message per agent (human first), task starts, and the
robot-idle rescheduling check.  A level ends when both agents are idle and
their level tuples are exhausted.

Identical inputs always produce an identical event log: simultaneous events
are ordered by (kind priority: completion < message < wake, then task id)
and all state lives in plain lists owned by one logical thread.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .. import quality
from ..errors import TraceMismatch
from ..model import AgentId, Assignment, JobSpec, MetricDef, MetricState
from ..monitor import Monitor, ScriptedMessage

#: Synthetic homing task pushed to the robot after an abort.
T_HOME = -1
DEFAULT_T_HOME_MS = 5000

REASSIGN = "reassign"
DELEGATE = "delegate"


@dataclass
class Execution:
    task: int
    start: int
    end: Optional[int]  # None: completion arrives externally (live mode)
    fail_at: Optional[int] = None
    synthetic: bool = False


@dataclass
class TaskRecord:
    task: int
    agent: AgentId
    start: int
    end: int
    level: int
    synthetic: bool = False
    aborted: bool = False


@dataclass
class Options:
    reschedule: bool = True
    comms: bool = True
    t_home_ms: int = DEFAULT_T_HOME_MS


def _planned_pauses(job: JobSpec, assignment: Assignment) -> list[int]:
    """Minimum duration (ms) of each level, nonzero only where the plan
    inflated the cycle above the nominal workload to satisfy an average
    quality bound.  The pause is rounded up so the realized horizon is never
    shorter than the planned one."""
    import math

    out = []
    for (s_h, s_r), c in zip(assignment.levels, assignment.cycle_times):
        wl_h = sum(job.task(t).nominal_time[AgentId.HUMAN] or 0.0 for t in s_h)
        wl_r = sum(job.task(t).nominal_time[AgentId.ROBOT] or 0.0 for t in s_r)
        workload = max(wl_h, wl_r)
        out.append(int(math.ceil(c * 1000)) if c > workload + 1e-9 else 0)
    return out


def fill_selection(
    candidates: Iterable[tuple[int, int, tuple[int, ...]]],
    completed: set[int],
    t_res_ms: int,
) -> list[int]:
    """Greedy first-fit scan of the robot's future tasks, in schedule order.

    ``candidates`` yields (task, nominal robot ms, predecessors).  A task is
    selected when its predecessors are all completed and the cumulative
    nominal time of the selection still fits the estimated idle window; the
    first pick must fit strictly (no point rescheduling work that cannot
    finish before the human does).  Single linear pass.
    """
    picked: list[int] = []
    used = 0
    for task, t_nom, preds in candidates:
        if any(p not in completed for p in preds):
            continue
        if not picked:
            if t_nom < t_res_ms:
                picked.append(task)
                used = t_nom
        elif used + t_nom <= t_res_ms:
            picked.append(task)
            used += t_nom
    return picked


class JobEngine:
    """Executes one job's assignment; shared by the batch simulator and the
    live service (which feeds completions and messages in real time)."""

    def __init__(
        self,
        job: JobSpec,
        assignment: Assignment,
        monitor: Monitor,
        metrics: tuple[MetricDef, ...],
        state: MetricState,
        options: Options = None,
        scripted: tuple[ScriptedMessage, ...] = (),
        start_clock: int = 0,
        events: list = None,
        job_index: int = 0,
    ):
        self.job = job
        self.assignment = assignment
        self.monitor = monitor
        self.metrics = metrics
        self.state_before = state
        self.opt = options or Options()
        self.clock = start_clock
        self.start_clock = start_clock
        self.events = events if events is not None else []
        self.job_index = job_index

        self.levels_h = [list(s_h) for s_h, _ in assignment.levels]
        self.levels_r = [list(s_r) for _, s_r in assignment.levels]
        self.min_level_ms = _planned_pauses(job, assignment)
        self.level = 1
        self.level_start = start_clock
        self.level_marks: list[tuple[int, int, int]] = []  # (level, start, end)

        self.exec_h: Optional[Execution] = None
        self.exec_r: Optional[Execution] = None
        self.anticipated: dict[int, int] = {}  # pulled task -> its planned level
        self.completed: set[int] = set()
        self.records: list[TaskRecord] = []
        self.pending: list[ScriptedMessage] = [m for m in scripted]
        self._consumed: set[int] = set()
        self._robot_delegate: Optional[int] = None
        self.done = len(assignment.levels) == 0
        self.state_after: Optional[MetricState] = None
        self.report: Optional[JobReport] = None

        self._emit("job_start", job=job.job_id, job_index=job_index,
                   assignment=assignment.to_json())
        if self.done:
            self._finalize()
        else:
            self._emit("level_start", level=1)
            self.tick(start_clock)

    # ------------------------------------------------------------------
    # event plumbing
    # ------------------------------------------------------------------

    def _emit(self, kind: str, **fields):
        entry = {"seq": len(self.events), "t": self.clock, "kind": kind}
        entry.update(fields)
        self.events.append(entry)

    # ------------------------------------------------------------------
    # schedule surgery shared by messages and rescheduling
    # ------------------------------------------------------------------

    def _locate(self, task: int, levels: list[list[int]]) -> Optional[int]:
        for idx in range(self.level - 1, len(levels)):
            if task in levels[idx]:
                return idx
        return None

    def _preds_done(self, task: int) -> bool:
        return all(p in self.completed for p in self.job.predecessors(task))

    def _reject(self, sender: AgentId, kind: str, task: int, reason: str):
        self._emit("message_rejected", sender=sender.value, msg=kind, task=task, reason=reason)

    def _human_capable(self, task: int) -> bool:
        return task in self.job.task_ids and self.job.task(task).capable(AgentId.HUMAN)

    def _robot_capable(self, task: int) -> bool:
        return task in self.job.task_ids and self.job.task(task).capable(AgentId.ROBOT)

    def _apply_human_message(self, kind: str, task: int) -> bool:
        """Alg. 3, human branch; returns True when the schedules changed."""
        if task not in self.job.task_ids:
            self._reject(AgentId.HUMAN, kind, task, "unknown_task")
            return False
        if task in self.completed:
            self._reject(AgentId.HUMAN, kind, task, "already_completed")
            return False
        if kind == REASSIGN:
            executing = self.exec_r is not None and self.exec_r.task == task
            lv = self._locate(task, self.levels_r)
            if not executing and lv is None:
                self._reject(AgentId.HUMAN, kind, task, "not_robot_task")
                return False
            if not self._human_capable(task):
                self._reject(AgentId.HUMAN, kind, task, "human_incapable")
                return False
            if not executing and not self._preds_done(task):
                self._reject(AgentId.HUMAN, kind, task, "predecessors_pending")
                return False
            if executing:
                self._abort_robot()
                self.levels_r[self.level - 1].insert(0, T_HOME)
                self._emit("home_enqueued", level=self.level)
            else:
                self.levels_r[lv].remove(task)
            self.levels_h[self.level - 1].insert(0, task)
            self._emit("message_accepted", sender=AgentId.HUMAN.value, msg=kind, task=task)
            self._emit("task_moved", task=task, **{"from": AgentId.ROBOT.value},
                       to=AgentId.HUMAN.value, level=self.level)
            return True
        if kind == DELEGATE:
            if self.exec_h is not None and self.exec_h.task == task:
                self._reject(AgentId.HUMAN, kind, task, "executing")  # human tasks are not preempted
                return False
            lv = self._locate(task, self.levels_h)
            if lv is None:
                self._reject(AgentId.HUMAN, kind, task, "not_human_task")
                return False
            if not self._robot_capable(task):
                self._reject(AgentId.HUMAN, kind, task, "robot_incapable")
                return False
            if not self._preds_done(task):
                self._reject(AgentId.HUMAN, kind, task, "predecessors_pending")
                return False
            self.levels_h[lv].remove(task)
            self.levels_r[self.level - 1].insert(0, task)
            self._emit("message_accepted", sender=AgentId.HUMAN.value, msg=kind, task=task)
            self._emit("task_moved", task=task, **{"from": AgentId.HUMAN.value},
                       to=AgentId.ROBOT.value, level=self.level)
            return True
        self._reject(AgentId.HUMAN, kind, task, "unknown_kind")
        return False

    def _apply_robot_message(self, kind: str, task: int) -> bool:
        """Alg. 3, robot branch: delegate the task the robot is executing."""
        if kind != DELEGATE:
            self._reject(AgentId.ROBOT, kind, task, "unknown_kind")
            return False
        if self.exec_r is None or self.exec_r.task != task or self.exec_r.synthetic:
            self._reject(AgentId.ROBOT, kind, task, "not_executing")
            return False
        if not self._human_capable(task):
            self._reject(AgentId.ROBOT, kind, task, "human_incapable")
            # robot retries the task from scratch after the failed attempt
            rec = self.monitor.start_robot(task)
            self.exec_r.end = self.clock + rec.duration_ms
            self.exec_r.fail_at = None
            return False
        self._abort_robot()
        self.levels_h[self.level - 1].insert(0, task)
        self.levels_r[self.level - 1].insert(0, T_HOME)
        self._emit("home_enqueued", level=self.level)
        self._emit("message_accepted", sender=AgentId.ROBOT.value, msg=kind, task=task)
        self._emit("task_moved", task=task, **{"from": AgentId.ROBOT.value},
                   to=AgentId.HUMAN.value, level=self.level)
        return True

    def _abort_robot(self):
        ex = self.exec_r
        self.records.append(TaskRecord(ex.task, AgentId.ROBOT, ex.start, self.clock,
                                       self.level, ex.synthetic, aborted=True))
        self._emit("robot_abort", task=ex.task)
        self.anticipated.pop(ex.task, None)
        self.exec_r = None

    # ------------------------------------------------------------------
    # message queue (at most one consumed per agent per tick)
    # ------------------------------------------------------------------

    def _poll(self, sender: AgentId, now: int) -> Optional[ScriptedMessage]:
        for idx, msg in enumerate(self.pending):
            if idx in self._consumed or msg.sender is not sender or msg.at_ms > now:
                continue
            self._consumed.add(idx)
            return msg
        return None

    def _earliest_pending(self) -> Optional[int]:
        times = [m.at_ms for i, m in enumerate(self.pending) if i not in self._consumed]
        return min(times) if times else None

    def inject_message(self, sender: AgentId, kind: str, task: int, at_ms: Optional[int] = None):
        self.pending.append(ScriptedMessage(self.clock if at_ms is None else at_ms,
                                            sender, kind, task))

    # ------------------------------------------------------------------
    # execution
    # ------------------------------------------------------------------

    def _start_human(self, now: int):
        queue = self.levels_h[self.level - 1]
        if not queue:
            return False
        task = queue[0]
        if not self._preds_done(task):
            return False  # blocked until predecessors complete
        queue.pop(0)
        rec = self.monitor.start_human(task)
        end = now + rec.duration_ms if rec is not None else None
        self.exec_h = Execution(task, now, end)
        self._emit("task_start", task=task, agent=AgentId.HUMAN.value)
        return True

    def _start_robot(self, now: int):
        queue = self.levels_r[self.level - 1]
        if not queue:
            return False
        task = queue[0]
        if task == T_HOME:
            queue.pop(0)
            self.exec_r = Execution(T_HOME, now, now + self.opt.t_home_ms, synthetic=True)
            self._emit("task_start", task=T_HOME, agent=AgentId.ROBOT.value, synthetic=True)
            return True
        if not self._preds_done(task):
            return False
        queue.pop(0)
        rec = self.monitor.start_robot(task)
        fail_at = None
        if rec.fail_after_ms is not None and rec.fail_after_ms < rec.duration_ms:
            fail_at = now + rec.fail_after_ms
        self.exec_r = Execution(task, now, now + rec.duration_ms, fail_at=fail_at)
        self._emit("task_start", task=task, agent=AgentId.ROBOT.value)
        return True

    def _complete(self, ex: Execution, agent: AgentId):
        self.records.append(TaskRecord(ex.task, agent, ex.start, ex.end, self.level, ex.synthetic))
        if not ex.synthetic:
            self.completed.add(ex.task)
        self._emit("task_complete", task=ex.task, agent=agent.value)

    def inject_human_complete(self, task: int, now: int) -> bool:
        if self.exec_h is None or self.exec_h.task != task:
            return False
        self.exec_h.end = now
        self.tick(now)
        return True

    # ------------------------------------------------------------------
    # rescheduling (Alg. 2)
    # ------------------------------------------------------------------

    def reschedule(self, now: int) -> bool:
        """Pull precedence-ready future robot tasks into the idle window."""
        ex = self.exec_h
        if ex is None:
            return False
        t_res = self.monitor.t_res_ms(ex.task, now - ex.start)
        candidates = []
        for lv in range(self.level, len(self.levels_r)):
            for task in self.levels_r[lv]:
                t_nom = self.job.task(task).nominal_time.get(AgentId.ROBOT)
                if t_nom is None:
                    continue
                candidates.append((task, int(round(t_nom * 1000)), self.job.predecessors(task)))
        picked = fill_selection(candidates, self.completed, t_res)
        if not picked:
            return False
        for task in picked:
            lv = self._locate(task, self.levels_r)
            self.anticipated[task] = lv + 1
            self.levels_r[lv].remove(task)
        self.levels_r[self.level - 1].extend(picked)
        self._emit("reschedule_pull", tasks=list(picked), t_res=t_res, level=self.level)
        return True

    # ------------------------------------------------------------------
    # the tick
    # ------------------------------------------------------------------

    def _level_work_done(self) -> bool:
        """The level's own work is finished.  A still-running task that was
        anticipated from a later level does not hold the boundary: it only
        ever consumes robot idle, and successors stay gated by the
        predecessor-completion check at start."""
        if self.exec_h is not None:
            return False
        if self.levels_h[self.level - 1] or self.levels_r[self.level - 1]:
            return False
        if self.exec_r is None:
            return True
        return self.anticipated.get(self.exec_r.task, 0) > self.level

    def next_event_time(self) -> Optional[int]:
        times = []
        if self.exec_h is not None and self.exec_h.end is not None:
            times.append(self.exec_h.end)
        if self.exec_r is not None:
            if self.exec_r.fail_at is not None:
                times.append(self.exec_r.fail_at)
            if self.exec_r.end is not None:
                times.append(self.exec_r.end)
        if self.opt.comms:
            pending = self._earliest_pending()
            if pending is not None:
                times.append(max(pending, self.clock))
        if not self.done and self._level_work_done():
            times.append(self.level_start + self.min_level_ms[self.level - 1])
        return min(times) if times else None

    def tick(self, now: int):
        """Process every action due at ``now``; loops until a fixed point."""
        if self.done:
            return
        if now < self.clock:
            raise TraceMismatch("clock moved backwards")
        self.clock = now
        consumed = {AgentId.HUMAN: False, AgentId.ROBOT: False}
        for _ in range(20 + 4 * len(self.job.tasks) + len(self.pending)):
            progress = False

            # completions and failures (robot first, per the scheduler loop)
            ex = self.exec_r
            if ex is not None and ex.fail_at is not None and ex.fail_at <= now:
                ex.fail_at = None
                self._emit("robot_failure", task=ex.task)
                self._robot_delegate = ex.task
                progress = True
            ex = self.exec_r
            if ex is not None and ex.end is not None and ex.end <= now and ex.fail_at is None \
                    and self._robot_delegate != ex.task:
                self._complete(ex, AgentId.ROBOT)
                self.exec_r = None
                progress = True
            ex = self.exec_h
            if ex is not None and ex.end is not None and ex.end <= now:
                self._complete(ex, AgentId.HUMAN)
                self.exec_h = None
                progress = True

            # messages: the operator's decisions take priority over the robot's
            if self.opt.comms and not consumed[AgentId.HUMAN]:
                msg = self._poll(AgentId.HUMAN, now)
                if msg is not None:
                    consumed[AgentId.HUMAN] = True
                    self._apply_human_message(msg.kind, msg.task)
                    progress = True
            if self._robot_delegate is not None:
                task = self._robot_delegate
                self._robot_delegate = None
                self._apply_robot_message(DELEGATE, task)
                progress = True
            elif self.opt.comms and not consumed[AgentId.ROBOT]:
                msg = self._poll(AgentId.ROBOT, now)
                if msg is not None:
                    consumed[AgentId.ROBOT] = True
                    if self.exec_r is not None and self.exec_r.task == msg.task:
                        # scripted robot delegate behaves like an injected failure
                        self._emit("robot_failure", task=msg.task)
                        self._apply_robot_message(msg.kind, msg.task)
                    else:
                        self._reject(AgentId.ROBOT, msg.kind, msg.task, "not_executing")
                    progress = True

            # next task per agent (human first)
            if self.exec_h is None and self._start_human(now):
                progress = True
            if self.exec_r is None and self._start_robot(now):
                progress = True

            # robot exhausted its level while the human still works: reschedule
            if (
                self.opt.reschedule
                and self.exec_r is None
                and not self.levels_r[self.level - 1]
                and self.exec_h is not None
                and self.level < len(self.levels_r)
            ):
                if self.reschedule(now):
                    progress = True

            # level boundary (waiting out any planned pause first)
            if (
                self._level_work_done()
                and now >= self.level_start + self.min_level_ms[self.level - 1]
            ):
                self.level_marks.append((self.level, self.level_start, now))
                self._emit("level_end", level=self.level, c=now - self.level_start)
                if self.level == len(self.levels_h):
                    self._finalize()
                    return
                self.level += 1
                self.level_start = now
                self._emit("level_start", level=self.level)
                progress = True

            if not progress:
                return
        raise TraceMismatch("scheduler tick did not reach a fixed point")

    def run(self):
        """Batch mode: fast-forward to each next event until the job ends."""
        while not self.done:
            t = self.next_event_time()
            if t is None:
                raise TraceMismatch(
                    f"job {self.job.job_id}: no scheduled events while tasks remain"
                )
            self.tick(max(t, self.clock))
        return self.report

    # ------------------------------------------------------------------
    # finalization
    # ------------------------------------------------------------------

    def _finalize(self):
        self.done = True
        missing = set(self.job.task_ids) - self.completed
        if missing:
            raise TraceMismatch(f"job {self.job.job_id}: tasks never completed: {sorted(missing)}")

        realized = {}
        for rec in self.records:
            if not rec.synthetic and not rec.aborted:
                realized[rec.task] = (rec.agent, (rec.end - rec.start) / 1000.0)

        cycle_ms = self.clock - self.start_clock
        idle = {AgentId.HUMAN: 0, AgentId.ROBOT: 0}
        for _, start, end in self.level_marks:
            busy = {AgentId.HUMAN: 0, AgentId.ROBOT: 0}
            for rec in self.records:
                # anticipated work may run across a boundary: clip to the window
                overlap = min(rec.end, end) - max(rec.start, start)
                if overlap > 0:
                    busy[rec.agent] += overlap
            for agent in idle:
                idle[agent] += (end - start) - busy[agent]

        self.state_after = quality.update_jq(
            self.state_before, self.job, self.metrics, realized, cycle_ms / 1000.0
        )
        evaluations = quality.evaluate_realized(
            self.job, self.metrics, self.state_before, realized, cycle_ms / 1000.0
        )
        self._emit("job_end", cycle=cycle_ms,
                   metrics=[e.to_json() for e in evaluations])
        self.report = JobReport(
            job_id=self.job.job_id,
            job_index=self.job_index,
            records=tuple(self.records),
            level_cycles=tuple((lv, end - start) for lv, start, end in self.level_marks),
            cycle_ms=cycle_ms,
            idle_ms={a.value: idle[a] for a in idle},
            realized={t: (a, d) for t, (a, d) in realized.items()},
            metrics=tuple(evaluations),
            state_after=self.state_after,
        )

    def snapshot(self) -> dict:
        """Consistent view of the live schedule for the service layer."""
        return {
            "clock": self.clock,
            "job": self.job.job_id,
            "job_index": self.job_index,
            "level": self.level,
            "done": self.done,
            "schedules": {
                "S_H": [list(q) for q in self.levels_h],
                "S_R": [list(q) for q in self.levels_r],
            },
            "current": {
                "human": None if self.exec_h is None else self.exec_h.task,
                "robot": None if self.exec_r is None else self.exec_r.task,
            },
            "completed": sorted(self.completed),
        }


@dataclass(frozen=True)
class JobReport:
    """What actually happened during one job."""

    job_id: str
    job_index: int
    records: tuple[TaskRecord, ...]
    level_cycles: tuple[tuple[int, int], ...]  # (level, realized c in ms)
    cycle_ms: int
    idle_ms: dict
    realized: dict
    metrics: tuple[quality.MetricEvaluation, ...]
    state_after: MetricState

    def to_json(self) -> dict:
        return {
            "job": self.job_id,
            "job_index": self.job_index,
            "tasks": [
                {
                    "task": r.task,
                    "agent": r.agent.value,
                    "start": r.start,
                    "end": r.end,
                    "level": r.level,
                    "synthetic": r.synthetic,
                    "aborted": r.aborted,
                }
                for r in self.records
            ],
            "levels": [{"level": lv, "c": c} for lv, c in self.level_cycles],
            "cycle": self.cycle_ms,
            "idle": dict(self.idle_ms),
            "metrics": [e.to_json() for e in self.metrics],
            "state_after": self.state_after.to_json(),
        }
