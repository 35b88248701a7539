"""Wall-clock-paced shift execution for the operator console.

One scheduler thread owns the engine; HTTP handlers talk to it only through
the condition-guarded methods here (message injection, human completions,
snapshots).  The event log is append-only, so stream consumers replay it from
any index and then follow the tail.
"""

from __future__ import annotations

import threading
import time
from typing import Optional

from .. import quality
from ..dynamics.engine import DELEGATE, REASSIGN
from ..model import AgentId, ShiftSpec
from ..monitor import TraceSet
from ..sim import ShiftRun, SimOptions


class LiveShift:
    def __init__(self, shift: ShiftSpec, trace: TraceSet, options: SimOptions = None):
        opts = options or SimOptions()
        # live human completions arrive over HTTP unless the trace scripts them
        opts.stochastic = False
        self.run = ShiftRun(shift, trace, opts)
        self.cond = threading.Condition()
        self.speed = 1.0
        self.started = False
        self.finished = False
        self.thread: Optional[threading.Thread] = None
        self._wall_anchor = 0.0
        self._sim_anchor = 0

    # -- pacing -------------------------------------------------------

    def _sim_now(self) -> int:
        elapsed = time.monotonic() - self._wall_anchor
        return self._sim_anchor + int(elapsed * self.speed * 1000)

    def _anchor(self, sim_time: int):
        self._wall_anchor = time.monotonic()
        self._sim_anchor = sim_time

    # -- lifecycle ----------------------------------------------------

    def start(self, speed: float = 1.0):
        with self.cond:
            if self.started:
                raise RuntimeError("shift already started")
            self.started = True
            self.speed = max(1e-3, float(speed))
            self.thread = threading.Thread(target=self._loop, daemon=True)
            self.thread.start()

    def _loop(self):
        with self.cond:
            self._anchor(self.run.clock)
            while not self.run.finished:
                if self.run.engine is None:
                    if self.run.start_next_job() is None:
                        break
                    self._anchor(self.run.engine.clock)
                    self.cond.notify_all()
                    continue
                engine = self.run.engine
                if engine.done:
                    self.run.finish_job()
                    self.cond.notify_all()
                    continue
                target = engine.next_event_time()
                if target is None:
                    # waiting on the operator
                    self.cond.wait(timeout=0.5)
                    continue
                now = self._sim_now()
                if target <= now:
                    engine.tick(target)
                    self.cond.notify_all()
                    continue
                self.cond.wait(timeout=(target - now) / (self.speed * 1000.0))
            self.finished = True
            self.cond.notify_all()

    # -- operator interface --------------------------------------------

    def _advance_to_wall(self) -> int:
        """Bring the engine up to the current wall-mapped sim time."""
        engine = self.run.engine
        now = max(self._sim_now(), engine.clock)
        target = engine.next_event_time()
        while target is not None and target <= now and not engine.done:
            engine.tick(target)
            target = engine.next_event_time() if not engine.done else None
        return now

    def send_message(self, kind: str, task: int) -> dict:
        """Inject a human message at the current sim time; returns the
        resulting accept/reject event."""
        if kind not in (DELEGATE, REASSIGN):
            return {"kind": "message_rejected", "reason": "unknown_kind", "task": task}
        with self.cond:
            if not self.started:
                return self._queue_prestart(kind, task)
            engine = self.run.engine
            if engine is None or engine.done or not self.started or self.finished:
                return {"kind": "message_rejected", "reason": "no_active_job", "task": task}
            now = self._advance_to_wall()
            if engine.done:
                return {"kind": "message_rejected", "reason": "no_active_job", "task": task}
            before = len(self.run.events)
            engine.inject_message(AgentId.HUMAN, kind, task, at_ms=now)
            engine.tick(now)
            self.cond.notify_all()
            for event in self.run.events[before:]:
                if event["kind"] in ("message_accepted", "message_rejected") \
                        and event.get("task") == task and event.get("msg", kind) == kind:
                    return event
            return {"kind": "message_rejected", "reason": "not_processed", "task": task}

    def _queue_prestart(self, kind: str, task: int) -> dict:
        """Decisions taken at the console before pressing start are queued at
        t=0, so the first scheduler tick applies them ahead of any task start."""
        from ..model import AgentId as _A
        from ..monitor import ScriptedMessage

        job = self.run.shift.jobs[0]
        if task not in job.task_ids:
            return {"kind": "message_rejected", "reason": "unknown_task", "task": task}
        if kind == DELEGATE and not job.task(task).capable(_A.ROBOT):
            return {"kind": "message_rejected", "reason": "robot_incapable", "task": task}
        if kind == REASSIGN and not job.task(task).capable(_A.HUMAN):
            return {"kind": "message_rejected", "reason": "human_incapable", "task": task}
        self.run._pending = tuple(self.run._pending) + (
            ScriptedMessage(0, _A.HUMAN, kind, task),
        )
        return {"kind": "message_queued", "msg": kind, "task": task}

    def complete_task(self, task: int) -> dict:
        with self.cond:
            engine = self.run.engine
            if engine is None or engine.done or not self.started or self.finished:
                return {"ok": False, "reason": "no_active_job"}
            if task not in engine.job.task_ids:
                return {"ok": False, "reason": "unknown_task"}
            now = self._advance_to_wall()
            if engine.done or engine.exec_h is None or engine.exec_h.task != task:
                return {"ok": False, "reason": "not_current_task"}
            engine.inject_human_complete(task, now)
            self.cond.notify_all()
            return {"ok": True}

    # -- observation ----------------------------------------------------

    def snapshot(self) -> dict:
        with self.cond:
            engine = self.run.engine
            snap = {
                "started": self.started,
                "finished": self.run.finished and self.finished,
                "speed": self.speed,
                "jobs_total": len(self.run.shift.jobs),
                "jobs_done": len(self.run.job_reports),
                "state": self.run.state.to_json(),
                "events": len(self.run.events),
            }
            if engine is not None:
                snap.update(engine.snapshot())
                snap["assignment"] = engine.assignment.to_json()
                snap["metrics"] = [
                    e.to_json()
                    for e in quality.estimate_assignment(
                        engine.job, self.run.shift.metrics, engine.state_before, engine.assignment
                    )
                ]
            else:
                snap["clock"] = self.run.clock
                snap["done"] = self.run.finished
            return snap

    def events_from(self, index: int) -> tuple[list[dict], bool]:
        with self.cond:
            return list(self.run.events[index:]), self.finished

    def report(self) -> Optional[dict]:
        with self.cond:
            if not (self.run.finished and self.finished):
                return None
            return self.run.report().to_json()
