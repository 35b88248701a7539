"""HTTP API for steering a live shift: load, start, observe, message.

Endpoints
    POST /shift                      load a scenario (+ optional trace), get an id
    POST /shift/{id}/start?speed=x   begin wall-clock execution
    GET  /shift/{id}/state           consistent snapshot of the schedule
    POST /shift/{id}/message         {"kind": "delegate"|"reassign", "task": n}
    POST /shift/{id}/complete        {"task": n} - operator marks their task done
    GET  /shift/{id}/events          JSON-lines event stream (replay + follow)
    GET  /shift/{id}/report          full shift report once finished
"""

from __future__ import annotations

import itertools
import json
import time
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.responses import FileResponse, StreamingResponse
from pydantic import BaseModel

from ..model import shift_from_json
from ..monitor import TraceSet
from ..sim import SimOptions
from .live import LiveShift


class MessageBody(BaseModel):
    kind: str
    task: int


class CompleteBody(BaseModel):
    task: int


def create_app(console_dir: Optional[Path] = None) -> FastAPI:
    app = FastAPI(title="hrcsched service")
    shifts: dict[str, LiveShift] = {}
    ids = itertools.count(1)

    def get_shift(shift_id: str) -> LiveShift:
        shift = shifts.get(shift_id)
        if shift is None:
            raise HTTPException(status_code=404, detail="unknown shift")
        return shift

    @app.post("/shift")
    def load_shift(body: dict):
        doc = body.get("scenario", body)
        try:
            spec = shift_from_json(doc)
            trace = TraceSet.from_json(body.get("trace", {}))
        except (KeyError, ValueError, TypeError) as exc:
            raise HTTPException(status_code=400, detail=f"malformed scenario: {exc}")
        options = SimOptions()
        for key in ("reschedule", "comms"):
            if key in body.get("options", {}):
                setattr(options, key, bool(body["options"][key]))
        shift_id = str(next(ids))
        shifts[shift_id] = LiveShift(spec, trace, options)
        return {"shift": shift_id}

    @app.post("/shift/{shift_id}/start")
    def start(shift_id: str, speed: float = 1.0):
        live = get_shift(shift_id)
        try:
            live.start(speed)
        except RuntimeError:
            raise HTTPException(status_code=409, detail="shift already started")
        return {"ok": True, "speed": speed}

    @app.get("/shift/{shift_id}/state")
    def state(shift_id: str):
        return get_shift(shift_id).snapshot()

    @app.post("/shift/{shift_id}/message")
    def message(shift_id: str, body: MessageBody):
        live = get_shift(shift_id)
        outcome = live.send_message(body.kind, body.task)
        if outcome["kind"] == "message_rejected":
            code = 404 if outcome.get("reason") == "unknown_task" else 409
            raise HTTPException(status_code=code, detail=outcome.get("reason", "rejected"))
        return {"ok": True, "event": outcome}

    @app.post("/shift/{shift_id}/complete")
    def complete(shift_id: str, body: CompleteBody):
        live = get_shift(shift_id)
        outcome = live.complete_task(body.task)
        if not outcome["ok"]:
            code = 404 if outcome["reason"] == "unknown_task" else 409
            raise HTTPException(status_code=code, detail=outcome["reason"])
        return {"ok": True}

    @app.get("/shift/{shift_id}/events")
    def events(shift_id: str, start: int = 0):  # noqa: F811 - fastapi route
        live = get_shift(shift_id)

        def stream():
            index = start
            while True:
                chunk, finished = live.events_from(index)
                for event in chunk:
                    yield json.dumps(event, sort_keys=True) + "\n"
                index += len(chunk)
                if finished and not chunk:
                    return
                if not chunk:
                    time.sleep(0.02)

        return StreamingResponse(stream(), media_type="application/x-ndjson")

    @app.get("/shift/{shift_id}/report")
    def report(shift_id: str):
        doc = get_shift(shift_id).report()
        if doc is None:
            raise HTTPException(status_code=409, detail="shift not finished")
        return doc

    if console_dir is not None and console_dir.exists():
        @app.get("/")
        def index():
            return FileResponse(console_dir / "index.html")

        @app.get("/console/{path:path}")
        def console_assets(path: str):
            target = (console_dir / path).resolve()
            if not str(target).startswith(str(console_dir.resolve())) or not target.is_file():
                raise HTTPException(status_code=404)
            return FileResponse(target)

    return app
