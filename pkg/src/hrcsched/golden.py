"""Accessors for the bundled two-job assembly shift and its scripted traces.

The shift mirrors the experiment data (nine pick/place/packaging tasks with
one average lifted-weight metric bounded at 1.1); the traces reproduce its
headline runs: a nominal execution with the slow weight placement, and a
communication run where the operator delegates task 5 and later takes task 2
back from the robot.
"""

from __future__ import annotations

import json
from importlib import resources

from .model import ShiftSpec, shift_from_json
from .monitor import TraceSet


def _load(name: str) -> dict:
    with resources.files("hrcsched.data").joinpath(name).open() as fh:
        return json.load(fh)


def table2_shift() -> ShiftSpec:
    return shift_from_json(_load("shift_table2.json"))


def job1_only() -> ShiftSpec:
    doc = _load("shift_table2.json")
    doc["jobs"] = doc["jobs"][:1]
    return shift_from_json(doc)


def trace_nominal() -> TraceSet:
    """Nominal run: no messages, task 5 takes 15 s on the human."""
    return TraceSet.from_json(_load("trace_nominal.json"))


def trace_comms() -> TraceSet:
    """Communication run: delegate(5) at t=50 s, reassign(2) at t=80 s."""
    return TraceSet.from_json(_load("trace_comms.json"))


def data_path(name: str):
    """Filesystem path of a bundled data file (for CLI-facing tests/docs)."""
    return resources.files("hrcsched.data").joinpath(name)
