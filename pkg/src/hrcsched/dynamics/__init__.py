"""Dynamic scheduler layer: runtime execution of a nominal assignment."""

from .engine import (
    DEFAULT_T_HOME_MS,
    DELEGATE,
    REASSIGN,
    T_HOME,
    JobEngine,
    JobReport,
    Options,
    fill_selection,
)

__all__ = [
    "JobEngine",
    "JobReport",
    "Options",
    "fill_selection",
    "T_HOME",
    "DELEGATE",
    "REASSIGN",
    "DEFAULT_T_HOME_MS",
]
