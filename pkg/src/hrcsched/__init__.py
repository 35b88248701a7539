"""hrcsched: exact task assignment plus dynamic scheduling for a two-agent
human-robot work shift."""

from .model import (
    AgentId,
    Assignment,
    JobSpec,
    MetricDef,
    MetricKind,
    MetricState,
    ShiftSpec,
    Task,
    derive_weights,
    longest_path_levels,
    make_task,
    validate_dag,
)

__version__ = "0.1.0"

__all__ = [
    "AgentId",
    "Task",
    "JobSpec",
    "ShiftSpec",
    "MetricDef",
    "MetricKind",
    "MetricState",
    "Assignment",
    "validate_dag",
    "longest_path_levels",
    "derive_weights",
    "make_task",
    "__version__",
]
