"""Task-assignment layer: MILP construction and the exact search."""

from .kernel import NUMBA_ENABLED
from .milp import MilpInstance, build_milp, choose_level_count
from .solver import DEFAULT_NODE_BUDGET, SolveReport, solve, solve_job

__all__ = [
    "MilpInstance",
    "build_milp",
    "choose_level_count",
    "SolveReport",
    "solve",
    "solve_job",
    "DEFAULT_NODE_BUDGET",
    "NUMBA_ENABLED",
]
