"""Exception types shared across the scheduler layers."""


class CycleError(ValueError):
    """The precedence relation of a job contains a cycle."""

    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__(f"precedence cycle: {' -> '.join(str(t) for t in self.cycle)}")


class InfeasibleStructure(ValueError):
    """A task cannot be executed by either agent, so no assignment exists."""


class Infeasible(RuntimeError):
    """The quality bounds cannot be met by any assignment of this job."""


class NodeBudgetExceeded(RuntimeError):
    """The exact search hit its node cap before proving optimality."""

    def __init__(self, nodes, budget):
        self.nodes = nodes
        self.budget = budget
        super().__init__(f"search explored {nodes} nodes (budget {budget})")


class UnknownMetric(KeyError):
    """Metric id not declared in the shift specification."""


class ZeroHorizon(ZeroDivisionError):
    """Average metric evaluated over an empty time horizon (t_m + c = 0)."""


class MissingRealization(ValueError):
    """A realized duration is missing for an executed task."""


class UnknownTask(KeyError):
    """Message references a task that is not part of the current job."""


class RejectedSwap(ValueError):
    """A delegate/reassign request was refused (capability or state check)."""


class TraceMismatch(ValueError):
    """Execution trace is inconsistent with the scenario being simulated."""
