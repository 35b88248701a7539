import pytest

from hrcsched import golden
from hrcsched.assignment import solve_job
from hrcsched.model import MetricState


@pytest.fixture(scope="session", autouse=True)
def warm_kernel():
    """Compile the search kernel once so timing assertions measure the search."""
    shift = golden.job1_only()
    solve_job(shift.jobs[0], MetricState.zero(shift.metrics), shift.metrics)


@pytest.fixture(scope="session")
def table2():
    return golden.table2_shift()


@pytest.fixture(scope="session")
def job1(table2):
    return table2.job("J1")


@pytest.fixture(scope="session")
def job2(table2):
    return table2.job("J2")
