"""Quality metrics: summed/average evaluation and cross-job state updates."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hrcsched.errors import MissingRealization, UnknownMetric, ZeroHorizon
from hrcsched.model import (
    AgentId,
    Assignment,
    JobSpec,
    MetricDef,
    MetricKind,
    MetricState,
    make_task,
)
from hrcsched.quality import (
    average_metric,
    estimate_assignment,
    summed_metric,
    update_jq,
)

METRICS = (MetricDef("K1", MetricKind.AVERAGE, 1.1),)


def weighted_job():
    tasks = (
        make_task(5, t_human=10, t_robot=25, quality_load=[9]),
        make_task(6, t_human=10, t_robot=25, quality_load=[9]),
        make_task(7, t_human=25, t_robot=None, quality_load=[0]),
    )
    return JobSpec("q", tasks)


SUMMED = (MetricDef("S", MetricKind.SUMMED, 100.0),)


class TestSummedMetric:
    def test_direct_summation(self):
        job = weighted_job()
        state = MetricState({"S": 4.0}, {"S": 0.0})
        assert summed_metric(job, SUMMED, state, "S", [5, 6]) == pytest.approx(22.0)

    def test_no_human_tasks(self):
        job = weighted_job()
        assert summed_metric(job, SUMMED, MetricState.zero(SUMMED), "S", []) == 0.0

    def test_unknown_metric(self):
        with pytest.raises(UnknownMetric):
            summed_metric(weighted_job(), SUMMED, MetricState.zero(SUMMED), "nope", [])


class TestAverageMetric:
    def test_realized_job1_value(self):
        # the slow weight placement: 15 s at load 9 over a 79 s cycle
        job = weighted_job()
        state = MetricState.zero(METRICS)
        value = average_metric(job, METRICS, state, "K1", {5: 15.0}, 79.0)
        assert value == pytest.approx(135.0 / 79.0, abs=1e-12)
        assert value == pytest.approx(1.709, abs=1e-3)

    def test_no_weighted_tasks(self):
        job = weighted_job()
        state = MetricState.zero(METRICS)
        assert average_metric(job, METRICS, state, "K1", {7: 25.0}, 50.0) == 0.0

    def test_nominal_estimate(self):
        job = weighted_job()
        state = MetricState.zero(METRICS)
        value = average_metric(job, METRICS, state, "K1", {5: 10.0}, 85.0)
        assert value == pytest.approx(90.0 / 85.0, abs=1e-12)

    def test_zero_horizon(self):
        with pytest.raises(ZeroHorizon):
            average_metric(weighted_job(), METRICS, MetricState.zero(METRICS), "K1", {}, 0.0)


class TestUpdateJq:
    def test_job1_feedback(self):
        job = weighted_job()
        state = MetricState.zero(METRICS)
        realized = {
            5: (AgentId.HUMAN, 15.0),
            6: (AgentId.ROBOT, 25.0),
            7: (AgentId.HUMAN, 25.0),
        }
        nxt = update_jq(state, job, METRICS, realized, 79.0)
        assert nxt.c0("K1") == pytest.approx(135.0)
        assert nxt.t_m("K1") == pytest.approx(79.0)

    def test_summed_kind_accumulates_loads(self):
        job = weighted_job()
        realized = {
            5: (AgentId.HUMAN, 15.0),
            6: (AgentId.HUMAN, 11.0),
            7: (AgentId.HUMAN, 25.0),
        }
        nxt = update_jq(MetricState.zero(SUMMED), job, SUMMED, realized, 60.0)
        assert nxt.c0("S") == pytest.approx(18.0)  # loads, not load*duration

    def test_delegated_task_contributes_nothing(self):
        job = weighted_job()
        realized = {
            5: (AgentId.ROBOT, 25.0),
            6: (AgentId.ROBOT, 25.0),
            7: (AgentId.HUMAN, 25.0),
        }
        nxt = update_jq(MetricState.zero(METRICS), job, METRICS, realized, 75.0)
        assert nxt.c0("K1") == 0.0
        assert nxt.t_m("K1") == pytest.approx(75.0)

    def test_missing_realization(self):
        job = weighted_job()
        with pytest.raises(MissingRealization):
            update_jq(MetricState.zero(METRICS), job, METRICS, {5: (AgentId.HUMAN, 1.0)}, 10.0)

    @given(
        dur=st.floats(0.1, 100),
        cycle=st.floats(0.1, 200),
        c0=st.floats(0, 500),
        t0=st.floats(0, 500),
    )
    @settings(max_examples=100)
    def test_state_nondecreasing(self, dur, cycle, c0, t0):
        job = weighted_job()
        state = MetricState({"K1": c0}, {"K1": t0})
        realized = {
            5: (AgentId.HUMAN, dur),
            6: (AgentId.ROBOT, 25.0),
            7: (AgentId.HUMAN, 25.0),
        }
        nxt = update_jq(state, job, METRICS, realized, cycle)
        assert nxt.c0("K1") >= state.c0("K1")
        assert nxt.t_m("K1") >= state.t_m("K1")


@given(scale=st.floats(0.1, 10))
@settings(max_examples=60)
def test_average_metric_scale_invariant_when_loads_are_rates(scale):
    """Scaling every duration and the cycle leaves the ratio fixed when C0=0."""
    job = weighted_job()
    state = MetricState.zero(METRICS)
    base = average_metric(job, METRICS, state, "K1", {5: 15.0}, 79.0)
    scaled = average_metric(job, METRICS, state, "K1", {5: 15.0 * scale}, 79.0 * scale)
    assert scaled == pytest.approx(base)


def test_estimate_matches_solver_constraint_handling(job1, table2):
    """The solver's own feasibility handling and a fresh estimate must agree."""
    from hrcsched.assignment import solve_job

    state = MetricState.zero(table2.metrics)
    report = solve_job(job1, state, table2.metrics)
    for evaluation in estimate_assignment(job1, table2.metrics, state, report.assignment):
        assert evaluation.satisfied


def test_assignment_estimate_uses_declared_cycle():
    job = weighted_job()
    assignment = Assignment((((5,), ()), ((7,), (6,))), (10.0, 75.0), 0.0)
    evals = estimate_assignment(job, METRICS, MetricState.zero(METRICS), assignment)
    assert evals[0].value == pytest.approx(90.0 / 85.0)
