"""Domain model: DAG validation, level lower bounds, weight derivation."""

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hrcsched.errors import CycleError
from hrcsched.model import (
    AgentId,
    JobSpec,
    MetricState,
    derive_weights,
    longest_path_levels,
    make_task,
    shift_from_json,
    shift_to_json,
    validate_dag,
)


def simple_job(n, edges, job_id="j"):
    tasks = tuple(make_task(i, t_human=10.0, t_robot=10.0) for i in range(1, n + 1))
    return JobSpec(job_id, tasks, tuple(edges))


def seven_task_job(edges=((1, 2), (3, 4), (2, 5), (4, 6), (5, 7), (6, 7))):
    """Seven tasks whose chain structure forces four levels."""
    return simple_job(7, edges)


class TestValidateDag:
    def test_seven_task_graph_ok(self):
        validate_dag(seven_task_job())

    def test_empty_edges_ok(self):
        validate_dag(simple_job(3, ()))

    def test_two_cycle_rejected(self):
        with pytest.raises(CycleError) as err:
            simple_job(2, [(1, 2), (2, 1)])
        assert {1, 2} <= set(err.value.cycle)

    def test_longer_cycle_named(self):
        with pytest.raises(CycleError) as err:
            simple_job(4, [(1, 2), (2, 3), (3, 1)])
        cycle = err.value.cycle
        assert cycle[0] == cycle[-1] or len(set(cycle)) == len(cycle)
        assert {1, 2, 3} <= set(cycle)


def kahn_is_acyclic(n, edges):
    """Independent oracle: Kahn's algorithm succeeds iff the graph is a DAG."""
    indeg = {i: 0 for i in range(1, n + 1)}
    succ = {i: [] for i in range(1, n + 1)}
    for a, b in edges:
        indeg[b] += 1
        succ[a].append(b)
    queue = [i for i in indeg if indeg[i] == 0]
    seen = 0
    while queue:
        node = queue.pop()
        seen += 1
        for nxt in succ[node]:
            indeg[nxt] -= 1
            if indeg[nxt] == 0:
                queue.append(nxt)
    return seen == n


@given(
    n=st.integers(2, 8),
    raw=st.lists(st.tuples(st.integers(1, 8), st.integers(1, 8)), max_size=16),
)
@settings(max_examples=200, deadline=None)
def test_validate_dag_matches_kahn(n, raw):
    edges = [(a, b) for a, b in raw if a <= n and b <= n and a != b]
    try:
        simple_job(n, edges)
        accepted = True
    except CycleError:
        accepted = False
    assert accepted == kahn_is_acyclic(n, edges)


class TestLongestPathLevels:
    def test_seven_task_graph_has_four_levels(self):
        levels = longest_path_levels(seven_task_job())
        assert max(levels.values()) == 4
        assert levels[1] == levels[3] == 1

    def test_single_task(self):
        assert longest_path_levels(simple_job(1, ())) == {1: 1}

    def test_chain(self):
        levels = longest_path_levels(simple_job(3, [(1, 2), (2, 3)]))
        assert levels == {1: 1, 2: 2, 3: 3}

    @given(
        n=st.integers(2, 8),
        raw=st.lists(st.tuples(st.integers(1, 8), st.integers(1, 8)), max_size=14),
    )
    @settings(max_examples=150, deadline=None)
    def test_edges_strictly_increase_levels(self, n, raw):
        edges = [(a, b) for a, b in raw if a < b and a <= n and b <= n]
        levels = longest_path_levels(simple_job(n, edges))
        for a, b in edges:
            assert levels[a] < levels[b]


class TestDeriveWeights:
    def test_incapable_floor(self):
        w_r, _ = derive_weights(0.0, False, 0.4)
        assert w_r == 1000.0

    def test_zero_distance_capable(self):
        w_r, _ = derive_weights(0.0, True, 0.4)
        assert w_r == 0.0

    def test_distance_scaling(self):
        w_r, w_h = derive_weights(1 / 7, True, 0.4)
        assert w_r == pytest.approx(0.1)
        assert w_h == 0.4

    @given(d=st.floats(0, 100), cap=st.booleans(), u=st.floats(0, 10))
    @settings(max_examples=100)
    def test_deterministic_and_floored(self, d, cap, u):
        first = derive_weights(d, cap, u)
        assert first == derive_weights(d, cap, u)
        if not cap:
            assert first[0] >= 1000.0


class TestTaskInvariants:
    def test_requires_some_agent(self):
        with pytest.raises(ValueError):
            make_task(1, t_human=None, t_robot=None)

    def test_negative_load_rejected(self):
        with pytest.raises(ValueError):
            make_task(1, t_human=5, t_robot=5, quality_load=[-1])

    def test_incapable_weight_applied(self):
        task = make_task(1, t_human=5, t_robot=None)
        assert task.weight[AgentId.ROBOT] >= 1000
        assert not task.capable(AgentId.ROBOT)


def test_scenario_json_round_trip(table2):
    doc = shift_to_json(table2)
    again = shift_from_json(json.loads(json.dumps(doc)))
    assert shift_to_json(again) == doc
    assert again.job("J1").task(5).quality_load == (9.0,)
    assert again.job("J1").task(7).weight[AgentId.ROBOT] == 1000.0


def test_metric_state_round_trip():
    state = MetricState({"K1": 135.0}, {"K1": 79.0})
    doc = state.to_json()
    assert doc == {"metrics": [{"id": "K1", "C0": 135.0, "t_m": 79.0}]}
    assert MetricState.from_json(doc).c0("K1") == 135.0
