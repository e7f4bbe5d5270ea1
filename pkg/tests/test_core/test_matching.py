"""Tests for L-Greedy."""

from fractions import Fraction

import networkx as nx
import pytest
from hypothesis import HealthCheck, given, settings

from recourse_lab.core.adversaries import gen_matching_path
from recourse_lab.core.matching import (
    LGreedy,
    check_no_short_path,
    component_recourse,
    find_augmenting_path,
    is_augmenting,
    l_from_t,
    path_lower_bound,
    ratio_for_l,
    recourse_bound,
)
from recourse_lab.core.oracles import solve
from recourse_lab.errors import ConsistencyError, ParameterError
from recourse_lab.models.graph import EDGE, ArrivalEvent, EventStream
from recourse_lab.models.ledger import amortized_recourse
from tests.strategies import edge_streams, vertex_streams


def test_l_from_t():
    """Test the choice of L and t* for a target ratio."""
    assert l_from_t("1.5") == (1, Fraction(3, 2))
    assert l_from_t("1.3") == (3, Fraction(5, 4))
    assert l_from_t("5/4") == (3, Fraction(5, 4))
    for bad in ("1", "2", "2.5"):
        with pytest.raises(ParameterError):
            l_from_t(bad)


def test_bound_formulas():
    """Test the ratio and recourse formulas."""
    assert ratio_for_l(0) == 2
    assert ratio_for_l(1) == Fraction(3, 2)
    assert recourse_bound(Fraction(3, 2)) == 1
    assert recourse_bound(Fraction(4, 3)) == Fraction(7, 5)
    assert path_lower_bound(1) == Fraction(2, 3)
    assert path_lower_bound(2) == Fraction(6, 5)
    with pytest.raises(ParameterError):
        recourse_bound(2)


def test_constructor_parameters():
    """Test L and t handling."""
    assert LGreedy(L=2).params() == {"L": 2, "t_star": "4/3"}
    assert LGreedy(t="1.5").L == 1
    assert LGreedy(L=0).max_length == 1
    with pytest.raises(ParameterError):
        LGreedy()
    with pytest.raises(ParameterError):
        LGreedy(L=-1)


def test_short_path_flip():
    """Test that a length-3 path is flipped for two late operations."""
    algorithm = LGreedy(L=1)
    outcomes = algorithm.run(gen_matching_path(1))
    assert [o.late_count for o in outcomes] == [0, 0, 2]
    assert algorithm.matching() == {(0, 1), (2, 3)}
    assert algorithm.ledger.type1_total == 2
    assert amortized_recourse(algorithm.ledger, 3) == Fraction(2, 3)


def test_path_with_two_stages():
    """Test both stages of the centre-out path with L = 2."""
    algorithm = LGreedy(L=2)
    outcomes = algorithm.run(gen_matching_path(2))
    assert [o.late_count for o in outcomes] == [0, 0, 2, 0, 4]
    assert algorithm.matching() == {(0, 1), (2, 3), (4, 5)}
    assert amortized_recourse(algorithm.ledger, 5) == Fraction(6, 5)


def test_short_l_stops_early():
    """Test that L = 1 refuses the length-5 path."""
    algorithm = LGreedy(L=1)
    outcomes = algorithm.run(gen_matching_path(2))
    assert [o.late_count for o in outcomes] == [0, 0, 2, 0, 0]
    assert len(algorithm.matching()) == 2
    assert algorithm.ratio_check(3) == Fraction(3, 2)
    assert algorithm.ratio_check(3) == algorithm.ratio_bound
    assert LGreedy(L=1).ratio_check(0) == 1


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8])
def test_path_lower_bound_is_met(n):
    """Test that L = n pays exactly n(n+1) on the centre-out path."""
    algorithm = LGreedy(L=n)
    algorithm.run(gen_matching_path(n))
    assert algorithm.ledger.type1_total == n * (n + 1)
    assert amortized_recourse(algorithm.ledger, 2 * n + 1) == path_lower_bound(n)
    assert len(algorithm.matching()) == n + 1


def test_find_augmenting_path_prefers_short_paths():
    """Test shortest-first, lexicographically smallest path choice."""
    graph = nx.path_graph(4)
    assert find_augmenting_path(graph, {}, 3) == (0, 1)
    mate = {1: 2, 2: 1}
    assert find_augmenting_path(graph, mate, 3) == (0, 1, 2, 3)
    assert find_augmenting_path(graph, mate, 1) is None
    with pytest.raises(ConsistencyError):
        check_no_short_path(graph, mate, 3)


def test_is_augmenting():
    """Test the augmenting path predicate."""
    graph = nx.path_graph(4)
    mate = {1: 2, 2: 1}
    assert is_augmenting(graph, mate, [0, 1, 2, 3])
    assert is_augmenting(graph, mate, [3, 2, 1, 0])
    assert not is_augmenting(graph, mate, [0, 1])
    assert not is_augmenting(graph, mate, [1, 2])
    assert not is_augmenting(graph, {}, [0, 2])
    assert not is_augmenting(graph, mate, [0])


def test_component_recourse():
    """Test recourse per connected component."""
    events = [ArrivalEvent.of_edge(*e) for e in [(1, 2), (0, 1), (2, 3), (10, 11)]]
    algorithm = LGreedy(L=1)
    algorithm.run(EventStream(EDGE, events))

    rows = component_recourse(algorithm.ledger, algorithm.graph)
    assert [row["vertices"] for row in rows] == [[0, 1, 2, 3], [10, 11]]
    assert [row["edges"] for row in rows] == [3, 1]
    assert [row["type1"] for row in rows] == [2, 0]
    assert rows[0]["ratio"] == Fraction(2, 3)


def _check_stream(L, stream, brute_force_augmenting_path):
    algorithm = LGreedy(L=L)
    for event in stream:
        algorithm.step(event)
        algorithm.check_feasible()
        assert brute_force_augmenting_path(
            algorithm.graph, algorithm.mate, algorithm.max_length
        ) is None
        optimum = solve(algorithm.problem, algorithm.graph).value
        assert algorithm.ratio_check(optimum) <= ratio_for_l(L)
    assert algorithm.value == len(algorithm.matching())


@pytest.mark.parametrize("L", [0, 1, 2])
@settings(
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.function_scoped_fixture],
)
@given(stream=edge_streams(max_nodes=9))
def test_edge_arrival_invariants(L, stream, brute_force_augmenting_path):
    """Test feasibility, path freedom and ratio after every edge."""
    _check_stream(L, stream, brute_force_augmenting_path)


@settings(
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.function_scoped_fixture],
)
@given(stream=vertex_streams(max_nodes=9))
def test_vertex_arrival_invariants(stream, brute_force_augmenting_path):
    """Test the same invariants when vertices arrive with their edges."""
    _check_stream(1, stream, brute_force_augmenting_path)
