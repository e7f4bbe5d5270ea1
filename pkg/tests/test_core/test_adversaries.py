"""Tests for instance generators and adaptive adversaries."""

from fractions import Fraction

import pytest

from recourse_lab.core.adversaries import (
    BipartiteISAdversary,
    gen_bipartite_is_adversary,
    gen_matching_path,
    gen_random,
    gen_vc_repeating_gadget,
    gen_vc_triangle_fan,
    is_lower_bound,
    play,
)
from recourse_lab.core.tas import GreedyBaseline, TargetAndSwitch
from recourse_lab.errors import ParameterError
from recourse_lab.models.assignment import get_problem
from recourse_lab.models.graph import EDGE, VERTEX, build_graph
from recourse_lab.models.ledger import amortized_recourse


def test_matching_path_is_centre_out():
    """Test the edge order of the centre-out path."""
    stream = gen_matching_path(2)
    assert stream.model == EDGE
    assert [e.edge for e in stream] == [(2, 3), (1, 2), (3, 4), (0, 1), (4, 5)]
    assert stream.label == "path-2"
    assert len(gen_matching_path(0)) == 1
    with pytest.raises(ParameterError):
        gen_matching_path(-1)


def test_gadget_shape():
    """Test the gadget's prefix and pair structure."""
    stream = gen_vc_repeating_gadget(2)
    assert stream.model == VERTEX
    assert len(stream) == 10
    assert stream.events[6].adj == (3, 4)
    assert stream.events[7].adj == (2, 6)
    assert stream.events[8].adj == (5, 6)
    assert stream.events[9].adj == (4, 8)
    with pytest.raises(ParameterError):
        gen_vc_repeating_gadget(-1)


def test_triangle_fan_shape():
    """Test that the last fan vertex sees every earlier vertex."""
    stream = gen_vc_triangle_fan(3)
    graph = build_graph(stream)
    assert graph.number_of_nodes() == 7
    assert graph.number_of_edges() == 3 + 6
    assert sorted(graph[6]) == [0, 1, 2, 3, 4, 5]
    with pytest.raises(ParameterError):
        gen_vc_triangle_fan(0)


@pytest.mark.parametrize("model", [VERTEX, EDGE])
def test_random_streams_are_reproducible(model):
    """Test that equal seeds give equal streams and other seeds usually differ."""
    first = gen_random(model, 15, 0.4, 7)
    again = gen_random(model, 15, 0.4, 7)
    other = gen_random(model, 15, 0.4, 8)
    assert first.events == again.events
    assert first.events != other.events
    assert first.model == model


def test_random_vertex_stream_ids_follow_arrival():
    """Test that vertex ids equal arrival positions and adjacency points backwards."""
    stream = gen_random(VERTEX, 12, 0.5, 3)
    for position, event in enumerate(stream):
        assert event.vertex == position
        assert all(u < position for u in event.adj)


def test_random_rejects_bad_parameters():
    """Test parameter validation of the random generator."""
    with pytest.raises(ParameterError):
        gen_random(VERTEX, -1, 0.5, 0)
    with pytest.raises(ParameterError):
        gen_random(VERTEX, 5, 1.5, 0)
    with pytest.raises(ParameterError):
        gen_random("hyperedge", 5, 0.5, 0)


def test_is_lower_bound():
    """Test the closed form of the adversary's lower bound."""
    assert is_lower_bound(2, 8) == 1
    assert is_lower_bound(3, 1) == 1
    assert is_lower_bound(3, 2) == Fraction(2, 3)
    assert is_lower_bound("3/2", 1) == 1
    with pytest.raises(ParameterError):
        is_lower_bound(1, 3)
    with pytest.raises(ParameterError):
        is_lower_bound(2, 0)


def test_adversary_parameters():
    """Test adversary validation and labels."""
    adversary = gen_bipartite_is_adversary("2", switches=3)
    assert isinstance(adversary, BipartiteISAdversary)
    assert adversary.label == "bipartite-is-t2-i3"
    assert adversary.lower_bound() == 1
    with pytest.raises(ParameterError):
        BipartiteISAdversary(1)
    with pytest.raises(ParameterError):
        BipartiteISAdversary(2, switches=0)
    with pytest.raises(ParameterError):
        BipartiteISAdversary(2, budget=0)


def test_adversary_against_tas():
    """Test four switches of TaS_2: the accepted side doubles each time."""
    tas = TargetAndSwitch(get_problem("is"), 2)
    adversary = BipartiteISAdversary(2, switches=4)
    seen = []
    stream, outcomes = play(tas, adversary, on_step=seen.append)

    assert len(stream) == 46
    assert seen == outcomes
    assert tas.switches == 4
    assert [o.late_count for o in outcomes if o.switched] == [3, 9, 21, 45]
    assert tas.value == 31
    assert amortized_recourse(tas.ledger, len(stream)) == Fraction(78, 46)
    assert sorted(map(len, (adversary.x_side, adversary.y_side))) == [15, 31]


def test_adversary_budget_stops_greedy():
    """Test that a non-switching algorithm is stopped by the event budget."""
    greedy = GreedyBaseline(get_problem("is"), t=2)
    stream, outcomes = play(greedy, BipartiteISAdversary(2, budget=12))
    assert len(stream) == 12
    assert greedy.value == 1
    assert stream.label == "bipartite-is-t2-i8"

