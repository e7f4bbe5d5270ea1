"""Tests for target-and-switch and the greedy baseline."""

from fractions import Fraction

import pytest
from hypothesis import given, settings

from recourse_lab.core.oracles import ExactYardstick, GreedyYardstick, OracleResult, solve
from recourse_lab.core.tas import (
    GreedyBaseline,
    TargetAndSwitch,
    independent_set_bound,
    type1_bound,
    type2_bound,
)
from recourse_lab.errors import ConsistencyError, ParameterError
from recourse_lab.models.assignment import HALF, get_problem
from recourse_lab.models.graph import VERTEX, ArrivalEvent, ElementId, EventStream
from recourse_lab.models.ledger import amortized_recourse, sum_max_holds
from recourse_lab.utils import competitive_ratio
from tests.strategies import edge_streams, vertex_streams


def test_bound_formulas():
    """Test the closed-form recourse bounds."""
    assert type2_bound(2) == 3
    assert type2_bound("3/2", w_max=2) == 10
    assert type1_bound(2) == 3
    assert type1_bound(2, w_min=HALF) == 6
    assert independent_set_bound(2) == 2
    assert independent_set_bound("2.598") <= Fraction("1.626")
    with pytest.raises(ParameterError):
        type1_bound(1)


def test_switch_on_a_star(star_stream):
    """Test that TaS_2 switches once on K_{1,3}, paying three late operations."""
    tas = TargetAndSwitch(get_problem("is"), 2)
    outcomes = tas.run(star_stream)

    assert [o.switched for o in outcomes] == [False, False, False, True]
    assert [o.late_count for o in outcomes] == [0, 0, 0, 3]
    assert tas.switches == 1
    assert tas.value == 3
    assert sorted(e.index for e in tas.assignment.accepted()) == [1, 2, 3]

    phases = tas.phase_report()
    assert len(phases) == 1
    assert phases[0].elements == 4
    assert phases[0].type1 == 3
    assert phases[0].ratio == Fraction(3, 4)
    assert phases[0].closed


def test_no_switch_at_exactly_t(star_stream):
    """Test that a ratio equal to t does not trigger a switch."""
    tas = TargetAndSwitch(get_problem("is"), 3)
    tas.run(star_stream)
    assert tas.switches == 0
    assert tas.ledger.type1_total == 0
    phases = tas.phase_report()
    assert len(phases) == 1 and not phases[0].closed


def test_fractional_switch_counts_type2(triangle_edges):
    """Test Type-1 and Type-2 recourse of a fractional switch."""
    tas = TargetAndSwitch(get_problem("fractional-matching"), "5/4")
    tas.run(triangle_edges)

    assert tas.switches == 1
    assert tas.value == Fraction(3, 2)
    for u, v in [(0, 1), (0, 2), (1, 2)]:
        assert tas.assignment.get(ElementId.edge(u, v)) == HALF
    assert tas.ledger.type1_total == 2
    assert tas.ledger.type2_total == 1
    assert amortized_recourse(tas.ledger, 3, type_=2) == Fraction(1, 3)


def test_vertex_cover_switch_on_a_path():
    """Test that switching P3 from both ends to the middle costs three late operations."""
    stream = EventStream(
        VERTEX,
        [
            ArrivalEvent.of_vertex(1),
            ArrivalEvent.of_vertex(0, [1]),
            ArrivalEvent.of_vertex(2, [1]),
        ],
    )
    tas = TargetAndSwitch(get_problem("vc"), 3)
    tas.run(stream)
    assert tas.switches == 0
    assert sorted(e.index for e in tas.assignment.accepted()) == [0, 2]

    late = tas.switch(solve(tas.problem, tas.graph))
    assert len(late) == 3
    assert sorted(e.index for e in tas.assignment.accepted()) == [1]
    assert tas.switches == 1
    assert tas.phase_report()[0].type1 == 3
    tas.check_feasible()


def test_switch_rejects_an_infeasible_target():
    """Test that a target violating the constraints is refused before any change."""
    tas = TargetAndSwitch(get_problem("is"), 2)
    tas.run(EventStream(VERTEX, [ArrivalEvent.of_vertex(0), ArrivalEvent.of_vertex(1, [0])]))
    before = tas.assignment.copy()

    witness = tas.problem.new_assignment()
    witness.set(ElementId.vertex(0), 1)
    witness.set(ElementId.vertex(1), 1)
    with pytest.raises(ConsistencyError):
        tas.switch(OracleResult(2, witness, "manual"))

    assert tas.assignment == before
    assert tas.switches == 0
    assert tas.ledger.type1_total == 0


def test_yardstick_must_solve_the_same_problem():
    """Test that a mismatched yardstick is rejected."""
    with pytest.raises(ParameterError):
        TargetAndSwitch(get_problem("is"), 2, ExactYardstick(get_problem("vc")))
    with pytest.raises(ParameterError):
        TargetAndSwitch(get_problem("is"), 1)


def test_greedy_yardstick_ratio_bound():
    """Test that an approximate yardstick widens the ratio guarantee."""
    tas = TargetAndSwitch(get_problem("vc"), 2, GreedyYardstick(get_problem("vc")))
    assert tas.ratio_bound == 4
    assert tas.params() == {"t": "2", "yardstick": "greedy", "alpha": "2"}


def test_greedy_baseline_never_revises(star_stream):
    """Test that the baseline makes no late operations."""
    greedy = GreedyBaseline(get_problem("is"), t=2)
    outcomes = greedy.run(star_stream)
    assert all(o.late_count == 0 for o in outcomes)
    assert greedy.value == 1
    assert greedy.params() == {"t": "2"}
    assert GreedyBaseline(get_problem("is")).params() == {"t": None}


def test_arrival_model_is_checked(triangle_edges):
    """Test that a vertex problem refuses an edge stream."""
    with pytest.raises(ParameterError):
        TargetAndSwitch(get_problem("is"), 2).run(triangle_edges)


def _check_run(problem_name, t, stream):
    problem = get_problem(problem_name)
    tas = TargetAndSwitch(problem, t)
    for event in stream:
        tas.step(event)
        tas.check_feasible()
        optimum = solve(problem, tas.graph).value
        assert competitive_ratio(tas.value, optimum) <= tas.t

    elements = problem.element_count(tas.graph)
    if elements:
        assert amortized_recourse(tas.ledger, elements) <= type1_bound(t, problem.w_min)
        assert amortized_recourse(tas.ledger, elements, 2) <= type2_bound(t, problem.w_max)
    assert sum_max_holds((p.type1, p.elements) for p in tas.phase_report())
    replayed = {e: v for e, v in tas.ledger.replay().items() if v}
    assert replayed == {e: v for e, v in tas.assignment.items() if v}
    return tas


@pytest.mark.parametrize("t", ["5/4", "3/2", "2", "3"])
@settings(max_examples=40, deadline=None)
@given(stream=vertex_streams(max_nodes=10))
def test_vertex_problems_respect_the_bounds(t, stream):
    """Test per-prefix ratio and amortized recourse for IS and VC."""
    tas = _check_run("is", t, stream)
    if len(stream):
        assert amortized_recourse(tas.ledger, len(stream)) <= independent_set_bound(t)
    _check_run("vc", t, stream)


@pytest.mark.parametrize("t", ["5/4", "3/2", "2", "3"])
@settings(max_examples=40, deadline=None)
@given(stream=edge_streams(max_nodes=9))
def test_matching_problems_respect_the_bounds(t, stream):
    """Test per-prefix ratio and amortized recourse for both matchings."""
    _check_run("matching", t, stream)
    _check_run("fractional-matching", t, stream)
