"""Assignments of values to elements and the problems they solve."""

from abc import ABC, abstractmethod
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Optional, Set, Tuple

import networkx as nx

from recourse_lab.errors import ConsistencyError, ParameterError
from recourse_lab.models.graph import EDGE, VERTEX, Arrival, ElementId
from recourse_lab.utils import Number

MAXIMIZE = "maximize"
MINIMIZE = "minimize"

HALF = Fraction(1, 2)


class Assignment:
    """
    Values of revealed elements.

    Every value is 0 or lies in ``[w_min, w_max]``. Elements never set read as 0.
    Classical problems store the ints 0 and 1; fractional ones store Fractions.
    """

    def __init__(self, w_max: Number = 1, w_min: Number = 1):
        self.w_max = w_max
        self.w_min = w_min
        self._values: Dict[ElementId, Number] = {}

    def get(self, element: ElementId) -> Number:
        return self._values.get(element, 0)

    def __getitem__(self, element: ElementId) -> Number:
        return self.get(element)

    def __contains__(self, element: ElementId) -> bool:
        return element in self._values

    def __iter__(self) -> Iterator[ElementId]:
        return iter(self._values)

    def __len__(self) -> int:
        return len(self._values)

    def set(self, element: ElementId, value: Number) -> None:
        if value != 0 and not (self.w_min <= value <= self.w_max):
            raise ConsistencyError(
                f"value {value} for {element} outside {{0}} ∪ [{self.w_min}, {self.w_max}]"
            )
        self._values[element] = value

    def total(self) -> Number:
        return sum(self._values.values(), 0)

    def accepted(self) -> Set[ElementId]:
        return {e for e, value in self._values.items() if value != 0}

    def copy(self) -> "Assignment":
        clone = Assignment(self.w_max, self.w_min)
        clone._values = dict(self._values)
        return clone

    def items(self) -> Iterable[Tuple[ElementId, Number]]:
        return self._values.items()

    def differs_from(self, other: "Assignment") -> List[ElementId]:
        """Elements whose value differs between the two assignments, sorted."""
        keys = set(self._values) | set(other._values)
        return sorted(e for e in keys if self.get(e) != other.get(e))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Assignment):
            return NotImplemented
        return not self.differs_from(other)

    def __repr__(self) -> str:
        accepted = sorted(self.accepted())
        return f"Assignment(total={self.total()}, accepted={[str(e) for e in accepted]})"


class ProblemSpec(ABC):
    """A monotone-sum graph problem: value of a solution is the sum of its values."""

    name: str
    objective: str
    element_kind: str
    w_max: Number = 1
    w_min: Number = 1
    arrival_models: Tuple[str, ...] = (VERTEX,)

    def new_assignment(self) -> Assignment:
        return Assignment(self.w_max, self.w_min)

    def elements(self, graph: nx.Graph) -> List[ElementId]:
        """All decision elements of ``graph``, sorted."""
        if self.element_kind == VERTEX:
            return [ElementId.vertex(v) for v in sorted(graph.nodes)]
        return sorted(ElementId.edge(u, v) for u, v in graph.edges)

    def new_elements(self, arrival: Arrival) -> List[ElementId]:
        """Elements an arrival reveals, in the order greedy decides them."""
        if self.element_kind == VERTEX:
            return [ElementId.vertex(v) for v in arrival.new_vertices]
        return [ElementId.edge(u, v) for u, v in arrival.new_edges]

    def element_count(self, graph: nx.Graph) -> int:
        if self.element_kind == VERTEX:
            return graph.number_of_nodes()
        return graph.number_of_edges()

    def check_model(self, model: str) -> None:
        if model not in self.arrival_models:
            raise ParameterError(
                f"{self.name} is defined for {'/'.join(self.arrival_models)} arrival, "
                f"not {model} arrival"
            )

    @abstractmethod
    def feasible(
        self,
        graph: nx.Graph,
        assignment: Assignment,
        touched: Optional[Iterable[ElementId]] = None,
    ) -> bool:
        """
        Check the problem constraints.

        With ``touched`` only constraints involving those elements are checked,
        which is enough when the assignment was feasible before they changed.
        """

    @abstractmethod
    def greedy_value(
        self, graph: nx.Graph, assignment: Assignment, element: ElementId
    ) -> Number:
        """Value the online greedy gives a newly revealed element."""


def _touched_vertices(graph: nx.Graph, touched: Iterable[ElementId]) -> Set[int]:
    vertices = set()
    for element in touched:
        if element.is_vertex:
            vertices.add(element.index)
        else:
            vertices.update(element.index)
    return {v for v in vertices if v in graph}


def _vertex_value(assignment: Assignment, v: int) -> Number:
    return assignment.get(ElementId.vertex(v))


def _load(graph: nx.Graph, assignment: Assignment, v: int) -> Number:
    return sum((assignment.get(ElementId.edge(v, u)) for u in graph[v]), 0)


class IndependentSet(ProblemSpec):
    name = "is"
    objective = MAXIMIZE
    element_kind = VERTEX

    def feasible(self, graph, assignment, touched=None) -> bool:
        if touched is None:
            edges = graph.edges
        else:
            edges = [
                (u, v)
                for u in _touched_vertices(graph, touched)
                for v in graph[u]
            ]
        return all(
            _vertex_value(assignment, u) + _vertex_value(assignment, v) <= 1
            for u, v in edges
        )

    def greedy_value(self, graph, assignment, element) -> Number:
        v = element.index
        if any(_vertex_value(assignment, u) for u in graph[v]):
            return 0
        return 1


class VertexCover(ProblemSpec):
    name = "vc"
    objective = MINIMIZE
    element_kind = VERTEX

    def feasible(self, graph, assignment, touched=None) -> bool:
        if touched is None:
            edges = graph.edges
        else:
            edges = [
                (u, v)
                for u in _touched_vertices(graph, touched)
                for v in graph[u]
            ]
        return all(
            _vertex_value(assignment, u) + _vertex_value(assignment, v) >= 1
            for u, v in edges
        )

    def greedy_value(self, graph, assignment, element) -> Number:
        v = element.index
        if any(_vertex_value(assignment, u) == 0 for u in graph[v]):
            return 1
        return 0


class Matching(ProblemSpec):
    name = "matching"
    objective = MAXIMIZE
    element_kind = EDGE
    arrival_models = (VERTEX, EDGE)

    def feasible(self, graph, assignment, touched=None) -> bool:
        vertices = (
            graph.nodes if touched is None else _touched_vertices(graph, touched)
        )
        return all(_load(graph, assignment, v) <= 1 for v in vertices)

    def greedy_value(self, graph, assignment, element) -> Number:
        u, v = element.index
        if _load(graph, assignment, u) == 0 and _load(graph, assignment, v) == 0:
            return 1
        return 0


class FractionalMatching(Matching):
    """Edge values on the half-integral grid {0, 1/2, 1}; vertex loads at most 1."""

    name = "fractional-matching"
    w_min = HALF

    def greedy_value(self, graph, assignment, element) -> Number:
        u, v = element.index
        residual = 1 - max(_load(graph, assignment, u), _load(graph, assignment, v))
        if residual >= 1:
            return Fraction(1)
        if residual >= HALF:
            return HALF
        return 0


PROBLEMS: Dict[str, ProblemSpec] = {
    problem.name: problem
    for problem in (IndependentSet(), VertexCover(), Matching(), FractionalMatching())
}


def get_problem(name: str) -> ProblemSpec:
    try:
        return PROBLEMS[name]
    except KeyError:
        raise ParameterError(
            f"unknown problem {name!r}; expected one of {sorted(PROBLEMS)}"
        ) from None


def feasible(problem: ProblemSpec, graph: nx.Graph, assignment: Assignment) -> bool:
    """Whether ``assignment`` satisfies every constraint of ``problem`` on ``graph``."""
    return problem.feasible(graph, assignment)


def assignment_from(
    problem: ProblemSpec, accepted: Iterable, value: Number = 1
) -> Assignment:
    """
    Build an assignment accepting the given vertex ids or edge pairs.

    Useful for oracle witnesses and for tests.
    """
    assignment = problem.new_assignment()
    for item in accepted:
        if problem.element_kind == VERTEX:
            assignment.set(ElementId.vertex(item), value)
        else:
            assignment.set(ElementId.edge(*item), value)
    return assignment
