"""Shared machinery of online algorithms: revealed graph, assignment and ledger."""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional

import networkx as nx

from recourse_lab.errors import ConsistencyError
from recourse_lab.models.assignment import ProblemSpec
from recourse_lab.models.graph import Arrival, ArrivalEvent, ElementId, EventStream, extend
from recourse_lab.models.ledger import LedgerEntry, RecourseLedger
from recourse_lab.utils import Number


@dataclass
class StepOutcome:
    """What one event cost an algorithm."""

    index: int
    arrival: Arrival
    late_ops: List[LedgerEntry] = field(default_factory=list)
    switched: bool = False
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def late_count(self) -> int:
        return len(self.late_ops)

    @property
    def touched(self) -> List[ElementId]:
        """Elements whose value may have changed during the event."""
        return [entry.element for entry in self.late_ops]


class OnlineAlgorithm(ABC):
    """
    Base class for algorithms that see one arrival at a time.

    Subclasses decide values through :meth:`_set`. Elements revealed by the
    current event are "pending": changing them is free and they are logged once,
    with their final value, as arrival assignments when the event ends. Every
    other change is a late operation.
    """

    name: str = "online"

    def __init__(self, problem: ProblemSpec):
        self.problem = problem
        self.graph = nx.Graph()
        self.assignment = problem.new_assignment()
        self.ledger = RecourseLedger()
        self.events = 0
        self._pending: Dict[ElementId, Number] = {}
        self._late: List[LedgerEntry] = []

    @property
    def value(self) -> Number:
        return self.assignment.total()

    def params(self) -> Dict[str, Any]:
        return {}

    def step(self, event: ArrivalEvent) -> StepOutcome:
        """Reveal ``event`` and let the algorithm respond."""
        index = self.events
        arrival = extend(self.graph, event, index)
        self.events += 1
        self._pending = {e: 0 for e in self.problem.new_elements(arrival)}
        self._late = []

        outcome = StepOutcome(index, arrival)
        self._respond(arrival, outcome)

        for element, value in self._pending.items():
            self.assignment.set(element, value)
            self.ledger.record_arrival(index, element, value)
        self._pending = {}
        outcome.late_ops = self._late
        return outcome

    def run(self, stream: EventStream) -> List[StepOutcome]:
        self.problem.check_model(stream.model)
        return [self.step(event) for event in stream]

    @abstractmethod
    def _respond(self, arrival: Arrival, outcome: StepOutcome) -> None:
        """Decide values for the new elements and perform any late operations."""

    def _get(self, element: ElementId) -> Number:
        if element in self._pending:
            return self._pending[element]
        return self.assignment.get(element)

    def _set(self, element: ElementId, value: Number) -> Optional[LedgerEntry]:
        if element in self._pending:
            self._pending[element] = value
            return None
        old = self.assignment.get(element)
        if old == value:
            return None
        self.assignment.set(element, value)
        entry = self.ledger.record_late(self.events - 1, element, old, value)
        self._late.append(entry)
        return entry

    def current_view(self):
        """Assignment including the pending values of the current event."""
        view = self.assignment.copy()
        for element, value in self._pending.items():
            view.set(element, value)
        return view

    def check_feasible(self, touched: Optional[Iterable[ElementId]] = None) -> None:
        if not self.problem.feasible(self.graph, self.assignment, touched):
            raise ConsistencyError(
                f"{self.name} left an infeasible {self.problem.name} solution "
                f"after event {self.events - 1}"
            )

