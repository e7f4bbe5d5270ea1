"""Target-and-switch: follow greedy until it drifts too far from a yardstick, then jump to it."""

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Union

from recourse_lab.core.base import OnlineAlgorithm, StepOutcome
from recourse_lab.core.oracles import DEFAULT_CAP, ExactYardstick, OracleResult, Yardstick
from recourse_lab.errors import ConsistencyError, ParameterError
from recourse_lab.models.assignment import ProblemSpec
from recourse_lab.models.graph import Arrival
from recourse_lab.models.ledger import LedgerEntry
from recourse_lab.models.report import PhaseRecord
from recourse_lab.utils import Number, competitive_ratio, format_fraction, to_fraction
from recourse_lab.utils.logger import get_logger

logger = get_logger(__name__)


def _check_t(t: Union[str, float, Fraction]) -> Fraction:
    t = to_fraction(t)
    if t <= 1:
        raise ParameterError(f"target ratio t must exceed 1, got {t}")
    return t


def type2_bound(t, w_max: Number = 1) -> Fraction:
    """Amortized Type-2 recourse bound w_max (t+1)/(t-1) of target-and-switch."""
    t = _check_t(t)
    return Fraction(w_max) * (t + 1) / (t - 1)


def type1_bound(t, w_min: Number = 1) -> Fraction:
    """Amortized Type-1 recourse bound (t+1)/(w_min (t-1))."""
    t = _check_t(t)
    return (t + 1) / (Fraction(w_min) * (t - 1))


def independent_set_bound(t) -> Fraction:
    """Sharper amortized recourse bound t/(t-1) for independent set."""
    t = _check_t(t)
    return t / (t - 1)


@dataclass
class _OpenPhase:
    elements: int = 0
    type1: int = 0
    type2: Number = 0


class TargetAndSwitch(OnlineAlgorithm):
    """
    TaS_t for any monotone-sum problem.

    On each arrival the greedy value g of the new elements is computed. If the
    symmetric ratio between ALG + g and the yardstick value exceeds t, the
    algorithm adopts the yardstick's witness; otherwise it keeps greedy's choice.
    """

    name = "tas"

    def __init__(
        self,
        problem: ProblemSpec,
        t: Union[str, float, Fraction],
        yardstick: Optional[Yardstick] = None,
        cap: int = DEFAULT_CAP,
    ):
        super().__init__(problem)
        self.t = _check_t(t)
        self.yardstick = yardstick or ExactYardstick(problem, cap)
        if self.yardstick.problem.name != problem.name:
            raise ParameterError(
                f"yardstick solves {self.yardstick.problem.name}, not {problem.name}"
            )
        self.reference: Optional[OracleResult] = None
        self.switches = 0
        self._phases: List[_OpenPhase] = [_OpenPhase()]
        self._closed: List[bool] = [False]

    @property
    def ratio_bound(self) -> Fraction:
        """Per-prefix ratio guarantee: t times the yardstick's approximation factor."""
        return self.t * self.yardstick.alpha

    def params(self) -> Dict[str, Any]:
        return {
            "t": format_fraction(self.t),
            "yardstick": self.yardstick.kind,
            "alpha": format_fraction(self.yardstick.alpha),
        }

    def _respond(self, arrival: Arrival, outcome: StepOutcome) -> None:
        view = self.current_view()
        gain: Number = 0
        for element in self.problem.new_elements(arrival):
            value = self.problem.greedy_value(self.graph, view, element)
            view.set(element, value)
            self._pending[element] = value
            gain += value
        self._phases[-1].elements += len(self._pending)

        self.reference = self.yardstick.evaluate(self.graph)
        ratio = competitive_ratio(self.value + gain, self.reference.value)
        outcome.details["greedy_gain"] = gain
        if ratio > self.t:
            self.switch(self.yardstick.witness(self.graph))
            outcome.switched = True

    def switch(self, target: OracleResult) -> List[LedgerEntry]:
        """
        Replace the whole solution by ``target.witness``.

        Every differing element already revealed costs one late operation;
        elements of the current event take their target value for free.
        Closes the current phase.

        Raises:
            ConsistencyError: If the target is not feasible on the revealed graph
        """
        if not self.problem.feasible(self.graph, target.witness):
            raise ConsistencyError(
                f"switch target ({target.method}) is not a feasible {self.problem.name} "
                f"solution on the revealed graph"
            )
        start = len(self._late)
        for element in self.problem.elements(self.graph):
            self._set(element, target.witness.get(element))
        late = self._late[start:]

        phase = self._phases[-1]
        phase.type1 += len(late)
        phase.type2 += sum((entry.amount for entry in late), 0)
        self._closed[-1] = True
        self._phases.append(_OpenPhase())
        self._closed.append(False)
        self.switches += 1

        current = self.value + sum(self._pending.values(), 0)
        if current != target.value:
            raise ConsistencyError(
                f"after switch value {current} differs from target {target.value}"
            )
        logger.debug(
            "switch %d at event %d: %d late operations, value %s",
            self.switches,
            self.events - 1,
            len(late),
            target.value,
        )
        return late

    def phase_report(self) -> List[PhaseRecord]:
        """Elements and recourse per phase; an unfinished last phase is included."""
        records = []
        for index, (phase, closed) in enumerate(zip(self._phases, self._closed), start=1):
            if not closed and phase.elements == 0:
                continue
            records.append(
                PhaseRecord(
                    index=index,
                    elements=phase.elements,
                    type1=phase.type1,
                    type2=Fraction(phase.type2),
                    closed=closed,
                )
            )
        return records


class GreedyBaseline(OnlineAlgorithm):
    """
    Greedy that never revises a decision.

    ``t`` is only carried along so that a report can be checked against it.
    """

    name = "greedy"

    def __init__(self, problem: ProblemSpec, t=None):
        super().__init__(problem)
        self.t = _check_t(t) if t is not None else None

    def params(self) -> Dict[str, Any]:
        return {"t": format_fraction(self.t)}

    def _respond(self, arrival: Arrival, outcome: StepOutcome) -> None:
        view = self.current_view()
        for element in self.problem.new_elements(arrival):
            value = self.problem.greedy_value(self.graph, view, element)
            view.set(element, value)
            self._pending[element] = value
