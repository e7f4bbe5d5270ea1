"""Recourse accounting: every value change an algorithm makes, in order."""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, Tuple

from recourse_lab.errors import ConsistencyError, UndefinedMetricError
from recourse_lab.models.graph import ElementId
from recourse_lab.utils import Number, format_fraction


class Phase(str, Enum):
    """Whether a change is the free first assignment or a paid late operation."""

    ARRIVAL = "arrival-assignment"
    LATE = "late-operation"


@dataclass(frozen=True)
class LedgerEntry:
    """One value change of one element during one event."""

    event: int
    element: ElementId
    old: Number
    new: Number
    phase: Phase

    @property
    def amount(self) -> Number:
        return abs(self.new - self.old)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "event": self.event,
            "element": self.element.to_json(),
            "old": format_fraction(self.old),
            "new": format_fraction(self.new),
            "phase": self.phase.value,
        }


class RecourseLedger:
    """
    Append-only log of value changes.

    Type-1 recourse counts late operations; Type-2 sums their amounts.
    Replaying all entries from the all-zero assignment reproduces the
    algorithm's current assignment.
    """

    def __init__(self):
        self.entries: List[LedgerEntry] = []
        self._type1 = 0
        self._type2: Number = 0
        self._late_by_event: Dict[int, int] = {}

    def record_arrival(self, event: int, element: ElementId, value: Number) -> LedgerEntry:
        entry = LedgerEntry(event, element, 0, value, Phase.ARRIVAL)
        self.entries.append(entry)
        return entry

    def record_late(
        self, event: int, element: ElementId, old: Number, new: Number
    ) -> Optional[LedgerEntry]:
        """Log a late operation; a no-op change is not an operation and is dropped."""
        if old == new:
            return None
        entry = LedgerEntry(event, element, old, new, Phase.LATE)
        self.entries.append(entry)
        self._type1 += 1
        self._type2 += entry.amount
        self._late_by_event[event] = self._late_by_event.get(event, 0) + 1
        return entry

    @property
    def type1_total(self) -> int:
        return self._type1

    @property
    def type2_total(self) -> Number:
        return self._type2

    def late_ops(self, event: int) -> int:
        """Late operations logged during ``event``."""
        return self._late_by_event.get(event, 0)

    def late_entries(self) -> List[LedgerEntry]:
        return [e for e in self.entries if e.phase is Phase.LATE]

    def replay(self) -> Dict[ElementId, Number]:
        """Apply every entry in order, starting from all zeros."""
        values: Dict[ElementId, Number] = {}
        for entry in self.entries:
            current = values.get(entry.element, 0)
            if current != entry.old:
                raise ConsistencyError(
                    f"ledger entry {entry} expects {entry.old}, element holds {current}"
                )
            values[entry.element] = entry.new
        return values

    def per_element(self, elements: Iterable[ElementId]) -> Tuple[int, Number]:
        """Type-1 and Type-2 recourse restricted to ``elements``."""
        wanted = set(elements)
        type1, type2 = 0, 0
        for entry in self.late_entries():
            if entry.element in wanted:
                type1 += 1
                type2 += entry.amount
        return type1, type2

    def to_list(self) -> List[Dict[str, Any]]:
        return [entry.to_dict() for entry in self.entries]


def amortized_recourse(
    ledger: RecourseLedger, element_count: int, type_: int = 1
) -> Fraction:
    """
    Total recourse divided by the number of elements revealed.

    Raises:
        UndefinedMetricError: When no element was revealed
    """
    if element_count <= 0:
        raise UndefinedMetricError("amortized recourse of an empty instance")
    if type_ == 1:
        total = ledger.type1_total
    elif type_ == 2:
        total = ledger.type2_total
    else:
        raise ValueError(f"recourse type must be 1 or 2, got {type_}")
    return Fraction(total) / element_count


def sum_max_holds(pairs: Iterable[Tuple[Number, Number]]) -> bool:
    """
    ``sum(x) / sum(y) <= max(x / y)`` over pairs with positive ``y``.

    Pairs with ``y == 0`` must have ``x == 0`` and are ignored.
    """
    pairs = list(pairs)
    for x, y in pairs:
        if y == 0 and x != 0:
            raise UndefinedMetricError(f"pair ({x}, {y}) has recourse but no elements")
    pairs = [(Fraction(x), Fraction(y)) for x, y in pairs if y != 0]
    if not pairs:
        return True
    total = sum(x for x, _ in pairs) / sum(y for _, y in pairs)
    return total <= max(x / y for x, y in pairs)
