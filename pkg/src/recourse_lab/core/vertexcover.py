"""
Duo-Halve: vertex cover in the vertex-arrival model.

The algorithm keeps a maximal matching M built greedily. Vertices of the two
most recently matched edges (me1 newest, me2 the one before) form group 1
and may be re-decided freely; other matched vertices (group 2) are only ever
late-accepted; unmatched vertices (group 3) stay rejected.
"""

import itertools
from dataclasses import asdict, dataclass
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

from recourse_lab.core.base import OnlineAlgorithm, StepOutcome
from recourse_lab.errors import MonitorViolation, ParameterError
from recourse_lab.models.assignment import get_problem
from recourse_lab.models.graph import Arrival, ElementId
from recourse_lab.utils import format_fraction
from recourse_lab.utils.logger import get_logger

logger = get_logger(__name__)

MatchedEdge = Tuple[int, int]
Config = Dict[int, int]

AMORTIZED_BOUND = Fraction(10, 3)
GADGET_LIMIT = Fraction(5, 2)


class HalveOrder(str, Enum):
    """Tie-break order between halving me1 and minimising late operations."""

    ME1_FIRST = "me1-first"
    RECOURSE_FIRST = "recourse-first"


@dataclass(frozen=True)
class PotentialSnapshot:
    """Potential after an event: expired halves + |A ∩ G1|/3 + 2/3 if me2 is free."""

    phi: Fraction
    expired_half: int
    accepted_latest: int
    me2_free: bool
    state: Optional[int]

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["phi"] = format_fraction(self.phi)
        return data


EMPTY_SNAPSHOT = PotentialSnapshot(Fraction(0), 0, 0, False, None)


def classify_state(me1_status: Tuple[int, int], me2_status: Tuple[int, int]) -> int:
    """
    Label the configuration of the two latest edges.

    ``me1_status`` is (p, v) with v revealed after p; ``me2_status`` is the
    pair of statuses of me2.
    """
    p, v = me1_status
    me2_full = all(me2_status)
    if p and v:
        return 3 if me2_full else 6
    if p:
        return 1 if me2_full else 4
    return 2 if me2_full else 5


def dh_ratio_bound(optimum: int) -> Fraction:
    """Largest cover size allowed against ``optimum``, as a ratio: max(1, 2 - 2/OPT)."""
    if optimum <= 0:
        return Fraction(1)
    return max(Fraction(1), 2 - Fraction(2, optimum))


class DuoHalve(OnlineAlgorithm):
    """
    Duo-Halve vertex cover.

    Args:
        order: How HalveBoth ranks covers with the same number of half edges
        monitor: Check the potential, shift and full-me1 properties per event
        strict: Raise MonitorViolation instead of recording violations
    """

    name = "dh"

    def __init__(
        self,
        order: HalveOrder = HalveOrder.ME1_FIRST,
        monitor: bool = True,
        strict: bool = False,
    ):
        super().__init__(get_problem("vc"))
        self.order = HalveOrder(order)
        self.monitor = monitor
        self.strict = strict
        self.matching: List[MatchedEdge] = []
        self.mate: Dict[int, int] = {}
        self.me1: Optional[MatchedEdge] = None
        self.me2: Optional[MatchedEdge] = None
        self.snapshot = EMPTY_SNAPSHOT
        self.violations: List[Dict[str, Any]] = []
        self.checked = 0

    def params(self) -> Dict[str, Any]:
        return {"order": self.order.value, "monitor": self.monitor}

    # -- statuses ---------------------------------------------------------

    def status(self, x: int) -> int:
        return self._get(ElementId.vertex(x))

    def _fixed_status(self, y: int) -> int:
        # group 2 keeps its status during HalveBoth; group 3 is rejected
        return self.status(y) if y in self.mate else 0

    def latest_endpoints(self) -> List[int]:
        endpoints = []
        for edge in (self.me1, self.me2):
            if edge is not None:
                endpoints.extend(edge)
        return sorted(endpoints)

    def _valid(self, config: Config) -> bool:
        for x, value in config.items():
            if value:
                continue
            for y in self.graph[x]:
                other = config[y] if y in config else self._fixed_status(y)
                if not other:
                    return False
        return True

    def _configs(self) -> List[Config]:
        endpoints = self.latest_endpoints()
        valid = []
        for bits in itertools.product((0, 1), repeat=len(endpoints)):
            config = dict(zip(endpoints, bits))
            if self._valid(config):
                valid.append(config)
        return valid

    @staticmethod
    def _is_half(config: Config, edge: Optional[MatchedEdge]) -> bool:
        return edge is not None and config[edge[0]] + config[edge[1]] == 1

    # -- the algorithm ----------------------------------------------------

    def _respond(self, arrival: Arrival, outcome: StepOutcome) -> None:
        v = arrival.new_vertices[0]
        neighbors = sorted(arrival.event.adj)
        before = self.snapshot
        old_me1 = self.me1
        old_me1_status = self._edge_status(old_me1)

        unmatched = [u for u in neighbors if u not in self.mate]
        shifted = bool(unmatched)
        if shifted:
            p = unmatched[0]
            self.mate[p] = v
            self.mate[v] = p
            self.matching.append((p, v))
            self.me2, self.me1 = self.me1, (p, v)

        latest = set(self.latest_endpoints())
        late_accepts = 0
        for u in neighbors:
            if u in self.mate and u not in latest and self.status(u) == 0:
                self._set(ElementId.vertex(u), 1)
                late_accepts += 1

        self._halve_both(v)

        self.snapshot = self._potential()
        late = len(self._late)
        outcome.details.update(
            {
                "shifted": shifted,
                "late_accepts": late_accepts,
                "state": self.snapshot.state,
                "phi": format_fraction(self.snapshot.phi),
            }
        )
        if self.monitor:
            self._monitor(arrival.index, late, before, shifted, old_me1, old_me1_status)

    def _halve_both(self, new_vertex: int) -> None:
        """Re-decide group 1, keeping the best valid cover of its endpoints."""
        endpoints = self.latest_endpoints()
        if not endpoints:
            return
        current = {x: self.status(x) for x in endpoints}
        best, best_key = None, None
        for config in self._configs():
            key = self._rank(config, current, new_vertex)
            if best_key is None or key < best_key:
                best, best_key = config, key
        if best is None:
            raise MonitorViolation(
                "HalveBoth found no valid cover", self.state_dump(self.events - 1)
            )
        for x in endpoints:
            self._set(ElementId.vertex(x), best[x])
        logger.debug("event %d: HalveBoth chose %s", self.events - 1, best)

    def _rank(self, config: Config, current: Config, new_vertex: int) -> tuple:
        halves = self._is_half(config, self.me1) + self._is_half(config, self.me2)
        late = sum(
            1 for x, value in config.items() if x != new_vertex and value != current[x]
        )
        me1_accepted = config[self.me1[0]] + config[self.me1[1]]
        accepts_new = 0 if config.get(new_vertex, 0) else 1
        bits = tuple(config[x] for x in sorted(config))
        if self.order is HalveOrder.ME1_FIRST:
            return (-halves, me1_accepted, late, accepts_new, bits)
        return (-halves, late, me1_accepted, accepts_new, bits)

    # -- potential and monitors -------------------------------------------

    def _edge_status(self, edge: Optional[MatchedEdge]) -> Optional[Tuple[int, int]]:
        if edge is None:
            return None
        return (self.status(edge[0]), self.status(edge[1]))

    def me2_free(self) -> bool:
        """
        me2 is half and halvable by accepting either endpoint.

        Only configurations HalveBoth could settle on count: valid covers of
        the group-1 endpoints that halve as many of me1 and me2 as possible.
        A cover that only halves me2 by filling a halvable me1 does not make
        me2 free.
        """
        status = self._edge_status(self.me2)
        if status is None or sum(status) != 1:
            return False
        configs = self._configs()
        halves = [self._is_half(c, self.me1) + self._is_half(c, self.me2) for c in configs]
        most = max(halves)
        candidates = [c for c, h in zip(configs, halves) if h == most]
        u, w = self.me2
        return all(
            any(c[x] == 1 and c[y] == 0 for c in candidates) for x, y in ((u, w), (w, u))
        )

    def _potential(self) -> PotentialSnapshot:
        latest = {self.me1, self.me2}
        expired = sum(
            1
            for a, b in self.matching
            if (a, b) not in latest and self.status(a) + self.status(b) == 1
        )
        accepted = sum(self.status(x) for x in self.latest_endpoints())
        free = self.me2_free()
        state = None
        if self.me2 is not None:
            state = classify_state(self._edge_status(self.me1), self._edge_status(self.me2))
        phi = expired + Fraction(accepted, 3) + (Fraction(2, 3) if free else 0)
        return PotentialSnapshot(phi, expired, accepted, free, state)

    def _monitor(
        self,
        index: int,
        late: int,
        before: PotentialSnapshot,
        shifted: bool,
        old_me1: Optional[MatchedEdge],
        old_me1_status: Optional[Tuple[int, int]],
    ) -> None:
        self.checked += 1
        amortized = late + self.snapshot.phi - before.phi
        if amortized > AMORTIZED_BOUND:
            self._violation(
                index,
                "potential",
                f"late operations plus potential change {amortized} exceed 10/3",
                before=before.to_dict(),
                late=late,
            )

        if shifted and old_me1 is not None:
            now = self._edge_status(old_me1)
            was_half = sum(old_me1_status) == 1
            if was_half and (sum(now) == 2 or now != old_me1_status):
                self._violation(
                    index,
                    "shift",
                    f"old me1 {old_me1} went from {old_me1_status} to {now} on shift",
                )

        p, v = self.me1 if self.me1 else (None, None)
        if p is not None and self.status(p) and self.status(v):
            for x in (p, v):
                if not any(
                    y not in self.mate and self.status(y) == 0 for y in self.graph[x]
                ):
                    self._violation(
                        index,
                        "full-me1",
                        f"me1 {self.me1} is full but {x} has no rejected unmatched neighbor",
                    )
                    break

    def _violation(self, index: int, kind: str, message: str, **extra) -> None:
        dump = self.state_dump(index)
        dump.update(extra)
        record = {"event": index, "kind": kind, "message": message, "dump": dump}
        self.violations.append(record)
        logger.error("event %d: %s", index, message)
        if self.strict:
            raise MonitorViolation(message, dump)

    def state_dump(self, index: int) -> Dict[str, Any]:
        return {
            "event": index,
            "me1": list(self.me1) if self.me1 else None,
            "me2": list(self.me2) if self.me2 else None,
            "matching": [list(edge) for edge in self.matching],
            "accepted": sorted(
                x for x in self.graph.nodes if self.status(x)
            ),
            "snapshot": self.snapshot.to_dict(),
        }


def parse_order(value: str) -> HalveOrder:
    try:
        return HalveOrder(value)
    except ValueError:
        raise ParameterError(
            f"unknown HalveBoth order {value!r}; expected one of "
            f"{[o.value for o in HalveOrder]}"
        ) from None
