"""Instance generators: fixed lower-bound constructions, random streams and adaptive adversaries."""

import random
from abc import ABC, abstractmethod
from fractions import Fraction
from typing import Callable, List, Optional, Tuple

import networkx as nx

from recourse_lab.core.base import OnlineAlgorithm, StepOutcome
from recourse_lab.errors import ParameterError
from recourse_lab.models.graph import EDGE, VERTEX, ArrivalEvent, ElementId, EventStream
from recourse_lab.utils import format_fraction, to_fraction
from recourse_lab.utils.logger import get_logger

logger = get_logger(__name__)


def gen_matching_path(n: int) -> EventStream:
    """
    Path on vertices 0..2n+1 revealed centre-out in the edge-arrival model.

    The middle edge comes first, then alternately the next edge to its left
    and to its right. After the k-th pair an augmenting path of length 2k+1
    spans the revealed part, so an algorithm allowed to flip it pays 2k.
    """
    if n < 0:
        raise ParameterError(f"path size n must be non-negative, got {n}")
    events = [ArrivalEvent.of_edge(n, n + 1)]
    for k in range(1, n + 1):
        events.append(ArrivalEvent.of_edge(n - k, n - k + 1))
        events.append(ArrivalEvent.of_edge(n + k, n + k + 1))
    return EventStream(EDGE, events, label=f"path-{n}")


def gen_vc_repeating_gadget(rounds: int) -> EventStream:
    """
    Six-vertex prefix followed by ``rounds`` repeated vertex pairs.

    Duo-Halve pays 7 late operations on the prefix and 5 on every pair,
    so its amortized recourse tends to 5/2.
    """
    if rounds < 0:
        raise ParameterError(f"rounds must be non-negative, got {rounds}")
    events = [
        ArrivalEvent.of_vertex(0),
        ArrivalEvent.of_vertex(1, [0]),
        ArrivalEvent.of_vertex(2, [0]),
        ArrivalEvent.of_vertex(3, [2]),
        ArrivalEvent.of_vertex(4, [1, 2]),
        ArrivalEvent.of_vertex(5, [0, 4]),
    ]
    for j in range(rounds):
        x, y = 6 + 2 * j, 7 + 2 * j
        events.append(ArrivalEvent.of_vertex(x, [3 + 2 * j, 4 + 2 * j]))
        events.append(ArrivalEvent.of_vertex(y, [2 + 2 * j, x]))
    return EventStream(VERTEX, events, label=f"vc-gadget-{rounds}")


def gen_vc_triangle_fan(k: int) -> EventStream:
    """``k`` disjoint edges, then one vertex adjacent to all their endpoints."""
    if k < 1:
        raise ParameterError(f"triangle fan needs k >= 1, got {k}")
    events = []
    for i in range(k):
        events.append(ArrivalEvent.of_vertex(2 * i))
        events.append(ArrivalEvent.of_vertex(2 * i + 1, [2 * i]))
    events.append(ArrivalEvent.of_vertex(2 * k, range(2 * k)))
    return EventStream(VERTEX, events, label=f"triangle-fan-{k}")


def gen_random(model: str, n: int, p: float, seed: int) -> EventStream:
    """
    G(n, p) revealed in a uniformly random order.

    Vertex arrival relabels vertices by arrival position; edge arrival
    shuffles the edge list. Identical arguments give identical streams.
    """
    if n < 0:
        raise ParameterError(f"n must be non-negative, got {n}")
    if not (0 <= p <= 1):
        raise ParameterError(f"p must lie in [0, 1], got {p}")
    rng = random.Random(seed)
    graph = nx.gnp_random_graph(n, p, seed=rng)
    label = f"random-{model}-n{n}-p{p}-s{seed}"

    if model == VERTEX:
        order = list(graph.nodes)
        rng.shuffle(order)
        position = {v: i for i, v in enumerate(order)}
        events = []
        for v in order:
            adj = sorted(position[u] for u in graph[v] if position[u] < position[v])
            events.append(ArrivalEvent.of_vertex(position[v], adj))
        return EventStream(VERTEX, events, label=label)

    if model == EDGE:
        edges = sorted(graph.edges)
        rng.shuffle(edges)
        events = [ArrivalEvent.of_edge(u, v) for u, v in edges]
        return EventStream(EDGE, events, label=label)

    raise ParameterError(f"unknown arrival model {model!r}")


def is_lower_bound(t, switches: int) -> Fraction:
    """Amortized recourse ((t-2)(1/t)^(i-1) + 1)/(t-1) forced after i switches."""
    t = to_fraction(t)
    if t <= 1:
        raise ParameterError(f"t must exceed 1, got {t}")
    if switches < 1:
        raise ParameterError(f"switch budget must be positive, got {switches}")
    return ((t - 2) * (1 / t) ** (switches - 1) + 1) / (t - 1)


class AdaptiveAdversary(ABC):
    """An instance that picks each event after seeing the algorithm's state."""

    model: str = VERTEX

    def __init__(self, budget: int):
        if budget < 1:
            raise ParameterError(f"event budget must be positive, got {budget}")
        self.budget = budget
        self.emitted = 0

    @abstractmethod
    def next_event(self, algorithm: OnlineAlgorithm) -> Optional[ArrivalEvent]:
        """The next event, or None when the game is over."""

    def observe(self, outcome: StepOutcome) -> None:
        """Called with the algorithm's response to every emitted event."""


class BipartiteISAdversary(AdaptiveAdversary):
    """
    Grow a complete bipartite graph against an independent set algorithm.

    While the algorithm holds a vertex of side X, the new vertex joins side Y
    and is adjacent to all of X; otherwise it joins X, adjacent to all of Y.
    The game ends right after the algorithm's ``switches``-th switch.
    """

    def __init__(self, t, switches: int = 8, budget: int = 100_000):
        super().__init__(budget)
        self.t = to_fraction(t)
        if self.t <= 1:
            raise ParameterError(f"t must exceed 1, got {self.t}")
        if switches < 1:
            raise ParameterError(f"switch budget must be positive, got {switches}")
        self.switches = switches
        self.switches_seen = 0
        self.x_side: List[int] = []
        self.y_side: List[int] = []

    @property
    def label(self) -> str:
        return f"bipartite-is-t{format_fraction(self.t)}-i{self.switches}"

    def next_event(self, algorithm: OnlineAlgorithm) -> Optional[ArrivalEvent]:
        if self.switches_seen >= self.switches or self.emitted >= self.budget:
            return None
        v = self.emitted
        holds_x = any(algorithm.assignment.get(ElementId.vertex(x)) for x in self.x_side)
        if holds_x:
            event = ArrivalEvent.of_vertex(v, self.x_side)
            self.y_side.append(v)
        else:
            event = ArrivalEvent.of_vertex(v, self.y_side)
            self.x_side.append(v)
        self.emitted += 1
        return event

    def observe(self, outcome: StepOutcome) -> None:
        if outcome.switched or outcome.late_count:
            self.switches_seen += 1
            logger.debug(
                "switch %d observed at event %d", self.switches_seen, outcome.index
            )

    def lower_bound(self) -> Fraction:
        return is_lower_bound(self.t, self.switches)


def gen_bipartite_is_adversary(t, budget: int = 100_000, switches: int = 8) -> BipartiteISAdversary:
    return BipartiteISAdversary(t, switches=switches, budget=budget)


def play(
    algorithm: OnlineAlgorithm,
    adversary: AdaptiveAdversary,
    on_step: Optional[Callable[[StepOutcome], None]] = None,
) -> Tuple[EventStream, List[StepOutcome]]:
    """
    Run the adaptive game to completion; returns the realised stream.

    ``on_step`` sees every outcome before the adversary picks the next event.
    """
    algorithm.problem.check_model(adversary.model)
    events, outcomes = [], []
    while True:
        event = adversary.next_event(algorithm)
        if event is None:
            break
        outcome = algorithm.step(event)
        if on_step is not None:
            on_step(outcome)
        adversary.observe(outcome)
        events.append(event)
        outcomes.append(outcome)
    label = getattr(adversary, "label", type(adversary).__name__)
    return EventStream(adversary.model, events, label=label), outcomes
