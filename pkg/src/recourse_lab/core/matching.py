"""L-Greedy maximum cardinality matching with bounded augmenting paths."""

import math
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, Set, Tuple, Union

import networkx as nx

from recourse_lab.core.base import OnlineAlgorithm, StepOutcome
from recourse_lab.errors import ConsistencyError, ParameterError
from recourse_lab.models.assignment import get_problem
from recourse_lab.models.graph import Arrival, ElementId, canonical_edge
from recourse_lab.models.ledger import RecourseLedger
from recourse_lab.utils import Ratio, competitive_ratio, format_fraction, to_fraction
from recourse_lab.utils.logger import get_logger

logger = get_logger(__name__)

Path = Tuple[int, ...]


def l_from_t(t: Union[str, float, Fraction]) -> Tuple[int, Fraction]:
    """
    Path-length parameter for a target ratio t in (1, 2).

    Picks the largest t* = 1 + 1/j not above t and returns (L, t*) with L = j - 1.
    """
    t = to_fraction(t)
    if not (1 < t < 2):
        raise ParameterError(f"L-Greedy needs 1 < t < 2, got {t}")
    j = math.ceil(1 / (t - 1))
    return j - 1, 1 + Fraction(1, j)


def ratio_for_l(L: int) -> Fraction:
    """Competitive ratio (L+2)/(L+1) guaranteed when no augmenting path of length <= 2L+1 exists."""
    return Fraction(L + 2, L + 1)


def recourse_bound(t_star: Union[str, float, Fraction]) -> Fraction:
    """Amortized recourse bound (2-t*)/((t*-1)(3-t*)) + (t*-1)/(3-t*)."""
    t = to_fraction(t_star)
    if not (1 < t < 2):
        raise ParameterError(f"t* must lie in (1, 2), got {t}")
    return (2 - t) / ((t - 1) * (3 - t)) + (t - 1) / (3 - t)


def path_lower_bound(n: int) -> Fraction:
    """Amortized recourse n(n+1)/(2n+1) forced by the centre-out path of 2n+1 edges."""
    return Fraction(n * (n + 1), 2 * n + 1)


class LGreedy(OnlineAlgorithm):
    """
    Keep a matching with no augmenting path of length at most 2L+1.

    Each arrival is first handled greedily; afterwards augmenting paths of
    length at most 2L+1 are flipped, shortest first, lexicographically
    smallest vertex sequence among equals, until none remains.
    """

    name = "lgreedy"

    def __init__(self, L: Optional[int] = None, t=None):
        super().__init__(get_problem("matching"))
        if L is None and t is None:
            raise ParameterError("L-Greedy needs either L or t")
        if L is not None:
            if L < 0:
                raise ParameterError(f"L must be non-negative, got {L}")
            self.L = L
            self.t_star = ratio_for_l(L)
        else:
            self.L, self.t_star = l_from_t(t)
        self.mate: Dict[int, int] = {}
        self.flips = 0

    @property
    def max_length(self) -> int:
        return 2 * self.L + 1

    @property
    def ratio_bound(self) -> Fraction:
        return ratio_for_l(self.L)

    def params(self) -> Dict[str, Any]:
        return {"L": self.L, "t_star": format_fraction(self.t_star)}

    def matching(self) -> Set[Tuple[int, int]]:
        return {canonical_edge(u, v) for u, v in self.mate.items() if u < v}

    def _respond(self, arrival: Arrival, outcome: StepOutcome) -> None:
        for u, v in arrival.new_edges:
            if u not in self.mate and v not in self.mate:
                self._match(u, v)

        flips = 0
        while True:
            path = find_augmenting_path(self.graph, self.mate, self.max_length)
            if path is None:
                break
            self._flip(path)
            flips += 1
        if flips:
            logger.debug(
                "event %d: flipped %d augmenting path(s)", arrival.index, flips
            )
        outcome.details["flips"] = flips
        self.flips += flips

    def _match(self, u: int, v: int) -> None:
        self.mate[u] = v
        self.mate[v] = u
        self._set(ElementId.edge(u, v), 1)

    def _flip(self, path: Path) -> None:
        """Swap matched and unmatched edges along an augmenting path."""
        for i in range(1, len(path) - 1, 2):
            u, v = path[i], path[i + 1]
            del self.mate[u]
            del self.mate[v]
            self._set(ElementId.edge(u, v), 0)
        for i in range(0, len(path) - 1, 2):
            self._match(path[i], path[i + 1])

    def ratio_check(self, optimum: int) -> Ratio:
        """Symmetric ratio of the current matching against ``optimum``."""
        return competitive_ratio(len(self.mate) // 2, optimum)


def find_augmenting_path(
    graph: nx.Graph, mate: Dict[int, int], max_length: int
) -> Optional[Path]:
    """
    Shortest augmenting path of length at most ``max_length``.

    Lengths are tried in increasing order; for each length, free start
    vertices and neighbors are explored in ascending order, so the first path
    found is the lexicographically smallest vertex sequence of that length.
    """
    free = sorted(v for v in graph.nodes if v not in mate)
    if len(free) < 2:
        return None
    for length in range(1, max_length + 1, 2):
        for start in free:
            path = _search(graph, mate, [start], {start}, length)
            if path is not None:
                return path
    return None


def _search(
    graph: nx.Graph, mate: Dict[int, int], path: List[int], seen: Set[int], length: int
) -> Optional[Path]:
    # path has an even number of edges here; next edge is unmatched
    here = path[-1]
    remaining = length - (len(path) - 1)
    for w in sorted(graph[here]):
        if w in seen or mate.get(here) == w:
            continue
        if w not in mate:
            if remaining == 1:
                return tuple(path) + (w,)
            continue
        partner = mate[w]
        if remaining < 3 or partner in seen:
            continue
        path.extend((w, partner))
        seen.update((w, partner))
        found = _search(graph, mate, path, seen, length)
        path.pop()
        path.pop()
        seen.discard(w)
        seen.discard(partner)
        if found is not None:
            return found
    return None


def is_augmenting(graph: nx.Graph, mate: Dict[int, int], path: Iterable[int]) -> bool:
    """Check that ``path`` is a simple alternating path between two free vertices."""
    path = list(path)
    if len(path) < 2 or len(set(path)) != len(path):
        return False
    if path[0] in mate or path[-1] in mate:
        return False
    for i, (u, v) in enumerate(zip(path, path[1:])):
        if not graph.has_edge(u, v):
            return False
        matched = mate.get(u) == v
        if matched != (i % 2 == 1):
            return False
    return True


def component_recourse(ledger: RecourseLedger, graph: nx.Graph) -> List[Dict[str, Any]]:
    """
    Recourse per connected component of the revealed graph.

    Returns one entry per component that has edges: its vertices, edge count,
    the Type-1 recourse charged to its edges and their ratio.
    """
    rows = []
    for component in sorted(nx.connected_components(graph), key=min):
        edges = [
            ElementId.edge(u, v) for u, v in graph.subgraph(component).edges
        ]
        if not edges:
            continue
        type1, _ = ledger.per_element(edges)
        rows.append(
            {
                "vertices": sorted(component),
                "edges": len(edges),
                "type1": type1,
                "ratio": Fraction(type1, len(edges)),
            }
        )
    return rows


def check_no_short_path(graph: nx.Graph, mate: Dict[int, int], max_length: int) -> None:
    path = find_augmenting_path(graph, mate, max_length)
    if path is not None:
        raise ConsistencyError(f"augmenting path {path} of length {len(path) - 1} remains")
