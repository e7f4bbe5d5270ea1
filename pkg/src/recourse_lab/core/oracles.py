"""
Exact and approximate reference solvers ("yardsticks").

Independent set and vertex cover use a bitmask branch and bound with
max-degree branching, degree-0/1 reductions and a greedy clique-cover upper
bound. Bipartite graphs above the vertex cap go through König's theorem.
Matching uses the networkx blossom implementation; fractional matching uses
a maximum matching of the bipartite double cover.
"""

import itertools
from abc import ABC, abstractmethod
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, FrozenSet, Iterator, List, Optional, Set, Tuple

import networkx as nx

from recourse_lab.errors import OracleScaleError, ParameterError
from recourse_lab.models.assignment import (
    Assignment,
    ProblemSpec,
    assignment_from,
    get_problem,
)
from recourse_lab.models.graph import (
    ElementId,
    EventStream,
    canonical_edge,
    graph_key,
    replay,
)
from recourse_lab.utils import Number
from recourse_lab.utils.logger import get_logger

DEFAULT_CAP = 40
BRUTE_FORCE_CAP = 12

logger = get_logger(__name__)


@dataclass(frozen=True)
class OracleResult:
    """An optimal (or approximate) value together with a witness assignment."""

    value: Number
    witness: Assignment
    method: str


# ---------------------------------------------------------------------------
# Bitmask branch and bound
# ---------------------------------------------------------------------------


def _adjacency(nodes: Tuple[int, ...], edges: FrozenSet[Tuple[int, int]]) -> List[int]:
    position = {v: i for i, v in enumerate(nodes)}
    adj = [0] * len(nodes)
    for u, v in edges:
        i, j = position[u], position[v]
        adj[i] |= 1 << j
        adj[j] |= 1 << i
    return adj


def _popcount(mask: int) -> int:
    return bin(mask).count("1")


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _clique_cover_bound(adj: List[int], cand: int) -> int:
    """Number of cliques in a greedy clique cover of ``cand``; bounds any IS in it."""
    commons: List[int] = []
    for v in _bits(cand):
        bit = 1 << v
        for i, common in enumerate(commons):
            if common & bit:
                commons[i] = common & adj[v]
                break
        else:
            commons.append(adj[v] & cand)
    return len(commons)


class _MaxIndependentSet:
    """Branch and bound over bitmask candidate sets."""

    def __init__(self, adj: List[int]):
        self.adj = adj
        self.best_size = 0
        self.best_mask = 0

    def solve(self, cand: int) -> int:
        self._greedy(cand)
        self._branch(cand, 0, 0)
        return self.best_mask

    def _greedy(self, cand: int) -> None:
        chosen, size = 0, 0
        while cand:
            v = min(_bits(cand), key=lambda x: _popcount(self.adj[x] & cand))
            chosen |= 1 << v
            size += 1
            cand &= ~(self.adj[v] | (1 << v))
        self.best_size, self.best_mask = size, chosen

    def _branch(self, cand: int, chosen: int, size: int) -> None:
        adj = self.adj
        reduced = True
        while reduced and cand:
            reduced = False
            for v in _bits(cand):
                if _popcount(adj[v] & cand) <= 1:
                    chosen |= 1 << v
                    size += 1
                    cand &= ~(adj[v] | (1 << v))
                    reduced = True
                    break

        if not cand:
            if size > self.best_size:
                self.best_size, self.best_mask = size, chosen
            return
        if size + _clique_cover_bound(adj, cand) <= self.best_size:
            return

        v = max(_bits(cand), key=lambda x: (_popcount(adj[x] & cand), -x))
        bit = 1 << v
        self._branch(cand & ~(adj[v] | bit), chosen | bit, size + 1)
        self._branch(cand & ~bit, chosen, size)


def _lexicographic_search(
    adj: List[int], cand: int, target: int, include_first: bool
) -> Optional[int]:
    """
    First independent set of size ``target`` in ascending-vertex DFS order.

    Including low vertices first yields the lexicographically smallest
    optimal set; excluding them first yields the one whose complement (a
    minimum cover) is lexicographically smallest.
    """

    def search(cand: int, chosen: int, size: int) -> Optional[int]:
        if size == target:
            return chosen
        if not cand or size + _clique_cover_bound(adj, cand) < target:
            return None
        low = cand & -cand
        v = low.bit_length() - 1
        include = (cand & ~(adj[v] | low), chosen | low, size + 1)
        exclude = (cand & ~low, chosen, size)
        for option in (include, exclude) if include_first else (exclude, include):
            found = search(*option)
            if found is not None:
                return found
        return None

    return search(cand, 0, 0)


@lru_cache(maxsize=8192)
def _independent_set(
    nodes: Tuple[int, ...], edges: FrozenSet[Tuple[int, int]], order: Optional[str]
) -> Tuple[int, ...]:
    """Members of a maximum independent set; ``order`` picks a canonical one."""
    adj = _adjacency(nodes, edges)
    full = (1 << len(nodes)) - 1
    if order is None:
        mask = _MaxIndependentSet(adj).solve(full)
    else:
        size = len(_independent_set(nodes, edges, None))
        mask = _lexicographic_search(adj, full, size, include_first=(order == "is"))
    return tuple(nodes[i] for i in _bits(mask))


# ---------------------------------------------------------------------------
# Bipartite fast path
# ---------------------------------------------------------------------------


def _bipartition(graph: nx.Graph) -> Optional[Tuple[Set[int], Set[int]]]:
    try:
        coloring = nx.bipartite.color(graph)
    except nx.NetworkXError:
        return None
    top = {v for v, c in coloring.items() if c == 0}
    return top, set(graph.nodes) - top


def _konig_cover(graph: nx.Graph, top: Set[int], bottom: Set[int]) -> Set[int]:
    """Minimum vertex cover of a bipartite graph."""
    small = min((top, bottom), key=lambda side: (len(side), sorted(side)))
    # A matching saturating the smaller side certifies that side as a minimum cover.
    matched: Set[int] = set()
    for u in sorted(small):
        for w in graph[u]:
            if w not in matched:
                matched.add(w)
                break
        else:
            break
    else:
        return set(small)
    matching = nx.bipartite.hopcroft_karp_matching(graph, top_nodes=top)
    return set(nx.bipartite.to_vertex_cover(graph, matching, top_nodes=top))


# ---------------------------------------------------------------------------
# Public oracles
# ---------------------------------------------------------------------------


def _large_bipartite_cover(graph: nx.Graph, cap: int) -> Set[int]:
    n = graph.number_of_nodes()
    sides = _bipartition(graph)
    if sides is None:
        raise OracleScaleError(n, cap)
    logger.debug("graph with %d vertices above cap %d: using König", n, cap)
    return _konig_cover(graph, *sides)


def max_independent_set(
    graph: nx.Graph, cap: int = DEFAULT_CAP, canonical: bool = False
) -> OracleResult:
    """
    Maximum independent set.

    Args:
        graph: Revealed graph
        cap: Largest vertex count handled by branch and bound
        canonical: Return the lexicographically smallest optimal set

    Returns:
        OracleResult: Size and witness

    Raises:
        OracleScaleError: Above ``cap`` on a non-bipartite graph
    """
    problem = get_problem("is")
    if graph.number_of_nodes() > cap:
        members = set(graph.nodes) - _large_bipartite_cover(graph, cap)
        return OracleResult(len(members), assignment_from(problem, members), "konig")
    nodes, edges = graph_key(graph)
    members = _independent_set(nodes, edges, "is" if canonical else None)
    return OracleResult(
        len(members), assignment_from(problem, members), "branch-and-bound"
    )


def min_vertex_cover(
    graph: nx.Graph, cap: int = DEFAULT_CAP, canonical: bool = False
) -> OracleResult:
    """Minimum vertex cover; the complement of a maximum independent set."""
    problem = get_problem("vc")
    if graph.number_of_nodes() > cap:
        cover = _large_bipartite_cover(graph, cap)
        return OracleResult(len(cover), assignment_from(problem, cover), "konig")
    nodes, edges = graph_key(graph)
    independent = set(_independent_set(nodes, edges, "vc" if canonical else None))
    cover = [v for v in nodes if v not in independent]
    return OracleResult(len(cover), assignment_from(problem, cover), "branch-and-bound")


def max_matching(graph: nx.Graph) -> OracleResult:
    """Maximum cardinality matching via the blossom algorithm."""
    mate = nx.max_weight_matching(graph, maxcardinality=True)
    edges = [canonical_edge(u, v) for u, v in mate]
    return OracleResult(
        len(edges), assignment_from(get_problem("matching"), edges), "blossom"
    )


def max_fractional_matching(graph: nx.Graph) -> OracleResult:
    """
    Maximum fractional matching with half-integral values.

    Half of a maximum matching of the double cover G x K2; an edge gets
    (m(u0, v1) + m(v0, u1)) / 2.
    """
    cover = nx.Graph()
    top = {(v, 0) for v in graph.nodes}
    cover.add_nodes_from(top)
    cover.add_nodes_from((v, 1) for v in graph.nodes)
    for u, v in graph.edges:
        cover.add_edge((u, 0), (v, 1))
        cover.add_edge((v, 0), (u, 1))
    matching = nx.bipartite.hopcroft_karp_matching(cover, top_nodes=top)

    problem = get_problem("fractional-matching")
    witness = problem.new_assignment()
    total = Fraction(0)
    for (u, side), (v, _) in matching.items():
        if side != 0:
            continue
        edge = canonical_edge(u, v)
        element = ElementId.edge(*edge)
        witness.set(element, witness.get(element) + Fraction(1, 2))
        total += Fraction(1, 2)
    return OracleResult(total, witness, "double-cover")


def solve(
    problem: ProblemSpec, graph: nx.Graph, cap: int = DEFAULT_CAP, canonical: bool = False
) -> OracleResult:
    """Dispatch to the exact oracle of ``problem``."""
    if problem.name == "is":
        return max_independent_set(graph, cap, canonical)
    if problem.name == "vc":
        return min_vertex_cover(graph, cap, canonical)
    if problem.name == "matching":
        return max_matching(graph)
    if problem.name == "fractional-matching":
        return max_fractional_matching(graph)
    raise ParameterError(f"no exact oracle for {problem.name!r}")


# ---------------------------------------------------------------------------
# Brute force cross-checks
# ---------------------------------------------------------------------------


def _check_brute_force(graph: nx.Graph) -> None:
    n = graph.number_of_nodes()
    if n > BRUTE_FORCE_CAP:
        raise OracleScaleError(n, BRUTE_FORCE_CAP)


def brute_force_independent_set(graph: nx.Graph) -> int:
    """Size of a maximum independent set by trying subsets from largest down."""
    _check_brute_force(graph)
    nodes = list(graph.nodes)
    for size in range(len(nodes), 0, -1):
        for subset in itertools.combinations(nodes, size):
            if not any(graph.has_edge(u, v) for u, v in itertools.combinations(subset, 2)):
                return size
    return 0


def brute_force_vertex_cover(graph: nx.Graph) -> int:
    """Size of a minimum vertex cover by trying subsets from smallest up."""
    _check_brute_force(graph)
    nodes = list(graph.nodes)
    for size in range(len(nodes) + 1):
        for subset in itertools.combinations(nodes, size):
            chosen = set(subset)
            if all(u in chosen or v in chosen for u, v in graph.edges):
                return size
    return len(nodes)


def brute_force_matching(graph: nx.Graph) -> int:
    """Size of a maximum matching: the lowest vertex is either unmatched or matched."""
    _check_brute_force(graph)

    def best(remaining: FrozenSet[int]) -> int:
        if not remaining:
            return 0
        v = min(remaining)
        rest = remaining - {v}
        result = best(rest)
        for u in graph[v]:
            if u in rest:
                result = max(result, 1 + best(rest - {u}))
        return result

    return best(frozenset(graph.nodes))


# ---------------------------------------------------------------------------
# Yardsticks
# ---------------------------------------------------------------------------


class Yardstick(ABC):
    """Reference solution an algorithm measures itself against."""

    kind: str
    alpha: Fraction = Fraction(1)

    def __init__(self, problem: ProblemSpec):
        self.problem = problem

    @property
    def exact(self) -> bool:
        return self.kind == "exact"

    @abstractmethod
    def evaluate(self, graph: nx.Graph) -> OracleResult:
        """Value (and some witness) on ``graph``."""

    def witness(self, graph: nx.Graph) -> OracleResult:
        """Deterministic witness used when an algorithm switches to it."""
        return self.evaluate(graph)


class ExactYardstick(Yardstick):
    kind = "exact"

    def __init__(self, problem: ProblemSpec, cap: int = DEFAULT_CAP):
        super().__init__(problem)
        if cap <= 0:
            raise ParameterError(f"oracle cap must be positive, got {cap}")
        self.cap = cap

    def evaluate(self, graph: nx.Graph) -> OracleResult:
        return solve(self.problem, graph, self.cap)

    def witness(self, graph: nx.Graph) -> OracleResult:
        return solve(self.problem, graph, self.cap, canonical=True)


class GreedyYardstick(Yardstick):
    """
    Online greedy maximal matching replayed in arrival order (matching), or the
    endpoints of that matching (vertex cover). Both are 2-approximations and
    never decrease as the graph grows.
    """

    kind = "greedy"
    alpha = Fraction(2)

    def __init__(self, problem: ProblemSpec):
        if problem.name not in ("matching", "vc"):
            raise ParameterError(
                f"greedy yardstick supports matching and vc, not {problem.name!r}"
            )
        super().__init__(problem)

    def evaluate(self, graph: nx.Graph) -> OracleResult:
        order = sorted(
            (data.get("arrival", 0), canonical_edge(u, v))
            for u, v, data in graph.edges(data=True)
        )
        used: Set[int] = set()
        matching = []
        for _, (u, v) in order:
            if u not in used and v not in used:
                used.update((u, v))
                matching.append((u, v))
        if self.problem.name == "matching":
            accepted = matching
        else:
            accepted = sorted(used)
        witness = assignment_from(self.problem, accepted)
        return OracleResult(len(accepted), witness, "greedy")


def make_yardstick(problem: ProblemSpec, kind: str = "exact", cap: int = DEFAULT_CAP) -> Yardstick:
    if kind == "exact":
        return ExactYardstick(problem, cap)
    if kind == "greedy":
        return GreedyYardstick(problem)
    raise ParameterError(f"unknown yardstick {kind!r}")


def verify_incremental(yardstick: Yardstick, stream: EventStream) -> bool:
    """Whether the yardstick's value never decreases along the stream's prefixes."""
    previous: Optional[Number] = None
    for graph in replay(stream):
        value = yardstick.evaluate(graph).value
        if previous is not None and value < previous:
            logger.info("yardstick dropped from %s to %s", previous, value)
            return False
        previous = value
    return True


def oracle_cache_info() -> Dict[str, int]:
    info = _independent_set.cache_info()
    return {"hits": info.hits, "misses": info.misses, "size": info.currsize}
