"""Arrival events, event streams and the revealed graph."""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Tuple, Union

import networkx as nx

from recourse_lab.errors import MalformedStreamError

VERTEX = "vertex"
EDGE = "edge"
ARRIVAL_MODELS = (VERTEX, EDGE)

Edge = Tuple[int, int]


def canonical_edge(u: int, v: int) -> Edge:
    """Order an edge's endpoints so that the smaller id comes first."""
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True, order=True)
class ElementId:
    """
    A decision element: a vertex (index is its id) or an edge (index is a
    canonical endpoint pair).
    """

    kind: str
    index: Union[int, Edge]

    @classmethod
    def vertex(cls, v: int) -> "ElementId":
        return cls(VERTEX, v)

    @classmethod
    def edge(cls, u: int, v: int) -> "ElementId":
        return cls(EDGE, canonical_edge(u, v))

    @property
    def is_vertex(self) -> bool:
        return self.kind == VERTEX

    def to_json(self) -> Any:
        return self.index if self.is_vertex else list(self.index)

    def __str__(self) -> str:
        if self.is_vertex:
            return f"v{self.index}"
        return f"e{self.index[0]}-{self.index[1]}"


@dataclass(frozen=True)
class ArrivalEvent:
    """
    One step of an online instance.

    Vertex arrival sets ``vertex`` and ``adj`` (neighbors revealed earlier);
    edge arrival sets ``edge``.
    """

    vertex: Optional[int] = None
    adj: Tuple[int, ...] = ()
    edge: Optional[Edge] = None

    @classmethod
    def of_vertex(cls, v: int, adj=()) -> "ArrivalEvent":
        return cls(vertex=v, adj=tuple(adj))

    @classmethod
    def of_edge(cls, u: int, v: int) -> "ArrivalEvent":
        return cls(edge=(u, v))

    @property
    def model(self) -> str:
        return VERTEX if self.vertex is not None else EDGE

    def to_json(self) -> Dict[str, Any]:
        if self.vertex is not None:
            return {"v": self.vertex, "adj": list(self.adj)}
        return {"e": list(self.edge)}

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> "ArrivalEvent":
        """Decode one JSONL record, rejecting anything that is not an event."""
        if not isinstance(data, dict):
            raise MalformedStreamError(f"event must be an object, got {data!r}")
        if "v" in data:
            vertex = data["v"]
            adj = data.get("adj", [])
            if not _is_vertex_id(vertex) or not isinstance(adj, list):
                raise MalformedStreamError(f"bad vertex event {data!r}")
            if not all(_is_vertex_id(u) for u in adj):
                raise MalformedStreamError(f"bad adjacency in {data!r}")
            return cls.of_vertex(vertex, adj)
        if "e" in data:
            pair = data["e"]
            if (
                not isinstance(pair, list)
                or len(pair) != 2
                or not all(_is_vertex_id(u) for u in pair)
            ):
                raise MalformedStreamError(f"bad edge event {data!r}")
            return cls.of_edge(pair[0], pair[1])
        raise MalformedStreamError(f"event has neither 'v' nor 'e': {data!r}")


def _is_vertex_id(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool) and value >= 0


@dataclass(frozen=True)
class Arrival:
    """What one event added to the revealed graph."""

    index: int
    event: ArrivalEvent
    new_vertices: Tuple[int, ...] = ()
    new_edges: Tuple[Edge, ...] = ()


@dataclass
class EventStream:
    """An ordered arrival sequence in a single arrival model."""

    model: str = VERTEX
    events: List[ArrivalEvent] = field(default_factory=list)
    label: str = ""

    def __post_init__(self):
        if self.model not in ARRIVAL_MODELS:
            raise MalformedStreamError(f"unknown arrival model {self.model!r}")
        for event in self.events:
            if event.model != self.model:
                raise MalformedStreamError(
                    f"{event.model}-arrival event in a {self.model}-arrival stream"
                )

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self) -> Iterator[ArrivalEvent]:
        return iter(self.events)

    def to_jsonl(self, path: Union[str, Path]) -> None:
        """Write one JSON object per line."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            for event in self.events:
                f.write(json.dumps(event.to_json()) + "\n")

    @classmethod
    def from_jsonl(cls, path: Union[str, Path], label: str = None) -> "EventStream":
        """
        Read a stream written by :meth:`to_jsonl`.

        Args:
            path: JSONL file, one event per line
            label: Stream label; defaults to the file stem

        Returns:
            EventStream: The decoded stream (structure is not validated until replay)
        """
        path = Path(path)
        events = []
        with open(path, "r", encoding="utf-8") as f:
            for lineno, line in enumerate(f, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    data = json.loads(line)
                except json.JSONDecodeError as e:
                    raise MalformedStreamError(f"{path}:{lineno}: {e}") from e
                events.append(ArrivalEvent.from_json(data))
        model = events[0].model if events else VERTEX
        return cls(model=model, events=events, label=label or path.stem)


def extend(graph: nx.Graph, event: ArrivalEvent, index: int) -> Arrival:
    """
    Apply one event to ``graph`` in place.

    Nodes and edges carry an ``arrival`` attribute holding the event index.

    Raises:
        MalformedStreamError: On unknown neighbors, repeated vertices or edges
    """
    if event.vertex is not None:
        v = event.vertex
        if v in graph:
            raise MalformedStreamError(f"event {index}: vertex {v} already revealed")
        if len(set(event.adj)) != len(event.adj):
            raise MalformedStreamError(f"event {index}: repeated neighbor of {v}")
        for u in event.adj:
            if u == v:
                raise MalformedStreamError(f"event {index}: self-loop on {v}")
            if u not in graph:
                raise MalformedStreamError(
                    f"event {index}: neighbor {u} of {v} not yet revealed"
                )
        graph.add_node(v, arrival=index)
        new_edges = []
        for u in sorted(event.adj):
            graph.add_edge(u, v, arrival=index)
            new_edges.append(canonical_edge(u, v))
        return Arrival(index, event, (v,), tuple(new_edges))

    u, v = event.edge
    if u == v:
        raise MalformedStreamError(f"event {index}: self-loop on {u}")
    if graph.has_edge(u, v):
        raise MalformedStreamError(f"event {index}: edge {u}-{v} already revealed")
    new_vertices = []
    for w in sorted((u, v)):
        if w not in graph:
            graph.add_node(w, arrival=index)
            new_vertices.append(w)
    graph.add_edge(u, v, arrival=index)
    return Arrival(index, event, tuple(new_vertices), (canonical_edge(u, v),))


def replay(stream: EventStream) -> Iterator[nx.Graph]:
    """Yield a snapshot of the revealed graph after every event."""
    graph = nx.Graph()
    for index, event in enumerate(stream):
        extend(graph, event, index)
        yield graph.copy()


def build_graph(stream: EventStream) -> nx.Graph:
    """The final revealed graph of ``stream``."""
    graph = nx.Graph()
    for index, event in enumerate(stream):
        extend(graph, event, index)
    return graph


def graph_key(graph: nx.Graph) -> Tuple[Tuple[int, ...], frozenset]:
    """Hashable canonical form of a labelled graph (node set plus edge set)."""
    return (
        tuple(sorted(graph.nodes)),
        frozenset(canonical_edge(u, v) for u, v in graph.edges),
    )
