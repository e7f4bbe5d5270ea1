"""Tests for arrival events, streams and the revealed graph."""

import json

import networkx as nx
import pytest

from recourse_lab.errors import MalformedStreamError
from recourse_lab.models.graph import (
    EDGE,
    VERTEX,
    ArrivalEvent,
    ElementId,
    EventStream,
    build_graph,
    canonical_edge,
    extend,
    graph_key,
    replay,
)


def test_element_ids():
    """Test element construction, ordering and rendering."""
    assert ElementId.edge(5, 2) == ElementId.edge(2, 5)
    assert ElementId.edge(5, 2).index == (2, 5)
    assert str(ElementId.vertex(3)) == "v3"
    assert str(ElementId.edge(1, 4)) == "e1-4"
    assert ElementId.vertex(2).to_json() == 2
    assert ElementId.edge(1, 4).to_json() == [1, 4]
    assert sorted([ElementId.vertex(2), ElementId.vertex(0)])[0] == ElementId.vertex(0)
    assert canonical_edge(7, 1) == (1, 7)


def test_extend_vertex_arrival():
    """Test that a vertex arrival adds the vertex and its back edges."""
    graph = nx.Graph()
    extend(graph, ArrivalEvent.of_vertex(0), 0)
    extend(graph, ArrivalEvent.of_vertex(1), 1)
    arrival = extend(graph, ArrivalEvent.of_vertex(2, [1, 0]), 2)

    assert arrival.new_vertices == (2,)
    assert arrival.new_edges == ((0, 2), (1, 2))
    assert graph.nodes[2]["arrival"] == 2
    assert graph.edges[0, 2]["arrival"] == 2


def test_extend_edge_arrival_reveals_endpoints():
    """Test that an edge arrival reveals its endpoints on first mention."""
    graph = nx.Graph()
    first = extend(graph, ArrivalEvent.of_edge(3, 1), 0)
    second = extend(graph, ArrivalEvent.of_edge(1, 2), 1)

    assert first.new_vertices == (1, 3)
    assert first.new_edges == ((1, 3),)
    assert second.new_vertices == (2,)


@pytest.mark.parametrize(
    "events",
    [
        [ArrivalEvent.of_vertex(0), ArrivalEvent.of_vertex(0)],
        [ArrivalEvent.of_vertex(0), ArrivalEvent.of_vertex(1, [2])],
        [ArrivalEvent.of_vertex(0), ArrivalEvent.of_vertex(1, [0, 0])],
        [ArrivalEvent.of_vertex(0, [0])],
    ],
)
def test_extend_rejects_bad_vertex_events(events):
    """Test repeated vertices, unknown neighbors, duplicates and self-loops."""
    graph = nx.Graph()
    with pytest.raises(MalformedStreamError):
        for index, event in enumerate(events):
            extend(graph, event, index)


def test_extend_rejects_bad_edge_events():
    """Test repeated edges and self-loops in the edge model."""
    graph = nx.Graph()
    extend(graph, ArrivalEvent.of_edge(0, 1), 0)
    with pytest.raises(MalformedStreamError):
        extend(graph, ArrivalEvent.of_edge(1, 0), 1)
    with pytest.raises(MalformedStreamError):
        extend(graph, ArrivalEvent.of_edge(2, 2), 1)


def test_stream_rejects_mixed_models():
    """Test that a stream holds a single arrival model."""
    with pytest.raises(MalformedStreamError):
        EventStream(VERTEX, [ArrivalEvent.of_edge(0, 1)])
    with pytest.raises(MalformedStreamError):
        EventStream("batch", [])


def test_jsonl_round_trip(temp_dir, star_stream):
    """Test writing and reading a stream."""
    path = temp_dir / "nested" / "star.jsonl"
    star_stream.to_jsonl(path)

    lines = path.read_text(encoding="utf-8").splitlines()
    assert json.loads(lines[1]) == {"v": 1, "adj": [0]}

    loaded = EventStream.from_jsonl(path)
    assert loaded.model == VERTEX
    assert loaded.events == star_stream.events
    assert loaded.label == "star"


def test_jsonl_edge_stream(temp_dir, triangle_edges):
    """Test that edge streams keep their model."""
    path = temp_dir / "triangle.jsonl"
    triangle_edges.to_jsonl(path)
    loaded = EventStream.from_jsonl(path, label="t")
    assert loaded.model == EDGE
    assert loaded.label == "t"
    assert len(loaded) == 3


def test_empty_jsonl_is_an_empty_vertex_stream(temp_dir):
    """Test that an empty file is a valid, empty instance."""
    path = temp_dir / "empty.jsonl"
    path.write_text("", encoding="utf-8")
    stream = EventStream.from_jsonl(path)
    assert len(stream) == 0
    assert stream.model == VERTEX


@pytest.mark.parametrize(
    "line",
    [
        "not json",
        "[1, 2]",
        '{"x": 1}',
        '{"v": -1, "adj": []}',
        '{"v": 1, "adj": "0"}',
        '{"v": 1, "adj": [true]}',
        '{"e": [1]}',
        '{"e": [1, "2"]}',
    ],
)
def test_malformed_jsonl(temp_dir, line):
    """Test that malformed records are rejected with MalformedStreamError."""
    path = temp_dir / "bad.jsonl"
    path.write_text(line + "\n", encoding="utf-8")
    with pytest.raises(MalformedStreamError):
        EventStream.from_jsonl(path)


def test_replay_yields_prefixes(star_stream):
    """Test that replay yields independent snapshots of every prefix."""
    snapshots = list(replay(star_stream))
    assert [g.number_of_nodes() for g in snapshots] == [1, 2, 3, 4]
    assert [g.number_of_edges() for g in snapshots] == [0, 1, 2, 3]
    assert snapshots[0].number_of_nodes() == 1

    final = build_graph(star_stream)
    assert graph_key(final) == graph_key(snapshots[-1])
    assert graph_key(final) == ((0, 1, 2, 3), frozenset({(0, 1), (0, 2), (0, 3)}))
