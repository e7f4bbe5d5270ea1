"""Pytest configuration and fixtures."""

import shutil
import tempfile
from pathlib import Path

import networkx as nx
import pytest

from recourse_lab.config.schema import (
    AlgorithmConfig,
    ExperimentConfig,
    InstanceConfig,
    OracleConfig,
)
from recourse_lab.models.graph import EDGE, VERTEX, ArrivalEvent, EventStream


@pytest.fixture
def test_config():
    """Create a test configuration."""
    return ExperimentConfig(
        oracle=OracleConfig(cap=30),
        algorithm=AlgorithmConfig(algo="dh", problem="vc"),
        instance=InstanceConfig(family="triangle-fan", k=3),
    )


@pytest.fixture
def temp_dir():
    """Create a temporary directory for testing."""
    temp_dir = tempfile.mkdtemp()
    yield Path(temp_dir)
    shutil.rmtree(temp_dir)


@pytest.fixture
def star_stream():
    """Vertex 0 followed by three leaves attached to it."""
    return EventStream(
        VERTEX,
        [
            ArrivalEvent.of_vertex(0),
            ArrivalEvent.of_vertex(1, [0]),
            ArrivalEvent.of_vertex(2, [0]),
            ArrivalEvent.of_vertex(3, [0]),
        ],
        label="star-3",
    )


@pytest.fixture
def triangle_edges():
    """A triangle revealed edge by edge."""
    return EventStream(
        EDGE,
        [ArrivalEvent.of_edge(0, 1), ArrivalEvent.of_edge(1, 2), ArrivalEvent.of_edge(0, 2)],
        label="triangle",
    )


@pytest.fixture
def stream_file(temp_dir, star_stream):
    """The star stream written as JSONL."""
    path = temp_dir / "star.jsonl"
    star_stream.to_jsonl(path)
    return path


def _brute_force_augmenting_path(graph, mate, max_length):
    free = [v for v in graph.nodes if v not in mate]
    for i, s in enumerate(free):
        for t in free[i + 1 :]:
            for path in nx.all_simple_paths(graph, s, t, cutoff=max_length):
                edges = list(zip(path, path[1:]))
                if all(
                    (mate.get(u) == v) == (index % 2 == 1)
                    for index, (u, v) in enumerate(edges)
                ):
                    return path
    return None


@pytest.fixture
def brute_force_augmenting_path():
    """Reference search for an augmenting path of bounded length."""
    return _brute_force_augmenting_path
