"""Hypothesis strategies for graphs and arrival streams."""

import networkx as nx
from hypothesis import strategies as st
from hypothesis.strategies import composite

from recourse_lab.models.graph import EDGE, VERTEX, ArrivalEvent, EventStream


@composite
def graphs(draw, min_nodes=0, max_nodes=10):
    """Labelled simple graphs on vertices 0..n-1."""
    n = draw(st.integers(min_value=min_nodes, max_value=max_nodes))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    graph = nx.Graph()
    graph.add_nodes_from(range(n))
    graph.add_edges_from(pair for pair, keep in zip(pairs, chosen) if keep)
    return graph


@composite
def vertex_streams(draw, max_nodes=10):
    """A random graph revealed vertex by vertex in id order."""
    graph = draw(graphs(max_nodes=max_nodes))
    events = [
        ArrivalEvent.of_vertex(v, sorted(u for u in graph[v] if u < v))
        for v in sorted(graph.nodes)
    ]
    return EventStream(VERTEX, events, label="hypothesis")


@composite
def edge_streams(draw, max_nodes=10):
    """A random graph's edges revealed in a drawn order."""
    graph = draw(graphs(max_nodes=max_nodes))
    edges = draw(st.permutations(sorted(graph.edges)))
    return EventStream(EDGE, [ArrivalEvent.of_edge(u, v) for u, v in edges], label="hypothesis")
