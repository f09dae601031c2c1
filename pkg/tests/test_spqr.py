from collections import Counter

import networkx as nx
import pytest
from hypothesis import given, settings

from kdistrict.errors import NotBiconnected
from kdistrict.graph import Graph
from kdistrict.spqr import REAL, VIRTUAL, spqr_tree
from strategies import connected_graphs


def _check(g, t):
    real = Counter()
    virtual = Counter()
    for i, node in enumerate(t.nodes):
        for e in node.edges:
            key = (min(e.u, e.v), max(e.u, e.v))
            if e.kind == REAL:
                real[key] += 1
            else:
                virtual[(min(i, e.partner), max(i, e.partner), key)] += 1
        h = nx.MultiGraph([(e.u, e.v) for e in node.edges])
        if node.type == "S":
            assert all(d == 2 for _, d in h.degree()) and nx.is_connected(h)
        elif node.type == "P":
            assert len(node.vertices) == 2 and len(node.edges) >= 3
        else:
            assert len(node.vertices) >= 4 and nx.node_connectivity(nx.Graph(h)) >= 3
    assert dict(real) == {e: 1 for e in g.edges}
    assert all(c == 2 for c in virtual.values())
    assert len(t.tree_adjacency) == len(t.nodes) - 1
    for a, b, _ in t.tree_adjacency:
        assert t.nodes[a].type != t.nodes[b].type or t.nodes[a].type == "R"


def test_kinds_on_small_graphs():
    cycle = Graph.from_edges(5, [(i, (i + 1) % 5) for i in range(5)])
    assert [n.type for n in spqr_tree(cycle).nodes] == ["S"]
    k4 = Graph.from_edges(4, [(a, b) for a in range(4) for b in range(a + 1, 4)])
    assert [n.type for n in spqr_tree(k4).nodes] == ["R"]
    theta = Graph.from_edges(5, [(0, 1), (1, 4), (0, 2), (2, 4), (0, 3), (3, 4)])
    t = spqr_tree(theta)
    assert Counter(n.type for n in t.nodes) == {"P": 1, "S": 3}
    _check(theta, t)
    with pytest.raises(NotBiconnected):
        spqr_tree(Graph.from_edges(3, [(0, 1), (1, 2)]))


@settings(max_examples=150, deadline=None)
@given(connected_graphs(min_n=3, max_n=10, biconnected=True))
def test_decomposition_invariants(g):
    t = spqr_tree(g)
    _check(g, t)
    assert VIRTUAL != REAL
    for i in range(len(t.nodes)):
        if t.parent[i] is not None:
            assert i in t.children[t.parent[i]]
