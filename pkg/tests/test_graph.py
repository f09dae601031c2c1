import networkx as nx
import pytest
from hypothesis import given, settings

from kdistrict.errors import InvalidEdge, NotConnected, ParseError
from kdistrict.graph import (
    Connectivity,
    Graph,
    block_tree,
    connectivity_class,
    dump_graph,
    is_biconnected,
    is_connected_subset,
    load_graph,
    shortest_path,
)
from strategies import connected_graphs


def _nx(g):
    h = nx.Graph(list(g.edges))
    h.add_nodes_from(range(g.n))
    return h


def test_load_dump_round_trip():
    text = "4 4\n0 1\n0 3\n1 2\n2 3\n"
    g = load_graph(text)
    assert (g.n, g.m) == (4, 4)
    assert dump_graph(g) == text
    assert g.degree(0) == 2 and g.has_edge(3, 0)


@pytest.mark.parametrize("text", ["", "3\n", "3 2\n0 1\n", "2 1\n0 x\n", "a b\n", "2 1\n0 1 2\n"])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        load_graph(text)


@pytest.mark.parametrize("edges", [[(0, 0)], [(0, 5)], [(0, 1), (1, 0)]])
def test_invalid_edges(edges):
    with pytest.raises(InvalidEdge):
        Graph.from_edges(3, edges)


def test_connectivity_classes():
    assert connectivity_class(Graph.from_edges(3, [(0, 1)])) is Connectivity.DISCONNECTED
    assert connectivity_class(Graph.from_edges(3, [(0, 1), (1, 2)])) is Connectivity.CONNECTED_NOT_BICONNECTED
    assert connectivity_class(Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])) is Connectivity.BICONNECTED
    assert is_biconnected(Graph.from_edges(2, [(0, 1)]))
    with pytest.raises(NotConnected):
        block_tree(Graph.from_edges(3, [(0, 1)]))


def test_empty_set_is_not_connected():
    assert not is_connected_subset(Graph.from_edges(2, [(0, 1)]), [])


def test_shortest_path_prefers_small_ids():
    g = Graph.from_edges(4, [(0, 1), (0, 2), (1, 3), (2, 3)])
    assert shortest_path(g, [0], [3]) == [0, 1, 3]
    assert shortest_path(g, [0], [3], allowed={0, 2, 3}) == [0, 2, 3]
    assert shortest_path(g, [0], [3], allowed={0}) is None


@settings(max_examples=150, deadline=None)
@given(connected_graphs(min_n=2, max_n=10))
def test_block_tree_matches_networkx(g):
    h = _nx(g)
    t = block_tree(g)
    assert sorted(map(sorted, t.blocks)) == sorted(map(sorted, nx.biconnected_components(h)))
    assert t.cut_vertices == frozenset(nx.articulation_points(h))
    assert is_biconnected(g) == nx.is_biconnected(h)
    if len(t.blocks) > 1:
        assert len(t.leaf_blocks()) >= 2
        for b in t.leaf_blocks():
            assert len(t.cuts_of(b)) == 1


@settings(max_examples=100, deadline=None)
@given(connected_graphs(min_n=2, max_n=10))
def test_block_tree_of_induced_subgraph(g):
    verts = set(range(g.n - 1))
    if not is_connected_subset(g, verts) or len(verts) < 2:
        return
    t = block_tree(g, verts)
    h = _nx(g).subgraph(verts)
    assert sorted(map(sorted, t.blocks)) == sorted(map(sorted, nx.biconnected_components(h)))
