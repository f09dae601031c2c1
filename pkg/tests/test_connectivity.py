import pytest
from hypothesis import given, settings

from kdistrict.connectivity import (
    brute_force_M,
    compute_M,
    incontractible_map,
    switch_graph_connected,
)
from kdistrict.districts import is_contractible_map, validate_map
from kdistrict.errors import Biconnected, KOutOfRange, NotConnected
from kdistrict.graph import Graph, is_biconnected
from kdistrict.oracle import build_switch_graph
from strategies import connected_graphs


def test_star_threshold():
    star = Graph.from_edges(5, [(0, i) for i in range(1, 5)])
    assert compute_M(star).M == 3
    # k + 3 >= 7 needs k >= 4
    assert [switch_graph_connected(star, k).connected for k in range(1, 6)] == [True, False, False, True, True]
    v = switch_graph_connected(star, 2)
    assert v.message() == "disconnected: k+M = 5 < n+2 = 7"
    assert switch_graph_connected(star, 4).message() == "connected: k+M = 7 >= n+2 = 7"


def test_trivial_reasons():
    tri = Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
    assert switch_graph_connected(tri, 2).reason == "biconnected"
    assert switch_graph_connected(tri, 1).message() == "connected: k = 1"
    with pytest.raises(KOutOfRange):
        switch_graph_connected(tri, 4)
    with pytest.raises(NotConnected):
        switch_graph_connected(Graph.from_edges(3, [(0, 1)]), 2)
    with pytest.raises(Biconnected):
        compute_M(tri)


@settings(max_examples=200, deadline=None)
@given(connected_graphs(min_n=3, max_n=12))
def test_M_matches_pairwise_minimum(g):
    if is_biconnected(g):
        return
    r = compute_M(g)
    assert r.M == brute_force_M(g)
    assert 3 <= r.M <= g.n


@settings(max_examples=80, deadline=None)
@given(connected_graphs(min_n=2, max_n=7))
def test_verdict_matches_switch_graph(g):
    for k in range(1, g.n + 1):
        assert switch_graph_connected(g, k).connected == build_switch_graph(g, k).is_connected()


@settings(max_examples=100, deadline=None)
@given(connected_graphs(min_n=2, max_n=9))
def test_incontractible_witness(g):
    for k in range(1, g.n + 1):
        p = incontractible_map(g, k)
        if p is None:
            continue
        assert p.k == k and validate_map(g, p) == []
        assert not is_contractible_map(g, p)
