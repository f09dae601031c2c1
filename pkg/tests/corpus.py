"""Shared graph corpus for the exhaustive suites.

All connected graphs on 1..6 vertices up to isomorphism (networkx graph
atlas) plus a fixed sample of 50 connected 7-vertex graphs.
"""

from __future__ import annotations

import random
from functools import lru_cache

import networkx as nx

from kdistrict.graph import Graph
from kdistrict.oracle import build_switch_graph

SAMPLE_SEED = 20240607


def _to_graph(h) -> Graph:
    return Graph.from_edges(h.number_of_nodes(), list(h.edges()))


@lru_cache(maxsize=None)
def small_graphs(max_n: int = 6) -> tuple:
    out = []
    for h in nx.graph_atlas_g():
        n = h.number_of_nodes()
        if 1 <= n <= max_n and nx.is_connected(h):
            out.append(_to_graph(h))
    return tuple(out)


@lru_cache(maxsize=None)
def sampled_seven(count: int = 50) -> tuple:
    pool = [h for h in nx.graph_atlas_g() if h.number_of_nodes() == 7 and nx.is_connected(h)]
    rng = random.Random(SAMPLE_SEED)
    return tuple(_to_graph(h) for h in rng.sample(pool, count))


def corpus() -> tuple:
    return small_graphs() + sampled_seven()


@lru_cache(maxsize=None)
def switch_graph(g: Graph, k: int):
    return build_switch_graph(g, k)
