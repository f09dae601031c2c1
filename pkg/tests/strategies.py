"""Hypothesis strategies for small connected graphs and valid district maps."""

import random

from hypothesis import strategies as st

from kdistrict.districts import DistrictMap
from kdistrict.graph import Graph


@st.composite
def connected_graphs(draw, min_n=1, max_n=8, biconnected=False):
    n = draw(st.integers(min_n, max_n))
    rng = random.Random(draw(st.integers(0, 2**32 - 1)))
    edges = set()
    for v in range(1, n):
        u = rng.randrange(v)
        edges.add((u, v))
    extra = draw(st.integers(0, n))
    for _ in range(extra):
        u, v = rng.sample(range(n), 2) if n > 1 else (0, 0)
        if u != v:
            edges.add((min(u, v), max(u, v)))
    if biconnected and n >= 3:
        # closing a Hamiltonian cycle through the vertex order makes it 2-connected
        for v in range(n):
            a, b = v, (v + 1) % n
            edges.add((min(a, b), max(a, b)))
    return Graph.from_edges(n, edges)


def random_map(g: Graph, k: int, rng: random.Random) -> DistrictMap:
    """Grow k districts from random seeds until every vertex is claimed."""
    owner = [-1] * g.n
    seeds = rng.sample(range(g.n), k)
    for i, s in enumerate(seeds):
        owner[s] = i
    frontier = list(seeds)
    while -1 in owner:
        v = rng.choice(frontier)
        free = [x for x in g.adj[v] if owner[x] == -1]
        if not free:
            frontier.remove(v)
            continue
        x = rng.choice(free)
        owner[x] = owner[v]
        frontier.append(x)
    return DistrictMap.from_assignment(owner)


@st.composite
def graph_and_map(draw, min_n=1, max_n=8, biconnected=False):
    g = draw(connected_graphs(min_n, max_n, biconnected))
    k = draw(st.integers(1, g.n))
    rng = random.Random(draw(st.integers(0, 2**32 - 1)))
    return g, random_map(g, k, rng)
