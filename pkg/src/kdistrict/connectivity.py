"""Deciding whether the switch graph over k-district maps is connected.

The key quantity M is the fewest vertices a district needs in order to hold
two leaf blocks: the two blocks plus a shortest path joining them. A k-map can
have a district of up to n-k+1 vertices, so an incontractible map exists
exactly when M <= n-k+1.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .districts import DistrictMap
from .errors import Biconnected, KOutOfRange, NotConnected
from .graph import (
    BlockTree,
    Connectivity,
    Graph,
    bfs_distances,
    block_tree,
    connectivity_class,
    shortest_path,
)


@dataclass(frozen=True)
class MResult:
    M: int
    witness_pair: tuple  # two leaf-block indices into the block tree
    witness_edge: tuple  # edge of the chain-transformed graph
    levels: tuple
    clusters: tuple  # chain-end vertex id per vertex


def _require_leafy(g: Graph) -> BlockTree:
    cls = connectivity_class(g)
    if cls is Connectivity.DISCONNECTED:
        raise NotConnected("graph is not connected")
    t = block_tree(g)
    if len(t.leaf_blocks()) < 2:
        raise Biconnected("graph has fewer than two leaf blocks; M is undefined")
    return t


def chain_transform(g: Graph, t: BlockTree):
    """Replace every leaf block by a path of equal vertex count hanging off its cut vertex.

    Private vertices are reused as chain vertices in ascending order, so the
    transformed graph lives on the same ids. Returns (graph, {chain end: leaf block}).
    """
    inside = set()
    extra = []
    ends = {}
    for b in t.leaf_blocks():
        inside.add(b)
        (c,) = t.cuts_of(b)
        chain = [c] + t.private_vertices(b)
        extra.extend(zip(chain, chain[1:]))
        ends[chain[-1]] = b
    leafy = [t.blocks[b] for b in inside]
    kept = [(u, v) for u, v in g.sorted_edges() if not any(u in bl and v in bl for bl in leafy)]
    return Graph.from_edges(g.n, kept + extra), ends


def compute_M(g: Graph) -> MResult:
    t = _require_leafy(g)
    h, ends = chain_transform(g, t)
    level = [-1] * g.n
    cluster = [-1] * g.n
    frontier = sorted(ends)
    for x in frontier:
        level[x] = 0
        cluster[x] = x
    depth = 0
    while frontier:
        depth += 1
        offer = {}
        for x in frontier:
            for y in h.adj[x]:
                if level[y] == -1:
                    offer[y] = min(offer.get(y, cluster[x]), cluster[x])
        for y, c in offer.items():
            level[y] = depth
            cluster[y] = c
        frontier = sorted(offer)
    best = None
    for u, v in h.sorted_edges():
        if cluster[u] != cluster[v]:
            cand = (level[u] + level[v] + 2, (u, v))
            if best is None or cand < best:
                best = cand
    M, edge = best
    pair = tuple(sorted((ends[cluster[edge[0]]], ends[cluster[edge[1]]])))
    return MResult(M, pair, edge, tuple(level), tuple(cluster))


def leaf_pair_size(g: Graph, t: BlockTree, b1: int, b2: int) -> int:
    """Vertices in two leaf blocks together with a shortest path between them."""
    (c1,) = t.cuts_of(b1)
    (c2,) = t.cuts_of(b2)
    between = bfs_distances(g, [c1])[c2] - 1 if c1 != c2 else 0
    return len(t.blocks[b1] | t.blocks[b2]) + between


def brute_force_M(g: Graph) -> int:
    t = _require_leafy(g)
    return min(leaf_pair_size(g, t, a, b) for a, b in combinations(t.leaf_blocks(), 2))


@dataclass(frozen=True)
class Verdict:
    connected: bool
    reason: str
    k: int
    n: int
    m_result: MResult | None = None

    def message(self) -> str:
        word = "connected" if self.connected else "disconnected"
        if self.m_result is None:
            return f"{word}: {self.reason}"
        M = self.m_result.M
        rel = ">=" if self.connected else "<"
        return f"{word}: k+M = {self.k + M} {rel} n+2 = {self.n + 2}"


def switch_graph_connected(g: Graph, k: int) -> Verdict:
    if not 1 <= k <= g.n:
        raise KOutOfRange(f"k = {k} outside 1..{g.n}")
    cls = connectivity_class(g)
    if cls is Connectivity.DISCONNECTED:
        raise NotConnected("graph is not connected")
    if k == 1:
        return Verdict(True, "k = 1", k, g.n)
    if k == g.n:
        return Verdict(True, "k = n", k, g.n)
    if cls is Connectivity.BICONNECTED:
        return Verdict(True, "biconnected", k, g.n)
    mr = compute_M(g)
    return Verdict(k + mr.M >= g.n + 2, "threshold", k, g.n, mr)


def incontractible_map(g: Graph, k: int) -> DistrictMap | None:
    """A k-map with a district holding two leaf blocks, or None if none exists.

    Starts from the smallest such district (two nearest leaf blocks and a
    shortest path between them) and absorbs neighbours until k districts remain.
    """
    if k < 2:
        return None
    try:
        mr = compute_M(g)
    except Biconnected:
        return None
    if mr.M > g.n - k + 1:
        return None
    t = block_tree(g)
    b1, b2 = mr.witness_pair
    (c1,) = t.cuts_of(b1)
    (c2,) = t.cuts_of(b2)
    core = set(t.blocks[b1]) | set(t.blocks[b2]) | set(shortest_path(g, [c1], [c2]))
    while g.n - len(core) + 1 > k:
        x = min(y for v in sorted(core) for y in g.adj[v] if y not in core)
        core.add(x)
    rest = [[v] for v in range(g.n) if v not in core]
    return DistrictMap.from_districts(g.n, [sorted(core)] + rest)
