"""Simple undirected graphs on vertices 0..n-1, plus block-tree decomposition."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable

from .errors import InvalidEdge, NotConnected, ParseError


@dataclass(frozen=True)
class Graph:
    n: int
    edges: frozenset
    adj: tuple = field(compare=False, repr=False)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable) -> "Graph":
        if n < 1:
            raise InvalidEdge(f"vertex count must be positive, got {n}")
        seen = set()
        nbrs = [[] for _ in range(n)]
        for u, v in edges:
            if u == v:
                raise InvalidEdge(f"self-loop at {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise InvalidEdge(f"id out of range in edge {u} {v}")
            e = (u, v) if u < v else (v, u)
            if e in seen:
                raise InvalidEdge(f"duplicate edge {e[0]} {e[1]}")
            seen.add(e)
            nbrs[u].append(v)
            nbrs[v].append(u)
        adj = tuple(tuple(sorted(x)) for x in nbrs)
        return cls(n, frozenset(seen), adj)

    @property
    def m(self) -> int:
        return len(self.edges)

    def sorted_edges(self) -> list:
        return sorted(self.edges)

    def has_edge(self, u: int, v: int) -> bool:
        return ((u, v) if u < v else (v, u)) in self.edges

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def leaves(self) -> list:
        return [v for v in range(self.n) if len(self.adj[v]) == 1]


def load_graph(text: str) -> Graph:
    rows = [ln.split() for ln in text.splitlines() if ln.strip()]
    if not rows:
        raise ParseError("empty graph file")
    try:
        header = [int(x) for x in rows[0]]
    except ValueError:
        raise ParseError(f"line 1: expected 'n m', got {' '.join(rows[0])!r}") from None
    if len(header) != 2:
        raise ParseError("line 1: expected 'n m'")
    n, m = header
    if len(rows) - 1 != m:
        raise ParseError(f"header announces {m} edges, found {len(rows) - 1}")
    edges = []
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != 2:
            raise ParseError(f"line {i}: expected 'u v'")
        try:
            u, v = int(row[0]), int(row[1])
        except ValueError:
            raise ParseError(f"line {i}: non-integer vertex id") from None
        edges.append((u, v))
    return Graph.from_edges(n, edges)


def dump_graph(g: Graph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines += [f"{u} {v}" for u, v in g.sorted_edges()]
    return "\n".join(lines) + "\n"


class Connectivity(str, Enum):
    DISCONNECTED = "Disconnected"
    CONNECTED_NOT_BICONNECTED = "ConnectedNotBiconnected"
    BICONNECTED = "Biconnected"


def reachable(g: Graph, start: int, allowed=None) -> set:
    """Vertices reachable from `start` using only vertices in `allowed` (all if None)."""
    seen = {start}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for y in g.adj[x]:
            if y not in seen and (allowed is None or y in allowed):
                seen.add(y)
                queue.append(y)
    return seen


def is_connected_subset(g: Graph, verts) -> bool:
    verts = set(verts)
    if not verts:
        return False
    return len(reachable(g, next(iter(verts)), verts)) == len(verts)


def is_connected(g: Graph) -> bool:
    return len(reachable(g, 0)) == g.n


def bfs_distances(g: Graph, sources, allowed=None) -> dict:
    dist = {s: 0 for s in sources}
    queue = deque(dist)
    while queue:
        x = queue.popleft()
        for y in g.adj[x]:
            if y not in dist and (allowed is None or y in allowed):
                dist[y] = dist[x] + 1
                queue.append(y)
    return dist


def shortest_path(g: Graph, sources, targets, allowed=None):
    """Shortest vertex path from any source to any target; None if unreachable.

    Ties resolve toward smaller ids because adjacency lists are sorted and
    sources are scanned in ascending order.
    """
    targets = set(targets)
    parent = {}
    queue = deque()
    for s in sorted(sources):
        if s not in parent:
            parent[s] = None
            queue.append(s)
    while queue:
        x = queue.popleft()
        if x in targets:
            path = [x]
            while parent[path[-1]] is not None:
                path.append(parent[path[-1]])
            return path[::-1]
        for y in g.adj[x]:
            if y not in parent and (allowed is None or y in allowed):
                parent[y] = x
                queue.append(y)
    return None


def _articulation_data(g: Graph, allowed=None):
    """Iterative Hopcroft-Tarjan: returns (edge-blocks as vertex sets, cut vertices).

    Restricted to the subgraph induced by `allowed` when given; the subgraph
    is assumed connected and is explored from its smallest vertex.
    """
    verts = sorted(range(g.n) if allowed is None else allowed)
    if allowed is not None:
        allowed = set(allowed)
    root = verts[0]
    disc = {root: 0}
    low = {root: 0}
    counter = 1
    blocks = []
    cuts = set()
    edge_stack = []
    stack = [(root, -1, iter(g.adj[root]))]
    root_children = 0
    while stack:
        v, parent, it = stack[-1]
        advanced = False
        for w in it:
            if allowed is not None and w not in allowed:
                continue
            if w not in disc:
                disc[w] = low[w] = counter
                counter += 1
                edge_stack.append((v, w))
                stack.append((w, v, iter(g.adj[w])))
                if v == root:
                    root_children += 1
                advanced = True
                break
            if w != parent and disc[w] < disc[v]:
                edge_stack.append((v, w))
                low[v] = min(low[v], disc[w])
        if advanced:
            continue
        stack.pop()
        if stack:
            u = stack[-1][0]
            low[u] = min(low[u], low[v])
            if low[v] >= disc[u]:
                if u != root:
                    cuts.add(u)
                comp = set()
                while True:
                    a, b = edge_stack.pop()
                    comp.add(a)
                    comp.add(b)
                    if (a, b) == (u, v):
                        break
                blocks.append(frozenset(comp))
    if root_children >= 2:
        cuts.add(root)
    if not blocks:
        blocks.append(frozenset([root]))
    return blocks, cuts


def connectivity_class(g: Graph) -> Connectivity:
    if not is_connected(g):
        return Connectivity.DISCONNECTED
    if g.n == 1:
        return Connectivity.CONNECTED_NOT_BICONNECTED
    blocks, _ = _articulation_data(g)
    if len(blocks) == 1:
        return Connectivity.BICONNECTED
    return Connectivity.CONNECTED_NOT_BICONNECTED


def is_biconnected(g: Graph) -> bool:
    return connectivity_class(g) is Connectivity.BICONNECTED


@dataclass(frozen=True)
class BlockTree:
    blocks: tuple
    cut_vertices: frozenset
    tree_edges: tuple
    root: int | None = None

    def blocks_of(self, v: int) -> list:
        return [i for i, b in enumerate(self.blocks) if v in b]

    def cuts_of(self, block: int) -> list:
        return sorted(v for v in self.blocks[block] if v in self.cut_vertices)

    def leaf_blocks(self) -> list:
        """Blocks with exactly one cut vertex; empty when there is a single block."""
        if len(self.blocks) < 2:
            return []
        return [i for i in range(len(self.blocks)) if len(self.cuts_of(i)) == 1]

    def private_vertices(self, block: int) -> list:
        return sorted(v for v in self.blocks[block] if v not in self.cut_vertices)


def block_tree(g: Graph, allowed=None) -> BlockTree:
    """Block tree of g, or of the connected subgraph induced by `allowed`."""
    if allowed is None:
        if not is_connected(g):
            raise NotConnected("graph is not connected")
    elif not is_connected_subset(g, allowed):
        raise NotConnected("induced subgraph is not connected")
    blocks, cuts = _articulation_data(g, allowed)
    blocks = sorted(blocks, key=lambda b: sorted(b))
    tree_edges = tuple(
        (i, c) for i, b in enumerate(blocks) for c in sorted(b) if c in cuts
    )
    return BlockTree(tuple(blocks), frozenset(cuts), tree_edges)
