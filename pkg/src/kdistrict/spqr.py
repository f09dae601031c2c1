"""SPQR trees of biconnected graphs by recursive splitting along 2-cuts.

Splitting stops at bonds, cycles, and 3-connected simple pieces; afterwards
adjacent bonds and adjacent cycles are merged, which yields the unique
triconnected-component decomposition. Cost is roughly O(n^2 m) per piece,
fine for the sizes this package targets.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

from .errors import NotBiconnected
from .graph import Graph, is_biconnected

REAL = "real"
VIRTUAL = "virtual"


@dataclass(frozen=True)
class SkeletonEdge:
    u: int
    v: int
    kind: str
    partner: int | None = None  # node on the other side of a virtual edge


@dataclass(frozen=True)
class SpqrNode:
    type: str  # "S", "P" or "R"
    vertices: frozenset
    edges: tuple

    def virtual_edges(self) -> list:
        return [e for e in self.edges if e.kind == VIRTUAL]

    def key(self) -> tuple:
        return tuple(sorted(self.vertices))


@dataclass(frozen=True)
class SpqrTree:
    nodes: tuple
    tree_adjacency: tuple  # (i, j, (a, b)) with i < j
    root: int
    parent: tuple
    children: tuple
    leaf_order: tuple

    def neighbors(self, i: int) -> list:
        out = [j for a, b, _ in self.tree_adjacency for j in ((b,) if a == i else (a,) if b == i else ())]
        return sorted(out)

    def attachment_edge(self, i: int) -> tuple:
        """The virtual edge joining node i to its parent, or the pseudo-virtual
        edge (lexicographically smallest skeleton edge) for a single-node tree."""
        p = self.parent[i]
        if p is None:
            if len(self.nodes) == 1:
                return min((min(e.u, e.v), max(e.u, e.v)) for e in self.nodes[i].edges)
            raise ValueError("root of a multi-node tree has no attachment edge")
        for e in self.nodes[i].edges:
            if e.kind == VIRTUAL and e.partner == p:
                return (min(e.u, e.v), max(e.u, e.v))
        raise AssertionError("parent link without a virtual edge")


class _Builder:
    def __init__(self, g: Graph):
        self.ends = {}
        self.twin = {}
        for eid, (u, v) in enumerate(g.sorted_edges()):
            self.ends[eid] = (u, v)
        self.next_eid = len(self.ends)

    def new_virtual_pair(self, a: int, b: int):
        e1, e2 = self.next_eid, self.next_eid + 1
        self.next_eid += 2
        self.ends[e1] = self.ends[e2] = (min(a, b), max(a, b))
        self.twin[e1], self.twin[e2] = e2, e1
        return e1, e2

    def classify_or_split(self, comp: list):
        verts = set()
        by_pair = defaultdict(list)
        for e in comp:
            a, b = self.ends[e]
            verts.update((a, b))
            by_pair[(a, b)].append(e)
        if len(verts) == 2:
            return "P", None
        for pair in sorted(by_pair):
            group = by_pair[pair]
            if len(group) >= 2:
                e1, e2 = self.new_virtual_pair(*pair)
                rest = [e for e in comp if e not in group]
                return None, [group + [e1], rest + [e2]]
        nbrs = defaultdict(set)
        for a, b in by_pair:
            nbrs[a].add(b)
            nbrs[b].add(a)
        if all(len(nbrs[x]) == 2 for x in verts):
            return "S", None
        order = sorted(verts)
        for i, a in enumerate(order):
            for b in order[i + 1:]:
                rest = [x for x in order if x != a and x != b]
                start = rest[0]
                seen = {start}
                stack = [start]
                while stack:
                    x = stack.pop()
                    for y in nbrs[x]:
                        if y != a and y != b and y not in seen:
                            seen.add(y)
                            stack.append(y)
                if len(seen) < len(rest):
                    side = [e for e in comp if self.ends[e][0] in seen or self.ends[e][1] in seen]
                    other = [e for e in comp if e not in set(side)]
                    e1, e2 = self.new_virtual_pair(a, b)
                    return None, [side + [e1], other + [e2]]
        return "R", None


def spqr_tree(g: Graph) -> SpqrTree:
    if g.n < 3 or not is_biconnected(g):
        raise NotBiconnected("SPQR tree needs a biconnected graph with at least 3 vertices")
    bld = _Builder(g)
    work = [list(range(g.m))]
    done = []
    while work:
        comp = work.pop()
        kind, parts = bld.classify_or_split(comp)
        if kind is None:
            work.extend(parts)
        else:
            done.append([kind, set(comp)])

    # merge adjacent bonds and adjacent cycles
    changed = True
    while changed:
        changed = False
        where = {}
        for idx, (_, edges) in enumerate(done):
            for e in edges:
                where[e] = idx
        for e1, e2 in sorted(bld.twin.items()):
            if e1 not in where or e2 not in where:
                continue
            i, j = where[e1], where[e2]
            if i != j and done[i][0] == done[j][0] and done[i][0] in ("S", "P"):
                merged = (done[i][1] | done[j][1]) - {e1, e2}
                done[i][1] = merged
                del done[j]
                changed = True
                break

    def vkey(item):
        kind, edges = item
        vs = sorted({x for e in edges for x in bld.ends[e]})
        return (vs, kind, sorted(bld.ends[e] for e in edges))

    done.sort(key=vkey)
    where = {e: idx for idx, (_, edges) in enumerate(done) for e in edges}
    nodes = []
    adjacency = set()
    for idx, (kind, edges) in enumerate(done):
        skel = []
        for e in sorted(edges, key=lambda e: (bld.ends[e], e)):
            u, v = bld.ends[e]
            if e in bld.twin:
                other = where[bld.twin[e]]
                skel.append(SkeletonEdge(u, v, VIRTUAL, other))
                adjacency.add((min(idx, other), max(idx, other), (u, v)))
            else:
                skel.append(SkeletonEdge(u, v, REAL))
        verts = frozenset(x for e in skel for x in (e.u, e.v))
        nodes.append(SpqrNode(kind, verts, tuple(skel)))

    nbrs = defaultdict(list)
    for a, b, _ in adjacency:
        nbrs[a].append(b)
        nbrs[b].append(a)
    root = min(range(len(nodes)), key=lambda i: (nodes[i].key(), i))
    parent = [None] * len(nodes)
    children = [[] for _ in nodes]
    leaf_order = []
    stack = [root]
    visited = {root}
    while stack:
        x = stack.pop()
        kids = sorted((y for y in nbrs[x] if y not in visited), key=lambda i: (nodes[i].key(), i))
        for y in kids:
            visited.add(y)
            parent[y] = x
        children[x] = kids
        if not kids and (x != root or len(nodes) == 1):
            leaf_order.append(x)
        stack.extend(reversed(kids))
    return SpqrTree(
        tuple(nodes),
        tuple(sorted(adjacency)),
        root,
        tuple(parent),
        tuple(tuple(c) for c in children),
        tuple(leaf_order),
    )
