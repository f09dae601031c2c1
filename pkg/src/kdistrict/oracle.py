"""Brute-force ground truth for small graphs: every k-district map and the switch graph over them."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache

from .districts import DistrictMap, apply_switch, map_signature, valid_switches
from .errors import NotConnected, TooLarge, UnknownSignature
from .graph import Graph, is_connected, reachable

DEFAULT_CAP = 10
DEFAULT_NODE_BUDGET = 500_000


def _connected_sets_from(g: Graph, start: int, pool: frozenset):
    """Every connected vertex set inside `pool` that contains `start`, each once."""

    def rec(current, frontier, forbidden):
        yield current
        front = sorted(frontier)
        for i, x in enumerate(front):
            forb = forbidden | set(front[:i])
            grown = current | {x}
            nxt = set(front[i + 1:])
            nxt.update(y for y in g.adj[x] if y in pool and y not in grown and y not in forb)
            yield from rec(grown, nxt, forb)

    first = {y for y in g.adj[start] if y in pool}
    yield from rec(frozenset([start]), first, frozenset())


def _component_count(g: Graph, verts: frozenset) -> int:
    left = set(verts)
    count = 0
    while left:
        seen = reachable(g, next(iter(left)), verts)
        left -= seen
        count += 1
    return count


def enumerate_district_maps(g: Graph, k: int, cap: int = DEFAULT_CAP) -> list:
    if g.n > cap:
        raise TooLarge(f"n = {g.n} exceeds the oracle cap {cap}")
    if not is_connected(g):
        raise NotConnected("graph is not connected")
    if not 1 <= k <= g.n:
        return []
    out = []

    def rec(remaining: frozenset, parts: list, need: int):
        if need == 0:
            if not remaining:
                out.append(DistrictMap.from_districts(g.n, parts))
            return
        if len(remaining) < need or _component_count(g, remaining) > need:
            return
        start = min(remaining)
        if need == 1:
            if len(reachable(g, start, remaining)) == len(remaining):
                out.append(DistrictMap.from_districts(g.n, parts + [remaining]))
            return
        for s in _connected_sets_from(g, start, remaining):
            rest = remaining - s
            if len(rest) >= need - 1:
                rec(rest, parts + [s], need - 1)

    rec(frozenset(range(g.n)), [], k)
    out.sort(key=map_signature)
    return out


@dataclass(frozen=True)
class SwitchGraph:
    graph: Graph
    k: int
    nodes: tuple  # signatures
    index: dict
    adjacency: tuple  # per node, sorted neighbor ids
    component_id: tuple

    @property
    def edge_count(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    @property
    def component_count(self) -> int:
        return len(set(self.component_id))

    def is_connected(self) -> bool:
        return self.component_count <= 1

    def map_of(self, node: int) -> DistrictMap:
        return DistrictMap.from_districts(self.graph.n, self.nodes[node])

    def node_of(self, sig) -> int:
        try:
            return self.index[tuple(tuple(d) for d in sig)]
        except KeyError:
            raise UnknownSignature(f"no map with signature {sig}") from None


def build_switch_graph(g: Graph, k: int, cap: int = DEFAULT_CAP,
                       node_budget: int = DEFAULT_NODE_BUDGET) -> SwitchGraph:
    maps = enumerate_district_maps(g, k, cap)
    if len(maps) > node_budget:
        raise TooLarge(f"{len(maps)} maps exceed the node budget {node_budget}")
    nodes = tuple(map_signature(p) for p in maps)
    index = {s: i for i, s in enumerate(nodes)}
    adj = [set() for _ in nodes]
    for i, p in enumerate(maps):
        for s in valid_switches(g, p):
            j = index[map_signature(apply_switch(g, p, s))]
            adj[i].add(j)
            adj[j].add(i)
    comp = [-1] * len(nodes)
    cid = 0
    for i in range(len(nodes)):
        if comp[i] != -1:
            continue
        comp[i] = cid
        queue = deque([i])
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if comp[y] == -1:
                    comp[y] = cid
                    queue.append(y)
        cid += 1
    return SwitchGraph(g, k, nodes, index, tuple(tuple(sorted(a)) for a in adj), tuple(comp))


def _bfs(sg: SwitchGraph, src: int) -> dict:
    dist = {src: 0}
    queue = deque([src])
    while queue:
        x = queue.popleft()
        for y in sg.adjacency[x]:
            if y not in dist:
                dist[y] = dist[x] + 1
                queue.append(y)
    return dist


def oracle_distance(sg: SwitchGraph, a, b):
    """Switch distance between two signatures, or None when unreachable."""
    i, j = sg.node_of(a), sg.node_of(b)
    return _bfs(sg, i).get(j)


def oracle_diameter(sg: SwitchGraph, member) -> int:
    start = sg.node_of(member)
    comp = sg.component_id[start]
    return max(max(_bfs(sg, x).values()) for x in range(len(sg.nodes)) if sg.component_id[x] == comp)


def oracle_contractible(g: Graph, p: DistrictMap, index: int) -> bool:
    """Search over removal orders for one that shrinks the district to a single vertex."""

    @lru_cache(maxsize=None)
    def ok(d: frozenset) -> bool:
        if len(d) == 1:
            return True
        for v in sorted(d):
            rest = d - {v}
            if not any(x not in d for x in g.adj[v]):
                continue
            if len(reachable(g, min(rest), rest)) != len(rest):
                continue
            if ok(rest):
                return True
        return False

    return ok(frozenset(p.districts[index]))
