"""Constructive reconfiguration between k-district maps.

Biconnected graphs are driven to a canonical map that depends only on the
graph and k. General connected graphs go through a pseudo-canonical form
(every block all singletons, consolidated, or covered by a leaf district),
after which per-block district counts are aligned by pushing districts
across cut vertices.
"""

from __future__ import annotations

from dataclasses import dataclass

from .districts import (
    DistrictMap,
    SwitchPlan,
    _move,
    check_switch,
    map_signature,
    require_valid,
)
from .errors import (
    IncontractibleInput,
    MismatchedK,
    NotBiconnected,
    NotConnected,
    NotPseudoCanonical,
    PreconditionViolated,
)
from .graph import (
    Graph,
    block_tree,
    connectivity_class,
    Connectivity,
    is_connected_subset,
    shortest_path,
)
from .spqr import spqr_tree

LENGTH_CONSTANT = 4


class PlannerStuck(AssertionError):
    """A construction step found no legal move; indicates a bug, not bad input."""


class _Recorder:
    """Current map plus the switches applied so far, each checked before use."""

    def __init__(self, g: Graph, p: DistrictMap):
        self.g = g
        self.p = p
        self.start = map_signature(p)
        self.steps = []
        self.marks = []

    def switch(self, u: int, v: int, w: int) -> None:
        reason = check_switch(self.g, self.p, (u, v, w))
        if reason is not None:
            raise PlannerStuck(f"switch {(u, v, w)} rejected: {reason}")
        self.p = _move(self.p, v, self.p.assignment[w])
        self.steps.append((u, v, w))

    def move_out(self, v: int, x: int) -> None:
        """Move v into the district of its neighbour x."""
        d = self.p.assignment[v]
        u = min(y for y in self.g.adj[v] if self.p.assignment[y] == d and y != v)
        self.switch(u, v, x)

    def mark(self, label: str) -> None:
        self.marks.append((label, len(self.steps)))

    def plan(self) -> SwitchPlan:
        return SwitchPlan(tuple(self.steps), self.start, map_signature(self.p))


def _shrink(rec: _Recorder, idx: int, drop, rank=None, forbidden=frozenset(), stop=None) -> None:
    """Switch vertices of `drop` out of district idx one at a time.

    Each move keeps the district connected and sends the vertex into an
    adjacent district outside `forbidden`; among legal moves the smallest
    rank(v, x) wins, then the smallest (x, v). `stop(rec)` ends early.
    """
    g = rec.g
    drop = set(drop)
    while True:
        if stop is not None and stop(rec):
            return
        d = rec.p.districts[idx]
        todo = d & drop
        if not todo:
            return
        if len(d) == 1:
            raise PlannerStuck(f"cannot empty district {idx}")
        best = None
        for v in sorted(todo):
            outs = [x for x in g.adj[v] if x not in d and x not in forbidden]
            if not outs or not is_connected_subset(g, d - {v}):
                continue
            for x in outs:
                key = ((rank(v, x) if rank else 0), x, v)
                if best is None or key < best:
                    best = key
        if best is None:
            raise PlannerStuck(f"no legal move shrinks district {sorted(d)} by {sorted(todo)}")
        _, x, v = best
        rec.move_out(v, x)


def _contract_to(rec: _Recorder, idx: int, target: int, **kw) -> None:
    _shrink(rec, idx, rec.p.districts[idx] - {target}, **kw)


def _induced(g: Graph, verts) -> tuple:
    """Induced subgraph relabeled in increasing id order; returns (graph, ids)."""
    ids = sorted(verts)
    pos = {v: i for i, v in enumerate(ids)}
    edges = [(pos[u], pos[v]) for u, v in g.sorted_edges() if u in pos and v in pos]
    return Graph.from_edges(len(ids), edges), ids


# biconnected canonical form

def _cycle_order(node, a: int, b: int) -> list:
    """Vertices of a cycle skeleton from a to b, avoiding the edge ab."""
    nbrs = {}
    for e in node.edges:
        nbrs.setdefault(e.u, []).append(e.v)
        nbrs.setdefault(e.v, []).append(e.u)
    order = [a]
    prev, cur = b, a
    while cur != b:
        nxt = [y for y in nbrs[cur] if y != prev]
        prev, cur = cur, nxt[0]
        order.append(cur)
    return order


def _biconnected_peel(rec: _Recorder, verts) -> list:
    """Run the canonical peeling inside vertex set `verts`.

    Every district meeting `verts` must lie inside it and G[verts] must be
    biconnected. Districts are contracted one by one to chosen vertices,
    which are then frozen; returns the frozen vertices in order.
    """
    g = rec.g
    alive = set(verts)
    k = len({rec.p.assignment[v] for v in alive})
    frozen = []
    outside = frozenset(range(g.n)) - alive

    def settle(v):
        nonlocal k
        _contract_to(rec, rec.p.assignment[v], v, forbidden=outside | set(frozen))
        frozen.append(v)
        alive.discard(v)
        k -= 1

    while k > 1 and len(alive) > k:
        h, ids = _induced(g, alive)
        tree = spqr_tree(h)
        leaf = tree.leaf_order[0]
        node = tree.nodes[leaf]
        a, b = tree.attachment_edge(leaf)
        if node.type == "S":
            cycle = [ids[x] for x in _cycle_order(node, a, b)]
            for v in cycle[1:-1]:
                if k <= 1 or len(alive) <= k:
                    break
                settle(v)
        else:
            v = min(x for x in node.vertices if x not in (a, b))
            settle(ids[v])
    return frozen


def canonical_biconnected(g: Graph, p: DistrictMap) -> tuple:
    """Switches taking p to the canonical map of (g, k); returns (plan, map)."""
    if connectivity_class(g) is not Connectivity.BICONNECTED:
        raise NotBiconnected("canonical form needs a biconnected graph")
    require_valid(g, p)
    rec = _Recorder(g, p)
    _biconnected_peel(rec, range(g.n))
    return rec.plan(), rec.p


# rooted block tree

@dataclass(frozen=True)
class RootedBlocks:
    """Block tree rooted at a fixed leaf block, with children in id order.

    Children of a block are the blocks hanging below its child cut vertices;
    the first of them in this order is its leftmost child.
    """

    blocks: tuple
    root: int
    parent_cut: tuple  # per block, None for the root
    child_cuts: tuple  # per block, sorted
    below: dict  # cut vertex -> child blocks, sorted
    order: tuple  # blocks in DFS preorder
    depth: tuple

    def children(self, w: int) -> list:
        return [b for c in self.child_cuts[w] for b in self.below[c]]

    def leftmost_child(self, w: int):
        kids = self.children(w)
        return kids[0] if kids else None

    def parent_block(self, w: int):
        c = self.parent_cut[w]
        if c is None:
            return None
        return next(b for b in range(len(self.blocks)) if c in self.child_cuts[b])

    def is_leaf(self, w: int) -> bool:
        return w != self.root and not self.child_cuts[w]

    def leaves(self) -> list:
        return [w for w in self.order if self.is_leaf(w)]

    def subtree(self, w: int) -> list:
        out = [w]
        for b in self.children(w):
            out.extend(self.subtree(b))
        return out

    def private(self, w: int) -> frozenset:
        """Vertices of w other than its parent cut vertex."""
        c = self.parent_cut[w]
        return self.blocks[w] - {c} if c is not None else self.blocks[w]

    def ancestors(self, w: int) -> list:
        out = []
        b = self.parent_block(w)
        while b is not None:
            out.append(b)
            b = self.parent_block(b)
        return out

    def toward(self, w: int, target: int) -> int:
        """Child cut vertex of w on the way down to block `target`."""
        for c in self.child_cuts[w]:
            for b in self.below[c]:
                if target in self.subtree(b):
                    return c
        raise ValueError("target is not below w")


def rooted_blocks(g: Graph) -> RootedBlocks:
    """Root at the leaf block holding the smallest unshared vertex (ties: smallest cut)."""
    t = block_tree(g)
    blocks = t.blocks
    cuts = t.cut_vertices
    if len(blocks) == 1:
        return RootedBlocks(blocks, 0, (None,), ((),), {}, (0,), (0,))
    leaves = t.leaf_blocks()
    root = min(leaves, key=lambda b: (min(v for v in blocks[b] if v not in cuts), t.cuts_of(b)))
    parent_cut = [None] * len(blocks)
    child_cuts = [()] * len(blocks)
    below = {}
    depth = [0] * len(blocks)
    order = []
    key = lambda b: tuple(sorted(blocks[b]))
    stack = [root]
    seen = {root}
    while stack:
        w = stack.pop()
        order.append(w)
        mine = sorted(c for c in blocks[w] if c in cuts and c != parent_cut[w])
        child_cuts[w] = tuple(mine)
        kids = []
        for c in mine:
            bs = sorted((b for b in range(len(blocks)) if c in blocks[b] and b not in seen), key=key)
            below[c] = tuple(bs)
            for b in bs:
                seen.add(b)
                parent_cut[b] = c
                depth[b] = depth[w] + 1
            kids.extend(bs)
        stack.extend(reversed(kids))
    return RootedBlocks(blocks, root, tuple(parent_cut), tuple(child_cuts), below, tuple(order), tuple(depth))


# classification

@dataclass(frozen=True)
class BlockRecord:
    down: frozenset | None
    is_elbow: bool
    type_tag: str  # "i", "ii", "iii" or "none"
    d_count: int


@dataclass(frozen=True)
class BlockClassification:
    tree: RootedBlocks
    per_block: tuple
    leaf_districts: dict  # district index -> leaf block

    def pseudo_canonical(self) -> bool:
        return all(r.type_tag != "none" for r in self.per_block)

    def d_vector(self) -> tuple:
        return tuple(r.d_count for r in self.per_block)


def leaf_of_districts(rt: RootedBlocks, p: DistrictMap) -> dict:
    """District index -> the non-root leaf block it covers (all but the cut vertex)."""
    out = {}
    for w in rt.leaves():
        owners = {p.assignment[v] for v in rt.private(w)}
        if len(owners) == 1:
            (i,) = owners
            out.setdefault(i, w)
    return out


def _down(rt: RootedBlocks, p: DistrictMap, w: int) -> frozenset:
    c = rt.parent_cut[w]
    d = p.districts[p.assignment[c]]
    region = set().union(*(rt.blocks[b] for b in rt.subtree(w)))
    return frozenset(d & region)


def _is_elbow(rt: RootedBlocks, p: DistrictMap, w: int, leafd: dict) -> bool:
    c = rt.parent_cut[w]
    i = p.assignment[c]
    down = _down(rt, p, w)
    if down == {c} or i not in leafd:
        return False
    return not rt.private(leafd[i]) <= down


def _type_tags(rt: RootedBlocks, p: DistrictMap, leafd: dict) -> list:
    a = p.assignment
    single = [len(p.districts[a[v]]) == 1 and a[v] not in leafd for v in range(p.n)]
    n_blocks = len(rt.blocks)
    t1 = [all(single[v] for v in rt.blocks[w]) for w in range(n_blocks)]
    t3 = []
    for w in range(n_blocks):
        owners = {a[v] for v in rt.private(w)}
        ok = len(owners) == 1 and next(iter(owners)) in leafd
        if ok and not rt.is_leaf(w):
            lm = rt.leftmost_child(w)
            ok = lm is not None and rt.blocks[lm] <= p.districts[next(iter(owners))]
        t3.append(ok)
    tags = []
    for w in range(n_blocks):
        if t1[w]:
            tags.append("i")
        elif t3[w]:
            tags.append("iii")
        elif (all(a[v] not in leafd and p.districts[a[v]] <= rt.blocks[w] for v in rt.blocks[w])
              and all(t1[b] for b in rt.ancestors(w))
              and all(t3[b] for b in rt.subtree(w)[1:])):
            tags.append("ii")
        else:
            tags.append("none")
    return tags


def _d_counts(rt: RootedBlocks, p: DistrictMap, leafd: dict) -> list:
    counts = [0] * len(rt.blocks)
    for i, d in enumerate(p.districts):
        if i in leafd:
            counts[leafd[i]] += 1
            continue
        homes = [w for w in range(len(rt.blocks)) if d <= rt.blocks[w]]
        if homes:
            counts[min(homes, key=lambda w: (rt.depth[w], rt.order.index(w)))] += 1
    return counts


def classify_blocks(g: Graph, p: DistrictMap, rt: RootedBlocks | None = None) -> BlockClassification:
    if rt is None:
        rt = rooted_blocks(g)
    leafd = leaf_of_districts(rt, p)
    if len(rt.blocks) == 1:
        rec = BlockRecord(None, False, "ii" if p.k < g.n else "i", p.k)
        return BlockClassification(rt, (rec,), leafd)
    tags = _type_tags(rt, p, leafd)
    counts = _d_counts(rt, p, leafd)
    recs = []
    for w in range(len(rt.blocks)):
        if w == rt.root:
            recs.append(BlockRecord(None, False, tags[w], counts[w]))
        else:
            recs.append(BlockRecord(_down(rt, p, w), _is_elbow(rt, p, w, leafd), tags[w], counts[w]))
    return BlockClassification(rt, tuple(recs), leafd)


def is_pseudo_canonical(g: Graph, p: DistrictMap, rt: RootedBlocks | None = None) -> bool:
    """True when every block is all singletons, consolidated, or leaf-covered.

    Every map of a biconnected graph counts as pseudo-canonical.
    """
    if rt is None:
        rt = rooted_blocks(g)
    if len(rt.blocks) == 1:
        return True
    return classify_blocks(g, p, rt).pseudo_canonical()


# moving one district across a cut vertex

def _push(rec: _Recorder, w1_verts: frozenset, path: list, w2_verts: frozenset, forbidden=frozenset()) -> None:
    """Create a district in w1 and absorb one in w2 by sliding along `path`.

    `path` runs from a vertex of w1 to a vertex of w2 and must consist of
    singleton districts; some vertex of w1 must sit in a district of size > 1.
    """
    g, a = rec.g, rec.p.assignment
    for v in path:
        if len(rec.p.districts[a[v]]) != 1:
            raise PreconditionViolated(f"path vertex {v} is not a singleton district")
    c1 = path[0]
    big = [v for v in sorted(w1_verts) if len(rec.p.districts[a[v]]) > 1]
    if not big:
        raise PreconditionViolated("no district of size > 1 in the source block")
    q = shortest_path(g, big, [c1], w1_verts)
    # prefer peeling q1 itself into q2; otherwise shrink its district toward q1
    q1, q2 = q[0], q[1]
    v0 = a[q1]
    if is_connected_subset(g, rec.p.districts[v0] - {q1}):
        rec.move_out(q1, q2)
        lead = q
    else:
        singles = q[1:]
        before = {v: a[v] for v in singles}

        def grown(r):
            return len(r.p.districts[v0]) == 2 or any(len(r.p.districts[before[v]]) > 1 for v in singles)

        def rank(v, x):
            return 0 if x in before else 1

        _shrink(rec, v0, rec.p.districts[v0] - {q1}, rank=rank, stop=grown, forbidden=forbidden)
        hit = [i for i, v in enumerate(singles) if len(rec.p.districts[before[v]]) > 1]
        if hit:
            qi = singles[hit[-1]]
            (q0,) = rec.p.districts[before[qi]] - {qi}
            lead = [q0] + singles[hit[-1]:]
        else:
            (q0,) = rec.p.districts[v0] - {q1}
            lead = [q0] + q
    _slide(rec, lead + list(path[1:]), w2_verts)


def _slide(rec: _Recorder, chain: list, w2_verts: frozenset) -> None:
    """Caterpillar along `chain`, whose first two vertices share a district.

    Every later vertex is a singleton; the last one finally joins a district
    of w2, so the number of districts drops there and rises at the front.
    """
    g = rec.g
    for i in range(1, len(chain) - 1):
        rec.switch(chain[i - 1], chain[i], chain[i + 1])
    last = chain[-1]
    a = rec.p.assignment
    xs = [x for x in g.adj[last] if x in w2_verts and a[x] != a[chain[-2]]]
    if not xs:
        raise PlannerStuck("target block offers no district to absorb the path end")
    rec.switch(chain[-2], last, min(xs))


def push_district(g: Graph, p: DistrictMap, w1, path, w2) -> SwitchPlan:
    """Plan that raises the district count in block w1 by one and lowers it in w2.

    w1 and w2 are vertex sets of blocks; `path` starts in w1, ends in w2 and
    consists of singleton districts.
    """
    require_valid(g, p)
    w1, w2, path = frozenset(w1), frozenset(w2), list(path)
    if not path or path[0] not in w1 or path[-1] not in w2:
        raise PreconditionViolated("path must start in w1 and end in w2")
    if any(not g.has_edge(x, y) for x, y in zip(path, path[1:])):
        raise PreconditionViolated("path is not a walk in the graph")
    rec = _Recorder(g, p)
    _push(rec, w1, path, w2)
    return rec.plan()


# pseudo-canonical form

def _region(rt: RootedBlocks, w: int) -> frozenset:
    return frozenset().union(*(rt.blocks[b] for b in rt.subtree(w)))


def _remove_elbows(rec: _Recorder, rt: RootedBlocks) -> None:
    for w in rt.order:
        if w == rt.root:
            continue
        if _is_elbow(rt, rec.p, w, leaf_of_districts(rt, rec.p)):
            c = rt.parent_cut[w]
            _shrink(rec, rec.p.assignment[c], _down(rt, rec.p, w) - {c})


def _confine_leaf_districts(rec: _Recorder, rt: RootedBlocks) -> None:
    """Shrink every leaf district to its leaf block minus the cut vertex."""
    budget = 4 * rec.g.n * max(1, rec.p.k)
    while True:
        leafd = leaf_of_districts(rt, rec.p)
        loose = sorted((rt.order.index(w), i) for i, w in leafd.items()
                       if not rec.p.districts[i] <= rt.private(w))
        if not loose:
            return
        budget -= 1
        if budget < 0:
            raise PlannerStuck("leaf districts keep spreading")
        _, i = loose[0]
        home = rt.private(leafd[i])

        def rank(v, x, leafd=leafd):
            j = rec.p.assignment[x]
            if j not in leafd:
                return 0
            return 2 if rec.p.districts[j] <= rt.private(leafd[j]) else 1

        _shrink(rec, i, rec.p.districts[i] - home, rank=rank)


def _tag(rt: RootedBlocks, p: DistrictMap, w: int) -> str:
    return _type_tags(rt, p, leaf_of_districts(rt, p))[w]


def _leftmost_leaf(rt: RootedBlocks, w: int) -> int:
    while not rt.is_leaf(w):
        w = rt.leftmost_child(w)
    return w


def _home_blocks(rt: RootedBlocks, n: int) -> list:
    """Per vertex, the deepest block containing it."""
    home = [None] * n
    for w in rt.order:
        for v in rt.private(w):
            home[v] = w
    return home


def _consolidate(rec: _Recorder, rt: RootedBlocks) -> None:
    g = rec.g
    home = _home_blocks(rt, g.n)
    # a leaf district may only grow along its leftmost chain
    chain_leaf = {w: _leftmost_leaf(rt, w) for w in range(len(rt.blocks)) if w != rt.root}
    for w in rt.order:
        guard = 4 * g.n * max(1, rec.p.k)
        while True:
            tags = _type_tags(rt, rec.p, leaf_of_districts(rt, rec.p))
            if tags[w] in ("i", "iii"):
                break
            bad = [b for b in rt.children(w) if tags[b] != "iii"]
            if not bad:
                break
            outside = frozenset(range(g.n)) - _region(rt, w)
            guard -= 1
            if guard < 0:
                raise PlannerStuck(f"block {sorted(rt.blocks[w])} does not settle")
            w2 = bad[0]
            c2 = rt.parent_cut[w2]
            idx = rec.p.assignment[c2]
            hanging = frozenset().union(*(_region(rt, b) for b in rt.below[c2]))

            def rank(v, x):
                leafd = leaf_of_districts(rt, rec.p)
                j = rec.p.assignment[x]
                if j not in leafd:
                    return 0
                return 1 if leafd[j] == chain_leaf.get(home[v]) else 2

            _shrink(rec, idx, (rec.p.districts[idx] & hanging) - {c2}, rank=rank)
            if _tag(rt, rec.p, w2) == "iii":
                continue
            d = rec.p.districts[rec.p.assignment[c2]]
            if len(d) == 1:
                if any(len(rec.p.districts[rec.p.assignment[v]]) > 1 for v in rt.blocks[w]):
                    _push(rec, rt.blocks[w], [c2], rt.blocks[w2], forbidden=outside)
                continue
            # c2 still carries part of w: hand it to the block below, or free it
            xs = [x for x in g.adj[c2] if x in rt.blocks[w2] and x not in d]
            if xs and is_connected_subset(g, d - {c2}):
                rec.move_out(c2, min(xs))
                continue
            # may borrow the parent cut vertex; it is restored after the loop
            _contract_to(rec, rec.p.assignment[c2], c2, forbidden=outside)
        if w != rt.root and _tag(rt, rec.p, w) not in ("i", "iii"):
            c = rt.parent_cut[w]
            _contract_to(rec, rec.p.assignment[c], c, forbidden=frozenset(range(g.n)) - _region(rt, w))


def _require_contractible(g: Graph, p: DistrictMap) -> None:
    from .districts import is_contractible_map
    if not is_contractible_map(g, p):
        raise IncontractibleInput("map has a district holding two leaf blocks")


def _pseudo_canonical(rec: _Recorder, rt: RootedBlocks) -> None:
    if len(rt.blocks) == 1:
        return
    rec.mark("elbow")
    _remove_elbows(rec, rt)
    rec.mark("leaf")
    _confine_leaf_districts(rec, rt)
    rec.mark("consolidate")
    _consolidate(rec, rt)


def pseudo_canonical(g: Graph, p: DistrictMap) -> tuple:
    """Switches taking a contractible map to pseudo-canonical form; returns (plan, map)."""
    if connectivity_class(g) is Connectivity.DISCONNECTED:
        raise NotConnected("graph is not connected")
    require_valid(g, p)
    _require_contractible(g, p)
    rec = _Recorder(g, p)
    _pseudo_canonical(rec, rooted_blocks(g))
    return rec.plan(), rec.p


# aligning two pseudo-canonical maps

def _potential(d1: tuple, d2: tuple) -> int:
    return sum(abs(x - y) for x, y in zip(d1, d2))


def _block_key(rt: RootedBlocks, w: int) -> tuple:
    return (rt.depth[w], rt.order.index(w))


def _move_one_district(rec: _Recorder, rt: RootedBlocks, w1: int, w2: int) -> None:
    """Raise the district count of block w1 by one and lower that of w2.

    Both blocks must be non-root, neither above the other, with all blocks
    on the tree path between them made of singletons.
    """
    g = rec.g
    everything = frozenset(range(g.n))
    b1, b2 = rt.blocks[w1], rt.blocks[w2]
    c1, c2 = rt.parent_cut[w1], rt.parent_cut[w2]
    path = shortest_path(g, [c1], [c2])
    a = rec.p.assignment
    mine = rt.private(w1)
    owners = {a[v] for v in mine}
    if not rt.is_leaf(w1) and len(owners) == 1:
        # w1 is covered by a leaf chain: hand its share of w1 to c1, then
        # let c1 lead the slide so that the rest of w1 becomes one district
        (idx,) = owners
        _shrink(rec, idx, mine, forbidden=everything - b1)
        x = min(y for y in g.adj[c1] if y in mine)
        _slide(rec, [x] + path, b2)
    else:
        _push(rec, b1, path, b2, forbidden=everything - b1)
    # c2 joined a district of w2; dissolve that district around c2
    a = rec.p.assignment
    idx = a[c2]
    others = {a[v] for v in b2} - {idx}
    if others:
        _contract_to(rec, idx, c2, forbidden=everything - b2)
    else:
        lm = rt.leftmost_child(w2)
        chain = rec.p.districts[a[min(rt.private(lm))]]
        _contract_to(rec, idx, c2, forbidden=everything - b2 - chain)


def _align_counts(rec: _Recorder, rt: RootedBlocks, target: tuple) -> int:
    """Push districts between blocks until the count vector equals `target`."""
    rounds = 0
    while True:
        cls = classify_blocks(rec.g, rec.p, rt)
        if not cls.pseudo_canonical():
            raise PlannerStuck("alignment left pseudo-canonical form")
        have = cls.d_vector()
        if have == target:
            return rounds
        short = [w for w in range(len(have)) if have[w] < target[w]]
        spare = [w for w in range(len(have)) if have[w] > target[w]]
        w1 = min(short, key=lambda w: _block_key(rt, w))
        w2 = max(spare, key=lambda w: _block_key(rt, w))
        _move_one_district(rec, rt, w1, w2)
        after = classify_blocks(rec.g, rec.p, rt).d_vector()
        if _potential(after, target) >= _potential(have, target):
            raise PlannerStuck(f"count potential did not drop at round {rounds}")
        rounds += 1


def _settle_consolidated(rec: _Recorder, rt: RootedBlocks, tags: list) -> None:
    """Canonical peel inside every consolidated block, parent cut kept single."""
    everything = frozenset(range(rec.g.n))
    for w in rt.order:
        if tags[w] != "ii":
            continue
        _biconnected_peel(rec, rt.blocks[w])
        c = rt.parent_cut[w]
        if c is not None and len(rec.p.districts[rec.p.assignment[c]]) > 1:
            _contract_to(rec, rec.p.assignment[c], c, forbidden=everything - rt.blocks[w])


def _check_pair(g: Graph, p1: DistrictMap, p2: DistrictMap) -> None:
    if p1.k != p2.k:
        raise MismatchedK(f"maps have {p1.k} and {p2.k} districts")
    if connectivity_class(g) is Connectivity.DISCONNECTED:
        raise NotConnected("graph is not connected")
    require_valid(g, p1)
    require_valid(g, p2)


def _align(g: Graph, rt: RootedBlocks, p1: DistrictMap, p2: DistrictMap) -> tuple:
    """Switch plan p1 -> p2 for pseudo-canonical maps, plus the push round count."""
    fwd, back = _Recorder(g, p1), _Recorder(g, p2)
    rounds = 0
    if len(rt.blocks) == 1:
        _biconnected_peel(fwd, range(g.n))
        _biconnected_peel(back, range(g.n))
    else:
        rounds = _align_counts(fwd, rt, classify_blocks(g, p2, rt).d_vector())
        tags = [r.type_tag for r in classify_blocks(g, fwd.p, rt).per_block]
        _settle_consolidated(fwd, rt, tags)
        _settle_consolidated(back, rt, tags)
    if map_signature(fwd.p) != map_signature(back.p):
        raise PlannerStuck("aligned maps differ after settling consolidated blocks")
    return fwd.plan().then(back.plan().reversed()), rounds


def align_pseudo_canonical(g: Graph, p1: DistrictMap, p2: DistrictMap) -> SwitchPlan:
    """Switches between two pseudo-canonical maps with the same k."""
    _check_pair(g, p1, p2)
    rt = rooted_blocks(g)
    for p in (p1, p2):
        if not is_pseudo_canonical(g, p, rt):
            raise NotPseudoCanonical(f"map {map_signature(p)} is not pseudo-canonical")
    return _align(g, rt, p1, p2)[0]


# end-to-end planning

@dataclass(frozen=True)
class Unreachable:
    """Exactly one of the two maps is contractible, so no switch sequence exists."""

    reason: str


@dataclass(frozen=True)
class UnsupportedPair:
    """Both maps are incontractible; reachability is not decided here."""

    reason: str


@dataclass(frozen=True)
class PlanReport:
    """Sidecar data for an emitted plan."""

    length: int
    bound: int
    phases: tuple  # (label, first step index) pairs
    push_rounds: int = 0


def length_bound(g: Graph, k: int) -> int:
    return LENGTH_CONSTANT * k * g.n


def plan_path_report(g: Graph, p1: DistrictMap, p2: DistrictMap) -> tuple:
    """Like plan_path, also returning a PlanReport (None for non-plans)."""
    from .districts import is_contractible_map
    _check_pair(g, p1, p2)
    if p1.k == 1:
        plan = SwitchPlan((), map_signature(p1), map_signature(p2))
        return plan, PlanReport(0, length_bound(g, 1), ())
    ok1, ok2 = is_contractible_map(g, p1), is_contractible_map(g, p2)
    if ok1 != ok2:
        which = "first" if ok1 else "second"
        return Unreachable(f"only the {which} map is contractible"), None
    if not ok1:
        return UnsupportedPair("both maps are incontractible"), None
    rt = rooted_blocks(g)
    r1, r2 = _Recorder(g, p1), _Recorder(g, p2)
    _pseudo_canonical(r1, rt)
    _pseudo_canonical(r2, rt)
    mid, rounds = _align(g, rt, r1.p, r2.p)
    head, tail = r1.plan(), r2.plan().reversed()
    plan = head.then(mid).then(tail)
    phases = [(label, i) for label, i in r1.marks]
    phases.append(("align", len(head)))
    phases.append(("unwind", len(head) + len(mid)))
    return plan, PlanReport(len(plan), length_bound(g, p1.k), tuple(phases), rounds)


def plan_path(g: Graph, p1: DistrictMap, p2: DistrictMap):
    """Switch plan from p1 to p2, or Unreachable / UnsupportedPair."""
    return plan_path_report(g, p1, p2)[0]
