"""k-district maps, single-vertex switches, and district contraction."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import (
    IncontractibleDistrict,
    InvalidMap,
    InvalidSwitch,
    InvalidTarget,
    ParseError,
)
from .graph import BlockTree, Graph, block_tree, is_connected_subset


@dataclass(frozen=True)
class DistrictMap:
    """A labeled family of vertex sets; labels are positions in `districts`.

    Construction does not enforce the partition property so that
    `validate_map` can report what is wrong with a malformed input.
    """

    n: int
    districts: tuple
    assignment: tuple = field(compare=False, repr=False)

    @classmethod
    def from_districts(cls, n: int, districts: Iterable[Iterable[int]]) -> "DistrictMap":
        ds = tuple(frozenset(d) for d in districts)
        owner = [-1] * n
        for i, d in enumerate(ds):
            for v in d:
                if 0 <= v < n and owner[v] == -1:
                    owner[v] = i
        return cls(n, ds, tuple(owner))

    @classmethod
    def from_assignment(cls, assignment: Sequence[int]) -> "DistrictMap":
        k = max(assignment) + 1
        ds = [set() for _ in range(k)]
        for v, i in enumerate(assignment):
            ds[i].add(v)
        return cls(len(assignment), tuple(frozenset(d) for d in ds), tuple(assignment))

    @property
    def k(self) -> int:
        return len(self.districts)

    def district_of(self, v: int) -> int:
        return self.assignment[v]

    def signature(self) -> tuple:
        return map_signature(self)

    def relabeled(self) -> "DistrictMap":
        """Same partition with districts ordered by smallest element."""
        return DistrictMap.from_districts(self.n, map_signature(self))


def map_signature(p: DistrictMap) -> tuple:
    return tuple(sorted(tuple(sorted(d)) for d in p.districts))


Switch = tuple  # (u, v, w)


@dataclass(frozen=True)
class SwitchPlan:
    steps: tuple
    start_signature: tuple
    end_signature: tuple

    def __len__(self) -> int:
        return len(self.steps)

    def reversed(self) -> "SwitchPlan":
        return SwitchPlan(
            tuple((w, v, u) for u, v, w in reversed(self.steps)),
            self.end_signature,
            self.start_signature,
        )

    def then(self, other: "SwitchPlan") -> "SwitchPlan":
        if other.start_signature != self.end_signature:
            raise ValueError("plans do not chain")
        return SwitchPlan(self.steps + other.steps, self.start_signature, other.end_signature)


def validate_map(g: Graph, p: DistrictMap) -> list:
    """Violations as (kind, detail) pairs; an empty list means the map is valid."""
    problems = []
    if p.n != g.n:
        problems.append(("NotAPartition", f"map covers {p.n} vertices, graph has {g.n}"))
        return problems
    for i, d in enumerate(p.districts):
        if not d:
            problems.append(("EmptyDistrict", i))
    counts = [0] * g.n
    for d in p.districts:
        for v in d:
            if not 0 <= v < g.n:
                problems.append(("NotAPartition", f"unknown vertex {v}"))
                return problems
            counts[v] += 1
    if any(c != 1 for c in counts):
        bad = [v for v, c in enumerate(counts) if c != 1]
        problems.append(("NotAPartition", f"vertices covered other than once: {bad}"))
        return problems
    for i, d in enumerate(p.districts):
        if d and not is_connected_subset(g, d):
            problems.append(("DisconnectedDistrict", i))
    return problems


def require_valid(g: Graph, p: DistrictMap) -> None:
    problems = validate_map(g, p)
    if problems:
        raise InvalidMap("; ".join(f"{k}({d})" for k, d in problems))


def _movable(g: Graph, p: DistrictMap, v: int) -> bool:
    d = p.districts[p.assignment[v]]
    return len(d) >= 2 and is_connected_subset(g, d - {v})


def valid_switches(g: Graph, p: DistrictMap) -> list:
    out = []
    for v in range(g.n):
        if not _movable(g, p, v):
            continue
        dv = p.assignment[v]
        inside = [u for u in g.adj[v] if p.assignment[u] == dv]
        for w in g.adj[v]:
            if p.assignment[w] != dv:
                out.extend((u, v, w) for u in inside)
    out.sort(key=lambda s: (s[1], s[2], s[0]))
    return out


def check_switch(g: Graph, p: DistrictMap, s: Switch) -> str | None:
    """Reason the switch is invalid, or None when it may be applied."""
    u, v, w = s
    if not (0 <= min(s) and max(s) < g.n) or not g.has_edge(u, v) or not g.has_edge(v, w):
        return "NotAPath"
    a = p.assignment
    if a[v] == a[w]:
        return "SameDistrict"
    if a[u] != a[v]:
        return "SourceNotShared"
    if not is_connected_subset(g, p.districts[a[v]] - {v}):
        return "DisconnectsSource"
    return None


def apply_switch(g: Graph, p: DistrictMap, s: Switch) -> DistrictMap:
    reason = check_switch(g, p, s)
    if reason is not None:
        raise InvalidSwitch(reason, tuple(s))
    return _move(p, s[1], p.assignment[s[2]])


def _move(p: DistrictMap, v: int, target: int) -> DistrictMap:
    src = p.assignment[v]
    ds = list(p.districts)
    ds[src] = ds[src] - {v}
    ds[target] = ds[target] | {v}
    owner = list(p.assignment)
    owner[v] = target
    return DistrictMap(p.n, tuple(ds), tuple(owner))


def run_plan(g: Graph, p: DistrictMap, steps: Iterable[Switch], on_step=None) -> DistrictMap:
    """Apply steps in order, raising InvalidSwitch (with the step index) on failure."""
    for idx, s in enumerate(steps):
        reason = check_switch(g, p, s)
        if reason is not None:
            raise InvalidSwitch(reason, (idx, tuple(s)))
        p = _move(p, s[1], p.assignment[s[2]])
        if on_step is not None:
            on_step(idx, s, p)
    return p


def make_plan(g: Graph, p: DistrictMap, steps: Sequence[Switch]) -> tuple:
    """Verify steps from p; returns (SwitchPlan, resulting map)."""
    steps = tuple(tuple(s) for s in steps)
    end = run_plan(g, p, steps)
    return SwitchPlan(steps, map_signature(p), map_signature(end)), end


def contained_leaf_blocks(t: BlockTree, district) -> list:
    return [i for i in t.leaf_blocks() if t.blocks[i] <= district]


def is_contractible_district(g: Graph, p: DistrictMap, index: int, t: BlockTree | None = None) -> bool:
    """A district is contractible iff it holds at most one leaf block.

    With k = 1 there is nowhere to switch to, so only a singleton counts.
    """
    d = p.districts[index]
    if p.k == 1:
        return len(d) == 1
    if t is None:
        t = block_tree(g)
    return len(contained_leaf_blocks(t, d)) <= 1


def is_contractible_map(g: Graph, p: DistrictMap, t: BlockTree | None = None) -> bool:
    if t is None:
        t = block_tree(g)
    return all(is_contractible_district(g, p, i, t) for i in range(p.k))


def check_contraction_target(g: Graph, p: DistrictMap, index: int, target: int, t: BlockTree) -> None:
    d = p.districts[index]
    if p.k < 2 and len(d) > 1:
        raise IncontractibleDistrict("a lone district cannot shrink")
    leaves = contained_leaf_blocks(t, d)
    if len(leaves) >= 2:
        raise IncontractibleDistrict(f"district {index} contains {len(leaves)} leaf blocks")
    if target not in d:
        raise InvalidTarget(f"target {target} is not in district {index}")
    if leaves:
        if target not in t.blocks[leaves[0]] or target in t.cut_vertices:
            raise InvalidTarget(
                f"target {target} must be a non-cut vertex of leaf block {sorted(t.blocks[leaves[0]])}"
            )


def contraction_steps(g: Graph, p: DistrictMap, index: int, target: int, frozen=frozenset()) -> list:
    """Switch sequence shrinking district `index` to {target}; no validation.

    Vertices in `frozen` never receive a removed vertex, so callers can keep
    parts of the graph out of play.
    Returns the steps; the caller is responsible for preconditions.
    """
    d = set(p.districts[index])
    steps = []
    while len(d) > 1:
        bt = block_tree(g, d)
        if len(bt.blocks) > 1:
            root = min(i for i in range(len(bt.blocks)) if target in bt.blocks[i])
            pools = []
            for i in bt.leaf_blocks():
                if i == root:
                    continue
                c = bt.cuts_of(i)[0]
                pools.extend(v for v in bt.blocks[i] if v != c)
        else:
            pools = [v for v in d if v != target]
        best = None
        for v in pools:
            for x in g.adj[v]:
                if x not in d and x not in frozen:
                    if best is None or (x, v) < best:
                        best = (x, v)
                    break
        if best is None:
            raise IncontractibleDistrict(f"no removable vertex left in {sorted(d)}")
        x, v = best
        u = min(y for y in g.adj[v] if y in d)
        steps.append((u, v, x))
        d.discard(v)
    return steps


def contract_district(g: Graph, p: DistrictMap, index: int, target: int) -> SwitchPlan:
    require_valid(g, p)
    t = block_tree(g)
    check_contraction_target(g, p, index, target, t)
    plan, _ = make_plan(g, p, contraction_steps(g, p, index, target))
    return plan


# file formats

def load_map(text: str, n: int) -> DistrictMap:
    rows = [ln.split() for ln in text.splitlines() if ln.strip()]
    if not rows:
        raise ParseError("empty map file")
    try:
        k = int(rows[0][0])
        districts = [[int(x) for x in r] for r in rows[1:]]
    except (ValueError, IndexError):
        raise ParseError("map file must hold integers") from None
    if len(rows[0]) != 1 or len(districts) != k:
        raise ParseError(f"map header announces {rows[0]} districts, found {len(districts)}")
    return DistrictMap.from_districts(n, districts)


def dump_map(p: DistrictMap) -> str:
    sig = map_signature(p)
    return "\n".join([str(len(sig))] + [" ".join(map(str, d)) for d in sig]) + "\n"


def load_plan_steps(text: str) -> list:
    rows = [ln.split() for ln in text.splitlines() if ln.strip()]
    if not rows:
        raise ParseError("empty plan file")
    try:
        count = int(rows[0][0])
        steps = [tuple(int(x) for x in r) for r in rows[1:]]
    except (ValueError, IndexError):
        raise ParseError("plan file must hold integers") from None
    if count != len(steps) or any(len(s) != 3 for s in steps):
        raise ParseError(f"plan header announces {count} steps, found {len(steps)} well-formed rows")
    return steps


def dump_plan(steps: Iterable[Switch]) -> str:
    steps = list(steps)
    return "\n".join([str(len(steps))] + [f"{u} {v} {w}" for u, v, w in steps]) + "\n"
