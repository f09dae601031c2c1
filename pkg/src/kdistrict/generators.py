"""Instance families with known reconfiguration costs, and witness plans for them.

Every constructor numbers vertices gadget-major, role-minor and records the
numbering under ``meta["roles"]`` so plans and audits can be read by a human.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import product
from math import comb
from pathlib import Path

from .districts import (
    DistrictMap,
    SwitchPlan,
    dump_map,
    dump_plan,
    load_map,
    load_plan_steps,
    make_plan,
    map_signature,
    require_valid,
    run_plan,
)
from .errors import BadFormula, BadParams, InvalidPlan, InvalidSwitch, NotSatisfying, WrongKind
from .graph import Graph, dump_graph, is_connected_subset, load_graph


@dataclass(frozen=True)
class Cnf:
    n: int
    clauses: tuple

    def __post_init__(self):
        if self.n < 1 or not self.clauses:
            raise BadFormula("formula needs at least one variable and one clause")
        for c in self.clauses:
            if len(c) != 3:
                raise BadFormula(f"clause {tuple(c)} does not have exactly 3 literals")
            for lit in c:
                if not isinstance(lit, int) or lit == 0 or abs(lit) > self.n:
                    raise BadFormula(f"literal {lit} out of range 1..{self.n}")

    @property
    def m(self) -> int:
        return len(self.clauses)

    def satisfied_by(self, tau) -> bool:
        return all(any(tau[abs(x) - 1] == (x > 0) for x in c) for c in self.clauses)

    def satisfying_assignments(self):
        return [t for t in product((True, False), repeat=self.n) if self.satisfied_by(t)]


def parse_dimacs(text: str) -> Cnf:
    n = None
    lits = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise BadFormula(f"bad problem line: {line!r}")
            try:
                n = int(parts[2])
            except ValueError:
                raise BadFormula(f"bad problem line: {line!r}") from None
            continue
        try:
            lits.extend(int(t) for t in line.split())
        except ValueError:
            raise BadFormula(f"bad clause line: {line!r}") from None
    if n is None:
        raise BadFormula("missing 'p cnf' line")
    clauses, cur = [], []
    for x in lits:
        if x == 0:
            clauses.append(tuple(cur))
            cur = []
        else:
            cur.append(x)
    if cur:
        clauses.append(tuple(cur))
    return Cnf(n, tuple(clauses))


def dump_dimacs(phi: Cnf) -> str:
    rows = [f"p cnf {phi.n} {phi.m}"]
    rows += [" ".join(str(x) for x in c) + " 0" for c in phi.clauses]
    return "\n".join(rows) + "\n"


@dataclass(frozen=True)
class Instance:
    graph: Graph
    map_a: DistrictMap
    map_b: DistrictMap
    meta: dict = field(compare=False)

    @property
    def kind(self) -> str:
        return self.meta["kind"]

    def role(self, name: str) -> list:
        return self.meta["roles"][name]


def _instance(kind: str, g: Graph, a, b, params: dict, roles: dict, **extra) -> Instance:
    # canonical district order, so a bundle round-trips to an equal instance
    pa = DistrictMap.from_districts(g.n, a).relabeled()
    pb = DistrictMap.from_districts(g.n, b).relabeled()
    require_valid(g, pa)
    require_valid(g, pb)
    assert pa.k == pb.k, (pa.k, pb.k)
    for ids in roles.values():
        assert all(0 <= v < g.n for v in ids)
    meta = {"kind": kind, "k": pa.k, "n": g.n, "m": g.m, "budget": None,
            "params": params, "roles": roles}
    meta.update(extra)
    return Instance(g, pa, pb, meta)


def _require_kind(inst: Instance, kind: str) -> None:
    if inst.meta.get("kind") != kind:
        raise WrongKind(f"expected a {kind} instance, got {inst.meta.get('kind')}")


# --- paths and cycles -------------------------------------------------------

def _path_maps(n: int, k: int):
    a = [[v] for v in range(k - 1)] + [list(range(k - 1, n))]
    b = [list(range(n - k + 1))] + [[v] for v in range(n - k + 1, n)]
    return a, b


def gen_path_lb(n: int, k: int) -> Instance:
    """Path P_n: k-1 singletons at the left end versus k-1 singletons at the right end."""
    if not 1 <= k <= n:
        raise BadParams(f"need 1 <= k <= n, got n={n} k={k}")
    g = Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])
    a, b = _path_maps(n, k)
    return _instance("path_lb", g, a, b, {"n": n, "k": k}, {"path": list(range(n))},
                     lowerBound=(k - 1) * (n - k))


def relabel_lower_bound(a: DistrictMap, b: DistrictMap) -> int:
    """Fewest vertices that must change district, over every matching of labels.

    A switch changes the district of exactly one vertex, so this bounds the
    switch distance from below.  Bitmask DP over the districts of `b`.
    """
    k = a.k
    overlap = [[len(da & db) for db in b.districts] for da in a.districts]
    best = {0: 0}
    for i in range(k):
        nxt = {}
        for mask, val in best.items():
            for j in range(k):
                if not mask >> j & 1:
                    key = mask | 1 << j
                    cand = val + overlap[i][j]
                    if nxt.get(key, -1) < cand:
                        nxt[key] = cand
        best = nxt
    return a.n - max(best.values())


def gen_cycle_lb(n: int, k: int) -> Instance:
    if n < 3 or not 1 <= k <= n:
        raise BadParams(f"need n >= 3 and 1 <= k <= n, got n={n} k={k}")
    g = Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])
    a, b = _path_maps(n, k)
    shift = n // 2
    b = [[(v + shift) % n for v in d] for d in b]
    bound = relabel_lower_bound(DistrictMap.from_districts(n, a), DistrictMap.from_districts(n, b))
    return _instance("cycle_lb", g, a, b, {"n": n, "k": k, "rotation": shift},
                     {"cycle": list(range(n))}, lowerBound=bound)


# --- shortest-path reduction ------------------------------------------------

_SP_ROLES = ("l1", "l2", "l3", "l4", "l5", "r1", "r2", "r3", "r4", "r5", "d1", "d2", "u1", "u2")


def sp_budget(phi: Cnf) -> int:
    return 4 * phi.m + 6 * phi.n - 1


def _sp_layout(phi: Cnf):
    """Vertex ids: 14 per variable, then (c1, c2) per clause, then O, I, middles."""
    var = [{name: 14 * i + j for j, name in enumerate(_SP_ROLES)} for i in range(phi.n)]
    base = 14 * phi.n
    clause = [(base + 2 * j, base + 2 * j + 1) for j in range(phi.m)]
    base += 2 * phi.m
    out, inn = base, base + 1
    mids = list(range(base + 2, base + 2 + phi.m + phi.n - 1))
    return var, clause, out, inn, mids


def gen_sp_hardness(phi: Cnf, contractible_variant: bool = False) -> Instance:
    var, clause, out, inn, mids = _sp_layout(phi)
    n = mids[-1] + 1 if mids else inn + 1
    edges = set()

    def edge(a, b):
        edges.add((min(a, b), max(a, b)))

    chains = []
    budget = sp_budget(phi)
    for x in var:
        for s in "lr":
            v = [x[f"{s}{t}"] for t in range(1, 6)]
            if contractible_variant:
                chain = list(range(n, n + budget))
                n += budget
                for a, b in zip([v[1]] + chain, chain + [v[2]]):
                    edge(a, b)
                chains.append(chain)
            else:
                edge(v[1], v[2])
            edge(v[0], v[1])
            edge(v[2], x["d1"])
            edge(x["d1"], v[3])
            edge(v[3], v[0])
            edge(v[4], v[2])
            edge(out, v[0])
            edge(x["u1"], v[0])
        edge(x["d1"], x["d2"])
        edge(x["u1"], x["u2"])
    for (c1, c2), lits in zip(clause, phi.clauses):
        edge(c1, c2)
        for lit in lits:
            edge(c2, var[abs(lit) - 1]["l1" if lit > 0 else "r1"])
    for mid in mids:
        edge(out, mid)
        edge(inn, mid)
    g = Graph.from_edges(n, edges)

    side = {}
    chain_iter = iter(chains)
    for i, x in enumerate(var):
        for s in "lr":
            side[i, s] = [x[f"{s}{t}"] for t in range(1, 6)]
            if contractible_variant:
                side[i, s] += next(chain_iter)
    a, b = [], []
    for i, x in enumerate(var):
        common = [side[i, "l"], side[i, "r"], [x["d1"], x["d2"]]]
        a += common + [[x["u1"], x["u2"]]]
        b += common + [[x["u2"]], [x["u1"]]]
    for c1, c2 in clause:
        a.append([c1, c2])
        b += [[c1], [c2]]
    a += [[v] for v in [out, inn] + mids]
    b.append([out, inn] + mids)

    roles = {name: [x[name] for x in var] for name in _SP_ROLES}
    roles["c1"] = [c[0] for c in clause]
    roles["c2"] = [c[1] for c in clause]
    roles["pipe_out"] = [out]
    roles["pipe_in"] = [inn]
    roles["pipe_mid"] = mids
    if contractible_variant:
        roles["chain"] = [v for c in chains for v in c]
    return _instance(
        "sp_hardness", g, a, b,
        {"n": phi.n, "m": phi.m, "clauses": [list(c) for c in phi.clauses],
         "contractibleVariant": contractible_variant},
        roles, budget=budget,
        mapBNote="u1/u2 split and {d1,d2} kept together in the target map",
    )


def _check_tau(phi: Cnf, tau) -> tuple:
    tau = tuple(bool(t) for t in tau)
    if len(tau) != phi.n:
        raise NotSatisfying(f"assignment has {len(tau)} values for {phi.n} variables")
    if not phi.satisfied_by(tau):
        raise NotSatisfying("assignment does not satisfy the formula")
    return tau


def _cnf_of(inst: Instance) -> Cnf:
    p = inst.meta["params"]
    return Cnf(p["n"], tuple(tuple(c) for c in p["clauses"]))


def witness_sp(inst: Instance, tau) -> SwitchPlan:
    """Route one traveler per variable and per clause out of the pipe.

    Steps are tagged in the same order as the cost components reported by
    `audit_plan`: open gates, variable travelers, clause travelers, pipe
    consolidation, close gates.
    """
    _require_kind(inst, "sp_hardness")
    phi = _cnf_of(inst)
    tau = _check_tau(phi, tau)
    r = inst.meta["roles"]
    out, inn, mids = r["pipe_out"][0], r["pipe_in"][0], list(r["pipe_mid"])
    steps = []
    gate = [r["l1"][i] if t else r["r1"][i] for i, t in enumerate(tau)]
    side2 = [r["l2"][i] if t else r["r2"][i] for i, t in enumerate(tau)]
    side3 = [r["l3"][i] if t else r["r3"][i] for i, t in enumerate(tau)]

    for i in range(phi.n):
        steps.append((r["d2"][i], r["d1"][i], side3[i]))

    # the traveler holding O always contains O plus the gate it last took
    holder = None  # a vertex adjacent to O inside the current traveler
    for i in range(phi.n):
        mid = None
        if holder is not None:
            mid = mids.pop(0)
            steps.append((holder, out, mid))
        steps.append((side2[i], gate[i], out))
        steps.append((r["u2"][i], r["u1"][i], gate[i]))
        if mid is not None:
            steps.append((out, mid, inn))
        holder = gate[i]

    gate_owner = {i: r["u1"][i] for i in range(phi.n)}
    for j, lits in enumerate(phi.clauses):
        lit = next(x for x in lits if tau[abs(x) - 1] == (x > 0))
        i = abs(lit) - 1
        mid = mids.pop(0)
        steps.append((holder, out, mid))
        steps.append((gate_owner[i], gate[i], out))
        c1, c2 = r["c1"][j], r["c2"][j]
        steps.append((c1, c2, gate[i]))
        steps.append((out, mid, inn))
        gate_owner[i] = c2
        holder = gate[i]

    steps.append((holder, out, inn if not r["pipe_mid"] else r["pipe_mid"][-1]))

    for i in range(phi.n):
        steps.append((gate_owner[i], gate[i], side2[i]))
        steps.append((side3[i], r["d1"][i], r["d2"][i]))

    plan, end = make_plan(inst.graph, inst.map_a, steps)
    assert map_signature(end) == map_signature(inst.map_b)
    return plan


# --- diamond chains and the spiral -----------------------------------------

@dataclass(frozen=True)
class DiamondSpec:
    """One diamond: two cut vertices joined through two one-vertex paths, each cut with a pendant leaf."""

    v1: int
    v2: int
    interior: tuple  # (left, right)
    u1: int
    u2: int

    def edges(self):
        out = [(self.v1, self.u1), (self.v2, self.u2)]
        for x in self.interior:
            out += [(self.v1, x), (self.v2, x)]
        return out

    def core(self) -> list:
        return [self.v1, self.v2, self.u1, self.u2]


def _diamond_chain(start: int, count: int):
    """`count` diamonds sharing interior vertices; returns (diamonds, interiors, next id)."""
    cores = [list(range(start + 4 * j, start + 4 * j + 4)) for j in range(count)]
    base = start + 4 * count
    interiors = list(range(base, base + count + 1))
    ds = [DiamondSpec(c[0], c[1], (interiors[j], interiors[j + 1]), c[2], c[3])
          for j, c in enumerate(cores)]
    return ds, interiors, base + count + 1


def spiral_order(r: int) -> list:
    """Spiral path as ("a" | "b", 1-based index) pairs, from a_1 to a_{r/2+1}.

    A-gaps shrink r, r-1, .., 1 while B-gaps grow 1, 2, .., r-1.
    """
    lo, hi = 1, r + 1
    a_seq = []
    while len(a_seq) < r + 1:
        a_seq.append(lo)
        lo += 1
        if len(a_seq) < r + 1:
            a_seq.append(hi)
            hi -= 1
    mid = r // 2
    b_seq = [mid]
    for step in range(1, r):
        b_seq.append(mid + (step + 1) // 2 if step % 2 else mid - step // 2)
    out = []
    for i in range(r):
        out += [("a", a_seq[i]), ("b", b_seq[i])]
    out.append(("a", a_seq[r]))
    return out


def spiral_lower_bound(r: int, q: int, ell: int) -> int:
    return ell * (comb(r + 1, 2) + comb(r, 2)) + (ell - 1) * 2 * q


def gen_spiral_lb(r: int, q: int, ell: int) -> Instance:
    if r < 2 or r % 2 or q < 1 or ell < 1:
        raise BadParams(f"need even r >= 2, q >= 1, l >= 1; got r={r} q={q} l={ell}")
    if q < 2:
        # each tree holds q+l-1 vertices off the chain but must host l+1 districts
        raise BadParams(f"q={q} leaves no room for the tree path district; need q >= 2")
    da, ia, nxt = _diamond_chain(0, r)
    db, ib, nxt = _diamond_chain(nxt, r - 1)
    edges = [e for d in da + db for e in d.edges()]
    order = spiral_order(r)
    pos = {"a": ia, "b": ib}
    s_path = [pos[c][i - 1] for c, i in order]
    assert len(set(s_path)) == 2 * r + 1 == len(s_path)
    edges += list(zip(s_path, s_path[1:]))

    trees = []
    for anchor in (ia[0], ia[r // 2]):
        spine = list(range(nxt, nxt + q - 1))
        slots = list(range(nxt + q - 1, nxt + q - 1 + ell))
        nxt += q - 1 + ell
        edges += list(zip([anchor] + spine, spine))
        edges += [(spine[-1], x) for x in slots]
        edges += list(zip(slots, slots[1:]))
        trees.append((spine, slots))
    g = Graph.from_edges(nxt, edges)

    def chain_districts(ds, interiors):
        out = [d.core() + [d.interior[0]] for d in ds]
        out[-1].append(interiors[-1])
        return out

    diamonds = chain_districts(da, ia) + chain_districts(db, ib)
    (sp1, sl1), (sp2, sl2) = trees
    a = diamonds + [sp1] + [[x] for x in sl1] + [sp2 + sl2]
    b = diamonds + [sp1 + sl1] + [sp2] + [[y] for y in sl2]
    roles = {
        "diamond_a_core": [v for d in da for v in d.core()],
        "diamond_b_core": [v for d in db for v in d.core()],
        "chain_a": ia,
        "chain_b": ib,
        "spiral": s_path,
        "tree1_path": sp1,
        "tree1_slots": sl1,
        "tree2_path": sp2,
        "tree2_slots": sl2,
    }
    return _instance(
        "spiral_lb", g, a, b, {"r": r, "q": q, "l": ell}, roles,
        lowerBound=spiral_lower_bound(r, q, ell),
        diamondTerm=ell * (comb(r + 1, 2) + comb(r, 2)),
        treeTerm=(ell - 1) * 2 * q,
    )


class _Sim:
    """Applies switches one at a time, keeping the step list."""

    def __init__(self, g: Graph, p: DistrictMap):
        self.g, self.p, self.steps = g, p, []

    def owner(self, v: int) -> int:
        return self.p.assignment[v]

    def district(self, v: int) -> frozenset:
        return self.p.districts[self.p.assignment[v]]

    def move(self, v: int, w: int) -> None:
        """Move v into the district of its neighbor w."""
        u = next(x for x in self.g.adj[v] if self.owner(x) == self.owner(v))
        self.p = run_plan(self.g, self.p, [(u, v, w)])
        self.steps.append((u, v, w))


class _Chain:
    """Left/right state of a diamond chain, tracked through its pivot diamond.

    With no traveler on the chain exactly one diamond (the pivot) holds both
    of its interior vertices; the diamonds before it hold their left one and
    the diamonds after it their right one.
    """

    def __init__(self, sim: _Sim, cuts: list, interiors: list):
        self.sim, self.cuts, self.inner = sim, cuts, interiors

    def pivot(self):
        for j, c in enumerate(self.cuts):
            d = self.sim.district(c)
            if self.inner[j] in d and self.inner[j + 1] in d:
                return j
        return None

    def goto(self, target: int) -> None:
        j = self.pivot()
        while j < target:
            self.sim.move(self.inner[j + 1], self.cuts[j + 1])
            j += 1
        while j > target:
            self.sim.move(self.inner[j], self.cuts[j - 1])
            j -= 1

    def expose(self, i: int) -> None:
        """Make interior i (0-based) removable from its diamond district."""
        j = self.pivot()
        options = [t for t in (i - 1, i) if 0 <= t < len(self.cuts)]
        self.goto(min(options, key=lambda t: abs(t - j)))

    def give_back(self, i: int, toward: int) -> None:
        options = [t for t in (i - 1, i) if 0 <= t < len(self.cuts)]
        self.sim.move(self.inner[i], self.cuts[min(options, key=lambda t: abs(t - toward))])


def witness_spiral(inst: Instance) -> SwitchPlan:
    """Carry the tree-1 districts across the spiral one at a time, nearest first."""
    _require_kind(inst, "spiral_lb")
    g, roles = inst.graph, inst.meta["roles"]
    r = inst.meta["params"]["r"]
    sim = _Sim(g, inst.map_a)
    chains = {
        "a": _Chain(sim, roles["diamond_a_core"][0::4], roles["chain_a"]),
        "b": _Chain(sim, roles["diamond_b_core"][0::4], roles["chain_b"]),
    }
    order = spiral_order(r)
    where = {}
    for c in "ab":
        for i, v in enumerate(roles[f"chain_{c}"]):
            where[v] = (c, i)
    s_path = roles["spiral"]
    a1, am = s_path[0], s_path[-1]
    sp1, sl1 = roles["tree1_path"], roles["tree1_slots"]
    sp2, sl2 = roles["tree2_path"], roles["tree2_slots"]
    tree1 = set(sp1) | set(sl1)

    def next_index(c, after):
        for cc, i in order[after + 1:]:
            if cc == c:
                return i - 1
        return len(chains[c].cuts) - 1

    def dist_from(root, verts):
        d = {root: 0}
        frontier = [root]
        while frontier:
            nxt = []
            for x in frontier:
                for y in g.adj[x]:
                    if y in verts and y not in d:
                        d[y] = d[x] + 1
                        nxt.append(y)
            frontier = nxt
        return d

    depth1 = dist_from(a1, tree1 | {a1})
    tree2 = set(sp2) | set(sl2)
    depth2 = dist_from(am, tree2 | {am})
    ell = len(sl1)
    travelers = ell  # the path district, then every slot but the last
    for t in range(travelers):
        # leave tree 1: step onto a_1, then hand every tree vertex to the next district
        chains["a"].expose(0)
        sim.move(a1, sp1[0])
        behind = sl1[t]
        while len(sim.district(a1)) > 1:
            mine = sim.district(a1)
            cand = [v for v in mine - {a1}
                    if is_connected_subset(g, mine - {v})
                    and any(sim.owner(x) == sim.owner(behind) for x in g.adj[v])]
            v = max(cand, key=lambda x: (depth1[x], x))
            sim.move(v, next(x for x in g.adj[v] if sim.owner(x) == sim.owner(behind)))
        # cross the spiral
        for step in range(1, len(order)):
            c, i = order[step]
            chains[c].expose(i - 1)
            nx, cur = s_path[step], s_path[step - 1]
            sim.move(nx, cur)
            pc, pi = where[cur]
            chains[pc].give_back(pi, next_index(pc, step))
        # descend into tree 2 and spread over this traveler's final extent
        final = set(sp2) | (set(sl2[: ell - 1 - t]) if t < ell - 1 else set())
        first = sp2[0]
        sim.move(first, am)
        chains["a"].give_back(where[am][1], len(chains["a"].cuts) - 1)
        while True:
            mine = sim.district(first)
            cand = [v for v in final - mine
                    if any(x in mine for x in g.adj[v])
                    and len(sim.district(v)) > 1
                    and is_connected_subset(g, sim.district(v) - {v})]
            if not cand:
                break
            v = min(cand, key=lambda x: (depth2[x], x))
            sim.move(v, next(x for x in g.adj[v] if x in mine))
        assert sim.district(first) == frozenset(final), (t, sorted(sim.district(first)))
    chains["a"].goto(len(chains["a"].cuts) - 1)
    chains["b"].goto(len(chains["b"].cuts) - 1)
    plan, end = make_plan(g, inst.map_a, sim.steps)
    assert map_signature(end) == map_signature(inst.map_b)
    return plan


# --- connectedness reduction ------------------------------------------------

# v8 is the same vertex as v5, so each variable gadget has 17 vertices
_CONN_VAR = ("v1", "v2", "v3", "v4", "v5", "v6", "v7", "v9", "v10",
             "v11", "v12", "v13", "v14", "v15", "v16", "v17", "v18")
_CONN_CLAUSE = ("u1", "u2", "u3", "u4", "u5", "u6")


def _conn_layout(phi: Cnf) -> dict:
    ids = iter(range(10 ** 9))
    lay = {"var": [{r: next(ids) for r in _CONN_VAR} for _ in range(phi.n)],
           "clause": [{r: next(ids) for r in _CONN_CLAUSE} for _ in range(phi.m)]}
    for name in ("N1", "N2", "f1", "f2", "g1", "g2", "b1", "b3", "e1", "e3",
                 "a1", "x", "y", "lx", "ly"):
        lay[name] = next(ids)
    lay["queue"] = [next(ids) for _ in range(phi.m + phi.n)]  # b4, b5, ...
    lay["path"] = [next(ids) for _ in range(phi.n + 1)]
    lay["count"] = next(ids)
    return lay


def gen_conn_hardness(phi: Cnf) -> Instance:
    lay = _conn_layout(phi)
    N1, N2, a1 = lay["N1"], lay["N2"], lay["a1"]
    queue, path = lay["queue"], lay["path"]
    edges = []
    for x in lay["var"]:
        edges += [(x["v1"], x["v2"]), (x["v2"], x["v3"]), (x["v3"], x["v4"]),
                  (x["v4"], x["v5"]), (x["v5"], x["v1"]),
                  (x["v6"], x["v7"]), (x["v7"], x["v5"]), (x["v5"], x["v9"]),
                  (x["v9"], x["v10"]), (x["v10"], x["v6"]),
                  (x["v1"], x["v11"]), (x["v4"], x["v12"]), (x["v7"], x["v13"]), (x["v9"], x["v14"]),
                  (x["v15"], x["v17"]), (x["v16"], x["v18"])]
        for hub in ("v15", "v16"):
            edges += [(x[hub], x["v3"]), (x[hub], x["v5"]), (x[hub], x["v10"])]
        for s in (N1, N2):
            edges += [(s, x[r]) for r in ("v1", "v4", "v7", "v9", "v15", "v16")]
        # gate vertices reach the reservoir exit and the garbage gadget
        edges += [(queue[0], x["v2"]), (queue[0], x["v6"]), (a1, x["v2"]), (a1, x["v6"])]
    for c, lits in zip(lay["clause"], phi.clauses):
        edges += [(c["u1"], c["u2"]), (c["u2"], c["u3"]), (c["u3"], c["u4"]),
                  (c["u4"], c["u1"]), (c["u2"], c["u5"]), (c["u4"], c["u6"])]
        for lit in set(lits):
            edges.append((c["u1"], lay["var"][abs(lit) - 1]["v2" if lit > 0 else "v6"]))
    ring = [lay["f1"]] + [c["u3"] for c in lay["clause"]] + [lay["f2"]]
    edges += list(zip([N1] + ring, ring + [N1]))
    edges += [(lay["f1"], lay["g1"]), (lay["f2"], lay["g2"])]
    reservoir = [lay["b1"], N2, lay["b3"]] + queue
    edges += list(zip(reservoir, reservoir[1:] + reservoir[:1]))
    edges += [(lay["b1"], lay["e1"]), (lay["b3"], lay["e3"])]
    edges += [(a1, lay["x"]), (lay["x"], N2), (N2, lay["y"]), (lay["y"], a1),
              (lay["x"], lay["lx"]), (lay["y"], lay["ly"])]
    edges += list(zip([a1] + path, path))
    g = Graph.from_edges(lay["count"], edges)

    fixed = []
    for x in lay["var"]:
        fixed += [[x[r] for r in ("v1", "v2", "v3", "v4", "v11", "v12")],
                  [x[r] for r in ("v6", "v7", "v9", "v10", "v13", "v14")],
                  [x[r] for r in ("v5", "v15", "v16", "v17", "v18")]]
    frame_core = [N1, lay["f1"], lay["f2"], lay["g1"], lay["g2"]]
    blue_core = [N2, lay["b1"], lay["b3"], lay["e1"], lay["e3"]]
    garbage = [a1, lay["x"], lay["y"], lay["lx"], lay["ly"]]
    u3s = [c["u3"] for c in lay["clause"]]
    a = fixed + [[c[r] for r in ("u1", "u2", "u4", "u5", "u6")] for c in lay["clause"]]
    a += [frame_core + u3s, blue_core, garbage, path]
    a += [[q] for q in queue]
    b = fixed + [[c[r] for r in ("u2", "u3", "u4", "u5", "u6")] for c in lay["clause"]]
    b += [frame_core, blue_core + queue, garbage, [path[-1]]]
    b += [[c["u1"]] for c in lay["clause"]] + [[p] for p in path[:-1]]

    roles = {f"var_{r}": [x[r] for x in lay["var"]] for r in _CONN_VAR}
    roles.update({f"clause_{r}": [c[r] for c in lay["clause"]] for r in _CONN_CLAUSE})
    roles.update({r: [lay[r]] for r in ("N1", "N2", "f1", "f2", "g1", "g2", "b1", "b3",
                                        "e1", "e3", "a1", "x", "y", "lx", "ly")})
    roles["reservoir_queue"] = queue
    roles["garbage_path"] = path
    return _instance(
        "conn_hardness", g, a, b,
        {"n": phi.n, "m": phi.m, "clauses": [list(c) for c in phi.clauses]},
        roles, gateSemantics="a gate is open when its vertex can leave its district",
        reservoirExit="b4",
    )


def _gadget_toggle(sim: _Sim, x: dict, side: str, supernode: int, opening: bool) -> None:
    """Open (or close) one gate of a variable gadget by borrowing a super node.

    The caller returns the super node to its owner afterwards.
    """
    near, far = ("v4", "v3") if side == "true" else ("v9", "v10")
    sim.move(supernode, x["v15"])
    if opening:
        sim.move(x["v5"], x[near])
        sim.move(x[far], x["v15"])
    else:
        sim.move(x[far], x[near])
        sim.move(x["v5"], x["v15"])


def _hand_off(sim: _Sim, me: int, region: set, target_of, order_key) -> None:
    """Give away every vertex of district `me` inside `region`, keeping it connected."""
    g = sim.g
    while True:
        mine = sim.p.districts[me]
        cand = []
        for v in mine & region:
            rest = mine - {v}
            if not rest or not is_connected_subset(g, rest):
                continue
            w = target_of(v)
            if w is not None:
                cand.append((order_key(v), v, w))
        if not cand:
            return
        _, v, w = max(cand)
        sim.move(v, w)


def _grow(sim: _Sim, me_vertex: int, final: set, order_key) -> None:
    """Expand the district of `me_vertex` over `final`, taking vertices from other districts."""
    g = sim.g
    while True:
        mine = sim.district(me_vertex)
        cand = [v for v in final - mine
                if any(x in mine for x in g.adj[v])
                and len(sim.district(v)) > 1
                and is_connected_subset(g, sim.district(v) - {v})]
        if not cand:
            return
        v = min(cand, key=order_key)
        sim.move(v, next(x for x in g.adj[v] if x in mine))


def witness_conn(inst: Instance, tau) -> SwitchPlan:
    """Gates via N1, clause travelers, parking, garbage flush, gates closed via N2."""
    _require_kind(inst, "conn_hardness")
    phi = _cnf_of(inst)
    tau = _check_tau(phi, tau)
    g, r = inst.graph, inst.meta["roles"]
    one = {k: v[0] for k, v in r.items() if len(v) == 1}
    N1, N2, a1 = one["N1"], one["N2"], one["a1"]
    queue, path = r["reservoir_queue"], r["garbage_path"]
    var = [{k: r[f"var_{k}"][i] for k in _CONN_VAR} for i in range(phi.n)]
    clause = [{k: r[f"clause_{k}"][j] for k in _CONN_CLAUSE} for j in range(phi.m)]
    side = ["true" if t else "false" for t in tau]
    gate = [x["v2"] if t else x["v6"] for x, t in zip(var, tau)]
    home = [x["v1"] if t else x["v7"] for x, t in zip(var, tau)]
    sim = _Sim(g, inst.map_a)
    pos = {q: i for i, q in enumerate(queue)}

    for x, s in zip(var, side):
        _gadget_toggle(sim, x, s, N1, opening=True)
        sim.move(N1, one["f1"])

    mobiles = [sim.owner(q) for q in queue]
    blue = sim.owner(one["b1"])

    def leave_reservoir(t):
        nxt = mobiles[t + 1] if t + 1 < len(mobiles) else blue

        def target(v):
            return next((w for w in g.adj[v] if sim.owner(w) == nxt), None)
        _hand_off(sim, mobiles[t], set(queue), target, lambda v: pos[v])

    t = 0
    for j, lits in enumerate(phi.clauses):
        lit = next(x for x in lits if tau[abs(x) - 1] == (x > 0))
        i = abs(lit) - 1
        c = clause[j]
        sim.move(c["u3"], c["u2"])
        sim.move(gate[i], queue[0])
        sim.move(c["u1"], gate[i])
        leave_reservoir(t)
        sim.move(gate[i], home[i])
        t += 1
    for i in range(phi.n):
        sim.move(gate[i], queue[0])
        leave_reservoir(t)
        t += 1

    sim.move(N2, one["x"])
    for i in range(phi.n):
        me = sim.owner(gate[i])
        sim.move(a1, gate[i])
        final = set(path[: phi.n - i]) | {a1, gate[i]}
        _grow(sim, gate[i], final, lambda v: (path.index(v) if v in path else -1))
        sim.move(gate[i], home[i])
        sim.move(a1, one["x"])
        assert sim.p.districts[me] == frozenset(path[: phi.n - i])
    sim.move(N2, one["b1"])

    for x, s in zip(var, side):
        _gadget_toggle(sim, x, s, N2, opening=False)
        sim.move(N2, one["b1"])

    plan, end = make_plan(g, inst.map_a, sim.steps)
    assert map_signature(end) == map_signature(inst.map_b)
    return plan


# --- auditing ---------------------------------------------------------------

@dataclass(frozen=True)
class AuditReport:
    kind: str
    total: int
    components: dict
    bounds: dict

    @property
    def slack(self) -> dict:
        return {k: self.components.get(k, self.total) - v for k, v in self.bounds.items()}


def _replay(inst: Instance, plan) -> tuple:
    """(step, map before it) pairs and the final map; InvalidPlan unless A reaches B."""
    steps = plan.steps if isinstance(plan, SwitchPlan) else tuple(tuple(s) for s in plan)
    before = [inst.map_a]
    try:
        end = run_plan(inst.graph, inst.map_a, steps, on_step=lambda i, s, p: before.append(p))
    except InvalidSwitch as exc:
        raise InvalidPlan(f"plan does not apply: {exc}") from None
    if map_signature(end) != map_signature(inst.map_b):
        raise InvalidPlan("plan does not end at the target map")
    return list(zip(steps, before)), end


def _audit_sp(inst: Instance, trace: list, end: DistrictMap) -> dict:
    r = inst.meta["roles"]
    side2 = set(r["l2"]) | set(r["r2"])
    side3 = set(r["l3"]) | set(r["r3"])
    d1, d2 = set(r["d1"]), set(r["d2"])
    gates = set(r["l1"]) | set(r["r1"])
    out, inn = r["pipe_out"][0], r["pipe_in"][0]
    u1, c2 = set(r["u1"]), set(r["c2"])
    comp = dict.fromkeys(("open_gates", "variable_travelers", "clause_travelers",
                          "pipe_consolidation", "close_gates", "other"), 0)
    for (u, v, w), p in trace:
        dst = p.districts[p.assignment[w]]
        if v in d1 and dst & side3:
            comp["open_gates"] += 1
        elif (v in d1 and d2 & dst) or (v in gates and dst & side2):
            comp["close_gates"] += 1
        elif v == out and inn in dst:
            comp["pipe_consolidation"] += 1
        else:
            mover = p.assignment[w] if inn not in dst else p.assignment[v]
            final = end.districts[mover]
            if final & u1:
                comp["variable_travelers"] += 1
            elif final & c2:
                comp["clause_travelers"] += 1
            else:
                comp["other"] += 1
    return comp


def audit_plan(inst: Instance, plan) -> AuditReport:
    trace, end = _replay(inst, plan)
    kind = inst.kind
    total = len(trace)
    bounds = {}
    if kind == "sp_hardness":
        comp = _audit_sp(inst, trace, end)
        n, m = inst.meta["params"]["n"], inst.meta["params"]["m"]
        bounds = {"open_gates": n, "variable_travelers": 4 * n - 2, "clause_travelers": 4 * m,
                  "pipe_consolidation": 1, "close_gates": 2 * n, "budget": inst.meta["budget"]}
    elif kind == "spiral_lb":
        r = inst.meta["roles"]
        tree = set(r["tree1_path"]) | set(r["tree1_slots"]) | set(r["tree2_path"]) | set(r["tree2_slots"])
        cores = set(r["diamond_a_core"]) | set(r["diamond_b_core"])
        comp = {"diamond_reconfigurations": 0, "tree_moves": 0, "other": 0}
        for (u, v, w), p in trace:
            dst = p.districts[p.assignment[w]]
            if dst & cores:
                comp["diamond_reconfigurations"] += 1
            elif v in tree:
                comp["tree_moves"] += 1
            else:
                comp["other"] += 1
        bounds = {"diamond_reconfigurations": inst.meta["diamondTerm"],
                  "tree_moves": inst.meta["treeTerm"], "lowerBound": inst.meta["lowerBound"]}
    elif kind == "conn_hardness":
        r = inst.meta["roles"]
        supers = {r["N1"][0], r["N2"][0]}
        gadget = {v for k, ids in r.items() if k.startswith("var_") and k not in ("var_v2", "var_v6")
                  for v in ids}
        leaves = set(inst.graph.leaves())
        comp = {"gate_toggles": 0, "mobile_moves": 0, "other": 0}
        for (u, v, w), p in trace:
            if v in supers or v in gadget:
                comp["gate_toggles"] += 1
            elif not (p.districts[p.assignment[v]] & leaves) or not (p.districts[p.assignment[w]] & leaves):
                comp["mobile_moves"] += 1
            else:
                comp["other"] += 1
    else:
        comp = {"moves": total}
        if "lowerBound" in inst.meta:
            bounds = {"lowerBound": inst.meta["lowerBound"]}
    return AuditReport(kind, total, comp, bounds)


# --- bundles ----------------------------------------------------------------

KINDS = ("path", "cycle", "spiral", "sp", "conn")


def generate(kind: str, params: dict, cnf: Cnf | None = None) -> Instance:
    """Dispatch used by the command line; `params` holds integer parameters."""
    try:
        if kind == "path":
            return gen_path_lb(int(params["n"]), int(params["k"]))
        if kind == "cycle":
            return gen_cycle_lb(int(params["n"]), int(params["k"]))
        if kind == "spiral":
            return gen_spiral_lb(int(params["r"]), int(params["q"]), int(params["l"]))
    except KeyError as exc:
        raise BadParams(f"missing parameter {exc.args[0]} for {kind}") from None
    if kind in ("sp", "conn"):
        if cnf is None:
            raise BadParams(f"{kind} needs a CNF formula")
        if kind == "sp":
            return gen_sp_hardness(cnf, bool(params.get("contractible", False)))
        return gen_conn_hardness(cnf)
    raise BadParams(f"unknown instance kind {kind!r}; expected one of {', '.join(KINDS)}")


def witness(inst: Instance, tau=None) -> SwitchPlan:
    """Constructive plan for any generated instance; formulas use `tau` or their first model."""
    if inst.kind in ("sp_hardness", "conn_hardness"):
        if tau is None:
            models = _cnf_of(inst).satisfying_assignments()
            if not models:
                raise NotSatisfying("formula is unsatisfiable")
            tau = models[0]
        return (witness_sp if inst.kind == "sp_hardness" else witness_conn)(inst, tau)
    if inst.kind == "spiral_lb":
        return witness_spiral(inst)
    from .planner import plan_path

    plan = plan_path(inst.graph, inst.map_a, inst.map_b)
    if not isinstance(plan, SwitchPlan):
        raise WrongKind(f"no plan for {inst.kind}: {plan}")
    return plan


def write_bundle(inst: Instance, directory, plan: SwitchPlan | None = None) -> Path:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    (d / "graph.txt").write_text(dump_graph(inst.graph))
    (d / "mapA.txt").write_text(dump_map(inst.map_a))
    (d / "mapB.txt").write_text(dump_map(inst.map_b))
    meta = dict(inst.meta)
    (d / "meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    if plan is not None:
        (d / "witness.plan").write_text(dump_plan(plan.steps))
    return d


def read_bundle(directory) -> tuple:
    """(Instance, witness steps or None) from a bundle directory."""
    d = Path(directory)
    g = load_graph((d / "graph.txt").read_text())
    a = load_map((d / "mapA.txt").read_text(), g.n)
    b = load_map((d / "mapB.txt").read_text(), g.n)
    meta = json.loads((d / "meta.json").read_text())
    require_valid(g, a)
    require_valid(g, b)
    wp = d / "witness.plan"
    steps = load_plan_steps(wp.read_text()) if wp.exists() else None
    return Instance(g, a, b, meta), steps


def small_formula_family(max_vars: int = 3, max_clauses: int = 3) -> list:
    """Deterministic corpus of 3CNF formulas used by the reduction tests.

    With n variables each clause mentions variables (1, 2, 3) clipped to n, in
    every sign pattern; formulas are multisets of up to `max_clauses` clauses.
    """
    from itertools import combinations_with_replacement

    out = []
    for n in range(1, max_vars + 1):
        names = [min(t, n) for t in (1, 2, 3)]
        shapes = sorted({tuple(v if s else -v for v, s in zip(names, signs))
                         for signs in product((True, False), repeat=3)})
        for m in range(1, max_clauses + 1):
            out += [Cnf(n, combo) for combo in combinations_with_replacement(shapes, m)]
    return out
