"""Command-line front end: `kdistrict <verb> ...`.

Reports are key=value lines (or one JSON object with --json).  Exit codes:
0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import generators as gen
from .connectivity import switch_graph_connected
from .districts import (
    SwitchPlan,
    contract_district,
    dump_plan,
    load_map,
    load_plan_steps,
    map_signature,
    run_plan,
    valid_switches,
    validate_map,
)
from .errors import DomainError, InvalidMap, InvalidSwitch, UsageError
from .graph import load_graph
from .oracle import DEFAULT_CAP, build_switch_graph, oracle_diameter, oracle_distance
from .planner import Unreachable, UnsupportedPair, plan_path_report


class _Out:
    def __init__(self, as_json: bool, stream):
        self.as_json, self.stream, self.fields, self.rows = as_json, stream, {}, []

    def kv(self, **pairs):
        self.fields.update(pairs)
        if not self.as_json:
            print(" ".join(f"{k}={_fmt(v)}" for k, v in pairs.items()), file=self.stream)

    def row(self, **pairs):
        self.rows.append(pairs)
        if not self.as_json:
            print(" ".join(f"{k}={_fmt(v)}" for k, v in pairs.items()), file=self.stream)

    def line(self, text: str):
        if not self.as_json:
            print(text, file=self.stream)

    def finish(self):
        if self.as_json:
            body = dict(self.fields)
            if self.rows:
                body["items"] = self.rows
            print(json.dumps(body, sort_keys=True, default=_jsonable), file=self.stream)


def _fmt(v) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, (list, tuple)):
        return ",".join(_fmt(x) for x in v)
    if v is None:
        return "none"
    return str(v)


def _jsonable(v):
    if isinstance(v, (frozenset, set)):
        return sorted(v)
    return str(v)


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _graph(path):
    return load_graph(_read(path))


def _map(path, g):
    return load_map(_read(path), g.n)


def _steps(path):
    return load_plan_steps(_read(path))


def _sig(p) -> str:
    return "|".join(",".join(map(str, d)) for d in map_signature(p))


# --- verbs ------------------------------------------------------------------

def cmd_validate(a, out):
    g = _graph(a.graph)
    p = _map(a.map, g)
    problems = validate_map(g, p)
    out.kv(valid=not problems, n=g.n, k=p.k)
    for kind, detail in problems:
        out.row(problem=kind, detail=detail)
    if problems:
        raise InvalidMap("; ".join(k for k, _ in problems))


def cmd_switches(a, out):
    g = _graph(a.graph)
    p = _map(a.map, g)
    _require(g, p)
    sw = valid_switches(g, p)
    out.kv(count=len(sw))
    for u, v, w in sw:
        out.row(u=u, v=v, w=w)


def cmd_apply(a, out):
    g = _graph(a.graph)
    p = _map(a.map, g)
    _require(g, p)
    steps = _steps(a.plan)

    def show(i, s, q):
        out.row(step=i + 1, switch=list(s), signature=_sig(q))

    end = run_plan(g, p, steps, on_step=show)
    out.kv(steps=len(steps), final=_sig(end))


def cmd_contract(a, out):
    g = _graph(a.graph)
    p = _map(a.map, g)
    _require(g, p)
    plan = contract_district(g, p, a.district, a.target)
    _emit_plan(a, out, plan)


def cmd_connected(a, out):
    g = _graph(a.graph)
    v = switch_graph_connected(g, a.k)
    out.line(v.message())
    fields = {"connected": v.connected, "reason": v.reason, "n": v.n, "k": v.k}
    if v.m_result is not None:
        fields.update(M=v.m_result.M, witness_pair=list(v.m_result.witness_pair),
                      witness_edge=list(v.m_result.witness_edge))
    out.kv(**fields)


def cmd_plan(a, out):
    g = _graph(a.graph)
    p1, p2 = _map(a.map_a, g), _map(a.map_b, g)
    _require(g, p1)
    _require(g, p2)
    result, report = plan_path_report(g, p1, p2)
    if isinstance(result, (Unreachable, UnsupportedPair)):
        out.kv(status=type(result).__name__, reason=result.reason)
        raise _Quiet()
    _emit_plan(a, out, result)
    out.kv(bound=report.bound, push_rounds=report.push_rounds)
    if a.out:
        side = Path(a.out + ".json")
        side.write_text(json.dumps({
            "length": report.length, "bound": report.bound,
            "phases": [list(x) for x in report.phases], "push_rounds": report.push_rounds,
        }, indent=2, sort_keys=True) + "\n")


def cmd_verify(a, out):
    g = _graph(a.graph)
    p1, p2 = _map(a.map_a, g), _map(a.map_b, g)
    steps = _steps(a.plan)
    try:
        end = run_plan(g, p1, steps)
    except InvalidSwitch as exc:
        out.line(f"fail: {exc}")
        out.kv(ok=False, steps=len(steps), reason=exc.reason, at=exc.step)
        raise _Quiet() from None
    if map_signature(end) != map_signature(p2):
        out.line("fail: plan ends elsewhere")
        out.kv(ok=False, steps=len(steps), reason="WrongEnd")
        raise _Quiet()
    out.line(f"ok: {len(steps)} steps")
    out.kv(ok=True, steps=len(steps))


def cmd_oracle(a, out):
    g = _graph(a.graph)
    sg = build_switch_graph(g, a.k, cap=a.cap)
    out.kv(nodes=len(sg.nodes), edges=sg.edge_count, components=sg.component_count,
           connected=sg.is_connected())
    if a.pair:
        p1, p2 = _map(a.pair[0], g), _map(a.pair[1], g)
        d = oracle_distance(sg, map_signature(p1), map_signature(p2))
        out.kv(distance=d, same_component=d is not None)
        if a.diameter:
            out.kv(diameter=oracle_diameter(sg, map_signature(p1)))
    elif a.diameter:
        reps = {}
        for i, c in enumerate(sg.component_id):
            reps.setdefault(c, i)
        out.kv(diameter=max(oracle_diameter(sg, sg.nodes[i]) for i in reps.values()))


def cmd_gen(a, out):
    params = {}
    for item in a.param:
        if "=" not in item:
            raise UsageError(f"parameter {item!r} is not key=value")
        key, val = item.split("=", 1)
        try:
            params[key] = int(val)
        except ValueError:
            raise UsageError(f"parameter {key} must be an integer") from None
    if a.contractible:
        params["contractible"] = 1
    cnf = gen.parse_dimacs(_read(a.cnf)) if a.cnf else None
    inst = gen.generate(a.kind, params, cnf)
    plan = None
    if a.witness:
        tau = None
        if a.tau is not None:
            if cnf is None or len(a.tau) != cnf.n or set(a.tau) - set("TF"):
                raise UsageError("--tau takes one T/F letter per variable")
            tau = tuple(c == "T" for c in a.tau)
        plan = gen.witness(inst, tau)
    gen.write_bundle(inst, a.out, plan)
    out.kv(kind=inst.kind, n=inst.graph.n, k=inst.meta["k"], budget=inst.meta.get("budget"),
           lower_bound=inst.meta.get("lowerBound"), witness=None if plan is None else len(plan),
           out=a.out)


def cmd_audit(a, out):
    inst, steps = gen.read_bundle(a.bundle)
    if a.plan:
        steps = _steps(a.plan)
    if steps is None:
        raise UsageError("bundle has no witness.plan; pass a plan file")
    rep = gen.audit_plan(inst, steps)
    out.kv(kind=rep.kind, total=rep.total)
    for k, v in rep.components.items():
        out.row(component=k, count=v, slack=rep.slack.get(k))
    for k, v in rep.bounds.items():
        if k not in rep.components:
            out.row(bound=k, value=v, slack=rep.slack[k])


def _require(g, p):
    problems = validate_map(g, p)
    if problems:
        raise InvalidMap("; ".join(f"{k}({d})" for k, d in problems))


def _emit_plan(a, out, plan: SwitchPlan):
    if getattr(a, "out", None):
        Path(a.out).write_text(dump_plan(plan.steps))
        out.kv(length=len(plan), out=a.out)
    else:
        out.kv(length=len(plan))
        for u, v, w in plan.steps:
            out.row(u=u, v=v, w=w)


class _Quiet(DomainError):
    """A domain failure already reported on stdout."""


# --- wiring -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kdistrict", description=__doc__.splitlines()[0])
    ap.add_argument("--json", action="store_true", help="print one JSON object instead of key=value lines")
    sub = ap.add_subparsers(dest="verb", required=True)

    s = sub.add_parser("validate", help="check that a map partitions the graph into connected districts")
    s.add_argument("graph")
    s.add_argument("map")
    s.set_defaults(fn=cmd_validate)

    s = sub.add_parser("switches", help="list every valid switch (u, v, w)")
    s.add_argument("graph")
    s.add_argument("map")
    s.set_defaults(fn=cmd_switches)

    s = sub.add_parser("apply", help="apply a plan, printing each intermediate signature")
    s.add_argument("graph")
    s.add_argument("map")
    s.add_argument("plan")
    s.set_defaults(fn=cmd_apply)

    s = sub.add_parser("contract", help="plan that shrinks one district to a target vertex")
    s.add_argument("graph")
    s.add_argument("map")
    s.add_argument("district", type=int, help="district index in the map file (0-based)")
    s.add_argument("target", type=int)
    s.add_argument("--out")
    s.set_defaults(fn=cmd_contract)

    s = sub.add_parser("connected", help="decide whether the switch graph for k districts is connected")
    s.add_argument("graph")
    s.add_argument("k", type=int)
    s.set_defaults(fn=cmd_connected)

    s = sub.add_parser("plan", help="switch sequence between two contractible maps")
    s.add_argument("graph")
    s.add_argument("map_a")
    s.add_argument("map_b")
    s.add_argument("--out", help="write the plan here and a phase summary to OUT.json")
    s.set_defaults(fn=cmd_plan)

    s = sub.add_parser("verify", help="check a plan end to end")
    s.add_argument("graph")
    s.add_argument("map_a")
    s.add_argument("plan")
    s.add_argument("map_b")
    s.set_defaults(fn=cmd_verify)

    s = sub.add_parser("oracle", help="brute-force switch graph: components, distance, diameter")
    s.add_argument("graph")
    s.add_argument("k", type=int)
    s.add_argument("--pair", nargs=2, metavar=("MAP_A", "MAP_B"))
    s.add_argument("--diameter", action="store_true")
    s.add_argument("--cap", type=int, default=DEFAULT_CAP, help="refuse graphs with more vertices")
    s.set_defaults(fn=cmd_oracle)

    s = sub.add_parser("gen", help="write an instance bundle")
    s.add_argument("kind", choices=gen.KINDS)
    s.add_argument("param", nargs="*", help="integer parameters such as n=6 k=3 or r=4 q=3 l=2")
    s.add_argument("--cnf", help="DIMACS formula for sp and conn")
    s.add_argument("--contractible", action="store_true", help="sp only: chain variant")
    s.add_argument("--witness", action="store_true", help="also write witness.plan")
    s.add_argument("--tau", help="truth assignment as T/F letters, e.g. TFT")
    s.add_argument("--out", required=True)
    s.set_defaults(fn=cmd_gen)

    s = sub.add_parser("audit", help="cost decomposition of a plan on a bundle")
    s.add_argument("bundle")
    s.add_argument("plan", nargs="?")
    s.set_defaults(fn=cmd_audit)
    return ap


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    out = _Out(args.json, stdout)
    try:
        args.fn(args, out)
    except _Quiet:
        out.finish()
        return 1
    except UsageError as exc:
        print(f"error={getattr(exc, 'code', 'UsageError')} message={exc}", file=stderr)
        return 2
    except DomainError as exc:
        print(f"error={getattr(exc, 'code', 'DomainError')} message={exc}", file=stderr)
        return 1
    out.finish()
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
