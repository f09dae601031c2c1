import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kdistrict.districts import (
    DistrictMap,
    apply_switch,
    check_switch,
    contract_district,
    dump_map,
    dump_plan,
    is_contractible_district,
    is_contractible_map,
    load_map,
    load_plan_steps,
    make_plan,
    map_signature,
    run_plan,
    valid_switches,
    validate_map,
)
from kdistrict.errors import IncontractibleDistrict, InvalidSwitch, InvalidTarget, ParseError
from kdistrict.graph import Graph, block_tree, is_connected_subset
from kdistrict.oracle import oracle_contractible
from strategies import graph_and_map

PATH4 = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)])


def test_validate_reports_each_problem():
    assert validate_map(PATH4, DistrictMap.from_districts(4, [[0, 1], [2, 3]])) == []
    kinds = lambda p: [k for k, _ in validate_map(PATH4, p)]
    assert kinds(DistrictMap.from_districts(4, [[0, 2], [1, 3]])) == ["DisconnectedDistrict"] * 2
    assert kinds(DistrictMap.from_districts(4, [[0, 1], [1, 2, 3]])) == ["NotAPartition"]
    assert kinds(DistrictMap.from_districts(4, [[0, 1, 2, 3], []])) == ["EmptyDistrict"]
    assert kinds(DistrictMap.from_districts(3, [[0, 1, 2]])) == ["NotAPartition"]


def test_switch_reasons():
    p = DistrictMap.from_districts(4, [[0, 1, 2], [3]])
    assert check_switch(PATH4, p, (1, 2, 3)) is None
    assert check_switch(PATH4, p, (0, 1, 2)) == "SameDistrict"
    assert check_switch(PATH4, p, (0, 2, 3)) == "NotAPath"
    assert check_switch(PATH4, p, (0, 1, 3)) == "NotAPath"
    q = DistrictMap.from_districts(4, [[0], [1, 2, 3]])
    assert check_switch(PATH4, q, (3, 2, 1)) == "SameDistrict"
    assert check_switch(PATH4, q, (2, 1, 0)) is None
    s = DistrictMap.from_districts(4, [[0, 1], [2], [3]])
    assert check_switch(PATH4, s, (1, 2, 3)) == "SourceNotShared"
    with pytest.raises(InvalidSwitch):
        apply_switch(PATH4, p, (0, 1, 2))


def test_middle_vertex_cannot_leave():
    g = Graph.from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)])
    p = DistrictMap.from_districts(5, [[0, 1, 2], [3, 4]])
    assert [s for s in valid_switches(g, p) if s[1] == 1] == []
    star = Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)])
    q = DistrictMap.from_districts(4, [[0, 1, 2], [3]])
    assert check_switch(star, q, (1, 0, 3)) == "DisconnectsSource"


def test_run_plan_reports_failing_step():
    p = DistrictMap.from_districts(4, [[0, 1, 2], [3]])
    with pytest.raises(InvalidSwitch) as info:
        run_plan(PATH4, p, [(1, 2, 3), (0, 1, 3)])
    assert info.value.step == (1, (0, 1, 3))


def test_file_formats_round_trip():
    p = DistrictMap.from_districts(4, [[3, 2], [1, 0]])
    text = dump_map(p)
    assert text == "2\n0 1\n2 3\n"
    assert map_signature(load_map(text, 4)) == map_signature(p)
    steps = [(1, 2, 3), (0, 1, 2)]
    assert load_plan_steps(dump_plan(steps)) == steps
    for bad in ["", "2\n0 1\n", "x\n"]:
        with pytest.raises(ParseError):
            load_map(bad, 4)
    for bad in ["", "2\n0 1 2\n", "1\n0 1\n"]:
        with pytest.raises(ParseError):
            load_plan_steps(bad)


def test_two_leaf_blocks_make_a_district_incontractible():
    # a path's end blocks are both leaves; holding both pins the district
    g = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
    p = DistrictMap.from_districts(4, [[0, 1, 2, 3]])
    assert not is_contractible_district(g, p, 0)
    assert is_contractible_map(g, DistrictMap.from_districts(4, [[0, 1, 2], [3]]))


def test_contract_district_reaches_target():
    g = Graph.from_edges(6, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 3)])
    p = DistrictMap.from_districts(6, [[0, 1, 2, 3], [4, 5]])
    plan = contract_district(g, p, 0, 0)
    end = run_plan(g, p, plan.steps)
    assert end.districts[0] == frozenset({0})
    star = Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)])
    with pytest.raises(IncontractibleDistrict):
        contract_district(star, DistrictMap.from_districts(4, [[0, 1, 2], [3]]), 0, 1)


@settings(max_examples=200, deadline=None)
@given(graph_and_map(max_n=8))
def test_switches_keep_maps_valid_and_reverse(gp):
    g, p = gp
    assert validate_map(g, p) == []
    for s in valid_switches(g, p):
        q = apply_switch(g, p, s)
        assert validate_map(g, q) == []
        assert q.k == p.k
        assert g.degree(s[1]) > 1
        u, v, w = s
        assert map_signature(apply_switch(g, q, (w, v, u))) == map_signature(p)


@settings(max_examples=200, deadline=None)
@given(graph_and_map(max_n=7))
def test_contractibility_agrees_with_search(gp):
    g, p = gp
    t = block_tree(g)
    for i in range(p.k):
        assert is_contractible_district(g, p, i, t) == oracle_contractible(g, p, i)


@settings(max_examples=150, deadline=None)
@given(graph_and_map(min_n=2, max_n=8), st.integers(0, 2**32 - 1))
def test_contraction_plans_verify(gp, seed):
    g, p = gp
    rng = random.Random(seed)
    i = rng.randrange(p.k)
    if not is_contractible_district(g, p, i):
        return
    for target in sorted(p.districts[i]):
        try:
            plan = contract_district(g, p, i, target)
        except InvalidTarget:
            continue
        end = run_plan(g, p, plan.steps)
        assert end.districts[i] == frozenset({target})
        return


@settings(max_examples=100, deadline=None)
@given(graph_and_map(min_n=2, max_n=8))
def test_make_plan_records_endpoints(gp):
    g, p = gp
    steps = valid_switches(g, p)[:1]
    plan, end = make_plan(g, p, steps)
    assert plan.start_signature == map_signature(p) and plan.end_signature == map_signature(end)
    back = plan.reversed()
    assert map_signature(run_plan(g, end, back.steps)) == map_signature(p)
    assert all(is_connected_subset(g, d) for d in end.districts)
