import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kdistrict.districts import DistrictMap, is_contractible_map, map_signature, run_plan
from kdistrict.errors import IncontractibleInput, MismatchedK, NotBiconnected, NotPseudoCanonical
from kdistrict.graph import Graph
from kdistrict.planner import (
    Unreachable,
    UnsupportedPair,
    align_pseudo_canonical,
    canonical_biconnected,
    is_pseudo_canonical,
    length_bound,
    plan_path,
    plan_path_report,
    pseudo_canonical,
)
from strategies import graph_and_map, random_map

STAR = Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)])


def _ends_at(g, p, plan, q):
    return map_signature(run_plan(g, p, plan.steps)) == map_signature(q)


@settings(max_examples=120, deadline=None)
@given(graph_and_map(min_n=3, max_n=9, biconnected=True), st.integers(0, 2**32 - 1))
def test_canonical_form_ignores_the_start(gp, seed):
    g, p = gp
    q = random_map(g, p.k, random.Random(seed))
    plan_p, end_p = canonical_biconnected(g, p)
    plan_q, end_q = canonical_biconnected(g, q)
    assert map_signature(end_p) == map_signature(end_q)
    assert _ends_at(g, p, plan_p, end_p)
    assert len(plan_p) <= length_bound(g, p.k)


@settings(max_examples=150, deadline=None)
@given(graph_and_map(min_n=2, max_n=9), st.integers(0, 2**32 - 1))
def test_plans_between_contractible_maps(gp, seed):
    g, p = gp
    q = random_map(g, p.k, random.Random(seed))
    if not (is_contractible_map(g, p) and is_contractible_map(g, q)):
        return
    plan, report = plan_path_report(g, p, q)
    assert _ends_at(g, p, plan, q)
    assert report.length == len(plan) <= report.bound == 4 * p.k * g.n
    labels = [label for label, _ in report.phases]
    assert labels[-2:] == ["align", "unwind"]
    starts = [i for _, i in report.phases]
    assert starts == sorted(starts)


@settings(max_examples=100, deadline=None)
@given(graph_and_map(min_n=2, max_n=9))
def test_pseudo_canonical_output(gp):
    g, p = gp
    if not is_contractible_map(g, p):
        with pytest.raises(IncontractibleInput):
            pseudo_canonical(g, p)
        return
    plan, q = pseudo_canonical(g, p)
    assert _ends_at(g, p, plan, q)
    assert is_pseudo_canonical(g, q)
    loop = align_pseudo_canonical(g, q, q)
    assert _ends_at(g, q, loop, q)


def test_unreachable_and_unsupported():
    # vertex 0 carries pendants 1 and 2 and the tail 0-3-4
    g = Graph.from_edges(5, [(0, 1), (0, 2), (0, 3), (3, 4)])
    m = lambda *ds: DistrictMap.from_districts(5, ds)
    free, pinned = m([1], [2], [0, 3, 4]), m([0, 1, 2], [3], [4])
    assert is_contractible_map(g, free) and not is_contractible_map(g, pinned)
    assert isinstance(plan_path(g, free, pinned), Unreachable)
    assert isinstance(plan_path(g, pinned, free), Unreachable)
    assert plan_path_report(g, free, pinned)[1] is None
    assert isinstance(plan_path(g, m([0, 1, 2], [3, 4]), m([1], [0, 2, 3, 4])), UnsupportedPair)


def test_pair_guards():
    tri = Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
    with pytest.raises(MismatchedK):
        plan_path(tri, DistrictMap.from_districts(3, [[0, 1, 2]]), DistrictMap.from_districts(3, [[0], [1, 2]]))
    with pytest.raises(NotBiconnected):
        canonical_biconnected(STAR, DistrictMap.from_districts(4, [[0, 1, 2, 3]]))
    with pytest.raises(NotPseudoCanonical):
        lollipop = Graph.from_edges(5, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4)])
        p = DistrictMap.from_districts(5, [[0, 1], [2, 3, 4]])
        align_pseudo_canonical(lollipop, p, p)


def test_single_district_plan_is_empty():
    g = Graph.from_edges(2, [(0, 1)])
    p = DistrictMap.from_districts(2, [[0, 1]])
    assert len(plan_path(g, p, p)) == 0
