from itertools import combinations, permutations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dpcstar import Verdict, enforce_ac, enforce_strong_pc, is_path_consistent, is_strongly_dpc
from dpcstar.dpc import dpc_star
from helpers import brute_solutions, small_network

seeds = st.integers(0, 2**31)


def naive_ac(net):
    """Domains after deleting unsupported values until nothing changes."""
    dom = {v: net.active[v].copy() for v in net.variables}
    changed = True
    while changed:
        changed = False
        for u, v in net.scopes():
            for x, y in ((u, v), (v, u)):
                m = net.matrix(x, y) & dom[y][None, :]
                keep = dom[x] & m.any(axis=1)
                if not np.array_equal(keep, dom[x]):
                    dom[x], changed = keep, True
    return dom


def naive_strong_pc(net):
    """Relations on every pair and domains after plain triple revision."""
    vs = net.variables
    dom = {v: net.active[v].copy() for v in vs}
    rel = {(u, v): net.effective(u, v).copy() for u in vs for v in vs if u != v}
    changed = True
    while changed:
        changed = False
        for i, j in rel:
            new = rel[i, j] & dom[i][:, None] & dom[j][None, :]
            for k in vs:
                if k not in (i, j):
                    new &= (rel[i, k].astype(int) @ rel[k, j].astype(int)) > 0
            if not np.array_equal(new, rel[i, j]):
                rel[i, j], rel[j, i], changed = new, new.T, True
            keep = dom[i] & new.any(axis=1)
            if not np.array_equal(keep, dom[i]):
                dom[i], changed = keep, True
    return dom, rel


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_ac_matches_naive_fixpoint(seed):
    net = small_network(np.random.default_rng(seed))
    want = naive_ac(net)
    before = brute_solutions(net)
    work = net.copy()
    verdict = enforce_ac(work)
    if any(not m.any() for m in want.values()):
        assert verdict is Verdict.INCONSISTENT
    else:
        assert verdict is Verdict.OK
        assert all(np.array_equal(work.active[v], want[v]) for v in net.variables)
        assert brute_solutions(work) == before


def test_ac_leaves_example1_alone(ex1):
    work = ex1.copy()
    stats = {}
    assert enforce_ac(work, stats) is Verdict.OK
    assert work == ex1 and stats["revisions"] == 8


def test_path_consistency_example1(ex1):
    assert not is_path_consistent(ex1, ("v3", "v2", "v4"))
    assert is_path_consistent(ex1, ("v2", "v3", "v4"))
    work = ex1.copy()
    assert enforce_strong_pc(work) is Verdict.OK
    for u, v in combinations(work.variables, 2):
        for k in work.variables:
            if k not in (u, v) and work.has_constraint(u, v):
                assert is_path_consistent(work, (u, k, v))
    assert is_strongly_dpc(work, ["v1", "v2", "v3", "v4"])
    assert brute_solutions(work) == brute_solutions(ex1)


def test_path_check_guards(ex1):
    with pytest.raises(ValueError):
        is_path_consistent(ex1, ("v1", "v2"))
    with pytest.raises(ValueError):
        is_path_consistent(ex1, ("v1", "v2", "v1"))
    with pytest.raises(ValueError):
        is_path_consistent(ex1, ("v1", "v2", "v3"))  # no R_13


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_strong_pc_matches_naive_fixpoint(seed):
    net = small_network(np.random.default_rng(seed), n=int(seed % 5) + 1)
    dom, rel = naive_strong_pc(net)
    work = net.copy()
    verdict = enforce_strong_pc(work)
    empty = any(not m.any() for m in dom.values())
    if empty:
        assert verdict is Verdict.INCONSISTENT and work == net
        return
    assert verdict is Verdict.OK
    for v in net.variables:
        assert np.array_equal(work.active[v], dom[v])
    for (u, v), m in rel.items():
        assert np.array_equal(work.effective(u, v), m)
    assert brute_solutions(work) == brute_solutions(net)
    # the result is strongly DPC along every ordering
    for order in list(permutations(net.variables))[:6]:
        assert is_strongly_dpc(work, order)


def test_strong_pc_on_example5(ex5_doc):
    net = ex5_doc.network
    work = net.copy()
    assert enforce_strong_pc(work) is Verdict.INCONSISTENT
    assert work == net


def test_strongly_dpc_predicate(ex1, ex5_doc):
    assert not is_strongly_dpc(ex5_doc.network, ["x", "y", "z", "w"])
    order = ["v1", "v2", "v3", "v4"]
    assert not is_strongly_dpc(ex1, order)
    out = dpc_star(ex1, order).network
    assert is_strongly_dpc(out, order)
