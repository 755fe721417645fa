"""Acceptance criteria 1-12. Each test records one pass/fail line, printed
in the terminal summary."""

import time
from functools import lru_cache

import numpy as np
import pytest

from conftest import ACCEPTANCE, load_doc
from dpcstar import (
    ConstraintGraph,
    Domain,
    GenerationError,
    GenParams,
    Language,
    MajorityOperation,
    Relation,
    TreeDomain,
    Verdict,
    check_global_consistency,
    check_helly,
    check_vep_instance,
    close_under,
    default_order,
    dpc,
    dpc_star,
    eliminate,
    enforce_strong_pc,
    enumerate_solutions,
    extract_solution,
    gen_inconsistent_variant,
    gen_majority_closed_network,
    gen_majority_op,
    gen_random_network,
    is_closed_under,
    is_path_consistent,
    is_peo,
    is_solution,
    is_strongly_dpc,
    standard_tree_majority,
    tree_closure_equivalence,
)
from dpcstar.bench import Suite, run_suite, summary
from dpcstar.cli import main
from dpcstar.oracle import prefix_extension_failures
from helpers import random_ac_matrix, random_language, random_language_network, solution_set, stars


def report(k, ok, detail):
    ACCEPTANCE[k] = (bool(ok), detail)
    print(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def tuples(net, u, v):
    return set(net.relation(u, v).tuples())


# -- golden examples ---------------------------------------------------------


def test_criterion_01_example5():
    t0 = time.perf_counter()
    net = load_doc("example5.json").network
    order = ["x", "y", "z", "w"]
    d = dpc(net, order)
    out = d.network
    got = {
        "verdict": d.verdict,
        "D": {v: out.domain_values(v) for v in "xyz"} if out else None,
        "R": {p: tuples(out, *p) for p in [("x", "y"), ("x", "z"), ("z", "y")]} if out else None,
    }
    want = {
        "verdict": Verdict.PROCESSED,
        "D": {"x": ["a"], "y": ["c"], "z": ["b"]},
        "R": {("x", "y"): {("a", "c")}, ("x", "z"): {("a", "b")}, ("z", "y"): {("b", "c")}},
    }
    star = dpc_star(net, order).verdict
    nsol = len(enumerate_solutions(net))
    dt = time.perf_counter() - t0
    ok = got == want and star is Verdict.INCONSISTENT and nsol == 0 and dt < 1
    report(1, ok, f"dpc={d.verdict} dpc*={star} oracle={nsol} solutions, {dt:.3f}s")


def test_criterion_02_example1():
    t0 = time.perf_counter()
    net = load_doc("example1.json").network
    pc = is_path_consistent(net, ("v3", "v2", "v4"))
    sols = solution_set(net, enumerate_solutions(net))
    aaaa = tuple(net.assignment({v: "a" for v in net.variables})[v] for v in net.variables)
    order = default_order(net)
    res = dpc_star(net, order)
    sigma = extract_solution(res, order) if res.consistent else None
    verified = sigma is not None and is_solution(net, sigma)
    dt = time.perf_counter() - t0
    ok = pc is False and aaaa in sols and res.verdict is Verdict.PROCESSED and verified and dt < 1
    report(2, ok, f"path-consistent={pc} <a,a,a,a> found={aaaa in sols} dpc*={res.verdict} "
                  f"extracted={net.labels(sigma) if sigma else None}, {dt:.3f}s")


def test_criterion_03_example3():
    t0 = time.perf_counter()
    net = load_doc("example3.json").network
    res = dpc_star(net, ["v1", "v2", "v3"])
    reduced = eliminate(net, "v3")
    dt = time.perf_counter() - t0
    ok = res.verdict is Verdict.INCONSISTENT and reduced.domain_values("v2") == ["0"] and dt < 1
    report(3, ok, f"dpc*={res.verdict} D_2 after eliminating v3={reduced.domain_values('v2')}, {dt:.3f}s")


# -- majority-closed agreement ---------------------------------------------


@lru_cache(maxsize=None)
def _criterion4():
    """500 instances; odd draws are tightened into inconsistent variants
    (n >= 3 and d >= 2 there, since a lone constraint or a unit domain
    cannot be made inconsistent by shrinking nonempty relations)."""
    rng = np.random.default_rng(4)
    t0 = time.perf_counter()
    rows = []
    for i in range(500):
        variant = i % 2 == 1
        n = int(rng.integers(3 if variant else 1, 9))
        d = int(rng.integers(2 if variant else 1, 5))
        p = GenParams(n, d, float(rng.choice([0.3, 0.5])), float(rng.choice([0.3, 0.5])), int(rng.integers(2**31)))
        inst = gen_majority_closed_network(p)
        net = inst.network
        if variant:
            try:
                net = gen_inconsistent_variant(net, inst.majority, p.seed)
            except GenerationError:
                variant = False
        order = default_order(net)
        res = dpc_star(net, order)
        rows.append((net, order, res, variant, bool(enumerate_solutions(net, limit=1))))
    return rows, time.perf_counter() - t0


def test_criterion_04_oracle_agreement():
    rows, dt = _criterion4()
    agree = sum(res.consistent == truth for _, _, res, _, truth in rows)
    incons = sum(not truth for *_, truth in rows)
    variants = sum(v for *_, v, _ in rows)
    ok = agree == len(rows) and 0 < incons < len(rows) and dt < 120
    report(4, ok, f"{agree}/{len(rows)} agree ({incons} inconsistent, {variants} variants), {dt:.1f}s")


def test_criterion_05_backtrack_free():
    rows, _ = _criterion4()
    checked = failures = 0
    for net, order, res, _, truth in rows:
        if not truth:
            continue
        checked += 1
        sigma = extract_solution(res, order) if res.consistent else None
        if sigma is None or not is_solution(net, sigma) or prefix_extension_failures(res.network, order):
            failures += 1
    ok = failures == 0 and checked > 0
    report(5, ok, f"{checked - failures}/{checked} consistent instances extract and extend every prefix")


# -- DPC on arbitrary languages ------------------------------------------------


def test_criterion_06_dpc_output():
    rng = np.random.default_rng(6)
    processed = bad = unsound = 0
    for _ in range(200):
        p = GenParams(int(rng.integers(2, 8)), int(rng.integers(2, 5)), float(rng.uniform(0.2, 1.0)),
                      float(rng.uniform(0.3, 0.8)), int(rng.integers(2**31)))
        net = gen_random_network(p)
        order = list(rng.permutation(net.variables))
        res = dpc(net, order)
        before = solution_set(net, enumerate_solutions(net))
        if not res.consistent:
            unsound += bool(before)
            continue
        processed += 1
        out = res.network
        ok = (is_peo(ConstraintGraph.of(out), order[::-1]) and is_strongly_dpc(out, order)
              and solution_set(out, enumerate_solutions(out)) == before)
        bad += not ok
    ok = bad == 0 and unsound == 0 and processed > 0
    report(6, ok, f"{processed - bad}/{processed} Processed outputs pass; {unsound} unsound Inconsistent verdicts")


def _vep_holds(lang):
    """Exhaustive side: every star with at most |D| leaves (a minimal
    Helly-violating family has at most |D| members) keeps VEP at its
    centre, and so does every sampled network with at most 4 variables."""
    for net in stars(lang):
        if not check_vep_instance(net, "x"):
            return False
    rng = np.random.default_rng(len(lang.relations))
    for _ in range(20):
        net = random_language_network(rng, lang, int(rng.integers(2, 5)))
        if not all(check_vep_instance(net, x) for x in net.variables):
            return False
    return True


def test_criterion_07_helly_vs_vep():
    rng = np.random.default_rng(7)
    t0 = time.perf_counter()
    agree = holds = 0
    for _ in range(100):
        lang = random_language(rng)
        h = bool(check_helly(lang))
        holds += h
        agree += h == _vep_holds(lang)
    dt = time.perf_counter() - t0
    ok = agree == 100 and 0 < holds < 100 and dt < 300
    report(7, ok, f"{agree}/100 agree ({holds} with Helly), {dt:.1f}s")


def test_criterion_08_helly_counterexample():
    total = good = 0
    ops = [(d, gen_majority_op(d, seed)) for d in range(3, 8) for seed in range(20)]
    ops.append((3, load_doc("example5.json").majority))
    for d, phi in ops:
        dom = Domain("D", tuple("abcdefg"[:d]))
        triple = [Relation.from_tuples(dom, dom, t) for t in (
            [("a", "a"), ("a", "b")], [("a", "b"), ("a", "c")], [("a", "a"), ("a", "c")])]
        total += 1
        good += all(is_closed_under(r, phi) for r in triple) and not check_helly(Language([dom], triple))
    report(8, good == total, f"{good}/{total} majority operations: triple closed and Helly witness found")


def test_criterion_09_global_consistency():
    rng = np.random.default_rng(9)
    ok_count = good = 0
    for _ in range(100):
        p = GenParams(int(rng.integers(3, 8)), int(rng.integers(2, 5)), float(rng.choice([0.3, 0.5, 0.7])),
                      float(rng.choice([0.2, 0.3, 0.5])), int(rng.integers(2**31)))
        net = gen_majority_closed_network(p).network
        if enforce_strong_pc(net) is not Verdict.OK:
            continue
        ok_count += 1
        good += check_global_consistency(net, 3)
    ok = good == ok_count == 100
    report(9, ok, f"{good}/{ok_count} strongly path-consistent outputs are 3-globally consistent")


def _random_tree(rng, dom):
    return TreeDomain(dom, tuple((i, int(rng.integers(i))) for i in range(1, len(dom))))


def test_criterion_10_tree_closure():
    rng = np.random.default_rng(10)
    agree = 0
    for k in range(200):
        di = Domain("Di", tuple(str(a) for a in range(int(rng.integers(2, 11)))))
        dj = Domain("Dj", tuple(str(a) for a in range(int(rng.integers(2, 11)))))
        ti, tj = _random_tree(rng, di), _random_tree(rng, dj)
        m = random_ac_matrix(rng, len(di), len(dj), rng.uniform(0.05, 0.6))
        r = Relation(di, dj, m)
        if k % 2:  # close under the tree majorities for positive cases
            r = close_under(r, MajorityOperation({"Di": standard_tree_majority(ti), "Dj": standard_tree_majority(tj)}))
        agree += tree_closure_equivalence(r, ti, tj)
    report(10, agree == 200, f"{agree}/200 relations: majority-closure agrees with tree-preservation")


# -- benchmark ---------------------------------------------------------------


@pytest.mark.slow
def test_criterion_11_scaling_trend():
    ns = (20, 40, 60, 80, 100, 120)
    suite = Suite("tree-preserving", GenParams(20, 30, 0.5, 0.3, seed=0), "n", ns, reps=20)
    t0 = time.perf_counter()
    rows = run_suite(suite)
    dt = time.perf_counter() - t0
    means = summary(rows)
    star = {int(k[1][0]): v for k, v in means.items() if k[0] == "dpcstar"}
    pc = {int(k[1][0]): v for k, v in means.items() if k[0] == "pc"}
    below = all(star[n] < pc[n] for n in ns)
    growth = star[120] / star[20]
    ok = below and growth <= 8 and dt < 600
    pts = " ".join(f"n={n}:{star[n]:.0f}/{pc[n]:.0f}ms" for n in ns)
    report(11, ok, f"dpc* below pc at every n={below}; growth={growth:.1f}x (limit 8); {dt:.0f}s; {pts}")


def test_criterion_12_determinism(tmp_path):
    args = ["bench", "--family", "majority", "--sweep", "n=6,10", "--reps", "3", "--d", "4", "--seed", "12",
            "--algos", "dpcstar,dpc,pc"]
    files = []
    for k, extra in enumerate([["--no-timing"], ["--no-timing"], ["--no-timing", "--jobs", "2"], [], []]):
        f = tmp_path / f"run{k}.csv"
        assert main(args + extra + ["--out", str(f)]) == 0
        files.append(f.read_bytes())
    untimed_same = files[0] == files[1] == files[2]
    drop = lambda b: [line.split(b",")[:9] + line.split(b",")[10:] for line in b.splitlines()]
    timed_same = drop(files[3]) == drop(files[4]) == drop(files[0])
    report(12, untimed_same and timed_same,
           f"untimed reruns byte-identical={untimed_same}; timed reruns equal outside time_ms={timed_same}")
