"""dpcstar command line: solve, check, gen, bench.

Exit codes: 0 consistent / property holds, 1 inconsistent / property fails,
2 usage or parse error, 3 solution extraction failed.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import io as nio
from .bench import ALGOS, SWEEPABLE, Suite, run_suite, to_csv
from .consistency import enforce_strong_pc, is_strongly_dpc
from .core import NetworkError, is_solution
from .dpc import ExtractionError, default_order, dpc, dpc_star, extract_solution
from .elimination import Language, check_helly
from .generators import GENERATORS, GenerationError, GenParams, gen_inconsistent_variant, gen_random_network
from .graph import ConstraintGraph, find_peo, is_peo, mcs_order
from .majority import NaryRelation, is_2_decomposable, is_closed_under, is_tree_preserving, pairwise_join
from .oracle import SearchSpaceError, enumerate_solutions

OK, FAIL, USAGE, EXTRACT = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _order(net, choice: str | None) -> list[str]:
    """The algorithm order ≺. An explicit list is an elimination order and
    is reversed."""
    if choice is None:
        return default_order(net)
    if choice == "declaration":
        return list(net.variables)
    if choice == "reverse-mcs":
        return mcs_order(ConstraintGraph.of(net))
    elim = [v.strip() for v in choice.split(",") if v.strip()]
    if sorted(elim) != sorted(net.variables):
        raise UsageError("--order must list every variable exactly once")
    return elim[::-1]


def _print_assignment(net, sigma, out):
    for v, a in net.labels(sigma).items():
        print(f"  {v} = {a}", file=out)


def cmd_solve(args, out) -> int:
    doc = nio.read_network(args.file)
    net = doc.network
    if args.extract and args.algo != "dpcstar":
        raise UsageError("--extract needs --algo dpcstar")
    if args.algo == "oracle":
        sols = enumerate_solutions(net, limit=1)
        print("Consistent" if sols else "Inconsistent", file=out)
        if sols:
            _print_assignment(net, sols[0], out)
        return OK if sols else FAIL
    if args.algo == "pc":
        work = net.copy()
        verdict = enforce_strong_pc(work)
        print(verdict, file=out)
        return OK if str(verdict) == "Ok" else FAIL
    order = _order(net, args.order)
    res = (dpc if args.algo == "dpc" else dpc_star)(net, order)
    print(res.verdict, file=out)
    if not res.consistent:
        if res.failed_at:
            print(f"  detected at {res.failed_at}", file=out)
        return FAIL
    print(f"  fill edges: {len(res.fill_edges)}  revisions: {res.revisions}", file=out)
    if args.extract:
        try:
            sigma = extract_solution(res, order, strict=True)
        except ExtractionError as e:
            print(f"extraction failed: {e}", file=sys.stderr)
            return EXTRACT
        if not is_solution(net, sigma):
            print("extraction produced a non-solution; refusing to print it", file=sys.stderr)
            return EXTRACT
        print("solution:", file=out)
        _print_assignment(net, sigma, out)
    return OK


def cmd_check(args, out) -> int:
    raw = nio.load(args.file)
    prop = args.property
    if prop == "helly":
        lang = nio.language_from_dict(raw) if nio.is_language_doc(raw) else Language.from_network(
            nio.network_from_dict(raw).network)
        res = check_helly(lang)
        print("Holds" if res else "Witness", file=out)
        if not res:
            print(json.dumps(res.witness, indent=1, ensure_ascii=False), file=out)
        return OK if res else FAIL
    if nio.is_language_doc(raw):
        raise UsageError(f"property {prop} needs a network file")
    doc = nio.network_from_dict(raw)
    net = doc.network
    g = ConstraintGraph.of(net)
    if prop == "chordal":
        peo = find_peo(g)
        print(peo is not None, file=out)
        if peo is not None:
            print("PEO: " + ",".join(peo), file=out)
        return OK if peo is not None else FAIL
    if prop == "peo":
        if not args.order or args.order in ("declaration", "reverse-mcs"):
            raise UsageError("--property peo needs --order with an explicit elimination order")
        ok = is_peo(g, _order(net, args.order)[::-1])
    elif prop == "strongly-dpc":
        ok = is_strongly_dpc(net, _order(net, args.order))
    elif prop == "majority-closed":
        if doc.majority is None:
            raise UsageError("file has no majority tables")
        bad = [(u, v) for u, v in net.scopes() if not is_closed_under(net.relation(u, v), doc.majority)]
        ok = not bad
        for u, v in bad:
            print(f"  not closed: ({u}, {v})", file=out)
    elif prop == "tree-preserving":
        missing = {v for s in net.scopes() for v in s} - set(doc.trees)
        if missing:
            raise UsageError(f"no tree for {sorted(missing)}")
        bad = []
        for u, v in net.scopes():
            r = net.relation(u, v)
            if not (is_tree_preserving(r, doc.trees[u], doc.trees[v])
                    and is_tree_preserving(r.inverse(), doc.trees[v], doc.trees[u])):
                bad.append((u, v))
        ok = not bad
        for u, v in bad:
            print(f"  not tree-preserving: ({u}, {v})", file=out)
    elif prop == "2decomposable":
        # the full solution relation of a binary network always is; the
        # projection onto a subset need not be
        vs = [v.strip() for v in args.vars.split(",")] if args.vars else list(net.variables)
        for v in vs:
            net.index(v)
        if len(vs) > 4 or len(set(vs)) != len(vs):
            raise UsageError("--vars must name at most 4 distinct variables")
        sols = enumerate_solutions(net)
        rel = NaryRelation(tuple(net.domains[v] for v in vs),
                           frozenset(tuple(s[v] for v in vs) for s in sols))
        ok = is_2_decomposable(rel)
        for t in sorted(pairwise_join(rel) - rel.tuples):
            print("  in the pairwise join only: " + ",".join(d.values[a] for d, a in zip(rel.domains, t)), file=out)
    else:  # argparse restricts choices
        raise UsageError(prop)
    print(ok, file=out)
    return OK if ok else FAIL


def _params(args, seed) -> GenParams:
    return GenParams(args.n, args.d, args.rho, args.l, seed)


def cmd_gen(args, out) -> int:
    p = _params(args, args.seed)
    if args.inconsistent and args.family != "majority":
        raise UsageError("--inconsistent needs --family majority")
    if args.family == "random":
        net, trees, phi = gen_random_network(p), None, None
    else:
        inst = GENERATORS[args.family](p)
        net, trees, phi = inst.network, inst.trees, inst.majority
        if args.inconsistent:
            try:
                net = gen_inconsistent_variant(net, phi, args.seed)
            except GenerationError as e:
                print(f"dpcstar: {e}", file=sys.stderr)
                return FAIL
    text = nio.dumps(nio.network_to_dict(net, trees, phi))
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        out.write(text)
    return OK


def _sweep(text: str):
    name, _, vals = text.partition("=")
    name = name.strip()
    if name not in SWEEPABLE or not vals:
        raise UsageError("--sweep takes PARAM=v1,v2,... with PARAM one of n, d, rho, l")
    try:
        values = tuple(float(v) for v in vals.split(","))
    except ValueError:
        raise UsageError(f"bad sweep values {vals!r}") from None
    return name, values


def cmd_bench(args, out) -> int:
    name, values = _sweep(args.sweep)
    algos = tuple(a.strip() for a in args.algos.split(","))
    try:
        suite = Suite(args.family, _params(args, args.seed), name, values, args.reps, algos)
    except ValueError as e:
        raise UsageError(str(e)) from None
    text = to_csv(run_suite(suite, timing=not args.no_timing, jobs=args.jobs))
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
    else:
        out.write(text)
    return OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dpcstar", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="cmd", required=True)
    order_help = "declaration | reverse-mcs | comma-separated elimination order (eliminated first)"

    s = sub.add_parser("solve", help="decide a network file")
    s.add_argument("file")
    s.add_argument("--algo", choices=["dpc", "dpcstar", "pc", "oracle"], default="dpcstar")
    s.add_argument("--order", help=order_help)
    s.add_argument("--extract", action="store_true", help="print a backtrack-free solution (dpcstar)")
    s.set_defaults(func=cmd_solve)

    c = sub.add_parser("check", help="test a structural or language property")
    c.add_argument("file")
    c.add_argument("--property", required=True, choices=[
        "chordal", "peo", "helly", "majority-closed", "tree-preserving", "2decomposable", "strongly-dpc"])
    c.add_argument("--order", help=order_help)
    c.add_argument("--vars", help="2decomposable: project the solutions onto these variables (at most 4)")
    c.set_defaults(func=cmd_check)

    def params(p, n=8, d=4, rho=0.5, l=0.3):
        p.add_argument("--n", type=int, default=n)
        p.add_argument("--d", type=int, default=d)
        p.add_argument("--rho", type=float, default=rho)
        p.add_argument("--l", type=float, default=l)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out")

    g = sub.add_parser("gen", help="write a random instance")
    g.add_argument("--family", choices=sorted(GENERATORS) + ["random"], default="majority")
    g.add_argument("--inconsistent", action="store_true", help="tighten until the oracle finds no solution")
    params(g)
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("bench", help="timing sweep as CSV")
    b.add_argument("--family", choices=sorted(GENERATORS), default="tree-preserving")
    b.add_argument("--sweep", required=True, help="PARAM=v1,v2,... (PARAM in n, d, rho, l)")
    b.add_argument("--reps", type=int, default=20)
    b.add_argument("--algos", default="dpcstar,pc", help="comma list from " + ",".join(ALGOS))
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--no-timing", action="store_true", help="leave time_ms empty (byte-stable output)")
    params(b, n=20, d=30, rho=0.5, l=0.3)
    b.set_defaults(func=cmd_bench)
    return ap


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return USAGE if e.code else OK
    try:
        return args.func(args, out)
    except (UsageError, NetworkError, ValueError, OSError, SearchSpaceError) as e:
        print(f"dpcstar: {e}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
