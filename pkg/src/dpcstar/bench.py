"""Benchmark sweeps: fix three of (n, d, rho, l), vary the fourth, time each
algorithm on the same seeded instances and emit CSV."""

from __future__ import annotations

import csv
import io
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .consistency import enforce_strong_pc
from .dpc import default_order, dpc, dpc_star
from .generators import GENERATORS, GenParams

COLUMNS = ["algo", "family", "n", "d", "rho", "l", "seed", "rep", "result", "time_ms", "revisions"]
ALGOS = ("dpcstar", "dpc", "pc")
SWEEPABLE = ("n", "d", "rho", "l")


def run_algo(algo: str, net):
    """(result, revisions, seconds) for one call on a private copy."""
    work = net.copy()
    if algo in ("dpc", "dpcstar"):
        order = default_order(work)
        fn = dpc if algo == "dpc" else dpc_star
        t0 = time.perf_counter()
        out = fn(work, order)
        dt = time.perf_counter() - t0
        return str(out.verdict), out.revisions, dt
    if algo == "pc":
        stats: dict = {}
        t0 = time.perf_counter()
        verdict = enforce_strong_pc(work, stats)
        dt = time.perf_counter() - t0
        return str(verdict), stats.get("revisions", 0), dt
    raise ValueError(f"unknown algorithm {algo!r}")


def instance_seed(seed: int, point: int, rep: int) -> int:
    return int(np.random.SeedSequence([seed, point, rep]).generate_state(1, np.uint64)[0] >> 1)


@dataclass(frozen=True)
class Suite:
    family: str
    base: GenParams  # seed is the suite seed
    sweep: str
    values: tuple
    reps: int = 20
    algos: tuple = ("dpcstar", "pc")

    def __post_init__(self):
        if self.family not in GENERATORS:
            raise ValueError(f"unknown family {self.family!r}")
        if self.sweep not in SWEEPABLE:
            raise ValueError(f"cannot sweep {self.sweep!r}")
        if self.reps < 1 or not self.values:
            raise ValueError("need at least one rep and one sweep value")
        for a in self.algos:
            if a not in ALGOS:
                raise ValueError(f"unknown algorithm {a!r}")

    def points(self) -> list[GenParams]:
        cast = int if self.sweep in ("n", "d") else float
        return [replace(self.base, **{self.sweep: cast(v)}) for v in self.values]


def _fmt(x: float) -> str:
    return f"{x:.3f}"


def run_point(suite: Suite, index: int, p: GenParams, timing: bool = True) -> list[list[str]]:
    gen = GENERATORS[suite.family]
    per_algo = {a: [] for a in suite.algos}
    for rep in range(suite.reps):
        s = instance_seed(suite.base.seed, index, rep)
        net = gen(replace(p, seed=s)).network
        for a in suite.algos:
            per_algo[a].append((s, rep) + run_algo(a, net))
    rows = []
    head = lambda a: [a, suite.family, str(p.n), str(p.d), repr(p.rho), repr(p.l)]
    for a in suite.algos:
        for s, rep, result, revs, dt in per_algo[a]:
            rows.append(head(a) + [str(s), str(rep), result, _fmt(dt * 1000) if timing else "", str(revs)])
    for a in suite.algos:
        runs = per_algo[a]
        results = sorted({r[2] for r in runs})
        summary = results[0] if len(results) == 1 else "mixed"
        mean_t = _fmt(np.mean([r[4] for r in runs]) * 1000) if timing else ""
        mean_r = _fmt(np.mean([r[3] for r in runs]))
        rows.append(head(a) + [str(suite.base.seed), "mean", summary, mean_t, mean_r])
    return rows


def run_suite(suite: Suite, timing: bool = True, jobs: int = 1) -> list[list[str]]:
    """Rows in sweep order whatever the number of workers."""
    pts = suite.points()
    if jobs > 1:
        with ThreadPoolExecutor(jobs) as ex:
            chunks = list(ex.map(lambda ip: run_point(suite, ip[0], ip[1], timing), enumerate(pts)))
    else:
        chunks = [run_point(suite, i, p, timing) for i, p in enumerate(pts)]
    return [row for chunk in chunks for row in chunk]


def to_csv(rows: list[list[str]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    w.writerows(rows)
    return buf.getvalue()


def summary(rows: list[list[str]]) -> dict[tuple[str, str], float]:
    """(algo, swept value as written) -> mean time_ms, from the mean rows."""
    out = {}
    for r in rows:
        if r[7] == "mean" and r[9]:
            out[(r[0], tuple(r[2:6]))] = float(r[9])
    return out
