"""The DPC and DPC* propagation algorithms and backtrack-free extraction.

Both algorithms take an ordering ``order = (v_1, ..., v_n)`` and process
v_n first, so variables are eliminated along ``reversed(order)``. The
"earlier neighbours" of v_k are the v_i with i < k that share a constraint
with v_k.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ._blocks import Workspace, pack_rows, rows_meet
from .core import Assignment, Network, Verdict
from .graph import ConstraintGraph, find_peo


@dataclass
class SolveOutcome:
    verdict: Verdict
    network: Network | None = None
    fill_edges: list[tuple[str, str]] = field(default_factory=list)
    revisions: int = 0
    failed_at: str | None = None  # where an Inconsistent verdict was detected

    @property
    def consistent(self) -> bool:
        return self.verdict is Verdict.PROCESSED


def check_order(net: Network, order: Sequence[str]) -> list[str]:
    order = list(order)
    if len(order) != len(net.variables) or set(order) != set(net.variables):
        raise ValueError("ordering must list every variable exactly once")
    return order


def default_order(net: Network) -> list[str]:
    """≺ with reversed(≺) a PEO when the constraint graph is chordal, else
    declaration order."""
    peo = find_peo(ConstraintGraph.of(net))
    return peo[::-1] if peo is not None else list(net.variables)


def _trivial(net: Network, ws: Workspace) -> str | None:
    for v in ws.order:
        if ws.domain_empty(ws.pos[v]):
            return f"empty domain {v}"
    for u, v in net.scopes():
        if not net.effective(u, v).any():
            return f"empty relation ({u}, {v})"
    return None


def _pair_updates(ws: Workspace, nb: np.ndarray, rows: np.ndarray, a: np.ndarray, endpoint_mask: bool):
    """R_ij ∩= R_ik ∘ R_kj for all earlier-neighbour pairs of one pivot.

    `a` is the stacked (rows x D_k) matrix of the R_ik. Absent pairs start as
    D_i × D_j when endpoint_mask is set (Alg. 1 line 8); otherwise the
    composition already lies inside the current domains. Returns the first
    emptied pair, if any.
    """
    packed = pack_rows(a)
    comp = rows_meet(packed, packed, ws.scratch)
    if endpoint_mask:
        absent = ~ws.present[np.ix_(nb, nb)]
        if absent.any():
            sz = ws.sizes[nb]
            absent_full = np.repeat(np.repeat(absent, sz, axis=0), sz, axis=1)
            d = ws.dom[rows]
            comp &= ~absent_full | (d[:, None] & d[None, :])
    span = ws.span(nb)
    if span is not None:
        sub = ws.M[span, span]
        sub &= comp
    else:
        band = ws.M[rows]
        sub = band[:, rows] & comp
        band[:, rows] = sub
        ws.M[rows] = band
    empty = np.argwhere(~ws.block_any(sub, nb))
    empty = empty[empty[:, 0] > empty[:, 1]]
    if len(empty):
        x, y = empty[np.lexsort((empty[:, 1], empty[:, 0]))[0]]
        return nb[y], nb[x]
    return None


def _record_fill(ws: Workspace, nb: np.ndarray, fill: list) -> None:
    blockp = ws.present[np.ix_(nb, nb)]
    for x in range(len(nb)):
        for y in range(x):
            if not blockp[x, y]:
                fill.append((ws.order[nb[y]], ws.order[nb[x]]))
    ws.present[np.ix_(nb, nb)] = True
    ws.present[nb, nb] = False


def dpc(net: Network, order: Sequence[str] | None = None) -> SolveOutcome:
    """Strong directional path-consistency (Dechter and Pearl's DPC).

    Returns a new network; the input is left untouched.
    """
    order = check_order(net, order if order is not None else default_order(net))
    ws = Workspace(net, order)
    reason = _trivial(net, ws)
    if reason:
        return SolveOutcome(Verdict.INCONSISTENT, failed_at=reason)
    fill: list[tuple[str, str]] = []
    revisions = 0
    for k in range(len(order) - 1, -1, -1):
        nb = np.flatnonzero(ws.present[:k, k])
        if nb.size == 0:
            continue
        rows = ws.rows(nb)
        kb = ws.blk(k)
        a = ws.M[rows, kb] & ws.dom[kb][None, :]
        ws.dom[rows] &= a.any(axis=1)
        revisions += nb.size
        for i in nb:
            if ws.domain_empty(i):
                return SolveOutcome(Verdict.INCONSISTENT, revisions=revisions, failed_at=f"domain of {order[i]}")
        if nb.size < 2:
            continue
        bad = _pair_updates(ws, nb, rows, a, endpoint_mask=True)
        revisions += nb.size * (nb.size - 1) // 2
        _record_fill(ws, nb, fill)
        if bad is not None:
            return SolveOutcome(
                Verdict.INCONSISTENT, revisions=revisions,
                failed_at=f"relation ({order[bad[0]]}, {order[bad[1]]})",
            )
    out = net.copy()
    ws.write_back(out)
    return SolveOutcome(Verdict.PROCESSED, out, fill, revisions)


def dpc_star(net: Network, order: Sequence[str] | None = None) -> SolveOutcome:
    """DPC*: DPC with arc-consistency of the eliminated variable towards its
    earlier neighbours, and domain pruning of the sole neighbour otherwise.

    Decides consistency for majority-closed languages; a Processed output is
    decomposable along the ordering (see `extract_solution`).
    """
    order = check_order(net, order if order is not None else default_order(net))
    ws = Workspace(net, order)
    reason = _trivial(net, ws)
    if reason:
        return SolveOutcome(Verdict.INCONSISTENT, failed_at=reason)
    fill: list[tuple[str, str]] = []
    revisions = 0
    M, dom = ws.M, ws.dom
    for k in range(len(order) - 1, -1, -1):
        nb = np.flatnonzero(ws.present[:k, k])
        kb = ws.blk(k)
        if nb.size == 0:
            continue
        if nb.size == 1:
            i = nb[0]
            ib = ws.blk(i)
            dom[ib] &= M[ib, kb][:, dom[kb]].any(axis=1)
            revisions += 1
            if ws.domain_empty(i):
                return SolveOutcome(Verdict.INCONSISTENT, revisions=revisions, failed_at=f"domain of {order[i]}")
            continue
        rows = ws.rows(nb)
        a = M[rows, kb] & dom[rows][:, None]
        support = np.logical_or.reduceat(a, ws.starts(nb), axis=0)
        for s in support:
            dom[kb] &= s
            revisions += 1
            if not dom[kb].any():
                return SolveOutcome(Verdict.INCONSISTENT, revisions=revisions, failed_at=f"domain of {order[k]}")
        a &= dom[kb][None, :]
        M[rows, kb] = a
        M[kb, rows] = a.T
        bad = _pair_updates(ws, nb, rows, a, endpoint_mask=False)
        revisions += nb.size * (nb.size - 1) // 2
        _record_fill(ws, nb, fill)
        if bad is not None:
            return SolveOutcome(
                Verdict.INCONSISTENT, revisions=revisions,
                failed_at=f"relation ({order[bad[0]]}, {order[bad[1]]})",
            )
    out = net.copy()
    ws.write_back(out)
    return SolveOutcome(Verdict.PROCESSED, out, fill, revisions)


class ExtractionError(RuntimeError):
    """Greedy extension hit an empty candidate set."""

    def __init__(self, variable: str, partial: Assignment):
        super().__init__(
            f"no value left for {variable!r}: the input is probably not "
            "majority-closed, or the ordering differs from the one used to solve"
        )
        self.variable = variable
        self.partial = partial


def extract_solution(out: SolveOutcome | Network, order: Sequence[str], strict: bool = False) -> Assignment | None:
    """Assign v_1..v_n along `order`, each time taking the least active value
    compatible with every earlier assigned neighbour. Never backtracks.

    Returns None (or raises ExtractionError when strict) if some candidate set
    is empty.
    """
    net = out.network if isinstance(out, SolveOutcome) else out
    if net is None:
        raise ValueError("nothing to extract from an Inconsistent outcome")
    order = check_order(net, order)
    sigma: Assignment = {}
    for v in order:
        cand = net.active[v].copy()
        for u in sigma:
            m = net.matrix(u, v)
            if m is not None:
                cand &= m[sigma[u]]
        hits = np.flatnonzero(cand)
        if hits.size == 0:
            if strict:
                raise ExtractionError(v, sigma)
            return None
        sigma[v] = int(hits[0])
    return sigma
