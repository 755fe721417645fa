"""Arc-consistency, path-consistency checks, the strong-PC enforcer and the
strong-DPC predicate."""

from __future__ import annotations

import heapq
from typing import Sequence

import numpy as np

from ._blocks import Workspace, pack_rows, rows_meet
from .core import Network, Verdict
from .dpc import check_order


def _bump(stats, key, by=1):
    if stats is not None:
        stats[key] = stats.get(key, 0) + by


def enforce_ac(net: Network, stats: dict | None = None) -> Verdict:
    """AC-3 over the stored constraints, in place.

    Arcs (x, y) are revised in lexicographic order of (index x, index y);
    a pruned x re-queues every arc (z, x).
    """
    idx = net.index
    nbrs = {v: net.neighbors(v) for v in net.variables}
    heap = [(idx(x), idx(y), x, y) for x in net.variables for y in nbrs[x]]
    heapq.heapify(heap)
    queued = {(x, y) for _, _, x, y in heap}
    if any(not net.active[v].any() for v in net.variables):
        return Verdict.INCONSISTENT
    while heap:
        _, _, x, y = heapq.heappop(heap)
        queued.discard((x, y))
        _bump(stats, "revisions")
        supported = net.effective(x, y).any(axis=1)
        new = net.active[x] & supported
        if np.array_equal(new, net.active[x]):
            continue
        net.active[x] = new
        if not new.any():
            return Verdict.INCONSISTENT
        for z in nbrs[x]:
            if z != y and (z, x) not in queued:
                queued.add((z, x))
                heapq.heappush(heap, (idx(z), idx(x), z, x))
    return Verdict.OK


def is_path_consistent(net: Network, path: Sequence[str]) -> bool:
    """Every tuple of R_0k (active values only) extends along the chain.

    Missing links along the chain count as universal; R_0k itself must be
    a stored constraint.
    """
    path = list(path)
    if len(path) < 3:
        raise ValueError("a path needs at least one intermediate variable")
    for v in path:
        net.index(v)
    if len(set(path)) != len(path):
        raise ValueError("path repeats a variable")
    if not net.has_constraint(path[0], path[-1]):
        raise ValueError(f"no constraint between {path[0]!r} and {path[-1]!r}")
    reach = np.diag(net.active[path[0]])
    for u, v in zip(path, path[1:]):
        reach = reach @ net.effective(u, v)
    end = net.effective(path[0], path[-1])
    return not (end & ~reach).any()


def enforce_strong_pc(net: Network, stats: dict | None = None) -> Verdict:
    """Strong path-consistency on the completed graph, in place.

    Fixpoint of R_ij <- R_ij ∩ (R_ik ∘ R_kj) over all triples, with the
    diagonal block of each variable holding its active domain so that the
    same update performs arc-consistency (i = j) and domain masking
    (i = k). Pivots whose column did not change since they were last
    applied are skipped; applying them again would be a no-op.

    On Inconsistent the network is left as it was. On Ok the active
    domains are updated, every stored relation is replaced by its tightened
    version, and new constraints are added for pairs that are no longer
    universal.
    """
    order = list(net.variables)
    n = len(order)
    ws = Workspace(net, order)
    if n == 0:
        return Verdict.OK
    if any(ws.domain_empty(i) for i in range(n)):
        return Verdict.INCONSISTENT
    M = ws.M
    for i in range(n):
        b = ws.blk(i)
        M[b, b] = np.diag(ws.dom[b])
    M &= ws.dom[:, None] & ws.dom[None, :]
    all_idx = np.arange(n)
    starts = ws.starts(all_idx)
    if not ws.block_any(M, all_idx).all():
        return Verdict.INCONSISTENT
    dirty = np.ones(n, dtype=bool)
    lost = np.empty_like(M)
    k = 0
    while dirty.any():
        if not dirty[k]:
            k = (k + 1) % n
            continue
        dirty[k] = False
        packed = pack_rows(M[:, ws.blk(k)])
        comp = rows_meet(packed, packed, ws.scratch)
        np.greater(M, comp, out=lost)  # M & ~comp
        M &= comp
        _bump(stats, "revisions", n * n)
        rows_lost = lost.any(axis=1)
        if rows_lost.any():
            dirty |= np.logical_or.reduceat(rows_lost, starts)
            # an emptied relation empties a domain at a later pivot, so the
            # cheap diagonal test is enough for an early exit
            if not np.logical_or.reduceat(M.diagonal(), starts).all():
                return Verdict.INCONSISTENT
        k = (k + 1) % n
    if not ws.block_any(M, all_idx).all():
        return Verdict.INCONSISTENT
    dom = M.diagonal().copy()
    for i, v in enumerate(order):
        net.active[v] = dom[ws.blk(i)].copy()
    for i in range(n):
        for j in range(i + 1, n):
            block = M[ws.blk(i), ws.blk(j)]
            full = np.outer(dom[ws.blk(i)], dom[ws.blk(j)])
            if ws.present[i, j] or not np.array_equal(block, full):
                net.set_relation(order[i], order[j], block.copy())
    return Verdict.OK


def is_strongly_dpc(net: Network, order: Sequence[str]) -> bool:
    """DAC and DPC relative to ≺ = order, read over the active domains.

    DAC: each v_i is arc-consistent relative to every stored R_ik with k
    later. DPC: each stored R_ij is path-consistent relative to every later
    v_k constrained with both.
    """
    order = check_order(net, order)
    pos = {v: p for p, v in enumerate(order)}
    for u, v in net.scopes():
        i, k = sorted((u, v), key=pos.get)
        if not (net.effective(i, k).any(axis=1) >= net.active[i]).all():
            return False
    for k in order:
        earlier = [w for w in net.neighbors(k) if pos[w] < pos[k]]
        for a in range(len(earlier)):
            for b in range(a + 1, len(earlier)):
                i, j = earlier[a], earlier[b]
                if not net.has_constraint(i, j):
                    continue
                via = net.effective(i, k) @ net.effective(k, j)
                if (net.effective(i, j) & ~via).any():
                    return False
    return True
