"""Brute-force ground truth.

Plain chronological backtracking in declaration order, no propagation. The
oracle deliberately shares nothing with the propagation code beyond reading
the network's matrices.
"""

from __future__ import annotations

import os
from itertools import combinations
from typing import Iterable, Sequence

from .core import Assignment, Network, restrict


class SearchSpaceError(RuntimeError):
    """The search visited more nodes than allowed."""


def _default_cap() -> int:
    return int(os.environ.get("DPCSTAR_MAX_ORACLE", 10**7))


def _masks(net: Network):
    """Per variable: active value bitmask, and for each earlier constrained
    variable j the list row -> bitmask of compatible values."""
    vs = net.variables
    active = []
    back = []
    for p, v in enumerate(vs):
        act = 0
        for a, on in enumerate(net.active[v]):
            if on:
                act |= 1 << a
        active.append(act)
        links = []
        for q in range(p):
            m = net.matrix(vs[q], v)
            if m is None:
                continue
            rows = []
            for row in m:
                bits = 0
                for b, on in enumerate(row):
                    if on:
                        bits |= 1 << b
                rows.append(bits)
            links.append((q, rows))
        back.append(links)
    return active, back


def enumerate_solutions(net: Network, limit: int | None = None, max_nodes: int | None = None) -> list[Assignment]:
    """All solutions (up to `limit`) as {variable: value index} dicts.

    Raises SearchSpaceError after `max_nodes` search nodes (default from the
    DPCSTAR_MAX_ORACLE environment variable).
    """
    cap = _default_cap() if max_nodes is None else max_nodes
    vs = net.variables
    n = len(vs)
    active, back = _masks(net)
    out: list[Assignment] = []
    values = [0] * n
    nodes = 0

    def candidates(p):
        c = active[p]
        for q, rows in back[p]:
            c &= rows[values[q]]
        return c

    def walk(p):
        nonlocal nodes
        if p == n:
            out.append({vs[i]: values[i] for i in range(n)})
            return limit is not None and len(out) >= limit
        c = candidates(p)
        while c:
            low = c & -c
            c ^= low
            nodes += 1
            if nodes > cap:
                raise SearchSpaceError(f"more than {cap} search nodes")
            values[p] = low.bit_length() - 1
            if walk(p + 1):
                return True
        return False

    if limit is None or limit > 0:
        walk(0)
    return out


def is_consistent(net: Network, max_nodes: int | None = None) -> bool:
    return bool(enumerate_solutions(net, limit=1, max_nodes=max_nodes))


def partial_solutions(net: Network, subset: Iterable[str], max_nodes: int | None = None) -> list[Assignment]:
    return enumerate_solutions(restrict(net, subset), max_nodes=max_nodes)


def _projections(sols: list[Assignment], subset: Sequence[str]) -> set[tuple]:
    return {tuple(s[v] for v in subset) for s in sols}


def check_global_consistency(net: Network, k: int, max_nodes: int | None = None) -> bool:
    """Every partial solution on every variable subset of size <= k extends
    to a full solution."""
    sols = enumerate_solutions(net, max_nodes=max_nodes)
    for size in range(1, min(k, len(net.variables)) + 1):
        for subset in combinations(net.variables, size):
            ext = _projections(sols, subset)
            for p in partial_solutions(net, subset, max_nodes):
                if tuple(p[v] for v in subset) not in ext:
                    return False
    return True


def prefix_extension_failures(net: Network, order: Sequence[str], max_nodes: int | None = None) -> list[Assignment]:
    """Partial solutions on prefixes {v_1..v_k} of `order` that do not extend
    to a full solution. Empty iff the network is decomposable along order."""
    sols = enumerate_solutions(net, max_nodes=max_nodes)
    bad = []
    for k in range(1, len(order) + 1):
        prefix = list(order[:k])
        ext = _projections(sols, prefix)
        for p in partial_solutions(net, prefix, max_nodes):
            if tuple(p[v] for v in prefix) not in ext:
                bad.append(p)
    return bad
