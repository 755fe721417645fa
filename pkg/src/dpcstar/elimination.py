"""Variable elimination, instance-level VEP checks and the Helly property."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .core import Domain, Network, NetworkError, Relation, restrict
from .oracle import enumerate_solutions


@dataclass
class Language:
    """A finite set of binary relations over named domains."""

    domains: list[Domain]
    relations: list[Relation]

    def __post_init__(self):
        known = {d.name: d for d in self.domains}
        for r in self.relations:
            for d in (r.source, r.target):
                if known.get(d.name) != d:
                    raise NetworkError(f"relation uses undeclared domain {d.name!r}")

    @classmethod
    def of(cls, relations) -> "Language":
        rels = list(relations)
        doms: dict[str, Domain] = {}
        for r in rels:
            doms.setdefault(r.source.name, r.source)
            doms.setdefault(r.target.name, r.target)
        return cls(list(doms.values()), rels)

    @classmethod
    def from_network(cls, net: Network) -> "Language":
        return cls.of(net.relation(u, v) for u, v in net.scopes())


def eliminate(net: Network, x: str) -> Network:
    """The network N_{-x}.

    With exactly one constraint R_ix on x, drop it and prune D_i to the values
    supported by the active D_x. Otherwise keep all domains and, for every
    pair of neighbours, replace R_ij by R_ij ∩ (R_ix ∘ R_xj), composing over
    the active values of x; a missing R_ij counts as universal.
    """
    nbrs = net.neighbors(x)
    out = restrict(net, [v for v in net.variables if v != x])
    if len(nbrs) == 1:
        (i,) = nbrs
        out.active[i] = net.active[i] & net.effective(i, x).any(axis=1)
        return out
    dx = net.active[x]
    for i, j in combinations(nbrs, 2):
        via = net.matrix(i, x)[:, dx] @ net.matrix(x, j)[dx, :]
        old = net.matrix(i, j)
        out.set_relation(i, j, via if old is None else via & old)
    return out


@dataclass
class CheckResult:
    holds: bool
    witness: dict = field(default_factory=dict)

    def __bool__(self):
        return self.holds


def _is_ac_towards(net: Network, x: str) -> bool:
    return all((net.effective(x, y).any(axis=1) >= net.active[x]).all() for y in net.neighbors(x))


def check_vep_instance(net: Network, x: str, weak: bool = False, max_nodes: int | None = None) -> CheckResult:
    """Every solution of N_{-x} extends to a solution of N.

    With weak=True the check is vacuous unless x is arc-consistent relative
    to all its constraints. The witness holds a non-extendable solution.
    """
    net.index(x)
    if weak and not _is_ac_towards(net, x):
        return CheckResult(True, {"vacuous": True})
    reduced = eliminate(net, x)
    for sigma in enumerate_solutions(reduced, max_nodes=max_nodes):
        cand = net.active[x].copy()
        for y in net.neighbors(x):
            cand &= net.matrix(y, x)[sigma[y]]
        if not cand.any():
            return CheckResult(False, {"solution": net.labels(sigma), "variable": x})
    return CheckResult(True)


def _images(lang: Language, symmetric: bool):
    """Per target domain: distinct nonempty images as int bitmasks, each with
    one (relation index, source value, inverted) that produces it."""
    fam: dict[str, dict[int, tuple]] = {d.name: {} for d in lang.domains}
    for r_i, r in enumerate(lang.relations):
        sides = [(r.matrix, r.source, r.target, False)]
        if symmetric:
            sides.append((r.matrix.T, r.target, r.source, True))
        for m, src, tgt, inv in sides:
            for a, row in enumerate(m):
                if not row.any():
                    continue
                bits = sum(1 << int(b) for b in np.flatnonzero(row))
                fam[tgt.name].setdefault(bits, (r_i, src.values[a], inv))
    return fam


def check_helly(lang: Language, symmetric: bool = True) -> CheckResult:
    """Helly property: within each target domain D, any pairwise-intersecting
    family of images R(a) with at most |D| members has a common element.

    Larger families need not be searched: a minimal family with empty
    intersection has one member per value it excludes. With symmetric=True
    the images of inverse relations are included too, since a network reads
    each constraint in both directions.
    """
    family = _images(lang, symmetric)
    for dom in lang.domains:
        sets = family[dom.name]
        keys = sorted(sets)
        full = (1 << len(dom)) - 1
        found = _empty_meet(keys, len(dom), full)
        if found is not None:
            members = []
            for bits in found:
                r_i, a, inv = sets[bits]
                members.append({
                    "relation": r_i,
                    "value": a,
                    "inverse": inv,
                    "image": [dom.values[b] for b in range(len(dom)) if bits >> b & 1],
                })
            return CheckResult(False, {"domain": dom.name, "family": members})
    return CheckResult(True)


def _empty_meet(keys: list[int], limit: int, full: int):
    """A pairwise-intersecting subfamily of size >= 3 with empty meet, or None."""
    m = len(keys)
    compat = [[bool(keys[i] & keys[j]) for j in range(m)] for i in range(m)]

    def grow(chosen, meet, start):
        if len(chosen) >= 3 and meet == 0:
            return list(chosen)
        if len(chosen) == limit or meet == 0:
            return None
        for j in range(start, m):
            if keys[j] & meet == meet:
                continue  # cannot shrink the meet; adding it never helps
            if all(compat[i][j] for i in chosen):
                chosen.append(j)
                hit = grow(chosen, meet & keys[j], j + 1)
                chosen.pop()
                if hit:
                    return hit
        return None

    hit = grow([], full, 0)
    return None if hit is None else [keys[i] for i in hit]
