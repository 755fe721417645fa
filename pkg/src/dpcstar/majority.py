"""Majority operations, closure, tree domains, decomposability and the
binary closure of a language."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterable, Mapping, Sequence

import numpy as np

from .core import Domain, NetworkError, Relation
from .elimination import Language


class PreconditionError(ValueError):
    """A checker was called outside the hypotheses it is stated under."""


def _majority_ok(t: np.ndarray) -> bool:
    d = t.shape[0]
    e, x = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    return bool((t[e, x, x] == x).all() and (t[x, e, x] == x).all() and (t[x, x, e] == x).all())


class MajorityOperation:
    """One ternary table per domain name, table[a, b, c] = value index."""

    def __init__(self, tables: Mapping[str, np.ndarray]):
        self.tables = {}
        for name, t in tables.items():
            t = np.array(t, dtype=np.intp)
            d = t.shape[0]
            if t.shape != (d, d, d) or (t < 0).any() or (t >= d).any():
                raise NetworkError(f"table for {name!r} is not a d x d x d table over range(d)")
            if not _majority_ok(t):
                raise NetworkError(f"table for {name!r} violates the majority axioms")
            t.flags.writeable = False
            self.tables[name] = t

    def __getitem__(self, name: str) -> np.ndarray:
        try:
            return self.tables[name]
        except KeyError:
            raise NetworkError(f"no majority component for domain {name!r}") from None

    def __contains__(self, name):
        return name in self.tables

    def __eq__(self, other):
        return (
            isinstance(other, MajorityOperation)
            and self.tables.keys() == other.tables.keys()
            and all(np.array_equal(t, other.tables[k]) for k, t in self.tables.items())
        )

    def merged(self, other: "MajorityOperation") -> "MajorityOperation":
        return MajorityOperation({**self.tables, **other.tables})


def _images(tuples: np.ndarray, tables: Sequence[np.ndarray], chunk: int = 1 << 22):
    """Yield the componentwise images of all triples of rows, in chunks."""
    m = len(tuples)
    step = max(1, chunk // max(1, m * m))
    j, k = np.meshgrid(np.arange(m), np.arange(m), indexing="ij")
    j, k = j.ravel(), k.ravel()
    for start in range(0, m, step):
        i = np.repeat(np.arange(start, min(m, start + step)), m * m)
        jj = np.tile(j, len(i) // len(j))
        kk = np.tile(k, len(i) // len(k))
        cols = [tables[c][tuples[i, c], tuples[jj, c], tuples[kk, c]] for c in range(tuples.shape[1])]
        yield np.stack(cols, axis=1)


def _encode(rows: np.ndarray, sizes: Sequence[int]) -> np.ndarray:
    code = np.zeros(len(rows), dtype=np.int64)
    for c, s in enumerate(sizes):
        code = code * s + rows[:, c]
    return code


def _closed(tuples: np.ndarray, tables, sizes) -> bool:
    if len(tuples) == 0:
        return True
    have = np.zeros(int(np.prod(sizes)), dtype=bool)
    have[_encode(tuples, sizes)] = True
    return all(have[_encode(img, sizes)].all() for img in _images(tuples, tables))


def _close(tuples: np.ndarray, tables, sizes) -> np.ndarray:
    have = np.zeros(int(np.prod(sizes)), dtype=bool)
    if len(tuples):
        have[_encode(tuples, sizes)] = True
    while True:
        rows = np.argwhere(have.reshape(sizes))
        before = int(have.sum())
        for img in _images(rows, tables):
            have[_encode(img, sizes)] = True
        if int(have.sum()) == before:
            return rows


def is_closed_under(r: Relation, phi: MajorityOperation) -> bool:
    """Componentwise phi-image of every triple of tuples lies in r."""
    tables = [phi[r.source.name], phi[r.target.name]]
    _check_sizes(r, tables)
    return _closed(np.argwhere(r.matrix), tables, r.matrix.shape)


def close_under(r: Relation, phi: MajorityOperation) -> Relation:
    """Least superset of r closed under phi."""
    tables = [phi[r.source.name], phi[r.target.name]]
    _check_sizes(r, tables)
    rows = _close(np.argwhere(r.matrix), tables, r.matrix.shape)
    m = np.zeros(r.matrix.shape, dtype=bool)
    m[rows[:, 0], rows[:, 1]] = True
    return Relation(r.source, r.target, m)


def _check_sizes(r: Relation, tables) -> None:
    if tables[0].shape[0] != len(r.source) or tables[1].shape[0] != len(r.target):
        raise NetworkError("majority table size does not match the relation's domains")


# -- tree domains ---------------------------------------------------------


@dataclass(frozen=True)
class TreeDomain:
    domain: Domain
    edges: tuple[tuple[int, int], ...]  # value indices

    def __post_init__(self):
        d = len(self.domain)
        es = tuple(tuple(sorted((int(a), int(b)))) for a, b in self.edges)
        object.__setattr__(self, "edges", es)
        if len(es) != d - 1 or len(set(es)) != len(es):
            raise NetworkError(f"tree on {self.domain.name!r} needs exactly {d - 1} distinct edges")
        for a, b in es:
            if a == b or not (0 <= a < d and 0 <= b < d):
                raise NetworkError(f"bad tree edge {(a, b)}")
        if d and len(self._reach(0)) != d:
            raise NetworkError(f"tree on {self.domain.name!r} is not connected")

    @classmethod
    def from_labels(cls, domain: Domain, edges: Iterable[tuple]) -> "TreeDomain":
        return cls(domain, tuple((domain.index(a), domain.index(b)) for a, b in edges))

    @classmethod
    def chain(cls, domain: Domain) -> "TreeDomain":
        return cls(domain, tuple((i, i + 1) for i in range(len(domain) - 1)))

    def adjacency(self) -> list[list[int]]:
        adj = [[] for _ in range(len(self.domain))]
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return adj

    def _reach(self, s: int) -> set[int]:
        adj = self.adjacency()
        seen, stack = {s}, [s]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen

    def distances(self) -> np.ndarray:
        d = len(self.domain)
        adj = self.adjacency()
        dist = np.full((d, d), -1, dtype=np.intp)
        for s in range(d):
            dist[s, s] = 0
            frontier = [s]
            while frontier:
                nxt = []
                for u in frontier:
                    for w in adj[u]:
                        if dist[s, w] < 0:
                            dist[s, w] = dist[s, u] + 1
                            nxt.append(w)
                frontier = nxt
        return dist

    def is_connected(self, mask: int) -> bool:
        """The values in bitmask `mask` induce a subtree (empty counts)."""
        size = bin(mask).count("1")
        if size == 0:
            return True
        inner = sum(1 for a, b in self.edges if mask >> a & 1 and mask >> b & 1)
        return inner == size - 1

    def subtrees(self):
        """Every nonempty connected value set, as a bitmask, exactly once."""
        adj = self.adjacency()
        d = len(self.domain)

        def expand(sub, frontier, banned):
            yield sub
            frontier = list(frontier)
            while frontier:
                v = frontier.pop()
                banned |= 1 << v
                new = [w for w in adj[v] if not (sub >> w & 1) and not (banned >> w & 1) and w not in frontier]
                yield from expand(sub | 1 << v, frontier + new, banned)

        for root in range(d):
            low = (1 << root) - 1  # values below root belong to other roots
            yield from expand(1 << root, [w for w in adj[root] if w > root], low | 1 << root)


def standard_tree_majority(tree: TreeDomain) -> np.ndarray:
    """m(a, b, c): the single vertex on all three pairwise tree paths."""
    dist = tree.distances()
    # on_path[u, v, w]: w lies on the path from u to v
    on_path = dist[:, :, None] == dist[:, None, :] + dist.T[None, :, :]
    meet = on_path[:, :, None, :] & on_path[None, :, :, :] & on_path[:, None, :, :]
    return meet.argmax(axis=3)


def tree_majority(trees: Mapping[str, TreeDomain]) -> MajorityOperation:
    """Standard tree majority for each tree, keyed by domain name."""
    return MajorityOperation({t.domain.name: standard_tree_majority(t) for t in trees.values()})


def _row_masks(m: np.ndarray) -> list[int]:
    return [sum(1 << int(b) for b in np.flatnonzero(row)) for row in m]


def is_tree_preserving(r: Relation, ti: TreeDomain, tj: TreeDomain) -> bool:
    """Image of every subtree of ti is a subtree of tj (an empty image is
    accepted as the empty subtree)."""
    if len(ti.domain) != len(r.source) or len(tj.domain) != len(r.target):
        raise NetworkError("trees do not match the relation's domains")
    rows = _row_masks(r.matrix)
    for sub in ti.subtrees():
        img = 0
        for a in range(len(rows)):
            if sub >> a & 1:
                img |= rows[a]
        if not tj.is_connected(img):
            return False
    return True


def tree_closure_equivalence(r: Relation, ti: TreeDomain, tj: TreeDomain) -> bool:
    """Whether majority-closure under the standard tree majorities agrees with
    tree-preservation in both directions.

    Raises PreconditionError unless r is nonempty and both r and its inverse
    are arc-consistent (no empty row or column).
    """
    if r.is_empty() or not r.matrix.any(axis=1).all() or not r.matrix.any(axis=0).all():
        raise PreconditionError("relation must be nonempty with no empty row or column")
    if r.source.name == r.target.name and ti != tj:
        raise PreconditionError("one domain carries one tree, hence one majority component")
    phi = MajorityOperation({
        r.source.name: standard_tree_majority(ti),
        r.target.name: standard_tree_majority(tj),
    })
    closed = is_closed_under(r, phi)
    preserving = is_tree_preserving(r, ti, tj) and is_tree_preserving(r.inverse(), tj, ti)
    return closed == preserving


# -- n-ary relations --------------------------------------------------------

MAX_ARITY = 4


@dataclass(frozen=True)
class NaryRelation:
    domains: tuple[Domain, ...]
    tuples: frozenset[tuple[int, ...]]

    @classmethod
    def from_labels(cls, domains: Sequence[Domain], rows: Iterable[Sequence]) -> "NaryRelation":
        doms = tuple(domains)
        return cls(doms, frozenset(tuple(d.index(x) for d, x in zip(doms, row)) for row in rows))

    @property
    def arity(self) -> int:
        return len(self.domains)

    def project(self, idx: Sequence[int]) -> set[tuple[int, ...]]:
        return {tuple(t[i] for i in idx) for t in self.tuples}

    def labels(self) -> list[tuple[str, ...]]:
        return sorted(tuple(d.values[a] for d, a in zip(self.domains, t)) for t in self.tuples)

    def array(self) -> np.ndarray:
        return np.array(sorted(self.tuples), dtype=np.intp).reshape(-1, self.arity)


def _arity_guard(r: NaryRelation) -> None:
    if r.arity > MAX_ARITY:
        raise ValueError(f"arity {r.arity} exceeds the enumeration bound {MAX_ARITY}")


def pairwise_join(r: NaryRelation) -> set[tuple[int, ...]]:
    """Tuples whose every projection on one or two positions lies in the
    matching projection of r."""
    _arity_guard(r)
    singles = [r.project((i,)) for i in range(r.arity)]
    pairs = {(i, j): r.project((i, j)) for i, j in combinations(range(r.arity), 2)}
    out = set()
    for t in product(*(sorted(v[0] for v in s) for s in singles)):
        if all((t[i], t[j]) in p for (i, j), p in pairs.items()):
            out.add(t)
    return out


def is_2_decomposable(r: NaryRelation) -> bool:
    return pairwise_join(r) <= set(r.tuples)


def is_closed_nary(r: NaryRelation, phi: MajorityOperation) -> bool:
    _arity_guard(r)
    tables = [phi[d.name] for d in r.domains]
    return _closed(r.array(), tables, [len(d) for d in r.domains])


def binarize(r: NaryRelation) -> dict[tuple[int, int], Relation]:
    """Projection constraints on every pair of positions. Their conjunction
    equals r exactly when r is 2-decomposable, which majority-closure
    guarantees."""
    _arity_guard(r)
    if r.arity < 2:
        raise ValueError("binarize needs arity >= 2")
    out = {}
    for i, j in combinations(range(r.arity), 2):
        m = np.zeros((len(r.domains[i]), len(r.domains[j])), dtype=bool)
        for a, b in r.project((i, j)):
            m[a, b] = True
        out[(i, j)] = Relation(r.domains[i], r.domains[j], m)
    return out


# -- binary closure ---------------------------------------------------------


class ClosureLimitError(RuntimeError):
    pass


def binary_closure(lang: Language, singletons: bool = True, max_size: int = 20000) -> Language:
    """Least superset of lang closed under inverse, intersection, composition
    and restriction by definable unary sets.

    Unary sets start from the full domains (plus the singletons of values in
    some tuple when `singletons` is set) and are closed under images R(T) and
    intersection. With `singletons`, every single tuple of a relation is also
    added as a relation. Raises ClosureLimitError past `max_size` relations.
    """
    doms = {d.name: d for d in lang.domains}
    rels: dict[tuple, Relation] = {}
    unary: dict[str, set[int]] = {n: {(1 << len(d)) - 1} for n, d in doms.items()}

    def add(r):
        k = (r.source.name, r.target.name, r.matrix.tobytes())
        if k not in rels:
            if len(rels) >= max_size:
                raise ClosureLimitError(f"closure exceeds {max_size} relations")
            rels[k] = r

    def mask(d, bits):
        return (bits >> np.arange(len(d))) & 1 == 1

    def bits_of(m):
        return sum(1 << int(b) for b in np.flatnonzero(m))

    for r in lang.relations:
        add(r)
    while True:
        size = (len(rels), sum(map(len, unary.values())))
        current = list(rels.values())
        for r in current:
            add(r.inverse())
            if singletons:
                for a, b in np.argwhere(r.matrix):
                    unary[r.source.name].add(1 << int(a))
                    unary[r.target.name].add(1 << int(b))
                    m = np.zeros(r.matrix.shape, dtype=bool)
                    m[a, b] = True
                    add(Relation(r.source, r.target, m))
            for t in list(unary[r.source.name]):
                img = bits_of(r.image(mask(r.source, t)))
                if img:
                    unary[r.target.name].add(img)
        for r, s in product(current, repeat=2):
            if (r.source.name, r.target.name) == (s.source.name, s.target.name):
                add(r.intersect(s))
            if r.target.name == s.source.name:
                add(r.compose(s))
        for sets in unary.values():
            for a, b in combinations(list(sets), 2):
                if a & b:
                    sets.add(a & b)
        for r in current:
            for t in unary[r.source.name]:
                add(Relation(r.source, r.target, r.matrix & mask(r.source, t)[:, None]))
            for t in unary[r.target.name]:
                add(Relation(r.source, r.target, r.matrix & mask(r.target, t)[None, :]))
        if (len(rels), sum(map(len, unary.values()))) == size:
            return Language(list(doms.values()), list(rels.values()))
