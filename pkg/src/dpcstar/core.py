"""Domains, relations and binary constraint networks.

Values are addressed by their index in the declared value list; labels are
only used at I/O boundaries. Relations are boolean matrices whose rows index
the source domain and whose columns index the target domain.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, Sequence

import numpy as np


class NetworkError(ValueError):
    """Malformed network, relation or assignment."""


class Verdict(str, Enum):
    OK = "Ok"
    PROCESSED = "Processed"
    INCONSISTENT = "Inconsistent"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Domain:
    name: str
    values: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(str(v) for v in self.values))
        if len(set(self.values)) != len(self.values):
            raise NetworkError(f"duplicate values in domain {self.name!r}")

    def __len__(self):
        return len(self.values)

    def index(self, label) -> int:
        try:
            return self.values.index(str(label))
        except ValueError:
            raise NetworkError(f"{label!r} is not a value of domain {self.name!r}") from None

    def mask(self, labels: Iterable) -> np.ndarray:
        m = np.zeros(len(self.values), dtype=bool)
        for label in labels:
            m[self.index(label)] = True
        return m

    def labels(self, mask: np.ndarray) -> list[str]:
        return [self.values[i] for i in np.flatnonzero(mask)]


class Relation:
    """A binary relation between two domains, stored as a read-only bool matrix."""

    __slots__ = ("source", "target", "matrix")

    def __init__(self, source: Domain, target: Domain, matrix):
        m = np.array(matrix, dtype=bool)
        if m.shape != (len(source), len(target)):
            raise NetworkError(
                f"matrix shape {m.shape} does not match domains "
                f"{source.name}({len(source)}) x {target.name}({len(target)})"
            )
        m.flags.writeable = False
        self.source = source
        self.target = target
        self.matrix = m

    @classmethod
    def from_tuples(cls, source: Domain, target: Domain, pairs: Iterable) -> "Relation":
        m = np.zeros((len(source), len(target)), dtype=bool)
        for a, b in pairs:
            m[source.index(a), target.index(b)] = True
        return cls(source, target, m)

    @classmethod
    def universal(cls, source: Domain, target: Domain) -> "Relation":
        return cls(source, target, np.ones((len(source), len(target)), dtype=bool))

    def tuples(self) -> list[tuple[str, str]]:
        rows, cols = np.nonzero(self.matrix)
        return [(self.source.values[a], self.target.values[b]) for a, b in zip(rows, cols)]

    def inverse(self) -> "Relation":
        return Relation(self.target, self.source, self.matrix.T)

    def intersect(self, other: "Relation") -> "Relation":
        _same_domains(self, other)
        return Relation(self.source, self.target, self.matrix & other.matrix)

    def compose(self, other: "Relation") -> "Relation":
        if len(self.target) != len(other.source) or self.target.values != other.source.values:
            raise NetworkError(
                f"cannot compose {self.source.name}->{self.target.name} "
                f"with {other.source.name}->{other.target.name}"
            )
        return Relation(self.source, other.target, self.matrix @ other.matrix)

    def image(self, mask: np.ndarray) -> np.ndarray:
        """Target values related to at least one source value selected by `mask`."""
        return self.matrix[np.asarray(mask, dtype=bool)].any(axis=0)

    def is_empty(self) -> bool:
        return not self.matrix.any()

    def is_universal(self) -> bool:
        return bool(self.matrix.all())

    def __len__(self):
        return int(self.matrix.sum())

    def __contains__(self, pair):
        a, b = pair
        return bool(self.matrix[self.source.index(a), self.target.index(b)])

    def __eq__(self, other):
        if not isinstance(other, Relation):
            return NotImplemented
        return (
            self.source == other.source
            and self.target == other.target
            and np.array_equal(self.matrix, other.matrix)
        )

    def __hash__(self):
        return hash((self.source, self.target, self.matrix.tobytes()))

    def __repr__(self):
        return f"Relation({self.source.name}->{self.target.name}, {self.tuples()})"


def _same_domains(r: Relation, s: Relation) -> None:
    if r.matrix.shape != s.matrix.shape:
        raise NetworkError(f"dimension mismatch: {r.matrix.shape} vs {s.matrix.shape}")


def relation_algebra(op: str, r: Relation, s: Relation | None = None) -> Relation:
    """Inverse, intersection, or the universal relation over r's domains."""
    if op == "inverse":
        return r.inverse()
    if op == "intersect":
        if s is None:
            raise NetworkError("intersect needs two relations")
        return r.intersect(s)
    if op == "universal":
        return Relation.universal(r.source, r.target)
    raise NetworkError(f"unknown relation operation {op!r}")


def relation_compose(r: Relation, s: Relation) -> Relation:
    return r.compose(s)


def relation_image(r: Relation, values: Iterable) -> set[str]:
    return set(r.target.labels(r.image(r.source.mask(values))))


Assignment = dict  # variable -> value index


class Network:
    """A binary constraint network.

    Each unordered pair holds at most one constraint, stored once in the
    direction of declaration order; reading it the other way returns the
    transpose. Pairs without a stored constraint are implicitly universal.
    Propagation prunes the per-variable `active` masks rather than rewriting
    relation matrices.
    """

    def __init__(self, variables: Sequence[str], domains: Mapping[str, Domain]):
        self.variables = [str(v) for v in variables]
        if len(set(self.variables)) != len(self.variables):
            raise NetworkError("duplicate variable names")
        self._index = {v: i for i, v in enumerate(self.variables)}
        missing = [v for v in self.variables if v not in domains]
        if missing:
            raise NetworkError(f"no domain for {missing}")
        self.domains = {v: domains[v] for v in self.variables}
        self.active = {v: np.ones(len(self.domains[v]), dtype=bool) for v in self.variables}
        self._rel: dict[tuple[str, str], np.ndarray] = {}

    @classmethod
    def build(cls, domains: Mapping[str, Iterable], constraints: Mapping = ()) -> "Network":
        """Convenience constructor: {var: labels}, {(u, v): [(a, b), ...]}."""
        doms = {v: Domain(v, tuple(vals)) for v, vals in domains.items()}
        net = cls(list(domains), doms)
        for (u, v), pairs in dict(constraints).items():
            net._key(u, v)  # unknown variables and self-loops
            net.set_relation(u, v, Relation.from_tuples(doms[u], doms[v], pairs))
        return net

    # -- structure -------------------------------------------------------

    def index(self, var: str) -> int:
        try:
            return self._index[var]
        except KeyError:
            raise NetworkError(f"unknown variable {var!r}") from None

    def _key(self, u: str, v: str) -> tuple[tuple[str, str], bool]:
        iu, iv = self.index(u), self.index(v)
        if iu == iv:
            raise NetworkError(f"self-loop on {u!r}")
        return ((u, v), False) if iu < iv else ((v, u), True)

    def has_constraint(self, u: str, v: str) -> bool:
        return self._key(u, v)[0] in self._rel

    def matrix(self, u: str, v: str) -> np.ndarray | None:
        """The stored matrix oriented u -> v, or None when the pair is unconstrained."""
        key, flipped = self._key(u, v)
        m = self._rel.get(key)
        if m is None:
            return None
        return m.T if flipped else m

    def relation(self, u: str, v: str) -> Relation | None:
        m = self.matrix(u, v)
        return None if m is None else Relation(self.domains[u], self.domains[v], m)

    def set_relation(self, u: str, v: str, rel) -> None:
        m = rel.matrix if isinstance(rel, Relation) else np.asarray(rel, dtype=bool)
        shape = (len(self.domains[u]), len(self.domains[v]))
        if m.shape != shape:
            raise NetworkError(f"relation on ({u}, {v}) has shape {m.shape}, expected {shape}")
        key, flipped = self._key(u, v)
        m = np.array(m.T if flipped else m, dtype=bool)
        m.flags.writeable = False
        self._rel[key] = m

    def remove_constraint(self, u: str, v: str) -> None:
        self._rel.pop(self._key(u, v)[0], None)

    def scopes(self) -> list[tuple[str, str]]:
        return sorted(self._rel, key=lambda k: (self._index[k[0]], self._index[k[1]]))

    def neighbors(self, var: str) -> list[str]:
        return [w for w in self.variables if w != var and self.has_constraint(var, w)]

    def effective(self, u: str, v: str) -> np.ndarray:
        """Matrix u -> v masked to the active domains (universal when unconstrained)."""
        m = self.matrix(u, v)
        if m is None:
            m = np.ones((len(self.domains[u]), len(self.domains[v])), dtype=bool)
        return m & self.active[u][:, None] & self.active[v][None, :]

    def domain_values(self, var: str) -> list[str]:
        return self.domains[var].labels(self.active[var])

    def is_trivially_inconsistent(self) -> bool:
        if any(not a.any() for a in self.active.values()):
            return True
        return any(not self.effective(u, v).any() for u, v in self._rel)

    def copy(self) -> "Network":
        other = Network.__new__(Network)
        other.variables = list(self.variables)
        other._index = dict(self._index)
        other.domains = dict(self.domains)
        other.active = {v: a.copy() for v, a in self.active.items()}
        other._rel = dict(self._rel)  # matrices are read-only
        return other

    def __eq__(self, other):
        if not isinstance(other, Network):
            return NotImplemented
        return (
            self.variables == other.variables
            and self.domains == other.domains
            and all(np.array_equal(self.active[v], other.active[v]) for v in self.variables)
            and self._rel.keys() == other._rel.keys()
            and all(np.array_equal(m, other._rel[k]) for k, m in self._rel.items())
        )

    def __repr__(self):
        return f"Network({len(self.variables)} variables, {len(self._rel)} constraints)"

    # -- assignments -----------------------------------------------------

    def assignment(self, labels: Mapping[str, object]) -> Assignment:
        """Translate {var: label} into {var: value index}."""
        for v in labels:
            self.index(v)
        return {v: self.domains[v].index(a) for v, a in labels.items()}

    def labels(self, sigma: Assignment) -> dict[str, str]:
        return {v: self.domains[v].values[a] for v, a in sigma.items()}


def is_solution(net: Network, sigma: Assignment) -> bool:
    """True iff sigma is a partial solution: bound values are active and every
    constraint whose scope is fully bound is satisfied."""
    for v, a in sigma.items():
        net.index(v)
        if not 0 <= a < len(net.domains[v]) or not net.active[v][a]:
            return False
    for u, v in net.scopes():
        if u in sigma and v in sigma and not net.matrix(u, v)[sigma[u], sigma[v]]:
            return False
    return True


def restrict(net: Network, keep: Iterable[str]) -> Network:
    """The sub-network on `keep` (declaration order preserved)."""
    keep = set(keep)
    for v in keep:
        net.index(v)
    variables = [v for v in net.variables if v in keep]
    sub = Network(variables, {v: net.domains[v] for v in variables})
    for v in variables:
        sub.active[v] = net.active[v].copy()
    for (u, v), m in net._rel.items():
        if u in keep and v in keep:
            sub._rel[(u, v)] = m
    return sub
