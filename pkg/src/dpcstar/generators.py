"""Seeded random instances: majority-closed networks, tree-preserving
networks, inconsistent variants and unstructured networks.

Every generator is a pure function of its parameters and seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import Domain, Network, Relation
from .majority import MajorityOperation, TreeDomain, close_under, is_closed_under
from .oracle import is_consistent


class GenerationError(RuntimeError):
    """A generator gave up after its attempt budget."""


@dataclass(frozen=True)
class GenParams:
    n: int
    d: int
    rho: float
    l: float
    seed: int = 0

    def __post_init__(self):
        if self.n < 1 or self.d < 1:
            raise ValueError("n and d must be positive")
        if not (0 <= self.rho <= 1 and 0 <= self.l <= 1):
            raise ValueError("rho and l must lie in [0, 1]")

    @property
    def n_constraints(self) -> int:
        """ceil(rho * n(n-1)/2); rho is read against the number of pairs."""
        return math.ceil(self.rho * self.n * (self.n - 1) / 2 - 1e-9)


@dataclass
class Instance:
    network: Network
    params: GenParams
    majority: MajorityOperation | None = None
    trees: dict[str, TreeDomain] = field(default_factory=dict)
    planted: dict[str, int] | None = None
    looseness: float = 0.0  # mean achieved |R| / d^2 over the constraints


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def _labels(d: int) -> tuple[str, ...]:
    return tuple(str(i) for i in range(d))


def _variables(n: int) -> list[str]:
    width = len(str(n - 1))
    return [f"v{i:0{width}d}" for i in range(n)]


def _scopes(rng, n: int, m: int) -> list[tuple[int, int]]:
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    pick = rng.choice(len(pairs), size=m, replace=False) if m else []
    return sorted(pairs[k] for k in pick)


def gen_majority_op(d: int, seed=0, name: str = "D") -> MajorityOperation:
    """Repeated argument when two agree, a uniform random value otherwise."""
    rng = _rng(seed)
    a, b, c = np.meshgrid(np.arange(d), np.arange(d), np.arange(d), indexing="ij")
    t = rng.integers(0, d, size=(d, d, d))
    t = np.where(a == b, a, np.where(b == c, b, np.where(a == c, a, t)))
    return MajorityOperation({name: t})


def gen_majority_closed_network(p: GenParams) -> Instance:
    """Planted-solution network whose relations are closed under one random
    majority operation on a shared domain.

    Each relation starts from the planted tuple plus random tuples up to
    round(l * d^2), then is closed under the operation. A closure that comes
    out universal is redrawn with half as many random tuples.
    """
    rng = _rng(p.seed)
    dom = Domain("D", _labels(p.d))
    phi = gen_majority_op(p.d, rng, dom.name)
    vs = _variables(p.n)
    net = Network(vs, {v: dom for v in vs})
    sigma = {v: int(rng.integers(p.d)) for v in vs}
    target = max(1, round(p.l * p.d * p.d))
    sizes = []
    for i, j in _scopes(rng, p.n, p.n_constraints):
        extra = target - 1
        while True:
            m = np.zeros((p.d, p.d), dtype=bool)
            m[sigma[vs[i]], sigma[vs[j]]] = True
            if extra:
                cells = rng.choice(p.d * p.d, size=min(extra, p.d * p.d), replace=False)
                m.flat[cells] = True
            rel = close_under(Relation(dom, dom, m), phi)
            if not rel.is_universal() or extra == 0:
                break
            extra //= 2
        net.set_relation(vs[i], vs[j], rel)
        sizes.append(len(rel))
    loose = float(np.mean(sizes)) / (p.d * p.d) if sizes else 0.0
    return Instance(net, p, majority=phi, planted=sigma, looseness=loose)


def _random_tree_edges(rng, d: int) -> list[tuple[int, int]]:
    return [(i, int(rng.integers(i))) for i in range(1, d)]


def _tree_distances(d: int, edges) -> np.ndarray:
    adj = [[] for _ in range(d)]
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    dist = np.full((d, d), -1, dtype=np.intp)
    for s in range(d):
        dist[s, s] = 0
        stack = [s]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if dist[s, w] < 0:
                    dist[s, w] = dist[s, u] + 1
                    stack.append(w)
    return dist


def _radius(rng, frac: np.ndarray, l: float) -> int:
    """Radius whose expected ball looseness is l, mixing the two nearest
    radii; never the diameter (that would make the constraint universal)."""
    top = int(np.argmax(frac >= 1.0))  # the diameter
    cap = max(top - 1, 0)
    lo = min(int(np.searchsorted(frac, l, side="right")) - 1, cap)
    if lo < 0:
        return 0
    hi = min(lo + 1, cap)
    if hi == lo or frac[hi] == frac[lo]:
        return lo
    return hi if rng.random() < (l - frac[lo]) / (frac[hi] - frac[lo]) else lo


def gen_tree_preserving_network(p: GenParams) -> Instance:
    """Planted-solution network of tree-preserving constraints.

    One random tree shape is relabelled by a random permutation per variable,
    giving each domain its own tree. R_ij relates u and w when their
    preimages in the shape lie within distance r; rows and columns are then
    balls, i.e. subtrees, and the images of subtrees are subtrees in both
    directions. r is drawn per relation so that the expected looseness
    matches l. The planted solution maps every variable to the copy of one
    shape vertex.
    """
    rng = _rng(p.seed)
    d = p.d
    shape = _random_tree_edges(rng, d)
    dist = _tree_distances(d, shape)
    frac = np.array([(dist <= r).mean() for r in range(d)])
    vs = _variables(p.n)
    perms = {v: rng.permutation(d) for v in vs}  # shape vertex -> value
    domains = {v: Domain(v, _labels(d)) for v in vs}
    trees = {
        v: TreeDomain(domains[v], tuple((int(perms[v][a]), int(perms[v][b])) for a, b in shape))
        for v in vs
    }
    net = Network(vs, domains)
    centre = int(rng.integers(d))
    sigma = {v: int(perms[v][centre]) for v in vs}
    sizes = []
    inv = {v: np.argsort(perms[v]) for v in vs}  # value -> shape vertex
    for i, j in _scopes(rng, p.n, p.n_constraints):
        r = _radius(rng, frac, p.l)
        vi, vj = vs[i], vs[j]
        m = dist[np.ix_(inv[vi], inv[vj])] <= r
        net.set_relation(vi, vj, m)
        sizes.append(int(m.sum()))
    loose = float(np.mean(sizes)) / (d * d) if sizes else 0.0
    return Instance(net, p, trees=trees, planted=sigma, looseness=loose)


def gen_inconsistent_variant(net: Network, phi: MajorityOperation, seed=0, attempts: int = 500) -> Network:
    """Shrink random relations (keeping a random nonempty subset, then
    re-closing under phi) until the oracle finds no solution."""
    rng = _rng(seed)
    out = net.copy()
    scopes = out.scopes()
    if not scopes:
        raise GenerationError("no constraint to tighten")
    for _ in range(attempts):
        u, v = scopes[int(rng.integers(len(scopes)))]
        rel = out.relation(u, v)
        cells = np.flatnonzero(rel.matrix)
        keep = cells[rng.random(len(cells)) < 0.5]
        if keep.size == 0:
            keep = cells[[int(rng.integers(len(cells)))]]
        m = np.zeros(rel.matrix.shape, dtype=bool)
        m.flat[keep] = True
        out.set_relation(u, v, close_under(Relation(rel.source, rel.target, m), phi))
        if not is_consistent(out):
            return out
    raise GenerationError(f"still consistent after {attempts} tightenings")


def gen_random_network(p: GenParams) -> Network:
    """Unstructured network: each chosen scope gets each tuple with
    probability l (redrawn while empty)."""
    rng = _rng(p.seed)
    vs = _variables(p.n)
    dom = Domain("D", _labels(p.d))
    net = Network(vs, {v: dom for v in vs})
    for i, j in _scopes(rng, p.n, p.n_constraints):
        m = rng.random((p.d, p.d)) < p.l
        while not m.any():
            m = np.zeros((p.d, p.d), dtype=bool)
            m.flat[int(rng.integers(p.d * p.d))] = True
        net.set_relation(vs[i], vs[j], m)
    return net


def relations_closed(net: Network, phi: MajorityOperation) -> bool:
    return all(is_closed_under(net.relation(u, v), phi) for u, v in net.scopes())


GENERATORS = {
    "majority": gen_majority_closed_network,
    "tree-preserving": gen_tree_preserving_network,
}
