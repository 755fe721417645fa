"""Constraint graphs, perfect elimination orderings and induced width.

Orderings are plain sequences of variables. An *elimination order* lists the
vertex eliminated first at position 0; `is_peo` reads its argument that way.
The algorithms in `dpcstar.dpc` take the opposite view (their ordering ≺ is
processed from the last position down), so a graph produced by them has
``reversed(order)`` as a PEO.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .core import Network


@dataclass(frozen=True)
class ConstraintGraph:
    vertices: tuple[str, ...]
    edges: frozenset[frozenset[str]]

    @classmethod
    def from_edges(cls, vertices: Iterable[str], edges: Iterable[tuple[str, str]]) -> "ConstraintGraph":
        vertices = tuple(vertices)
        es = frozenset(frozenset(e) for e in edges)
        for e in es:
            if len(e) != 2 or not e <= set(vertices):
                raise ValueError(f"bad edge {set(e)}")
        return cls(vertices, es)

    @classmethod
    def of(cls, net: Network, drop_universal: bool = False) -> "ConstraintGraph":
        """Edges are the stored constraint scopes; optionally skip universal ones."""
        scopes = net.scopes()
        if drop_universal:
            scopes = [(u, v) for u, v in scopes if not net.effective(u, v).all()]
        return cls.from_edges(net.variables, scopes)

    def adjacency(self) -> dict[str, set[str]]:
        adj = {v: set() for v in self.vertices}
        for e in self.edges:
            u, v = tuple(e)
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def has_edge(self, u: str, v: str) -> bool:
        return frozenset((u, v)) in self.edges


def _check_order(g: ConstraintGraph, order: Sequence[str]) -> None:
    if len(order) != len(g.vertices) or set(order) != set(g.vertices):
        raise ValueError("ordering does not cover the vertex set exactly")


def is_peo(g: ConstraintGraph, elim: Sequence[str]) -> bool:
    """True iff every vertex's later neighbours in `elim` form a clique."""
    _check_order(g, elim)
    pos = {v: i for i, v in enumerate(elim)}
    adj = g.adjacency()
    for v in elim:
        later = [w for w in adj[v] if pos[w] > pos[v]]
        for a, b in combinations(later, 2):
            if b not in adj[a]:
                return False
    return True


def mcs_order(g: ConstraintGraph) -> list[str]:
    """Maximum cardinality search visit order, ties broken by lowest index."""
    adj = g.adjacency()
    weight = {v: 0 for v in g.vertices}
    visited: list[str] = []
    left = list(g.vertices)
    while left:
        best = max(left, key=lambda v: weight[v])  # max keeps the first maximum
        left.remove(best)
        visited.append(best)
        for w in adj[best]:
            if w in weight:
                weight[w] += 1
        del weight[best]
    return visited


def find_peo(g: ConstraintGraph) -> list[str] | None:
    """A PEO of g when g is chordal, else None."""
    peo = mcs_order(g)[::-1]
    return peo if is_peo(g, peo) else None


def is_chordal(g: ConstraintGraph) -> bool:
    return find_peo(g) is not None


def fill_in(g: ConstraintGraph, order: Sequence[str]) -> ConstraintGraph:
    """Simulate elimination along reversed(order), connecting each eliminated
    vertex's earlier neighbours. reversed(order) is a PEO of the result."""
    _check_order(g, order)
    pos = {v: i for i, v in enumerate(order)}
    adj = g.adjacency()
    edges = set(g.edges)
    for v in reversed(order):
        earlier = [w for w in adj[v] if pos[w] < pos[v]]
        for a, b in combinations(earlier, 2):
            if b not in adj[a]:
                adj[a].add(b)
                adj[b].add(a)
                edges.add(frozenset((a, b)))
    return ConstraintGraph(g.vertices, frozenset(edges))


def induced_width(g: ConstraintGraph, order: Sequence[str]) -> int:
    """Largest number of earlier neighbours met while eliminating along reversed(order)."""
    _check_order(g, order)
    pos = {v: i for i, v in enumerate(order)}
    adj = fill_in(g, order).adjacency()
    return max((sum(pos[w] < pos[v] for w in adj[v]) for v in order), default=0)
