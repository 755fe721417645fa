"""Random objects shared by the test modules."""

from itertools import combinations_with_replacement, product

import numpy as np

from dpcstar import Domain, GenParams, Language, Network, Relation, close_under, gen_majority_op, gen_random_network


def solution_set(net, sols):
    return {tuple(s[v] for v in net.variables) for s in sols}


def random_matrix(rng, rows, cols, density):
    m = rng.random((rows, cols)) < density
    if not m.any():
        m[rng.integers(rows), rng.integers(cols)] = True
    return m


def random_ac_matrix(rng, rows, cols, density):
    """No empty row or column."""
    m = rng.random((rows, cols)) < density
    for a in np.flatnonzero(~m.any(axis=1)):
        m[a, rng.integers(cols)] = True
    for b in np.flatnonzero(~m.any(axis=0)):
        m[rng.integers(rows), b] = True
    return m


def random_language(rng, max_d=4, max_rels=6):
    """One or two domains of size 2..max_d and 1..max_rels relations. Every
    other draw on a single domain is closed under a random majority
    operation, so both Helly verdicts show up."""
    closed = rng.random() < 0.5
    ndom = 1 if closed else int(rng.integers(1, 3))
    doms = [Domain(f"D{k}", tuple("abcd"[: int(rng.integers(2, max_d + 1))])) for k in range(ndom)]
    phi = gen_majority_op(len(doms[0]), rng, doms[0].name) if closed else None
    rels = []
    for _ in range(int(rng.integers(1, max_rels + 1))):
        s, t = doms[rng.integers(ndom)], doms[rng.integers(ndom)]
        r = Relation(s, t, random_matrix(rng, len(s), len(t), rng.uniform(0.2, 0.7)))
        rels.append(close_under(r, phi) if closed else r)
    return Language(doms, rels)


def star_options(lang, dom):
    """(relation index, inverted) whose images land in dom."""
    opts = []
    for i, r in enumerate(lang.relations):
        if r.target == dom:
            opts.append((i, False))
        if r.source == dom:
            opts.append((i, True))
    return opts


def star_network(lang, dom, picks):
    """Centre x over dom, one leaf per pick constrained towards x."""
    leaves = [f"y{k}" for k in range(len(picks))]
    domains = {"x": dom}
    for y, (i, inv) in zip(leaves, picks):
        r = lang.relations[i]
        domains[y] = r.target if inv else r.source
    net = Network(["x"] + leaves, domains)
    for y, (i, inv) in zip(leaves, picks):
        m = lang.relations[i].matrix
        net.set_relation(y, "x", m.T if inv else m)
    return net


def stars(lang):
    """Every star network over lang with 2..|D| leaves around a centre
    over D, for every domain D."""
    for dom in lang.domains:
        opts = star_options(lang, dom)
        for m in range(2, len(dom) + 1):
            for picks in combinations_with_replacement(opts, m):
                yield star_network(lang, dom, picks)


def random_language_network(rng, lang, n):
    """n variables over random domains of lang; each pair gets a random
    fitting relation (either orientation) with probability 0.7."""
    vs = [f"u{k}" for k in range(n)]
    domains = {v: lang.domains[rng.integers(len(lang.domains))] for v in vs}
    net = Network(vs, domains)
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() > 0.7:
                continue
            du, dv = domains[vs[a]], domains[vs[b]]
            fits = [r.matrix for r in lang.relations if (r.source, r.target) == (du, dv)]
            fits += [r.matrix.T for r in lang.relations if (r.source, r.target) == (dv, du)]
            if fits:
                net.set_relation(vs[a], vs[b], fits[rng.integers(len(fits))])
    return net


def brute_solutions(net):
    """Solutions by plain enumeration of the active domains."""
    vs = net.variables
    ranges = [np.flatnonzero(net.active[v]) for v in vs]
    scopes = [(vs.index(u), vs.index(v), net.matrix(u, v)) for u, v in net.scopes()]
    return {t for t in product(*ranges) if all(m[t[i], t[j]] for i, j, m in scopes)}


def small_network(rng, n=None, d=None, rho=None, l=None):
    p = GenParams(
        n if n is not None else int(rng.integers(1, 7)),
        d if d is not None else int(rng.integers(1, 5)),
        rho if rho is not None else float(rng.uniform(0, 1)),
        l if l is not None else float(rng.uniform(0.2, 0.9)),
        int(rng.integers(2**31)),
    )
    return gen_random_network(p)
