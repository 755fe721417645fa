"""JSON formats for networks and languages.

Network document::

    {"variables": ["x", "y"],
     "domains": {"x": ["a", "b"], "y": ["a", "b"]},
     "constraints": [{"scope": ["x", "y"], "tuples": [["a", "b"]]}],
     "sorts": {"x": "D", "y": "D"},            # optional shared domain names
     "active": {"x": ["a"]},                   # optional pruned domains
     "trees": {"x": [["a", "b"]]},             # optional tree domains
     "majority": {"D": ["a", "a", ...]}}       # optional d^3 label tables

Label order in "domains" fixes matrix indexing. Without "sorts" every
variable's domain is named after the variable. Majority tables are keyed by
domain name and flattened row-major over (x, y, z).

Language document::

    {"domains": {"D": ["a", "b", "c"]},
     "relations": [{"source": "D", "target": "D", "tuples": [["a", "a"]]}]}
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import Domain, Network, NetworkError, Relation
from .elimination import Language
from .majority import MajorityOperation, TreeDomain


@dataclass
class Document:
    network: Network
    trees: dict[str, TreeDomain] = field(default_factory=dict)
    majority: MajorityOperation | None = None


def _need(doc: dict, key: str):
    if key not in doc:
        raise NetworkError(f"missing {key!r}")
    return doc[key]


def network_from_dict(doc: dict) -> Document:
    variables = [str(v) for v in _need(doc, "variables")]
    raw = _need(doc, "domains")
    sorts = doc.get("sorts") or {}
    domains: dict[str, Domain] = {}
    shared: dict[str, Domain] = {}
    for v in variables:
        if v not in raw:
            raise NetworkError(f"no domain for {v!r}")
        name = str(sorts.get(v, v))
        dom = Domain(name, tuple(raw[v]))
        if name in shared and shared[name] != dom:
            raise NetworkError(f"variables of sort {name!r} disagree on values")
        domains[v] = shared.setdefault(name, dom)
    net = Network(variables, domains)
    for c in doc.get("constraints", []):
        scope = _need(c, "scope")
        if len(scope) != 2:
            raise NetworkError(f"constraint scope {scope} is not binary")
        u, v = str(scope[0]), str(scope[1])
        if net.has_constraint(u, v):
            raise NetworkError(f"two constraints on ({u}, {v})")
        net.set_relation(u, v, Relation.from_tuples(domains[u], domains[v], _need(c, "tuples")))
    for v, labels in (doc.get("active") or {}).items():
        net.index(v)
        net.active[v] = net.domains[v].mask(labels)
    trees = {}
    for v, edges in (doc.get("trees") or {}).items():
        net.index(v)
        trees[v] = TreeDomain.from_labels(net.domains[v], edges)
    majority = None
    if doc.get("majority"):
        by_name = {d.name: d for d in domains.values()}
        tables = {}
        for name, flat in doc["majority"].items():
            if name not in by_name:
                raise NetworkError(f"majority table for unknown domain {name!r}")
            dom = by_name[name]
            d = len(dom)
            if len(flat) != d ** 3:
                raise NetworkError(f"majority table for {name!r} needs {d ** 3} entries")
            tables[name] = np.array([dom.index(x) for x in flat]).reshape(d, d, d)
        majority = MajorityOperation(tables)
    return Document(net, trees, majority)


def network_to_dict(net: Network, trees=None, majority: MajorityOperation | None = None) -> dict:
    doc: dict = {"variables": list(net.variables)}
    doc["domains"] = {v: list(net.domains[v].values) for v in net.variables}
    if any(net.domains[v].name != v for v in net.variables):
        doc["sorts"] = {v: net.domains[v].name for v in net.variables}
    doc["constraints"] = [
        {"scope": [u, v], "tuples": [list(t) for t in net.relation(u, v).tuples()]}
        for u, v in net.scopes()
    ]
    pruned = {v: net.domain_values(v) for v in net.variables if not net.active[v].all()}
    if pruned:
        doc["active"] = pruned
    if trees:
        doc["trees"] = {
            v: [[t.domain.values[a], t.domain.values[b]] for a, b in t.edges]
            for v, t in sorted(trees.items(), key=lambda kv: net.index(kv[0]))
        }
    if majority is not None:
        names = {net.domains[v].name: net.domains[v] for v in net.variables}
        doc["majority"] = {
            name: [names[name].values[x] for x in majority[name].ravel()]
            for name in names if name in majority
        }
    return doc


def language_from_dict(doc: dict) -> Language:
    doms = {str(k): Domain(str(k), tuple(v)) for k, v in _need(doc, "domains").items()}
    rels = []
    for r in _need(doc, "relations"):
        src, tgt = str(_need(r, "source")), str(_need(r, "target"))
        if src not in doms or tgt not in doms:
            raise NetworkError(f"relation over unknown domain {src!r} or {tgt!r}")
        rels.append(Relation.from_tuples(doms[src], doms[tgt], _need(r, "tuples")))
    return Language(list(doms.values()), rels)


def language_to_dict(lang: Language) -> dict:
    return {
        "domains": {d.name: list(d.values) for d in lang.domains},
        "relations": [
            {"source": r.source.name, "target": r.target.name, "tuples": [list(t) for t in r.tuples()]}
            for r in lang.relations
        ],
    }


def _compact(x) -> str:
    return json.dumps(x, ensure_ascii=False, separators=(", ", ": "))


def dumps(doc: dict) -> str:
    """One line per top-level entry, per domain, per constraint."""
    parts = []
    for key, val in doc.items():
        if isinstance(val, dict) and val:
            inner = ",\n".join(f"  {_compact(k)}: {_compact(v)}" for k, v in val.items())
            parts.append(f" {_compact(key)}: {{\n{inner}\n }}")
        elif isinstance(val, list) and val and isinstance(val[0], dict):
            inner = ",\n".join(f"  {_compact(v)}" for v in val)
            parts.append(f" {_compact(key)}: [\n{inner}\n ]")
        else:
            parts.append(f" {_compact(key)}: {_compact(val)}")
    return "{\n" + ",\n".join(parts) + "\n}\n"


def load(path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise NetworkError(f"{path}: {e}") from None


def read_network(path) -> Document:
    return network_from_dict(load(path))


def write_network(path, net: Network, trees=None, majority=None) -> None:
    Path(path).write_text(dumps(network_to_dict(net, trees, majority)), encoding="utf-8")


def is_language_doc(doc: dict) -> bool:
    return "relations" in doc and "variables" not in doc
