"""JSON documents for instances, certificates, price systems and reports.

Rationals are written as exact ``"p/q"`` strings, nodes as ``"r.0.1"``
paths.  Documents carry a schema name and version; keys are sorted so a
value always serializes to the same bytes.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .cones import BidAskMatrix
from .lp import as_rat
from .market import EventTree, Market, TreeMeasure, node_str, parse_node
from .na2 import ArbitrageCertificate, Strategy
from .pce import ExtensionRequest, PriceSystem

VERSION = 1
INSTANCE = "ftaplab.instance"
CERTIFICATE = "ftaplab.certificate"
PRICE_SYSTEM = "ftaplab.price_system"
REPORT = "ftaplab.report"


class SchemaError(ValueError):
    def __init__(self, path: str, msg: str):
        self.path = path
        super().__init__(f"{path}: {msg}")


@dataclass
class InstanceDocument:
    market: Market
    metadata: dict = field(default_factory=dict)


def dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def rats(v) -> list:
    return [str(Fraction(x)) for x in v]


def _rat(x, path):
    try:
        return as_rat(x)
    except (TypeError, ValueError, ZeroDivisionError):
        raise SchemaError(path, f"not an exact rational: {x!r}") from None


def _rvec(v, path, length=None):
    if not isinstance(v, list):
        raise SchemaError(path, "expected a list of rationals")
    if length is not None and len(v) != length:
        raise SchemaError(path, f"expected {length} entries, got {len(v)}")
    return tuple(_rat(x, f"{path}[{i}]") for i, x in enumerate(v))


def _node(text, path):
    try:
        return parse_node(text)
    except (ValueError, AttributeError):
        raise SchemaError(path, f"bad node id {text!r}") from None


def _expect(doc, schema, path="$"):
    if not isinstance(doc, dict):
        raise SchemaError(path, "expected an object")
    if doc.get("schema") != schema:
        raise SchemaError(f"{path}.schema", f"expected {schema!r}, got {doc.get('schema')!r}")
    if doc.get("version") != VERSION:
        raise SchemaError(f"{path}.version", f"unsupported version {doc.get('version')!r}")


def _field(doc, key, path):
    if key not in doc:
        raise SchemaError(f"{path}.{key}", "missing")
    return doc[key]


# ---------------------------------------------------------------- instances

def instance_to_dict(doc: InstanceDocument) -> dict:
    m = doc.market
    return {
        "schema": INSTANCE,
        "version": VERSION,
        "d": m.d,
        "T": m.T,
        "tree": {node_str(n): b for n, b in m.tree.branching.items()},
        "bidask": {node_str(n): [rats(r) for r in pi.entries] for n, pi in m.bidask.items()},
        "kernels": {node_str(n): [rats(k) for k in ks] for n, ks in m.models.items()},
        "metadata": doc.metadata,
    }


def instance_from_dict(doc: dict, path: str = "$") -> InstanceDocument:
    _expect(doc, INSTANCE, path)
    d = _field(doc, "d", path)
    T = _field(doc, "T", path)
    if not isinstance(d, int) or d < 2:
        raise SchemaError(f"{path}.d", "asset count must be an integer >= 2")
    if not isinstance(T, int) or T < 1:
        raise SchemaError(f"{path}.T", "horizon must be an integer >= 1")
    raw_tree = _field(doc, "tree", path)
    if not isinstance(raw_tree, dict):
        raise SchemaError(f"{path}.tree", "expected an object")
    branching = {}
    for key, b in raw_tree.items():
        if not isinstance(b, int) or b < 1:
            raise SchemaError(f"{path}.tree.{key}", "branching must be a positive integer")
        branching[_node(key, f"{path}.tree")] = b
    try:
        tree = EventTree(T, branching)
    except ValueError as exc:
        raise SchemaError(f"{path}.tree", str(exc)) from None
    bidask = {}
    raw_bid = _field(doc, "bidask", path)
    for key, rows in raw_bid.items():
        p = f"{path}.bidask.{key}"
        node = _node(key, p)
        if node not in tree:
            raise SchemaError(p, "node is not in the tree")
        if not isinstance(rows, list) or len(rows) != d:
            raise SchemaError(p, f"expected {d} rows")
        entries = [_rvec(r, f"{p}[{i}]", d) for i, r in enumerate(rows)]
        try:
            bidask[node] = BidAskMatrix(entries)
        except ValueError as exc:
            raise SchemaError(p, str(exc)) from None
    for node in tree.nodes():
        if node not in bidask:
            raise SchemaError(f"{path}.bidask", f"missing node {node_str(node)}")
    models = {}
    raw_k = _field(doc, "kernels", path)
    for key, ks in raw_k.items():
        p = f"{path}.kernels.{key}"
        node = _node(key, p)
        if node not in tree or tree.is_terminal(node):
            raise SchemaError(p, "kernels must sit on non-terminal nodes")
        if not isinstance(ks, list) or not ks:
            raise SchemaError(p, "expected a nonempty list of kernels")
        width = tree.branching[node]
        rows = []
        for i, k in enumerate(ks):
            kern = _rvec(k, f"{p}[{i}]", width)
            if any(x < 0 for x in kern) or sum(kern) != 1:
                raise SchemaError(f"{p}[{i}]", f"malformed kernel row at node {key}")
            rows.append(kern)
        models[node] = rows
    for node in tree.internal():
        if node not in models:
            raise SchemaError(f"{path}.kernels", f"missing node {node_str(node)}")
    meta = doc.get("metadata", {})
    if not isinstance(meta, dict):
        raise SchemaError(f"{path}.metadata", "expected an object")
    return InstanceDocument(Market(tree, bidask, models), meta)


# ---------------------------------------------------------------- certificates, strategies

def certificate_to_dict(cert: ArbitrageCertificate) -> dict:
    return {
        "schema": CERTIFICATE,
        "version": VERSION,
        "t": cert.t,
        "node": node_str(cert.node),
        "zeta": rats(cert.zeta),
        "separating_ray": rats(cert.separating_ray),
    }


def certificate_from_dict(doc: dict, path: str = "$") -> ArbitrageCertificate:
    _expect(doc, CERTIFICATE, path)
    node = _node(_field(doc, "node", path), f"{path}.node")
    zeta = _rvec(_field(doc, "zeta", path), f"{path}.zeta")
    ray = _rvec(_field(doc, "separating_ray", path), f"{path}.separating_ray", len(zeta))
    return ArbitrageCertificate(_field(doc, "t", path), node, zeta, ray)


def strategy_to_dict(s: Strategy) -> dict:
    return {"d": s.d, "xi": {node_str(n): rats(v) for n, v in s.xi.items()}}


def strategy_from_dict(doc: dict, path: str = "$") -> Strategy:
    d = _field(doc, "d", path)
    xi = {_node(k, f"{path}.xi"): _rvec(v, f"{path}.xi.{k}", d) for k, v in _field(doc, "xi", path).items()}
    return Strategy(d, xi)


# ---------------------------------------------------------------- price systems

def _nodemap(m: dict) -> dict:
    return {node_str(n): rats(v) for n, v in m.items()}


def _nodemap_from(doc, path) -> dict:
    if not isinstance(doc, dict):
        raise SchemaError(path, "expected an object")
    return {_node(k, path): _rvec(v, f"{path}.{k}") for k, v in doc.items()}


def request_to_dict(req: ExtensionRequest) -> dict:
    return {"t": req.t, "P": _nodemap(req.P.kernels), "Y": _nodemap(req.Y)}


def request_from_dict(doc: dict, path: str = "$") -> ExtensionRequest:
    return ExtensionRequest(_field(doc, "t", path),
                            TreeMeasure(_nodemap_from(_field(doc, "P", path), f"{path}.P")),
                            _nodemap_from(_field(doc, "Y", path), f"{path}.Y"))


def price_system_to_dict(ps: PriceSystem) -> dict:
    return {
        "schema": PRICE_SYSTEM,
        "version": VERSION,
        "t": ps.t,
        "Q": _nodemap(ps.Q.kernels),
        "Z": _nodemap(ps.Z),
        "R_witness": _nodemap(ps.R_witness),
    }


def price_system_from_dict(doc: dict, path: str = "$") -> PriceSystem:
    _expect(doc, PRICE_SYSTEM, path)
    return PriceSystem(_field(doc, "t", path),
                       TreeMeasure(_nodemap_from(_field(doc, "Q", path), f"{path}.Q")),
                       _nodemap_from(_field(doc, "Z", path), f"{path}.Z"),
                       _nodemap_from(doc.get("R_witness", {}), f"{path}.R_witness"))


# ---------------------------------------------------------------- generic entry points

def to_dict(obj) -> dict:
    if isinstance(obj, InstanceDocument):
        return instance_to_dict(obj)
    if isinstance(obj, ArbitrageCertificate):
        return certificate_to_dict(obj)
    if isinstance(obj, PriceSystem):
        return price_system_to_dict(obj)
    if isinstance(obj, dict) and obj.get("schema") == REPORT:
        return obj
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def from_dict(doc: dict):
    if not isinstance(doc, dict):
        raise SchemaError("$", "expected an object")
    schema = doc.get("schema")
    if schema == INSTANCE:
        return instance_from_dict(doc)
    if schema == CERTIFICATE:
        return certificate_from_dict(doc)
    if schema == PRICE_SYSTEM:
        return price_system_from_dict(doc)
    if schema == REPORT:
        _expect(doc, REPORT)
        return doc
    raise SchemaError("$.schema", f"unknown schema {schema!r}")


def serialize(obj) -> str:
    return dumps(to_dict(obj))


def deserialize(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"invalid JSON: {exc}") from None
    return from_dict(doc)


def load(path):
    with open(path, encoding="utf-8") as fh:
        return deserialize(fh.read())


def save(obj, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize(obj))
