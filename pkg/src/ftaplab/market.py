"""Finite event trees with bid-ask data and sets of one-step models.

Nodes are tuples of branch indices; the root is ``()`` and a node's time
is its length.  Each non-terminal node carries a finite list of extreme
kernels (probability vectors over its successors); the set of admissible
one-step models is their convex hull.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from . import cones
from .cones import BidAskMatrix, PolyCone
from .lp import EQ, LinearProgram, as_rat, lp_feasible, vec

Node = tuple


class ModelSelectionError(ValueError):
    pass


def node_str(node: Node) -> str:
    return ".".join(["r"] + [str(k) for k in node])


def parse_node(text: str) -> Node:
    parts = text.split(".")
    if parts[0] != "r":
        raise ValueError(f"node id must start with 'r': {text!r}")
    try:
        return tuple(int(p) for p in parts[1:])
    except ValueError:
        raise ValueError(f"bad node id {text!r}") from None


@dataclass(frozen=True)
class EventTree:
    """``branching[node]`` is the successor count of every non-terminal node."""

    T: int
    branching: Mapping

    def __post_init__(self):
        if self.T < 1:
            raise ValueError("horizon must be at least 1")
        branching = {tuple(k): int(v) for k, v in dict(self.branching).items()}
        object.__setattr__(self, "branching", branching)
        for node in self.nodes():
            if len(node) < self.T and branching.get(node, 0) < 1:
                raise ValueError(f"non-terminal node {node_str(node)} has no successors")
        extra = set(branching) - set(self.nodes())
        if extra:
            raise ValueError(f"branching given for unknown nodes {sorted(map(node_str, extra))}")

    @classmethod
    def uniform(cls, T: int, b: int) -> "EventTree":
        branching = {}
        frontier = [()]
        for _ in range(T):
            nxt = []
            for node in frontier:
                branching[node] = b
                nxt.extend(node + (k,) for k in range(b))
            frontier = nxt
        return cls(T, branching)

    def children(self, node: Node) -> list:
        if len(node) >= self.T:
            return []
        return [node + (k,) for k in range(self.branching[node])]

    def nodes(self) -> list:
        out, frontier = [], [()]
        while frontier:
            out.extend(frontier)
            nxt = []
            for node in frontier:
                if len(node) < self.T:
                    nxt.extend(node + (k,) for k in range(self.branching.get(node, 0)))
            frontier = nxt
        return out

    def nodes_at(self, t: int) -> list:
        return [n for n in self.nodes() if len(n) == t]

    def internal(self) -> list:
        return [n for n in self.nodes() if len(n) < self.T]

    def leaves(self) -> list:
        return self.nodes_at(self.T)

    def is_terminal(self, node: Node) -> bool:
        return len(node) == self.T

    def __contains__(self, node) -> bool:
        node = tuple(node)
        if len(node) > self.T:
            return False
        for t in range(len(node)):
            if node[t] >= self.branching.get(node[:t], 0) or node[t] < 0:
                return False
        return True


@dataclass(frozen=True)
class TreeMeasure:
    kernels: Mapping

    def __post_init__(self):
        object.__setattr__(self, "kernels", {tuple(k): vec(v) for k, v in dict(self.kernels).items()})

    def mass(self, node: Node) -> Fraction:
        m = Fraction(1)
        for t in range(len(node)):
            m *= self.kernels[node[:t]][node[t]]
            if not m:
                break
        return m

    def support(self, node: Node) -> set:
        return {k for k, p in enumerate(self.kernels[node]) if p > 0}

    def leaf_masses(self, tree: EventTree) -> dict:
        return {leaf: self.mass(leaf) for leaf in tree.leaves()}


def hull_weights(extremes, kernel):
    """Convex weights writing ``kernel`` as a mix of ``extremes``, or None."""
    kernel = vec(kernel)
    m = len(extremes)
    rows = [[e[j] for e in extremes] for j in range(len(kernel))] + [[1] * m]
    ok, w = lp_feasible(LinearProgram([0] * m, rows, [EQ] * len(rows), list(kernel) + [1]))
    return w if ok else None


@dataclass
class Market:
    """An event tree with an adapted bid-ask process and model families."""

    tree: EventTree
    bidask: dict
    models: dict
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        self.bidask = {tuple(k): v if isinstance(v, BidAskMatrix) else BidAskMatrix(v)
                       for k, v in self.bidask.items()}
        self.models = {tuple(k): tuple(vec(kern) for kern in v) for k, v in self.models.items()}

    @property
    def T(self) -> int:
        return self.tree.T

    @property
    def d(self) -> int:
        return self.bidask[()].d

    def _memo(self, key, fn):
        try:
            return self._cache[key]
        except KeyError:
            val = self._cache[key] = fn()
            return val

    # -- cones at nodes
    def K(self, node: Node) -> PolyCone:
        return cones.solvency_cone_full(self.bidask[node])

    def Kstar(self, node: Node) -> PolyCone:
        return cones.dual_cone_full(self.bidask[node])

    def dual_rays(self, node: Node) -> tuple:
        return cones.dual_rays(self.bidask[node])

    def interior_anchor(self, node: Node) -> tuple:
        return self._memo(("anchor", node), lambda: cones.pick_interior_point(self.Kstar(node)))

    # -- quasi-sure structure
    def reachable(self, node: Node) -> list:
        """Successors charged by some model (union of extreme-kernel supports)."""
        if self.tree.is_terminal(node):
            raise ValueError(f"terminal node {node_str(node)} has no successors")

        def compute():
            kernels = self.models[node]
            return [node + (k,) for k in range(self.tree.branching[node])
                    if any(kern[k] > 0 for kern in kernels)]
        return self._memo(("reach", node), compute)

    def is_polar(self, node: Node) -> bool:
        for t in range(len(node)):
            if node[: t + 1] not in self.reachable(node[:t]):
                return True
        return False

    def nonpolar_internal(self) -> list:
        return [n for n in self.tree.internal() if not self.is_polar(n)]

    def support_cone(self, node: Node) -> PolyCone:
        """Positions solvent at every reachable successor, as an H-rep."""
        return self._memo(("lambda", node), lambda: cones.cone_intersection(
            [self.K(c) for c in self.reachable(node)]))

    def support_generators(self, node: Node) -> tuple:
        """Extreme rays of the support cone."""
        return self._memo(("lambda-v", node),
                          lambda: cones.with_vrep(self.support_cone(node)).generators)

    def support_dual_generators(self, node: Node) -> tuple:
        """Generators of the dual of the support cone (all successor dual rays)."""
        def compute():
            seen, out = set(), []
            for c in self.reachable(node):
                for r in self.dual_rays(c):
                    if r not in seen:
                        seen.add(r)
                        out.append(r)
            return tuple(out)
        return self._memo(("lambda*", node), compute)

    # -- measures
    def in_model_hull(self, node: Node, kernel) -> bool:
        kernel = tuple(kernel)
        if kernel in self.models[node]:
            return True
        return self._memo(("hull", node, kernel),
                          lambda: hull_weights(self.models[node], kernel) is not None)

    def product_measure(self, selection: Mapping) -> TreeMeasure:
        """Combine one kernel per non-terminal node into a measure on paths."""
        kernels = {}
        for node in self.tree.internal():
            if node not in selection:
                raise ModelSelectionError(f"no kernel chosen at node {node_str(node)}")
            kern = vec(selection[node])
            if len(kern) != self.tree.branching[node] or not self.in_model_hull(node, kern):
                raise ModelSelectionError(f"not a model selection at node {node_str(node)}")
            kernels[node] = kern
        return TreeMeasure(kernels)

    def extreme_measure(self, choice: Mapping | int = 0) -> TreeMeasure:
        """Product of extreme kernels; ``choice`` maps node -> kernel index."""
        sel = {}
        for node in self.tree.internal():
            k = choice if isinstance(choice, int) else choice.get(node, 0)
            sel[node] = self.models[node][k]
        return TreeMeasure(sel)

    def uniform_mixture(self, node: Node) -> tuple:
        ks = self.models[node]
        m = len(ks)
        return tuple(sum((k[j] for k in ks), Fraction(0)) / m for j in range(len(ks[0])))

    def uniform_measure(self) -> TreeMeasure:
        return TreeMeasure({n: self.uniform_mixture(n) for n in self.tree.internal()})


def validate_instance(market: Market, c=None) -> list:
    """Return violations (strings naming node and condition); empty if valid."""
    tree = market.tree
    out = []
    d = None
    for node in tree.nodes():
        name = node_str(node)
        pi = market.bidask.get(node)
        if pi is None:
            out.append(f"missing bid-ask matrix at node {name}")
            continue
        if d is None:
            d = pi.d
        elif pi.d != d:
            out.append(f"asset count {pi.d} at node {name} differs from {d}")
            continue
        for msg in cones.validate_bidask(pi, c):
            out.append(f"{msg} at node {name}")
    for node in tree.internal():
        name = node_str(node)
        kernels = market.models.get(node)
        if not kernels:
            out.append(f"no model kernels at node {name}")
            continue
        width = tree.branching[node]
        for idx, kern in enumerate(kernels):
            if len(kern) != width:
                out.append(f"kernel {idx} at node {name} has {len(kern)} entries, expected {width}")
            elif any(p < 0 for p in kern):
                out.append(f"kernel {idx} at node {name} has a negative entry")
            elif sum(kern) != 1:
                out.append(f"kernel {idx} at node {name} does not sum to 1")
    for node in set(market.models) - set(tree.internal()):
        out.append(f"kernels given at terminal or unknown node {node_str(node)}")
    return out
