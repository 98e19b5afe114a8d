"""No-arbitrage of the second kind on event trees.

Locally, a node is arbitrage-free when every position that is solvent at
all reachable successors is already solvent at the node.  The check runs
on the dual side: each extreme ray of today's dual cone must be a
nonnegative combination of the successors' dual rays.  A ray that is not
yields, by a small separation program, a position ``zeta`` solvent
tomorrow (quasi-surely) but not today.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from . import cones
from .cones import PolyCone
from .lp import EQ, FREE, GE, LinearProgram, Status, dot, lp_feasible, lp_solve, vec
from .market import Market, Node, node_str

HOLDS, FAILS = "holds", "fails"


class CertificateError(ValueError):
    pass


@dataclass(frozen=True)
class ArbitrageCertificate:
    t: int
    node: Node
    zeta: tuple
    separating_ray: tuple


@dataclass(frozen=True)
class Na2Verdict:
    status: str
    certificate: ArbitrageCertificate | None = None

    @property
    def holds(self) -> bool:
        return self.status == HOLDS


@dataclass
class GlobalVerdict:
    status: str
    failing: list = field(default_factory=list)  # [(node, ArbitrageCertificate)]

    @property
    def holds(self) -> bool:
        return self.status == HOLDS

    @property
    def failing_nodes(self) -> list:
        return [n for n, _ in self.failing]


@dataclass
class Strategy:
    """Increments ``xi[node]``; nodes not listed trade nothing."""

    d: int
    xi: dict = field(default_factory=dict)

    def at(self, node: Node) -> tuple:
        return self.xi.get(node, (Fraction(0),) * self.d)


def in_cone_of(x, generators) -> bool:
    if not generators:
        return not any(x)
    d = len(x)
    rows = [[g[i] for g in generators] for i in range(d)]
    ok, _ = lp_feasible(LinearProgram([0] * len(generators), rows, [EQ] * d, x))
    return ok


def separating_position(ray, generators) -> tuple:
    """Vertex ``zeta`` with ``<g, zeta> >= 0`` for all generators and ``<ray, zeta> = -1``.

    Minimizing the summed slack picks a vertex of the feasible region.
    """
    d = len(ray)
    obj = [sum((g[i] for g in generators), Fraction(0)) for i in range(d)]
    rows = [list(g) for g in generators] + [list(ray)]
    senses = [GE] * len(generators) + [EQ]
    rhs = [0] * len(generators) + [-1]
    out = lp_solve(LinearProgram(obj, rows, senses, rhs, [FREE] * d, maximize=False))
    if out.status is not Status.OPTIMAL:
        raise CertificateError("ray lies in the support dual; nothing separates")
    return out.point


def na2_local(market: Market, node: Node) -> Na2Verdict:
    if market.tree.is_terminal(node):
        raise ValueError(f"node {node_str(node)} is terminal")
    if market.is_polar(node):
        raise ValueError(f"verdict irrelevant: node {node_str(node)} is polar")
    gens = market.support_dual_generators(node)
    failing = [r for r in market.dual_rays(node) if not in_cone_of(r, gens)]
    if not failing:
        return Na2Verdict(HOLDS)
    # last failing ray in canonical order; any choice certifies
    r = failing[-1]
    zeta = cones.primitive(separating_position(r, gens))
    return Na2Verdict(FAILS, ArbitrageCertificate(len(node), node, zeta, r))


def na2_local_vrep(market: Market, node: Node) -> bool:
    """Oracle: compute generators of the support cone by double description
    and test each for solvency today."""
    lam = cones.with_vrep(market.support_cone(node))
    K = market.K(node)
    return all(cones.member_vrep(g, K) for g in lam.generators)


def na2_global(market: Market) -> GlobalVerdict:
    failing = []
    for node in market.nonpolar_internal():
        v = na2_local(market, node)
        if not v.holds:
            failing.append((node, v.certificate))
    return GlobalVerdict(HOLDS if not failing else FAILS, failing)


def verify_local_certificate(market: Market, cert: ArbitrageCertificate) -> bool:
    """Independent check: ``zeta`` solvent at every reachable successor,
    not solvent at the node, with the stored ray separating."""
    node = cert.node
    if node not in market.tree or market.tree.is_terminal(node) or market.is_polar(node):
        return False
    if cert.t != len(node):
        return False
    zeta, r = vec(cert.zeta), vec(cert.separating_ray)
    lam = market.support_cone(node)
    if not all(dot(n, zeta) >= 0 for n in lam.normals):
        return False
    if not cones.member_hrep(r, cones.dual_cone_hrep(market.bidask[node])):
        return False
    if dot(r, zeta) >= 0:
        return False
    return not cones.member_vrep(zeta, cones.solvency_cone(market.bidask[node]))


def arbitrage_to_global(market: Market, cert: ArbitrageCertificate) -> Strategy:
    """Sell ``zeta`` at each reachable successor; trade nothing elsewhere."""
    if not verify_local_certificate(market, cert):
        raise CertificateError("invalid arbitrage certificate")
    neg = tuple(-z for z in cert.zeta)
    return Strategy(market.d, {c: neg for c in market.reachable(cert.node)})


def check_admissible(market: Market, strategy: Strategy) -> None:
    for node, x in strategy.xi.items():
        if node not in market.tree:
            raise CertificateError(f"strategy refers to unknown node {node_str(node)}")
        if not cones.member_hrep(tuple(-v for v in x), market.K(node)):
            raise CertificateError(f"strategy increment at {node_str(node)} is not acquirable for free")


def verify_global_certificate(market: Market, zeta, strategy: Strategy, node: Node) -> bool:
    """True iff ``zeta`` plus later increments is solvent at every non-polar
    leaf below ``node`` while ``zeta`` itself is not solvent at ``node``."""
    check_admissible(market, strategy)
    zeta = vec(zeta)
    if market.is_polar(node):
        return False
    if market.tree.is_terminal(node):
        return False
    if cones.member_hrep(zeta, market.K(node)):
        return False
    t = len(node)
    for leaf in market.tree.leaves():
        if leaf[:t] != node or market.is_polar(leaf):
            continue
        pos = list(zeta)
        for s in range(t + 1, market.T + 1):
            for i, v in enumerate(strategy.at(leaf[:s])):
                pos[i] += v
        if not cones.member_hrep(pos, market.K(leaf)):
            return False
    return True


def search_global_arbitrage(market: Market, rng: random.Random, tries: int = 50):
    """Randomized hunt for a global violation.

    Candidates: ``zeta`` a random combination of support-cone generators at a
    random non-polar node, strategies that sell ``zeta`` at some reachable
    successors and add random free trades elsewhere.  Candidates that are
    not admissible are skipped.  Returns the first
    ``(node, zeta, strategy)`` that verifies, else None.
    """
    nodes = market.nonpolar_internal()
    if not nodes:
        return None
    for _ in range(tries):
        node = rng.choice(nodes)
        gens = cones.with_vrep(market.support_cone(node)).generators
        weights = [Fraction(rng.randint(0, 4), rng.randint(1, 3)) for _ in gens]
        zeta = tuple(sum((w * g[i] for w, g in zip(weights, gens)), Fraction(0))
                     for i in range(market.d))
        xi = {}
        reach = set(market.reachable(node))
        for desc in market.tree.nodes():
            if len(desc) <= len(node) or desc[:len(node)] != node:
                continue
            if desc in reach and rng.random() < 0.8:
                xi[desc] = tuple(-v for v in zeta)
            elif rng.random() < 0.3:
                K = market.K(desc).generators
                g = rng.choice(K)
                a = Fraction(rng.randint(0, 3), rng.randint(1, 2))
                xi[desc] = tuple(-a * v for v in g)
        strategy = Strategy(market.d, xi)
        try:
            found = verify_global_certificate(market, zeta, strategy, node)
        except CertificateError:
            continue  # some increment is not a free trade
        if found:
            return node, zeta, strategy
    return None
