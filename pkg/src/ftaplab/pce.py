"""Strictly consistent price systems: one-step extension, forward
construction and exact verification.

One step at a node: given a dual vector ``y`` (normalized so that its
first coordinate is one), find vectors ``w`` strictly inside each reachable
successor's dual cone with ``sum(w) = y``.  Each ``w`` is written as a
nonnegative combination of that successor's dual rays plus ``eps`` times a
fixed interior anchor; maximizing ``eps`` decides strictness exactly.
The kernel is then ``q = w^1 / y^1`` and the successor prices ``z = w / q``,
which keeps the first coordinate of ``z`` equal to that of ``y``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from . import cones
from .lp import FREE, EQ, GE, LE, LinearProgram, dot, lp_solve, vec
from .market import Market, Node, TreeMeasure, node_str


class NoExtensionError(Exception):
    """No strictly interior one-step extension exists at ``node``.

    ``separator`` is a nonzero position, solvent at every reachable
    successor, on which ``y`` is nonpositive.
    """

    def __init__(self, node, y, margin, separator):
        self.node = node
        self.y = y
        self.margin = margin
        self.separator = separator
        super().__init__(f"no strictly consistent extension at node {node_str(node)}")


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class OneStep:
    node: Node
    q: dict      # successor -> probability
    z: dict      # successor -> dual vector
    w: dict      # successor -> q * z
    margin: Fraction


@dataclass
class ExtensionRequest:
    t: int
    P: TreeMeasure
    Y: dict


@dataclass
class PriceSystem:
    t: int
    Q: TreeMeasure
    Z: dict
    R_witness: dict = field(default_factory=dict)


def _margin_program(market: Market, node: Node, yhat):
    succ = market.reachable(node)
    d = market.d
    cols = []  # (successor index, ray) ; None ray marks eps
    for k, c in enumerate(succ):
        for r in market.dual_rays(c):
            cols.append((k, r))
    anchor_sum = [Fraction(0)] * d
    for c in succ:
        for i, v in enumerate(market.interior_anchor(c)):
            anchor_sum[i] += v
    rows = [[r[i] for _, r in cols] + [anchor_sum[i]] for i in range(d)]
    obj = [0] * len(cols) + [1]
    out = lp_solve(LinearProgram(obj, rows, [EQ] * d, yhat))
    return succ, cols, out


def _separator(market: Market, node: Node, yhat):
    """Nonzero ``q`` in the support cone with ``<yhat, q> <= 0``.

    First minimize ``<yhat, q>`` over the support cone cut by a box; a
    negative optimum separates strictly.  Otherwise ``yhat`` sits on the
    boundary and any nonzero ``q`` of the face ``<yhat, q> = 0`` serves; the
    support cone is pointed, so maximizing ``sum <g, q>`` finds one.
    """
    gens = market.support_dual_generators(node)
    d = market.d
    rows = [list(g) for g in gens]
    senses = [GE] * len(gens)
    rhs = [0] * len(gens)
    for i in range(d):
        e = [1 if k == i else 0 for k in range(d)]
        rows += [e, e]
        senses += [LE, GE]
        rhs += [1, -1]
    out = lp_solve(LinearProgram(yhat, rows, senses, rhs, [FREE] * d, maximize=False))
    if out.value < 0:
        return out.point
    total = [sum((g[i] for g in gens), Fraction(0)) for i in range(d)]
    out = lp_solve(LinearProgram(total, rows + [list(yhat)], senses + [EQ], rhs + [0], [FREE] * d))
    return out.point


def _one_step(market: Market, node: Node, y):
    """Return ``(margin, OneStep | None)`` without preconditions on ``y``."""
    y = vec(y)
    if y[0] <= 0:
        return Fraction(0), None
    scale = y[0]
    yhat = tuple(v / scale for v in y)
    succ, cols, out = _margin_program(market, node, yhat)
    if not out.optimal:
        # yhat outside the support dual cone altogether
        return None, None
    eps = out.value
    if eps <= 0:
        return eps, None
    d = market.d
    mu = out.point
    w = {}
    for k, c in enumerate(succ):
        anchor = market.interior_anchor(c)
        wk = [eps * a for a in anchor]
        for (kk, r), m in zip(cols, mu):
            if kk == k and m:
                for i in range(d):
                    wk[i] += m * r[i]
        w[c] = tuple(scale * v for v in wk)
    q = {c: w[c][0] / scale for c in succ}
    z = {c: tuple(v / q[c] for v in w[c]) for c in succ}
    return eps, OneStep(node, q, z, w, eps)


def one_step_extend(market: Market, node: Node, y, mandatory_support=()) -> OneStep:
    """Split ``y`` into strictly interior successor prices.

    The support is always every reachable successor, which covers any
    ``mandatory_support``.  Raises :class:`NoExtensionError` when ``y`` is
    not in the interior of the sum of the successors' dual cones.
    """
    y = vec(y)
    if market.tree.is_terminal(node):
        raise PreconditionError(f"node {node_str(node)} is terminal")
    if not cones.strictly_inside(y, market.Kstar(node)):
        raise PreconditionError(f"y is not strictly inside the dual cone at node {node_str(node)}")
    reach = set(market.reachable(node))
    for c in mandatory_support:
        c = c if isinstance(c, tuple) else node + (c,)
        if c not in reach:
            raise PreconditionError(f"mandatory successor {node_str(c)} is not reachable")
    eps, step = _one_step(market, node, y)
    if step is None:
        yhat = tuple(v / y[0] for v in y)
        raise NoExtensionError(node, y, eps, _separator(market, node, yhat))
    return step


def check_separator(market: Market, node: Node, y, q) -> bool:
    """``q`` nonzero, nonnegative on every successor dual ray, ``<y, q> <= 0``."""
    q = vec(q)
    if not any(q):
        return False
    gens = market.support_dual_generators(node)
    return all(dot(g, q) >= 0 for g in gens) and dot(vec(y), q) <= 0


def theta_membership(market: Market, node: Node, P_kernel, z) -> bool:
    """Is ``z`` an expectation of strictly interior successor prices under
    some model dominating ``P_kernel``?"""
    if not market.in_model_hull(node, P_kernel):
        raise PreconditionError(f"kernel is not a model at node {node_str(node)}")
    eps, _ = _one_step(market, node, z)
    return eps is not None and eps > 0


def build_pce(market: Market, req: ExtensionRequest) -> PriceSystem:
    tree = market.tree
    t = req.t
    if not 0 <= t < market.T:
        raise PreconditionError(f"start time {t} outside 0..{market.T - 1}")
    for node in tree.internal():
        kern = req.P.kernels.get(node)
        if kern is None or not market.in_model_hull(node, kern):
            raise PreconditionError(f"P is not a model selection at node {node_str(node)}")
    start = [n for n in tree.nodes_at(t) if req.P.mass(n) > 0]
    Z = {}
    for n in start:
        y = req.Y.get(n)
        if y is None:
            raise PreconditionError(f"no Y given at node {node_str(n)}")
        y = vec(y)
        if not cones.strictly_inside(y, market.Kstar(n)):
            raise PreconditionError(f"Y at node {node_str(n)} is not strictly interior")
        Z[n] = y
    Qk = dict(req.P.kernels)
    frontier = start
    for s in range(t, market.T):
        nxt = []
        for n in frontier:
            step = one_step_extend(market, n, Z[n])
            Qk[n] = tuple(step.q.get(c, Fraction(0)) for c in tree.children(n))
            Z.update(step.z)
            nxt.extend(step.q)
        frontier = nxt
    R = {n: market.uniform_mixture(n) for n in tree.internal()}
    return PriceSystem(t, TreeMeasure(Qk), Z, R)


def verify_pce(market: Market, ps: PriceSystem, req: ExtensionRequest) -> list:
    """Exact check of domination, extension, interiority and martingale
    identities; returns violation messages (empty when valid)."""
    tree = market.tree
    out = []
    t = req.t
    P, Q = req.P, ps.Q
    for n in tree.internal():
        name = node_str(n)
        qk = Q.kernels.get(n)
        if qk is None or len(qk) != tree.branching[n] or sum(qk) != 1 or any(p < 0 for p in qk):
            out.append(f"domination: Q kernel at node {name} is not a probability")
            continue
        if P.mass(n) > 0 and not P.support(n) <= Q.support(n):
            out.append(f"domination: P not dominated by Q at node {name}")
        if Q.mass(n) > 0:
            rk = ps.R_witness.get(n)
            if rk is None or not market.in_model_hull(n, rk):
                out.append(f"domination: witness at node {name} is not a model")
            elif not Q.support(n) <= {k for k, p in enumerate(rk) if p > 0}:
                out.append(f"domination: Q not dominated by the model witness at node {name}")
    if out:
        return out
    for n in tree.nodes():
        if len(n) <= t and Q.mass(n) != P.mass(n):
            out.append(f"extension: Q differs from P before the start time at node {node_str(n)}")
    for n in tree.nodes_at(t):
        if P.mass(n) > 0:
            y = req.Y.get(n)
            if y is None or ps.Z.get(n) != vec(y):
                out.append(f"extension: Z does not start from Y at node {node_str(n)}")
    for n in tree.nodes():
        if len(n) < t or Q.mass(n) == 0:
            continue
        z = ps.Z.get(n)
        if z is None:
            out.append(f"interiority: no price at supported node {node_str(n)}")
            continue
        if not cones.strictly_inside(z, market.Kstar(n)):
            out.append(f"interiority: not strictly interior at node {node_str(n)}")
    for n in tree.internal():
        if len(n) < t or Q.mass(n) == 0 or n not in ps.Z:
            continue
        acc = [Fraction(0)] * market.d
        ok = True
        for c, p in zip(tree.children(n), Q.kernels[n]):
            if p == 0:
                continue
            zc = ps.Z.get(c)
            if zc is None:
                ok = False
                break
            for i, v in enumerate(zc):
                acc[i] += p * v
        if not ok or tuple(acc) != ps.Z[n]:
            out.append(f"martingale identity fails at node {node_str(n)}")
    return out


def easy_direction_check(market: Market, ps: PriceSystem, zeta, node: Node) -> bool:
    """``sum_c q(c) <Z(c), zeta> == <Z(node), zeta> >= 0`` for a position
    solvent at every supported successor."""
    zeta = vec(zeta)
    if node not in ps.Z or market.tree.is_terminal(node):
        raise PreconditionError(f"no price at non-terminal node {node_str(node)}")
    kids = [(c, p) for c, p in zip(market.tree.children(node), ps.Q.kernels[node]) if p > 0]
    for c, _ in kids:
        if not cones.member_hrep(zeta, market.K(c)):
            raise PreconditionError(f"zeta is not solvent at successor {node_str(c)}")
    lhs = sum((p * dot(ps.Z[c], zeta) for c, p in kids), Fraction(0))
    rhs = dot(ps.Z[node], zeta)
    return lhs == rhs and lhs >= 0


def random_interior_dual(market: Market, node: Node, rng: random.Random) -> tuple:
    """Midpoint of a random convex mix of dual rays and the interior anchor."""
    rays = market.dual_rays(node)
    weights = [Fraction(rng.randint(1, 9)) for _ in rays]
    total = sum(weights)
    mix = [sum((w * r[i] for w, r in zip(weights, rays)), Fraction(0)) / total
           for i in range(market.d)]
    anchor = market.interior_anchor(node)
    return tuple((a + b) / 2 for a, b in zip(mix, anchor))


def interior_request(market: Market, t: int, P: TreeMeasure, rng: random.Random | None = None):
    """Request with Y at every P-charged time-t node (anchor or random)."""
    Y = {}
    for n in market.tree.nodes_at(t):
        if P.mass(n) > 0:
            Y[n] = market.interior_anchor(n) if rng is None else random_interior_dual(market, n, rng)
    return ExtensionRequest(t, P, Y)
