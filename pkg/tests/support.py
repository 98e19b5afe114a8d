"""Builders shared by the test modules."""
from __future__ import annotations

import random
from fractions import Fraction as F

from hypothesis import strategies as st

from ftaplab.cones import BidAskMatrix
from ftaplab.market import EventTree, Market

HALF = (F(1, 2), F(1, 2))


def flat_market(T: int = 2, rate=2, d: int = 2) -> Market:
    """Binary tree, constant rates everywhere, one uniform kernel per node."""
    tree = EventTree.uniform(T, 2)
    pi = BidAskMatrix.constant(d, rate)
    return Market(tree, {n: pi for n in tree.nodes()}, {n: [HALF] for n in tree.internal()})


def one_period(root_rate, child_rates, kernels=None, d: int = 2) -> Market:
    tree = EventTree(1, {(): len(child_rates)})
    bidask = {(): root_rate if isinstance(root_rate, BidAskMatrix)
              else BidAskMatrix.constant(d, root_rate)}
    for k, r in enumerate(child_rates):
        bidask[(k,)] = r if isinstance(r, BidAskMatrix) else BidAskMatrix.constant(d, r)
    if kernels is None:
        b = len(child_rates)
        kernels = [tuple(F(1, b) for _ in range(b))]
    return Market(tree, bidask, {(): kernels})


def drop_market() -> Market:
    """Rate 8 today, rate 2 at both successors: the textbook arbitrage."""
    return one_period(8, [2, 2])


def triangle_closure(rows):
    """Cheapest-route rates; leaves the solvency cone unchanged."""
    d = len(rows)
    m = [[F(x) for x in r] for r in rows]
    for k in range(d):
        for i in range(d):
            for j in range(d):
                if i != j and m[i][k] * m[k][j] < m[i][j]:
                    m[i][j] = m[i][k] * m[k][j]
    return m


def midprice_matrix(rng: random.Random, d: int, zero_pairs=(), closed: bool = True) -> BidAskMatrix:
    """Rates quoted around a random positive price with random costs;
    ``zero_pairs`` get no cost in either direction (round trip exactly 1)."""
    S = [F(1)] + [F(rng.randint(1, 12), rng.randint(1, 6)) for _ in range(d - 1)]
    rows = [[F(1)] * d for _ in range(d)]
    zero = {frozenset(p) for p in zero_pairs}
    for i in range(d):
        for j in range(d):
            if i != j:
                cost = 0 if frozenset((i, j)) in zero else F(rng.randint(1, 12), rng.randint(4, 20))
                rows[i][j] = S[j] / S[i] * (1 + cost)
    return BidAskMatrix(triangle_closure(rows) if closed else rows)


def random_kernels(rng: random.Random, b: int, count: int):
    out = []
    for _ in range(count):
        w = [rng.randint(0, 4) for _ in range(b)]
        if not any(w):
            w[rng.randrange(b)] = 1
        out.append(tuple(F(x, sum(w)) for x in w))
    return out


def random_one_period(rng: random.Random, d: int, b: int = None, kernels: int = None) -> Market:
    b = b or rng.randint(1, 3)
    tree = EventTree(1, {(): b})
    bidask = {n: midprice_matrix(rng, d) for n in tree.nodes()}
    return Market(tree, bidask, {(): random_kernels(rng, b, kernels or rng.randint(1, 3))})


def monotone_one_period(rng: random.Random, d: int, b: int = None) -> Market:
    """Successor rates entrywise above the root's: no arbitrage by construction."""
    b = b or rng.randint(1, 3)
    root = midprice_matrix(rng, d)
    kids = []
    for _ in range(b):
        rows = [[root[i, j] if i == j else root[i, j] * (1 + F(rng.randint(0, 6), 10))
                 for j in range(d)] for i in range(d)]
        kids.append(BidAskMatrix(rows))
    return one_period(root, kids, random_kernels(rng, b, rng.randint(1, 3)), d=d)


def seeds():
    return st.integers(min_value=0, max_value=2 ** 32 - 1)
