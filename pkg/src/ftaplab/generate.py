"""Seeded random markets.

Modes:

* ``monotone``: every successor's exchange rates are entrywise at least its
  parent's, so tomorrow's solvency cone sits inside today's and no node can
  carry an arbitrage.
* ``planted-arbitrage``: a monotone market in which one non-polar node gets
  rates ``drop_factor`` times the entrywise maximum of its successors.  Every
  exchange route out of that node becomes strictly dearer than tomorrow's,
  so the cheapest route tomorrow is a position solvent at all successors
  but not today.
* ``random``: independent matrices quoted around a random mid-price per
  node, with positive proportional costs.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .cones import BidAskMatrix
from .lp import as_rat
from .market import EventTree, Market, node_str
from .documents import InstanceDocument

MODES = ("monotone", "planted-arbitrage", "random")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class GeneratorConfig:
    mode: str = "monotone"
    d: int = 2
    T: int = 2
    branching: tuple = (1, 3)
    kernels: tuple = (1, 3)
    cost: tuple = ("1/10", "2")
    seed: int = 0
    drop_factor: str = "4"
    polar_prob: float = 0.2

    def validate(self) -> None:
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}; choose from {', '.join(MODES)}")
        if self.d < 2:
            raise ConfigError("need at least two assets")
        if self.T < 1:
            raise ConfigError("horizon must be at least 1")
        for name in ("branching", "kernels"):
            lo, hi = getattr(self, name)
            if lo < 1 or lo > hi:
                raise ConfigError(f"{name} range {lo}..{hi} is empty or below 1")
        lo, hi = (as_rat(c) for c in self.cost)
        if lo <= 0 or lo > hi:
            raise ConfigError(f"cost range {lo}..{hi} must satisfy 0 < lo <= hi")
        if as_rat(self.drop_factor) <= 1:
            raise ConfigError("drop factor must exceed 1")
        if not 0 <= self.polar_prob < 1:
            raise ConfigError("polar probability must lie in [0, 1)")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must be a 64-bit unsigned integer")


def _rand_rat(rng: random.Random, lo: Fraction, hi: Fraction, steps: int = 12) -> Fraction:
    return lo + (hi - lo) * Fraction(rng.randint(0, steps), steps)


def _tree(cfg: GeneratorConfig, rng: random.Random) -> EventTree:
    branching = {}
    frontier = [()]
    for _ in range(cfg.T):
        nxt = []
        for node in frontier:
            b = rng.randint(*cfg.branching)
            branching[node] = b
            nxt.extend(node + (k,) for k in range(b))
        frontier = nxt
    return EventTree(cfg.T, branching)


def _kernels(cfg: GeneratorConfig, tree: EventTree, rng: random.Random) -> dict:
    models = {}
    for node in tree.internal():
        b = tree.branching[node]
        blocked = set()
        if b > 1 and rng.random() < cfg.polar_prob:
            blocked.add(rng.randrange(b))
        open_ = [k for k in range(b) if k not in blocked]
        ks = []
        for _ in range(rng.randint(*cfg.kernels)):
            w = [0 if k in blocked else rng.randint(0, 4) for k in range(b)]
            if not any(w):
                w[rng.choice(open_)] = 1
            total = sum(w)
            ks.append(tuple(Fraction(x, total) for x in w))
        models[node] = ks
    return models


def _monotone_rates(cfg, tree, rng) -> dict:
    lo, hi = (as_rat(c) for c in cfg.cost)
    d = cfg.d
    rates = {}
    for node in tree.nodes():
        if node == ():
            base = [[Fraction(1) if i == j else 1 + _rand_rat(rng, lo, hi) for j in range(d)]
                    for i in range(d)]
        else:
            parent = rates[node[:-1]]
            base = [[Fraction(1) if i == j else parent[i][j] + _rand_rat(rng, Fraction(0), (hi - lo) / 2)
                     for j in range(d)] for i in range(d)]
        rates[node] = base
    return rates


def _random_rates(cfg, tree, rng) -> dict:
    # rates around a random mid-price vector S keep S strictly inside the dual cone
    lo, hi = (as_rat(c) for c in cfg.cost)
    d = cfg.d
    rates = {}
    for node in tree.nodes():
        S = [Fraction(1)] + [_rand_rat(rng, Fraction(1, 2), Fraction(3)) for _ in range(d - 1)]
        rates[node] = [[Fraction(1) if i == j else S[j] / S[i] * (1 + _rand_rat(rng, lo, hi))
                        for j in range(d)] for i in range(d)]
    return rates


def gen_instance(cfg: GeneratorConfig) -> InstanceDocument:
    cfg.validate()
    rng = random.Random(cfg.seed)
    tree = _tree(cfg, rng)
    models = _kernels(cfg, tree, rng)
    if cfg.mode == "random":
        rates = _random_rates(cfg, tree, rng)
    else:
        rates = _monotone_rates(cfg, tree, rng)
    meta = {"mode": cfg.mode, "seed": cfg.seed, "generator": {
        "d": cfg.d, "T": cfg.T, "branching": list(cfg.branching), "kernels": list(cfg.kernels),
        "cost": [str(as_rat(c)) for c in cfg.cost], "drop_factor": str(as_rat(cfg.drop_factor)),
        "polar_prob": cfg.polar_prob}}
    market = Market(tree, {n: BidAskMatrix(r) for n, r in rates.items()}, models)
    if cfg.mode == "planted-arbitrage":
        candidates = market.nonpolar_internal()
        node = rng.choice(candidates)
        kids = tree.children(node)
        F = as_rat(cfg.drop_factor)
        d = cfg.d
        top = [[max(rates[c][i][j] for c in kids) for j in range(d)] for i in range(d)]
        rates[node] = [[Fraction(1) if i == j else F * top[i][j] for j in range(d)] for i in range(d)]
        market = Market(tree, {n: BidAskMatrix(r) for n, r in rates.items()}, models)
        meta["planted_node"] = node_str(node)
    return InstanceDocument(market, meta)


def mixed_corpus(n: int, base_seed: int = 0, d_choices=(2, 3, 4), T_choices=(1, 2, 3)) -> list:
    """``n`` instances cycling through the generator modes with random
    asset counts and horizons, all derived from ``base_seed``."""
    rng = random.Random(base_seed)
    docs = []
    for k in range(n):
        cfg = GeneratorConfig(mode=MODES[k % len(MODES)], d=rng.choice(d_choices),
                              T=rng.choice(T_choices), seed=rng.getrandbits(64))
        docs.append(gen_instance(cfg))
    return docs
