"""Exact polyhedral cones for proportional transaction costs.

A bid-ask matrix ``pi`` says that ``pi[i][j]`` units of asset ``i`` buy one
unit of asset ``j``.  Its solvency cone ``K`` is generated by the unit
vectors and the exchange vectors ``pi[i][j] e_i - e_j``; the dual cone
``K*`` is cut out by the same vectors read as inequality normals.

Cones carry a generator list (V-representation), a normal list
(H-representation, ``<n, x> >= 0``) or both.  Conversion goes through
the double description method.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Sequence

from .lp import EQ, FREE, GE, LE, LinearProgram, as_rat, dot, lp_feasible, lp_solve, vec


class ConeError(ValueError):
    """Structural problem with a cone (non-pointed, empty interior, ...)."""


class NotPointedError(ConeError):
    def __init__(self, line):
        self.line = line
        super().__init__(f"cone is not pointed; it contains the line through {_fmt(line)}")


class EmptyInteriorError(ConeError):
    """Raised when a cone has no interior point.

    ``certificate`` holds nonnegative weights on the normals, summing to one,
    whose combination of normals vanishes (Gordan's alternative).
    """

    def __init__(self, certificate):
        self.certificate = certificate
        super().__init__("cone has empty interior")


class QuoteError(ValueError):
    pass


class TriangleInequalityWarning(UserWarning):
    pass


def _fmt(v) -> str:
    return "(" + ", ".join(str(x) for x in v) + ")"


def unit(d: int, i: int) -> tuple:
    return tuple(Fraction(1) if k == i else Fraction(0) for k in range(d))


@dataclass(frozen=True)
class BidAskMatrix:
    entries: tuple

    def __post_init__(self):
        rows = tuple(vec(r) for r in self.entries)
        d = len(rows)
        if d < 2:
            raise ValueError("a bid-ask matrix needs at least two assets")
        for i, r in enumerate(rows):
            if len(r) != d:
                raise ValueError(f"row {i} of the bid-ask matrix has length {len(r)}, expected {d}")
            if r[i] != 1:
                raise ValueError(f"diagonal entry ({i},{i}) must be 1")
            for j, v in enumerate(r):
                if j != i and v <= 0:
                    raise ValueError(f"exchange rate ({i},{j}) must be strictly positive")
        object.__setattr__(self, "entries", rows)

    @classmethod
    def constant(cls, d: int, rate) -> "BidAskMatrix":
        rate = as_rat(rate)
        return cls([[1 if i == j else rate for j in range(d)] for i in range(d)])

    @property
    def d(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def pairs(self):
        return [(i, j) for i in range(self.d) for j in range(self.d) if i != j]

    def triangle_violations(self):
        """Triples (i, k, j) where the detour i->k->j beats the direct rate."""
        d = self.d
        return [(i, k, j) for i in range(d) for j in range(d) for k in range(d)
                if len({i, j, k}) == 3 and self[i, j] > self[i, k] * self[k, j]]


@dataclass(frozen=True)
class PolyCone:
    d: int
    generators: tuple | None = None
    normals: tuple | None = None

    def __post_init__(self):
        if self.generators is None and self.normals is None:
            raise ValueError("a cone needs generators or normals")
        for name in ("generators", "normals"):
            vs = getattr(self, name)
            if vs is None:
                continue
            vs = tuple(vec(v) for v in vs)
            for v in vs:
                if len(v) != self.d:
                    raise ValueError(f"{name} entry {_fmt(v)} does not have dimension {self.d}")
            object.__setattr__(self, name, vs)


@dataclass(frozen=True)
class FrictionDecomposition:
    S: tuple
    lam: tuple
    c: Fraction


# ---------------------------------------------------------------- linear algebra

def rank(vectors: Sequence[Sequence[Fraction]]) -> int:
    rows = [[Fraction(x) for x in v] for v in vectors]
    if not rows:
        return 0
    r = 0
    ncol = len(rows[0])
    for c in range(ncol):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r][c]
        for i in range(r + 1, len(rows)):
            f = rows[i][c]
            if f:
                f = f / p
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        r += 1
        if r == len(rows):
            break
    return r


def nullspace_vector(vectors, d: int):
    """A nonzero x with <v, x> = 0 for all v, or None."""
    rows = [[Fraction(x) for x in v] for v in vectors]
    pivots = []
    r = 0
    for c in range(d):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r][c]
        rows[r] = [a / p for a in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(d) if c not in pivots]
    if not free:
        return None
    fc = free[0]
    x = [Fraction(0)] * d
    x[fc] = Fraction(1)
    for row_i, pc in enumerate(pivots):
        x[pc] = -rows[row_i][fc]
    return tuple(x)


def normalize_ray(v) -> tuple:
    """Scale so the first nonzero coordinate has magnitude one (sign kept)."""
    for x in v:
        if x != 0:
            s = abs(x)
            return tuple(a / s for a in v)
    return tuple(v)


def _int_primitive(v) -> tuple:
    """Positive multiple of ``v`` with coprime integer entries."""
    v = [Fraction(x) for x in v]
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    return tuple(x // g for x in ints) if g else tuple(ints)


def primitive(v) -> tuple:
    """Positive multiple of ``v`` with coprime integer coordinates."""
    return tuple(Fraction(x) for x in _int_primitive(v))


# ---------------------------------------------------------------- bid-ask cones

def solvency_cone(pi: BidAskMatrix) -> PolyCone:
    d = pi.d
    gens = [unit(d, i) for i in range(d)]
    for i, j in pi.pairs():
        g = [Fraction(0)] * d
        g[i] = pi[i, j]
        g[j] = Fraction(-1)
        gens.append(tuple(g))
    return PolyCone(d, generators=tuple(gens))


def dual_cone_hrep(pi: BidAskMatrix) -> PolyCone:
    # rows y^i >= 0 and pi^{ij} y^i - y^j >= 0
    return PolyCone(pi.d, normals=solvency_cone(pi).generators)


@lru_cache(maxsize=4096)
def dual_rays(pi: BidAskMatrix) -> tuple:
    """Extreme rays of ``K*(pi)``, canonical order."""
    return extreme_rays(dual_cone_hrep(pi))


@lru_cache(maxsize=4096)
def solvency_cone_full(pi: BidAskMatrix) -> PolyCone:
    """``K(pi)`` with both representations; normals are the rays of ``K*``."""
    return PolyCone(pi.d, generators=solvency_cone(pi).generators, normals=dual_rays(pi))


@lru_cache(maxsize=4096)
def dual_cone_full(pi: BidAskMatrix) -> PolyCone:
    return PolyCone(pi.d, generators=dual_rays(pi), normals=dual_cone_hrep(pi).normals)


def efficient_friction(pi: BidAskMatrix) -> bool:
    return all(pi[i, j] * pi[j, i] > 1 for i, j in pi.pairs())


def roundtrip_bound(pi: BidAskMatrix) -> Fraction:
    return max(pi[i, j] * pi[j, i] for i, j in pi.pairs())


def frictionless_decompose(pi: BidAskMatrix, S) -> FrictionDecomposition:
    S = vec(S)
    if len(S) != pi.d:
        raise ValueError("quote dimension does not match the bid-ask matrix")
    if any(s <= 0 for s in S):
        raise QuoteError("quote must be strictly positive")
    d = pi.d
    lam = [[Fraction(0)] * d for _ in range(d)]
    for i, j in pi.pairs():
        lam[i][j] = pi[i, j] * S[i] / S[j] - 1
        if lam[i][j] < 0:
            raise QuoteError(f"quote not consistent: lambda[{i}][{j}] = {lam[i][j]} < 0")
    return FrictionDecomposition(S, tuple(tuple(r) for r in lam), roundtrip_bound(pi))


# ---------------------------------------------------------------- double description

def extreme_rays(cone: PolyCone) -> tuple:
    """Extreme rays of ``{x : <n, x> >= 0 for all normals n}``.

    Rays come back normalized (first nonzero coordinate of magnitude one)
    and sorted lexicographically.  Raises :class:`NotPointedError` when the
    cone contains a line.
    """
    if cone.normals is None:
        raise ValueError("extreme_rays needs an H-representation")
    d = cone.d
    A = [n for n in cone.normals if any(n)]
    line = nullspace_vector(A, d)
    if line is not None:
        raise NotPointedError(line)

    # integer arithmetic throughout: scaling a normal or a ray by a positive
    # factor changes nothing, so work with primitive integer vectors
    A = sorted({_int_primitive(n) for n in A})
    basis_idx = []
    for k, a in enumerate(A):
        if rank([A[i] for i in basis_idx] + [a]) > len(basis_idx):
            basis_idx.append(k)
            if len(basis_idx) == d:
                break
    B = [A[i] for i in basis_idx]
    full = 0
    for i in basis_idx:
        full |= 1 << i
    # each ray carries the bitmask of processed normals it is tight on
    rays = [(_int_primitive(_solve_unit(B, k)), full & ~(1 << basis_idx[k])) for k in range(d)]
    for k, a in enumerate(A):
        if k in basis_idx:
            continue
        vals = [sum(x * y for x, y in zip(a, r)) for r, _ in rays]
        pos = [(r, z, v) for (r, z), v in zip(rays, vals) if v > 0]
        neg = [(r, z, v) for (r, z), v in zip(rays, vals) if v < 0]
        bit = 1 << k
        zero = [(r, z | bit) for (r, z), v in zip(rays, vals) if v == 0]
        if not neg:
            rays = [(r, z) for r, z, _ in pos] + zero
            continue
        new = []
        for p, zp, ap in pos:
            for q, zq, aq in neg:
                common = zp & zq
                if bin(common).count("1") < d - 2:
                    continue
                # adjacent iff no third ray is tight on every common normal
                if any(z & common == common and r is not p and r is not q for r, z in rays):
                    continue
                new.append((_int_primitive([ap * qi - aq * pi_ for pi_, qi in zip(p, q)]),
                            common | bit))
        rays = [(r, z) for r, z, _ in pos] + zero + new
    out = sorted({normalize_ray(tuple(Fraction(x) for x in r)) for r, _ in rays if any(r)})
    return tuple(out)


def _solve_unit(B, k):
    """Solve B x = e_k for square invertible B."""
    d = len(B)
    M = [[Fraction(x) for x in B[i]] + [Fraction(1) if i == k else Fraction(0)] for i in range(d)]
    for c in range(d):
        piv = next(i for i in range(c, d) if M[i][c] != 0)
        M[c], M[piv] = M[piv], M[c]
        p = M[c][c]
        M[c] = [x / p for x in M[c]]
        for i in range(d):
            if i != c and M[i][c]:
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[c])]
    return tuple(M[i][d] for i in range(d))


def facets(cone: PolyCone) -> tuple:
    """H-representation of a full-dimensional V-rep cone (facet normals)."""
    if cone.generators is None:
        raise ValueError("facets needs generators")
    return extreme_rays(PolyCone(cone.d, normals=cone.generators))


def with_hrep(cone: PolyCone) -> PolyCone:
    if cone.normals is not None:
        return cone
    return PolyCone(cone.d, generators=cone.generators, normals=facets(cone))


def with_vrep(cone: PolyCone) -> PolyCone:
    if cone.generators is not None:
        return cone
    return PolyCone(cone.d, generators=extreme_rays(cone), normals=cone.normals)


# ---------------------------------------------------------------- membership & interiority

def _int_normals(cone: PolyCone) -> tuple:
    # cached on the instance; positive rescaling keeps every sign
    try:
        return cone.__dict__["_int_normals"]
    except KeyError:
        ints = tuple(_int_primitive(n) for n in cone.normals)
        object.__setattr__(cone, "_int_normals", ints)
        return ints


def member_hrep(x, cone: PolyCone) -> bool:
    xi = _int_primitive(x)
    return all(sum(a * b for a, b in zip(n, xi)) >= 0 for n in _int_normals(cone))


def member_vrep(x, cone: PolyCone) -> bool:
    gens = cone.generators
    if not gens:
        return not any(x)
    rows = [[g[i] for g in gens] for i in range(cone.d)]
    ok, _ = lp_feasible(LinearProgram([0] * len(gens), rows, [EQ] * cone.d, x))
    return ok


def member_cone(x, cone: PolyCone) -> bool:
    """Membership; evaluates normals when present, otherwise solves the
    conic-combination feasibility program over the generators."""
    x = vec(x)
    if len(x) != cone.d:
        raise ValueError(f"vector has dimension {len(x)}, cone has {cone.d}")
    if cone.normals is not None:
        return member_hrep(x, cone)
    return member_vrep(x, cone)


def interior_margin(y, cone: PolyCone) -> Fraction:
    """``min_n <n, y/|y|_1>``; strictly positive iff y is interior."""
    y = vec(y)
    if len(y) != cone.d:
        raise ValueError(f"vector has dimension {len(y)}, cone has {cone.d}")
    norm = sum(abs(v) for v in y)
    if norm == 0:
        raise ValueError("interior_margin is undefined at the origin")
    if cone.normals is None:
        raise ValueError("interior_margin needs an H-representation")
    return min(dot(n, y) for n in cone.normals) / norm


def strictly_inside(y, cone: PolyCone) -> bool:
    """Every facet inequality holds strictly; same answer as
    ``interior_margin(y, cone) > 0`` but in integer arithmetic."""
    if cone.normals is None:
        raise ValueError("strictly_inside needs an H-representation")
    yi = _int_primitive(y)
    return all(sum(a * b for a, b in zip(n, yi)) > 0 for n in _int_normals(cone))


def max_margin(cone: PolyCone):
    """Solve ``max eps : <n, y> >= eps, -1 <= y <= 1, eps <= 1``.

    Returns ``(eps, y)``.  ``eps > 0`` iff the cone has interior.
    """
    d = cone.d
    nvar = d + 1
    rows, senses, rhs = [], [], []
    for n in cone.normals:
        rows.append(list(n) + [-1])
        senses.append(GE)
        rhs.append(0)
    for i in range(d):
        rows.append([1 if k == i else 0 for k in range(d)] + [0])
        senses.append(LE)
        rhs.append(1)
        rows.append([1 if k == i else 0 for k in range(d)] + [0])
        senses.append(GE)
        rhs.append(-1)
    rows.append([0] * d + [1])
    senses.append(LE)
    rhs.append(1)
    obj = [0] * d + [1]
    out = lp_solve(LinearProgram(obj, rows, senses, rhs, [FREE] * nvar))
    return out.value, out.point[:d]


def empty_interior_certificate(cone: PolyCone):
    """Weights ``mu >= 0``, ``sum mu = 1``, ``sum mu_k n_k = 0``, or None."""
    N = cone.normals
    rows = [[n[i] for n in N] for i in range(cone.d)] + [[1] * len(N)]
    ok, mu = lp_feasible(LinearProgram([0] * len(N), rows, [EQ] * (cone.d + 1),
                                       [0] * cone.d + [1]))
    return mu if ok else None


def has_interior_lp(cone: PolyCone) -> bool:
    eps, _ = max_margin(with_hrep(cone))
    return eps > 0


def pick_interior_point(cone: PolyCone) -> tuple:
    """Strict interior point with first coordinate one."""
    cone = with_hrep(cone)
    eps, y = max_margin(cone)
    if eps <= 0:
        raise EmptyInteriorError(empty_interior_certificate(cone))
    if y[0] <= 0:
        raise ConeError("interior point has nonpositive first coordinate; no numeraire scaling")
    return tuple(v / y[0] for v in y)


def cone_intersection(cones: Sequence[PolyCone]) -> PolyCone:
    if not cones:
        raise ValueError("need at least one cone")
    d = cones[0].d
    normals = []
    seen = set()
    for c in cones:
        if c.d != d:
            raise ValueError("cones of different dimensions")
        for n in with_hrep(c).normals:
            key = normalize_ray(n)
            if key not in seen:
                seen.add(key)
                normals.append(n)
    return PolyCone(d, normals=tuple(normals))


def orthant(d: int) -> PolyCone:
    basis = tuple(unit(d, i) for i in range(d))
    return PolyCone(d, generators=basis, normals=basis)


def cone_contains(outer: PolyCone, inner: PolyCone) -> bool:
    """``inner`` is a subset of ``outer`` (generators of inner checked)."""
    inner = with_vrep(inner)
    return all(member_cone(g, outer) for g in inner.generators)


def same_cone(a: PolyCone, b: PolyCone) -> bool:
    return cone_contains(a, b) and cone_contains(b, a)


# ---------------------------------------------------------------- validation

def validate_cone(cone: PolyCone, role: str = "solvency") -> list:
    """Structural checks for cones used as ``K`` (role "solvency") or ``K*``
    (role "dual").  Returns a list of messages, empty when valid."""
    problems = []
    d = cone.d
    if role == "solvency":
        for i in range(d):
            if not member_cone(unit(d, i), cone):
                problems.append(f"basis vector e_{i + 1} is not solvent")
        full = with_hrep(cone)
        try:
            rays = extreme_rays(PolyCone(d, normals=with_vrep(full).generators))
        except NotPointedError as exc:
            problems.append(str(exc))
            return problems
        for r in rays:
            if any(v <= 0 for v in r):
                problems.append(f"dual ray {_fmt(r)} touches the orthant boundary")
        try:
            extreme_rays(full)
        except NotPointedError as exc:
            problems.append(str(exc))
    elif role == "dual":
        try:
            rays = extreme_rays(with_hrep(cone))
        except NotPointedError as exc:
            return [str(exc)]
        for r in rays:
            if any(v <= 0 for v in r):
                problems.append(f"ray {_fmt(r)} is not strictly positive")
    else:
        raise ValueError(f"unknown role {role!r}")
    return problems


def validate_bidask(pi: BidAskMatrix, c=None) -> list:
    """Condition checks on one matrix; triangle-inequality failures only warn."""
    problems = []
    for i, j in pi.pairs():
        if i < j and pi[i, j] * pi[j, i] <= 1:
            problems.append(f"efficient friction fails for assets {i + 1},{j + 1}: round trip {pi[i, j] * pi[j, i]} <= 1")
    if not problems and pi.d > 2 and not has_interior_lp(dual_cone_hrep(pi)):
        problems.append("efficient friction fails: an exchange cycle returns at least "
                        "what it started with, so no strictly positive shadow price exists")
    if c is not None:
        c = as_rat(c)
        need = roundtrip_bound(pi)
        if c < need:
            problems.append(f"friction bound {c} is below the round-trip bound {need}")
    if pi.triangle_violations():
        warnings.warn("direct exchange is more expensive than an indirect route",
                      TriangleInequalityWarning, stacklevel=2)
    return problems
