"""Exact rational arithmetic and a dense two-phase simplex.

Every number is a :class:`fractions.Fraction`; nothing is ever rounded.
Pivoting follows Bland's rule (lowest index enters, lowest basic index
leaves on ratio ties), so a given program always produces the same
outcome.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from numbers import Rational
from typing import Sequence

Rat = Fraction
Vector = tuple  # tuple[Fraction, ...]

LE, EQ, GE = "<=", "==", ">="
FREE, NONNEG = "free", "nonneg"


class LPInputError(ValueError):
    """Malformed linear program (dimension or sense mismatch)."""


def as_rat(value) -> Fraction:
    """Convert ints, Fractions and "p/q" strings to an exact Fraction.

    Floats are refused: they would smuggle rounding into exact code.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a rational")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not text or any(ch in text for ch in ".eE"):
            raise ValueError(f"not an exact rational: {value!r}")
        return Fraction(text)
    raise TypeError(f"cannot use {type(value).__name__} as an exact rational")


def vec(values) -> Vector:
    return tuple(as_rat(v) for v in values)


def dot(a, b) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def rat_str(x: Fraction) -> str:
    return str(x)


class Status(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LinearProgram:
    """``max/min c.x`` subject to ``A x (<=|==|>=) b``.

    ``bounds`` holds ``"free"`` or ``"nonneg"`` per variable; it defaults
    to all nonnegative.
    """

    objective: tuple
    rows: tuple
    senses: tuple
    rhs: tuple
    bounds: tuple = None
    maximize: bool = True

    def __post_init__(self):
        objective = vec(self.objective)
        n = len(objective)
        if n == 0:
            raise LPInputError("a linear program needs at least one variable")
        rows = tuple(vec(r) for r in self.rows)
        for i, r in enumerate(rows):
            if len(r) != n:
                raise LPInputError(f"row {i} has {len(r)} entries, expected {n}")
        senses = tuple(self.senses)
        if len(senses) != len(rows):
            raise LPInputError("one sense per row is required")
        for s in senses:
            if s not in (LE, EQ, GE):
                raise LPInputError(f"unknown sense {s!r}")
        rhs = vec(self.rhs)
        if len(rhs) != len(rows):
            raise LPInputError("one right-hand side per row is required")
        bounds = tuple(self.bounds) if self.bounds is not None else (NONNEG,) * n
        if len(bounds) != n or any(b not in (FREE, NONNEG) for b in bounds):
            raise LPInputError("bounds must list 'free' or 'nonneg' per variable")
        object.__setattr__(self, "objective", objective)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "senses", senses)
        object.__setattr__(self, "rhs", rhs)
        object.__setattr__(self, "bounds", bounds)

    @property
    def n(self) -> int:
        return len(self.objective)

    @property
    def m(self) -> int:
        return len(self.rows)


@dataclass(frozen=True)
class LpOutcome:
    """Result of :func:`lp_solve`.

    ``certificate`` is a Farkas vector (one entry per row) when infeasible
    and an improving ray (one entry per variable) when unbounded.
    ``duals`` are row prices at an optimum.
    """

    status: Status
    point: Vector | None = None
    value: Fraction | None = None
    certificate: Vector | None = None
    duals: Vector | None = field(default=None, compare=False)

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


def lp_solve(lp: LinearProgram) -> LpOutcome:
    return _Simplex(lp).run()


def lp_feasible(lp: LinearProgram):
    """Return ``(True, point)`` or ``(False, farkas_certificate)``."""
    probe = LinearProgram([0] * lp.n, lp.rows, lp.senses, lp.rhs, lp.bounds)
    out = lp_solve(probe)
    if out.status is Status.INFEASIBLE:
        return False, out.certificate
    return True, out.point


def check_point(lp: LinearProgram, x) -> bool:
    """Exact substitution of ``x`` into every constraint and bound."""
    x = vec(x)
    if len(x) != lp.n:
        return False
    for xj, b in zip(x, lp.bounds):
        if b == NONNEG and xj < 0:
            return False
    for row, s, b in zip(lp.rows, lp.senses, lp.rhs):
        lhs = dot(row, x)
        if (s == LE and lhs > b) or (s == GE and lhs < b) or (s == EQ and lhs != b):
            return False
    return True


def check_farkas(lp: LinearProgram, y) -> bool:
    """True iff ``y`` proves ``lp`` infeasible.

    Requirements: ``y_i >= 0`` on ``<=`` rows, ``y_i <= 0`` on ``>=`` rows,
    ``(y A)_j >= 0`` on nonnegative variables and ``== 0`` on free ones,
    and ``y.b < 0``.  Any feasible x would then give ``0 <= yAx <= yb < 0``.
    """
    y = vec(y)
    if len(y) != lp.m:
        return False
    for yi, s in zip(y, lp.senses):
        if (s == LE and yi < 0) or (s == GE and yi > 0):
            return False
    for j, b in enumerate(lp.bounds):
        col = sum((yi * row[j] for yi, row in zip(y, lp.rows)), Fraction(0))
        if (b == NONNEG and col < 0) or (b == FREE and col != 0):
            return False
    return dot(y, lp.rhs) < 0


def check_ray(lp: LinearProgram, ray) -> bool:
    """True iff ``ray`` is a recession direction that strictly improves."""
    d = vec(ray)
    if len(d) != lp.n:
        return False
    for dj, b in zip(d, lp.bounds):
        if b == NONNEG and dj < 0:
            return False
    for row, s in zip(lp.rows, lp.senses):
        lhs = dot(row, d)
        if (s == LE and lhs > 0) or (s == GE and lhs < 0) or (s == EQ and lhs != 0):
            return False
    gain = dot(lp.objective, d)
    return gain > 0 if lp.maximize else gain < 0


def _lcm_den(values) -> int:
    den = 1
    for v in values:
        q = v.denominator
        den = den * q // gcd(den, q)
    return den


class _Simplex:
    """Fraction-free tableau.

    Entries are integers sharing one positive denominator ``D`` (the value
    of entry ``T[i][j]`` is ``T[i][j] / D``).  A pivot replaces each
    non-pivot row by ``(p * row - f * prow) // D`` which divides exactly,
    so only integer arithmetic runs in the inner loops.  Every row is first
    scaled by a positive integer ``scale[i]`` to clear denominators;
    row prices are mapped back through that scale.
    """

    def __init__(self, lp: LinearProgram):
        self.lp = lp
        # column bookkeeping: (kind, original index, sign)
        cols: list[tuple[str, int, int]] = []
        for j, b in enumerate(lp.bounds):
            cols.append(("x", j, 1))
            if b == FREE:
                cols.append(("x", j, -1))
        slack_of_row = {}
        for i, s in enumerate(lp.senses):
            if s != EQ:
                slack_of_row[i] = len(cols)
                cols.append(("s", i, 1 if s == LE else -1))
        self.sign = []
        self.scale = []
        tableau = []
        rhs = []
        for i, (row, b) in enumerate(zip(lp.rows, lp.rhs)):
            sigma = 1 if b >= 0 else -1
            k = _lcm_den(list(row) + [b]) * sigma
            self.sign.append(sigma)
            self.scale.append(abs(k))
            line = []
            for kind, j, sg in cols:
                if kind == "x":
                    line.append(int(row[j] * sg * k))
                else:
                    line.append(sg * sigma if j == i else 0)
            tableau.append(line)
            rhs.append(int(b * k))
        basis = []
        for i in range(lp.m):
            sc = slack_of_row.get(i)
            if sc is not None and tableau[i][sc] == 1:
                basis.append(sc)
            else:
                kk = len(cols)
                cols.append(("a", i, 1))
                for r in range(lp.m):
                    tableau[r].append(1 if r == i else 0)
                basis.append(kk)
        width = len(cols)
        for line in tableau:
            line.extend([0] * (width - len(line)))
        self.cols = cols
        self.T = tableau
        self.b = rhs
        self.D = 1
        self.basis = basis
        self.init_cols = list(basis)
        self.artificial = [k for k, c in enumerate(cols) if c[0] == "a"]

    def _pivot(self, r: int, c: int) -> None:
        T, b, D = self.T, self.b, self.D
        prow = T[r]
        p = prow[c]
        br = b[r]
        for i, line in enumerate(T):
            if i == r:
                continue
            f = line[c]
            if f:
                T[i] = [(p * v - f * w) // D for v, w in zip(line, prow)]
                b[i] = (p * b[i] - f * br) // D
            elif p != D:
                T[i] = [v * p // D if v else 0 for v in line]
                b[i] = b[i] * p // D
        if p < 0:
            for i, line in enumerate(T):
                T[i] = [-v for v in line]
            for i in range(len(b)):
                b[i] = -b[i]
            p = -p
        self.D = p
        self.basis[r] = c

    def _reduced_costs(self, cost: list) -> list:
        # sign-correct reduced costs scaled by D > 0
        D = self.D
        red = [cj * D for cj in cost]
        for i, bv in enumerate(self.basis):
            cb = cost[bv]
            if cb:
                for j, v in enumerate(self.T[i]):
                    if v:
                        red[j] -= cb * v
        return red

    def _optimize(self, cost: list, banned: set) -> int | None:
        """Maximize ``cost`` from the current basis; return an unbounded column or None."""
        width = len(self.cols)
        while True:
            red = self._reduced_costs(cost)
            enter = None
            for j in range(width):
                if red[j] > 0 and j not in banned:
                    enter = j
                    break
            if enter is None:
                return None
            leave = None
            for i, line in enumerate(self.T):
                a = line[enter]
                if a > 0:
                    if leave is None:
                        leave = i
                        continue
                    # compare b_i / a against b_leave / a_leave
                    lhs = self.b[i] * self.T[leave][enter]
                    rhs = self.b[leave] * a
                    if lhs < rhs or (lhs == rhs and self.basis[i] < self.basis[leave]):
                        leave = i
            if leave is None:
                return enter
            self._pivot(leave, enter)

    def _row_prices(self, cost: list) -> list:
        # u = c_B B^{-1}; B^{-1} sits in the columns of the initial identity basis,
        # mapped back through the row scaling
        D = self.D
        u = []
        for i0, k in enumerate(self.init_cols):
            acc = sum(cost[bv] * self.T[i][k] for i, bv in enumerate(self.basis))
            u.append(Fraction(acc * self.scale[i0], D))
        return u

    def _solution(self) -> Vector:
        x = [Fraction(0)] * self.lp.n
        for i, bv in enumerate(self.basis):
            kind, j, sg = self.cols[bv]
            if kind == "x":
                x[j] += Fraction(sg * self.b[i], self.D)
        return tuple(x)

    def run(self) -> LpOutcome:
        lp = self.lp
        width = len(self.cols)
        art = set(self.artificial)
        if art:
            cost1 = [-1 if k in art else 0 for k in range(width)]
            self._optimize(cost1, banned=set())
            value1 = sum(cost1[bv] * self.b[i] for i, bv in enumerate(self.basis))
            if value1 < 0:
                u = self._row_prices(cost1)
                y = tuple(s * ui for s, ui in zip(self.sign, u))
                return LpOutcome(Status.INFEASIBLE, certificate=y)
            for i, bv in enumerate(self.basis):
                if bv in art:
                    for j in range(width):
                        if j not in art and self.T[i][j] != 0:
                            self._pivot(i, j)
                            break
        flip = 1 if lp.maximize else -1
        fcost = [Fraction(0)] * width
        for k, (kind, j, sg) in enumerate(self.cols):
            if kind == "x":
                fcost[k] = flip * sg * lp.objective[j]
        gamma = _lcm_den(fcost)
        cost = [int(c * gamma) for c in fcost]
        enter = self._optimize(cost, banned=art)
        point = self._solution()
        if enter is not None:
            dcol = [0] * width
            dcol[enter] = self.D
            for i, bv in enumerate(self.basis):
                dcol[bv] = -self.T[i][enter]
            ray = [Fraction(0)] * lp.n
            for k, (kind, j, sg) in enumerate(self.cols):
                if kind == "x" and dcol[k]:
                    ray[j] += Fraction(sg * dcol[k], self.D)
            return LpOutcome(Status.UNBOUNDED, point=point, certificate=tuple(ray))
        value = dot(lp.objective, point)
        u = self._row_prices(cost)
        duals = tuple(flip * s * ui / gamma for s, ui in zip(self.sign, u))
        return LpOutcome(Status.OPTIMAL, point=point, value=value, duals=duals)
