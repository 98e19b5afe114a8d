import itertools
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ftaplab.lp import (EQ, FREE, GE, LE, NONNEG, LinearProgram, LPInputError, Status, as_rat,
                        check_farkas, check_point, check_ray, dot, lp_feasible, lp_solve)


def dual_feasible(lp, u) -> bool:
    s = 1 if lp.maximize else -1
    for ui, sense in zip(u, lp.senses):
        if (sense == LE and s * ui < 0) or (sense == GE and s * ui > 0):
            return False
    for j, bound in enumerate(lp.bounds):
        col = sum((ui * row[j] for ui, row in zip(u, lp.rows)), F(0))
        gap = s * (col - lp.objective[j])
        if (bound == FREE and gap != 0) or (bound == NONNEG and gap < 0):
            return False
    return True


def solve_square(A, b):
    """Gauss-Jordan on a square system; None when singular."""
    n = len(A)
    M = [list(map(F, A[i])) + [F(b[i])] for i in range(n)]
    for c in range(n):
        piv = next((i for i in range(c, n) if M[i][c] != 0), None)
        if piv is None:
            return None
        M[c], M[piv] = M[piv], M[c]
        M[c] = [x / M[c][c] for x in M[c]]
        for i in range(n):
            if i != c and M[i][c]:
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[c])]
    return [M[i][n] for i in range(n)]


def vertex_oracle(c, A, b):
    """max c.x over {Ax <= b, x >= 0} (bounded) by enumerating all vertices."""
    n = len(c)
    rows = [list(r) for r in A] + [[-1 if k == j else 0 for k in range(n)] for j in range(n)]
    rhs = list(b) + [0] * n
    best = None
    for idx in itertools.combinations(range(len(rows)), n):
        x = solve_square([rows[i] for i in idx], [rhs[i] for i in idx])
        if x is None or any(dot(r, x) > v for r, v in zip(rows, rhs)):
            continue
        val = dot(c, x)
        best = val if best is None or val > best else best
    return best


def test_single_bound():
    out = lp_solve(LinearProgram([1], [[1]], [LE], [3]))
    assert out.optimal and out.value == 3 and out.point == (3,)


def test_infeasible_certificate():
    lp = LinearProgram([1], [[1], [1]], [LE, GE], [-1, 0])
    out = lp_solve(lp)
    assert out.status is Status.INFEASIBLE
    assert out.certificate == (1, -1)
    assert check_farkas(lp, out.certificate)


def test_two_constraint_optimum_and_duals():
    lp = LinearProgram([1, 1], [[2, 1], [1, 2]], [LE, LE], [4, 4])
    out = lp_solve(lp)
    assert out.point == (F(4, 3), F(4, 3)) and out.value == F(8, 3)
    assert out.duals == (F(1, 3), F(1, 3))


def test_unbounded_ray():
    lp = LinearProgram([1, 0], [[1, -1]], [LE], [1])
    out = lp_solve(lp)
    assert out.status is Status.UNBOUNDED
    assert check_ray(lp, out.certificate)


def test_feasibility_point():
    ok, x = lp_feasible(LinearProgram([0, 0], [[1, 1], [1, 0], [0, 1]], [EQ, GE, GE],
                                      [1, F(1, 3), F(1, 3)]))
    assert ok and x == (F(2, 3), F(1, 3))


def test_minimize_with_free_variables():
    lp = LinearProgram([1, 1], [[1, 0], [0, 1]], [GE, GE], [-2, -5], [FREE, FREE], maximize=False)
    out = lp_solve(lp)
    assert out.value == -7 and dual_feasible(lp, out.duals)


def test_degenerate_program_terminates():
    # several ties in the ratio test; Bland's rule must not cycle
    lp = LinearProgram([10, -57, -9, -24],
                       [[F(1, 2), F(-11, 2), F(-5, 2), 9], [F(1, 2), F(-3, 2), F(-1, 2), 1], [1, 0, 0, 0]],
                       [LE, LE, LE], [0, 0, 1])
    out = lp_solve(lp)
    assert out.optimal and out.value == 1


def test_as_rat_refuses_floats():
    assert as_rat("1/3") == F(1, 3)
    assert as_rat(" -2 ") == -2
    for bad in (0.5, "0.5", "1e3", True, None):
        with pytest.raises((TypeError, ValueError)):
            as_rat(bad)


def test_input_errors():
    with pytest.raises(LPInputError):
        LinearProgram([1, 2], [[1]], [LE], [1])
    with pytest.raises(LPInputError):
        LinearProgram([1], [[1]], ["<"], [1])
    with pytest.raises(LPInputError):
        LinearProgram([1], [[1]], [LE], [1, 2])
    with pytest.raises(LPInputError):
        LinearProgram([1], [[1]], [LE], [1], ["positive"])


def _random_lp(rng):
    m, n = rng.randint(1, 5), rng.randint(1, 5)
    r = lambda: F(rng.randint(-6, 6), rng.randint(1, 4))
    return LinearProgram([r() for _ in range(n)], [[r() for _ in range(n)] for _ in range(m)],
                         [rng.choice([LE, EQ, GE]) for _ in range(m)], [r() for _ in range(m)],
                         [rng.choice([FREE, NONNEG]) for _ in range(n)], rng.random() < 0.5)


def _assert_sound(lp, out):
    if out.optimal:
        assert check_point(lp, out.point)
        assert dual_feasible(lp, out.duals)
        assert dot(out.duals, lp.rhs) == out.value == dot(lp.objective, out.point)
    elif out.status is Status.INFEASIBLE:
        assert check_farkas(lp, out.certificate)
    else:
        assert check_point(lp, out.point) and check_ray(lp, out.certificate)


def test_random_programs_strong_duality():
    rng = random.Random(11)
    seen = set()
    for _ in range(300):
        lp = _random_lp(rng)
        out = lp_solve(lp)
        seen.add(out.status)
        _assert_sound(lp, out)
    assert seen == set(Status)


def test_matches_vertex_enumeration():
    rng = random.Random(5)
    for _ in range(100):
        n, m = rng.randint(1, 3), rng.randint(1, 4)
        A = [[F(rng.randint(-3, 5), rng.randint(1, 3)) for _ in range(n)] for _ in range(m)]
        b = [F(rng.randint(0, 8)) for _ in range(m)]
        A += [[1 if k == j else 0 for k in range(n)] for j in range(n)]  # box keeps it bounded
        b += [F(rng.randint(1, 6))] * n
        c = [F(rng.randint(-4, 4)) for _ in range(n)]
        out = lp_solve(LinearProgram(c, A, [LE] * len(A), b))
        assert out.optimal
        assert out.value == vertex_oracle(c, A, b)


def test_deterministic():
    rng = random.Random(2)
    for _ in range(20):
        lp = _random_lp(rng)
        assert lp_solve(lp) == lp_solve(lp)


rationals = st.fractions(min_value=-5, max_value=5, max_denominator=6)


@settings(max_examples=150, deadline=None)
@given(st.data())
def test_outcome_always_certified(data):
    m = data.draw(st.integers(1, 4))
    n = data.draw(st.integers(1, 4))
    lp = LinearProgram(data.draw(st.lists(rationals, min_size=n, max_size=n)),
                       [data.draw(st.lists(rationals, min_size=n, max_size=n)) for _ in range(m)],
                       data.draw(st.lists(st.sampled_from([LE, EQ, GE]), min_size=m, max_size=m)),
                       data.draw(st.lists(rationals, min_size=m, max_size=m)),
                       data.draw(st.lists(st.sampled_from([FREE, NONNEG]), min_size=n, max_size=n)),
                       data.draw(st.booleans()))
    _assert_sound(lp, lp_solve(lp))
