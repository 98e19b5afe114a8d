import random
import warnings
from fractions import Fraction as F

import pytest
from hypothesis import given, settings

from ftaplab.cones import (BidAskMatrix, EmptyInteriorError, NotPointedError, PolyCone, QuoteError,
                           TriangleInequalityWarning, cone_intersection, dual_cone_hrep, dual_rays,
                           efficient_friction, extreme_rays, facets, frictionless_decompose,
                           has_interior_lp, interior_margin, member_cone, normalize_ray,
                           pick_interior_point, primitive, roundtrip_bound, same_cone,
                           dual_cone_full, solvency_cone, solvency_cone_full, strictly_inside, validate_bidask,
                           validate_cone)
from ftaplab.lp import dot

from support import midprice_matrix, seeds

PI2 = BidAskMatrix.constant(2, 2)


def test_dual_rays_of_rate_two():
    assert dual_rays(PI2) == ((1, F(1, 2)), (1, 2))


def test_solvency_rays_recovered_from_dual():
    assert extreme_rays(PolyCone(2, normals=dual_rays(PI2))) == ((-1, 2), (1, F(-1, 2)))


def test_three_assets_have_six_dual_rays():
    rays = dual_rays(BidAskMatrix.constant(3, 2))
    assert len(rays) == 6
    assert all(member_cone(r, dual_cone_hrep(BidAskMatrix.constant(3, 2))) for r in rays)


def test_interior_margins():
    K = dual_cone_hrep(PI2)
    assert interior_margin((1, 1), K) == F(1, 2)
    assert interior_margin((1, 2), K) == 0
    assert interior_margin((1, 3), K) == F(-1, 4)
    with pytest.raises(ValueError):
        interior_margin((0, 0), K)


def test_interior_point_uses_numeraire():
    assert pick_interior_point(dual_cone_hrep(PI2)) == (1, 1)


def test_zero_round_trip_has_no_interior():
    pi = BidAskMatrix([[1, F(1, 2)], [2, 1]])
    assert not efficient_friction(pi)
    cone = dual_cone_hrep(pi)
    with pytest.raises(EmptyInteriorError) as info:
        pick_interior_point(cone)
    mu = info.value.certificate
    assert all(m >= 0 for m in mu) and sum(mu) == 1
    combo = [sum(m * n[i] for m, n in zip(mu, cone.normals)) for i in range(2)]
    assert combo == [0, 0]


def test_not_pointed_reports_a_line():
    with pytest.raises(NotPointedError) as info:
        extreme_rays(PolyCone(2, normals=[(1, 0)]))
    line = info.value.line
    assert dot((1, 0), line) == 0 and any(line)


def test_decompose_against_price():
    dec = frictionless_decompose(PI2, (1, 2))
    assert dec.lam[0][1] == 0 and dec.lam[1][0] == 3
    assert dec.c == 4
    with pytest.raises(QuoteError, match="not consistent"):
        frictionless_decompose(PI2, (1, 3))


def test_bidask_input_checks():
    with pytest.raises(ValueError):
        BidAskMatrix([[1]])
    with pytest.raises(ValueError):
        BidAskMatrix([[2, 1], [1, 1]])
    with pytest.raises(ValueError):
        BidAskMatrix([[1, 0], [1, 1]])


def test_validator_messages():
    assert validate_bidask(PI2) == []
    msgs = validate_bidask(BidAskMatrix([[1, F(1, 2)], [2, 1]]))
    assert msgs and "assets 1,2" in msgs[0]
    assert "below the round-trip bound" in validate_bidask(PI2, c=3)[0]
    assert validate_bidask(PI2, c=4) == []


def test_profitable_cycle_is_rejected():
    # every pair loses on a round trip, yet 1 -> 2 -> 3 -> 1 multiplies wealth by 8
    pi = BidAskMatrix([[1, F(1, 2), 4], [4, 1, F(1, 2)], [F(1, 2), 4, 1]])
    assert efficient_friction(pi)
    assert not has_interior_lp(dual_cone_hrep(pi))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TriangleInequalityWarning)
        assert any("exchange cycle" in m for m in validate_bidask(pi))


def test_triangle_violation_only_warns():
    pi = BidAskMatrix([[1, 9, 2], [2, 1, 2], [2, 2, 1]])
    with pytest.warns(TriangleInequalityWarning):
        assert validate_bidask(pi) == []


def test_cone_validation():
    assert validate_cone(solvency_cone(PI2), "solvency") == []
    assert validate_cone(dual_cone_hrep(PI2), "dual") == []
    bad = PolyCone(2, normals=[(1, 0), (0, 1)])  # dual orthant touches the axes
    assert validate_cone(bad, "dual")


def test_intersection_and_containment():
    K2 = solvency_cone(PI2)
    K8 = solvency_cone(BidAskMatrix.constant(2, 8))
    both = cone_intersection([dual_cone_hrep(PI2), dual_cone_hrep(BidAskMatrix.constant(2, 8))])
    assert same_cone(both, dual_cone_hrep(PI2))
    assert not same_cone(K2, K8)


def test_primitive_and_normalize():
    assert primitive((F(2, 3), F(-4, 9))) == (3, -2)
    assert normalize_ray((-3, 6)) == (-1, 2)


# ------------------------------------------------------------------ random families

def _random_matrices(n, seed):
    rng = random.Random(seed)
    return [midprice_matrix(rng, rng.choice((2, 3, 4))) for _ in range(n)]


def test_duality_involution_random():
    for pi in _random_matrices(60, 1):
        rays = extreme_rays(dual_cone_hrep(pi))
        back = PolyCone(pi.d, generators=extreme_rays(PolyCone(pi.d, normals=rays)))
        assert same_cone(back, solvency_cone(pi))


def test_friction_tests_agree_random():
    rng = random.Random(4)
    for k in range(60):
        d = rng.choice((2, 3, 4))
        zero = [(0, 1)] if k % 3 == 0 else []
        pi = midprice_matrix(rng, d, zero)
        assert efficient_friction(pi) == has_interior_lp(dual_cone_hrep(pi)) == (not zero)


def test_ratio_bound_random():
    for pi in _random_matrices(60, 9):
        c = roundtrip_bound(pi)
        rays = dual_rays(pi)
        for x in rays:
            for y in rays:
                for i in range(pi.d):
                    for j in range(pi.d):
                        assert x[j] / y[j] <= c * x[i] / y[i]


@settings(max_examples=40, deadline=None)
@given(seeds())
def test_dual_rays_are_strictly_positive_and_tight(seed):
    rng = random.Random(seed)
    pi = midprice_matrix(rng, rng.choice((2, 3)))
    K = solvency_cone(pi)
    for r in dual_rays(pi):
        assert all(v > 0 for v in r)
        assert all(dot(g, r) >= 0 for g in K.generators)
        # an extreme ray is tight on d - 1 independent generators
        assert sum(dot(g, r) == 0 for g in K.generators) >= pi.d - 1


@settings(max_examples=40, deadline=None)
@given(seeds())
def test_decomposition_costs_bounded(seed):
    rng = random.Random(seed)
    pi = midprice_matrix(rng, rng.choice((2, 3)))
    c = roundtrip_bound(pi)
    for S in dual_rays(pi) + (pick_interior_point(dual_cone_hrep(pi)),):
        dec = frictionless_decompose(pi, S)
        for i, j in pi.pairs():
            assert 0 <= dec.lam[i][j] and 1 + dec.lam[i][j] <= c


@settings(max_examples=30, deadline=None)
@given(seeds())
def test_facets_round_trip(seed):
    rng = random.Random(seed)
    pi = midprice_matrix(rng, rng.choice((2, 3)))
    dual = PolyCone(pi.d, generators=dual_rays(pi))
    normals = facets(dual)
    assert set(normals) <= {normalize_ray(n) for n in dual_cone_hrep(pi).normals}
    assert set(extreme_rays(PolyCone(pi.d, normals=normals))) == set(dual_rays(pi))


@settings(max_examples=40, deadline=None)
@given(seeds())
def test_integer_sign_tests_match_fraction_definitions(seed):
    rng = random.Random(seed)
    pi = midprice_matrix(rng, rng.choice((2, 3, 4)))
    K, Kstar = solvency_cone_full(pi), dual_cone_full(pi)
    for _ in range(20):
        v = tuple(F(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(pi.d))
        if not any(v):
            continue
        assert member_cone(v, K) == all(dot(n, v) >= 0 for n in K.normals)
        assert strictly_inside(v, Kstar) == (interior_margin(v, Kstar) > 0)
    for r in Kstar.generators:  # boundary rays are never strictly inside
        assert not strictly_inside(r, Kstar)
