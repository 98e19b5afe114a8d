"""Bid-ask matrices, the cones they generate, and efficient friction
seen through round trips and through an LP."""
from fractions import Fraction as F

from ftaplab import BidAskMatrix, dual_cone_hrep, efficient_friction, extreme_rays
from ftaplab import frictionless_decompose, roundtrip_bound, solvency_cone
from ftaplab.cones import has_interior_lp, pick_interior_point


def fmt(v):
    return "(" + ", ".join(str(x) for x in v) + ")"


# two currencies: 2 units of either buy one unit of the other
pi = BidAskMatrix.constant(2, 2)
K = solvency_cone(pi)
print("solvency cone generators:", ", ".join(fmt(g) for g in K.generators))
rays = extreme_rays(dual_cone_hrep(pi))
print("shadow-price rays:", ", ".join(fmt(r) for r in rays))

# the pairwise round-trip test and the LP interior test agree
print("round trips lose money:", efficient_friction(pi), "| interior by LP:",
      has_interior_lp(dual_cone_hrep(pi)))

# three assets quoted around prices S = (1, 3, 1/2) with a 10% cost
S = (F(1), F(3), F(1, 2))
rows = [[1 if i == j else S[j] / S[i] * F(11, 10) for j in range(3)] for i in range(3)]
pi3 = BidAskMatrix(rows)
print("3-asset dual rays:")
for r in extreme_rays(dual_cone_hrep(pi3)):
    print("   ", fmt(r))

y = pick_interior_point(dual_cone_hrep(pi3))
dec = frictionless_decompose(pi3, y)
print("frictionless quote", fmt(y))
print("largest cost coefficient", max(max(row) for row in dec.lam), "bounded by c - 1 =",
      roundtrip_bound(pi3) - 1)

# a zero-cost pair: exchanging back and forth returns exactly the start
flat = BidAskMatrix([[1, 3], [F(1, 3), 1]])
print("zero-cost pair has friction?", efficient_friction(flat),
      "| interior by LP:", has_interior_lp(dual_cone_hrep(flat)))
