"""Exact linear programming: optimal points, infeasibility proofs, and
unbounded rays, all as fractions that can be checked by substitution."""
from ftaplab import EQ, GE, LE, LinearProgram, check_farkas, check_point, check_ray, lp_solve


def fmt(v):
    return "(" + ", ".join(str(x) for x in v) + ")"


# maximize x + y subject to x + 2y <= 4 and 3x + y <= 6
lp = LinearProgram((1, 1), [(1, 2), (3, 1)], [LE, LE], (4, 6))
out = lp_solve(lp)
print(out.status.name, "value", out.value, "at", fmt(out.point))
print("  point checks out:", check_point(lp, out.point))
print("  dual prices:", fmt(out.duals))

# x + y = 1 and x + y >= 3 cannot both hold; the solver hands back row
# weights that combine into 0 >= something positive
bad = LinearProgram((0, 0), [(1, 1), (1, 1)], [EQ, GE], (1, 3))
out = lp_solve(bad)
print(out.status.name, "certificate", fmt(out.certificate), "valid:",
      check_farkas(bad, out.certificate))

# maximize x with only x - y <= 1: walk along a ray forever
loose = LinearProgram((1, 0), [(1, -1)], [LE], (1,))
out = lp_solve(loose)
print(out.status.name, "from", fmt(out.point), "along", fmt(out.certificate), "valid:",
      check_ray(loose, out.certificate))
