"""Building strictly consistent price systems, and watching the
construction refuse a starting price when arbitrage is present."""
import random

from ftaplab import GeneratorConfig, gen_instance, na2_global, node_str
from ftaplab.experiment import witness_outside
from ftaplab.pce import (NoExtensionError, build_pce, check_separator, easy_direction_check,
                         interior_request, one_step_extend, verify_pce)


def fmt(v):
    return "(" + ", ".join(str(x) for x in v) + ")"


market = gen_instance(GeneratorConfig(mode="monotone", d=3, T=2, seed=11)).market
print("generated market: d =", market.d, "nodes =", len(market.tree.nodes()),
      "| no-arbitrage:", na2_global(market).status)

rng = random.Random(5)
req = interior_request(market, 0, market.extreme_measure(0), rng)
ps = build_pce(market, req)
print("verification problems:", verify_pce(market, ps, req))
for node in sorted(ps.Z, key=lambda n: (len(n), n))[:4]:
    print(f"  Z({node_str(node)}) =", fmt(ps.Z[node]))

# the pricing identity for a position solvent at every successor of the root
zeta = market.support_generators(())[0]
print("zeta", fmt(zeta), "priced consistently:", easy_direction_check(market, ps, zeta, ()))

# a planted cost collapse: start prices close to the violated ray are stuck
drop = gen_instance(GeneratorConfig(mode="planted-arbitrage", d=2, T=1, seed=3)).market
node, cert = na2_global(drop).failing[0]
y = witness_outside(drop, node, cert.separating_ray)
try:
    one_step_extend(drop, node, y)
    print("extended", fmt(y))
except NoExtensionError as exc:
    print("start", fmt(y), "blocked; separating position", fmt(exc.separator),
          "verified:", check_separator(drop, node, y, exc.separator))
