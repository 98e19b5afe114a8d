"""A market where transaction costs collapse tomorrow: a position that is
insolvent today becomes solvent everywhere tomorrow for free."""
import random
from fractions import Fraction as F

from ftaplab import (BidAskMatrix, EventTree, Market, arbitrage_to_global, na2_global, node_str,
                     verify_global_certificate, verify_local_certificate)
from ftaplab.na2 import search_global_arbitrage


def fmt(v):
    return "(" + ", ".join(str(x) for x in v) + ")"


tree = EventTree(1, {(): 2})
today, tomorrow = BidAskMatrix.constant(2, 8), BidAskMatrix.constant(2, 2)
half = (F(1, 2), F(1, 2))
market = Market(tree, {(): today, (0,): tomorrow, (1,): tomorrow}, {(): [half]})

verdict = na2_global(market)
print("no-arbitrage:", verdict.status)
node, cert = verdict.failing[0]
print("position", fmt(cert.zeta), "is insolvent now but solvent at every successor")
print("dual ray of today's cone it violates:", fmt(cert.separating_ray))
print("local check:", verify_local_certificate(market, cert))

strategy = arbitrage_to_global(market, cert)
for n, x in sorted(strategy.xi.items()):
    print(f"  trade at {node_str(n)}: {fmt(x)}")
print("global check:", verify_global_certificate(market, cert.zeta, strategy, node))

# a blind random search lands on some arbitrage as well
found = search_global_arbitrage(market, random.Random(0), tries=100)
print("random search found one:", found is not None)

# raise tomorrow's costs above today's and the opportunity disappears
pricey = BidAskMatrix.constant(2, 9)
safe = Market(tree, {(): today, (0,): pricey, (1,): pricey}, {(): [half]})
print("with rising costs:", na2_global(safe).status)
