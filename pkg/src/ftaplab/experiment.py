"""Equivalence experiment: no-arbitrage verdicts against price-system
construction on batches of instances.

For an arbitrage-free instance every probe ``(t, P, Y)`` must extend to a
verified price system.  For an instance with arbitrage every failing node
must carry a certificate that verifies globally, together with an
interior dual vector that admits no one-step extension.  Anything else is
recorded as a counterexample, which can only mean a bug.
"""
from __future__ import annotations

import hashlib
import itertools
import logging
import random
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from . import cones
from .market import Market, node_str
from .na2 import (arbitrage_to_global, in_cone_of, na2_global, na2_local_vrep,
                  verify_global_certificate, verify_local_certificate)
from .pce import (NoExtensionError, PreconditionError, build_pce, check_separator, easy_direction_check,
                  interior_request, one_step_extend, theta_membership, verify_pce)
from .documents import (REPORT, VERSION, InstanceDocument, certificate_from_dict,
                        certificate_to_dict, dumps, instance_from_dict, instance_to_dict,
                        price_system_from_dict, price_system_to_dict, rats,
                        request_from_dict, request_to_dict, strategy_from_dict,
                        strategy_to_dict)

log = logging.getLogger(__name__)

EXHAUSTIVE_LIMIT = 4096
WITNESS_HALVINGS = 200
EASY_PROBES = 10


def _instance_seed(doc: dict) -> int:
    blob = dumps(doc).encode()
    return int.from_bytes(hashlib.sha256(blob).digest()[:8], "big")


def measure_choices(market: Market, probes: int, rng: random.Random, exhaustive: bool = False):
    """Extreme-kernel index maps; all of them in exhaustive mode, otherwise
    the all-zero choice followed by distinct random draws (at most ``probes``)."""
    nodes = market.tree.internal()
    counts = [len(market.models[n]) for n in nodes]
    total = 1
    for c in counts:
        total *= c
    if exhaustive:
        if total > EXHAUSTIVE_LIMIT:
            raise ValueError(f"{total} product measures exceed the exhaustive limit {EXHAUSTIVE_LIMIT}")
        return [dict(zip(nodes, combo)) for combo in itertools.product(*(range(c) for c in counts))]
    seen = [tuple(0 for _ in nodes)]
    target = min(probes, total)
    attempts = 0
    while len(seen) < target and attempts < 50 * probes:
        attempts += 1
        combo = tuple(rng.randrange(c) for c in counts)
        if combo not in seen:
            seen.append(combo)
    return [dict(zip(nodes, combo)) for combo in seen]


def witness_outside(market: Market, node, ray):
    """Interior dual vector outside the support dual cone, by halving the
    weight on the interior anchor until membership fails."""
    gens = market.support_dual_generators(node)
    anchor = market.interior_anchor(node)
    delta = Fraction(1, 2)
    for _ in range(WITNESS_HALVINGS):
        y = tuple((1 - delta) * r + delta * a for r, a in zip(ray, anchor))
        if not in_cone_of(y, gens):
            return y
        delta /= 2
    return None


def random_solvent_position(market: Market, node, rng: random.Random) -> tuple:
    """Random nonnegative integer mix of support-cone generators: solvent
    at every reachable successor of ``node``."""
    gens = market._memo(("lambda-int", node), lambda: [
        cones._int_primitive(g) for g in market.support_generators(node)])
    w = [rng.randint(0, 4) for _ in gens]
    if not any(w):
        w[rng.randrange(len(w))] = 1
    return tuple(Fraction(sum(wk * g[i] for wk, g in zip(w, gens))) for i in range(market.d))


def _check_holds(market: Market, rng, probes, y_probes, exhaustive, embed_all, entry):
    built = verified = easy = 0
    embedded = []
    problems = []
    for t in range(market.T):
        for choice in measure_choices(market, probes, rng, exhaustive):
            P = market.extreme_measure(choice)
            for k in range(y_probes):
                req = interior_request(market, t, P, rng)
                try:
                    ps = build_pce(market, req)
                except NoExtensionError as exc:
                    problems.append(f"no extension at node {node_str(exc.node)} (t={t})")
                    continue
                built += 1
                bad = verify_pce(market, ps, req)
                if bad:
                    problems.append(f"price system failed verification (t={t}): {bad[0]}")
                    continue
                verified += 1
                for node in market.tree.nodes_at(t):
                    if node not in ps.Z:
                        continue
                    for _ in range(EASY_PROBES):
                        zeta = random_solvent_position(market, node, rng)
                        try:
                            ok = easy_direction_check(market, ps, zeta, node)
                        except PreconditionError as exc:  # Q charges an unreachable successor
                            ok = False
                            log.debug("easy direction precondition: %s", exc)
                        if not ok:
                            problems.append(f"easy-direction identity fails at {node_str(node)}")
                        easy += 1
                if embed_all or not any(e["request"]["t"] == t for e in embedded):
                    embedded.append({"request": request_to_dict(req),
                                     "price_system": price_system_to_dict(ps)})
    entry["probes"] = {"built": built, "verified": verified, "easy_direction": easy}
    entry["price_systems"] = embedded
    return problems


def _check_fails(market: Market, verdict, entry):
    problems = []
    records = []
    for node, cert in verdict.failing:
        rec = {"certificate": certificate_to_dict(cert)}
        rec["local_verified"] = verify_local_certificate(market, cert)
        strategy = arbitrage_to_global(market, cert) if rec["local_verified"] else None
        rec["global_verified"] = bool(strategy) and verify_global_certificate(
            market, cert.zeta, strategy, node)
        if strategy is not None:
            rec["strategy"] = strategy_to_dict(strategy)
        y = witness_outside(market, node, cert.separating_ray)
        if y is None:
            problems.append(f"no witness outside the support dual at {node_str(node)}")
        else:
            rec["witness_y"] = rats(y)
            rec["witness_theta"] = theta_membership(market, node, market.models[node][0], y)
            try:
                one_step_extend(market, node, y)
                rec["witness_separator"] = None
            except NoExtensionError as exc:
                rec["witness_separator"] = rats(exc.separator)
            if rec["witness_theta"] or rec["witness_separator"] is None:
                problems.append(f"witness at {node_str(node)} extends")
        if not rec["local_verified"] or not rec["global_verified"]:
            problems.append(f"certificate at {node_str(node)} does not verify")
        records.append(rec)
    entry["certificates"] = records
    return problems


def run_one(doc: dict, probes: int = 20, y_probes: int = 5, exhaustive: bool = False,
            embed_all: bool = False) -> dict:
    """Run the equivalence checks on one serialized instance."""
    started = time.perf_counter()
    inst = instance_from_dict(doc)
    market = inst.market
    rng = random.Random(_instance_seed(doc))
    entry = {"instance": doc, "counterexample": None}
    verdict = na2_global(market)
    entry["verdict"] = verdict.status
    entry["failing_nodes"] = [node_str(n) for n in verdict.failing_nodes]
    disagree = [node_str(n) for n in market.nonpolar_internal()
                if na2_local_vrep(market, n) != (n not in verdict.failing_nodes)]
    entry["cross_checks"] = {"vrep_oracle_disagreements": disagree}
    if verdict.holds:
        problems = _check_holds(market, rng, probes, y_probes, exhaustive, embed_all, entry)
    else:
        problems = _check_fails(market, verdict, entry)
    problems += [f"double-description oracle disagrees at {n}" for n in disagree]
    mode = inst.metadata.get("mode")
    if mode == "monotone" and not verdict.holds:
        problems.append("monotone instance has arbitrage")
    if mode == "planted-arbitrage" and verdict.holds:
        problems.append("planted arbitrage not detected")
    if problems:
        entry["counterexample"] = problems
    entry["seconds"] = round(time.perf_counter() - started, 4)
    return entry


def run_equivalence(instances, probes: int = 20, y_probes: int = 5, exhaustive: bool = False,
                    workers: int = 1, embed_all: bool = False) -> dict:
    """Build an experiment report; ``instances`` are InstanceDocuments or dicts."""
    docs = [instance_to_dict(i) if isinstance(i, InstanceDocument) else i for i in instances]
    args = (probes, y_probes, exhaustive, embed_all)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            entries = list(pool.map(_run_star, [(doc,) + args for doc in docs]))
    else:
        entries = [run_one(doc, *args) for doc in docs]
    for k, e in enumerate(entries):
        e["index"] = k
        if e["counterexample"]:
            log.error("instance %d: COUNTEREXAMPLE %s", k, e["counterexample"])
    summary = {
        "instances": len(entries),
        "holds": sum(e["verdict"] == "holds" for e in entries),
        "fails": sum(e["verdict"] == "fails" for e in entries),
        "counterexamples": sum(bool(e["counterexample"]) for e in entries),
        "price_systems_verified": sum(e.get("probes", {}).get("verified", 0) for e in entries),
        "certificates_verified": sum(
            sum(c["global_verified"] for c in e.get("certificates", [])) for e in entries),
        "seconds": round(sum(e["seconds"] for e in entries), 4),
    }
    return {"schema": REPORT, "version": VERSION,
            "settings": {"probes": probes, "y_probes": y_probes, "exhaustive": exhaustive},
            "instances": entries, "summary": summary}


def _run_star(args):
    return run_one(*args)


def reverify_report(report: dict) -> list:
    """Re-check every embedded certificate and price system from the
    document alone (substitution checks, no re-run of the deciders)."""
    problems = []
    for e in report["instances"]:
        k = e.get("index")
        market = instance_from_dict(e["instance"]).market
        if e["verdict"] == "holds":
            if not e.get("price_systems"):
                problems.append(f"instance {k}: no embedded price system")
            for ps_doc in e.get("price_systems", []):
                req = request_from_dict(ps_doc["request"])
                ps = price_system_from_dict(ps_doc["price_system"])
                bad = verify_pce(market, ps, req)
                if bad:
                    problems.append(f"instance {k}: {bad[0]}")
        else:
            if not e.get("certificates"):
                problems.append(f"instance {k}: no embedded certificate")
            for rec in e.get("certificates", []):
                cert = certificate_from_dict(rec["certificate"])
                if not verify_local_certificate(market, cert):
                    problems.append(f"instance {k}: local certificate at {node_str(cert.node)} fails")
                    continue
                strategy = strategy_from_dict(rec["strategy"])
                if not verify_global_certificate(market, cert.zeta, strategy, cert.node):
                    problems.append(f"instance {k}: global certificate at {node_str(cert.node)} fails")
                y = tuple(Fraction(v) for v in rec["witness_y"])
                sep = tuple(Fraction(v) for v in rec["witness_separator"])
                if not cones.strictly_inside(y, market.Kstar(cert.node)) or \
                        not check_separator(market, cert.node, y, sep):
                    problems.append(f"instance {k}: witness at {node_str(cert.node)} fails")
    return problems


def render_report(report: dict) -> str:
    s = report["summary"]
    lines = [
        f"instances:          {s['instances']}",
        f"no-arbitrage holds: {s['holds']}",
        f"arbitrage found:    {s['fails']}",
        f"price systems verified: {s['price_systems_verified']}",
        f"certificates verified:  {s['certificates_verified']}",
        f"counterexamples:    {s['counterexamples']}",
        f"solver time:        {s['seconds']:.1f}s",
    ]
    for e in report["instances"]:
        if e["counterexample"]:
            lines.append(f"  COUNTEREXAMPLE #{e['index']}: {'; '.join(e['counterexample'])}")
    return "\n".join(lines)
