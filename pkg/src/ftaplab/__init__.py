"""Exact-arithmetic lab for no-arbitrage and consistent price systems in
markets with proportional transaction costs on finite event trees."""

from .lp import (EQ, FREE, GE, LE, NONNEG, LinearProgram, LpOutcome, Rat, Status, as_rat,
                 check_farkas, check_point, check_ray, lp_feasible, lp_solve)
from .cones import (BidAskMatrix, EmptyInteriorError, NotPointedError, PolyCone, QuoteError,
                    dual_cone_hrep, efficient_friction, extreme_rays, frictionless_decompose,
                    interior_margin, member_cone, roundtrip_bound, solvency_cone,
                    validate_bidask)
from .market import EventTree, Market, TreeMeasure, node_str, parse_node, validate_instance
from .na2 import (ArbitrageCertificate, GlobalVerdict, Na2Verdict, Strategy, arbitrage_to_global,
                  na2_global, na2_local, na2_local_vrep, verify_global_certificate,
                  verify_local_certificate)
from .pce import (ExtensionRequest, NoExtensionError, OneStep, PriceSystem, build_pce,
                  easy_direction_check, one_step_extend, theta_membership, verify_pce)
from .documents import InstanceDocument, SchemaError, deserialize, load, save, serialize
from .generate import GeneratorConfig, gen_instance, mixed_corpus
from .experiment import render_report, reverify_report, run_equivalence

__version__ = "0.1.0"
