from fractions import Fraction as F

import pytest

from ftaplab.cones import BidAskMatrix
from ftaplab.market import (EventTree, Market, ModelSelectionError, TreeMeasure, hull_weights,
                            node_str, parse_node, validate_instance)

from support import HALF, flat_market, one_period


def test_node_ids_round_trip():
    for node in [(), (0,), (2, 1, 0)]:
        assert parse_node(node_str(node)) == node
    assert node_str((1, 0)) == "r.1.0"
    with pytest.raises(ValueError):
        parse_node("x.1")
    with pytest.raises(ValueError):
        parse_node("r.a")


def test_uniform_tree_shape():
    tree = EventTree.uniform(3, 2)
    assert len(tree.nodes()) == 15
    assert len(tree.leaves()) == 8
    assert tree.children((1,)) == [(1, 0), (1, 1)]
    assert (1, 1, 1) in tree and (2,) not in tree and (0, 0, 0, 0) not in tree


def test_variable_branching():
    tree = EventTree(2, {(): 3, (0,): 1, (1,): 2, (2,): 1})
    assert tree.nodes_at(2) == [(0, 0), (1, 0), (1, 1), (2, 0)]
    with pytest.raises(ValueError, match="no successors"):
        EventTree(2, {(): 2, (0,): 1})
    with pytest.raises(ValueError, match="unknown nodes"):
        EventTree(1, {(): 1, (5,): 2})


def test_reachability_and_polar_nodes():
    tree = EventTree(2, {(): 2, (0,): 2, (1,): 2})
    pi = BidAskMatrix.constant(2, 2)
    m = Market(tree, {n: pi for n in tree.nodes()},
               {(): [(1, 0), (F(1, 2), F(1, 2))], (0,): [(0, 1)], (1,): [HALF]})
    assert m.reachable(()) == [(0,), (1,)]
    assert m.reachable((0,)) == [(0, 1)]
    assert m.is_polar((0, 0)) and not m.is_polar((0, 1))
    m2 = Market(tree, m.bidask, {(): [(1, 0)], (0,): [HALF], (1,): [HALF]})
    assert m2.is_polar((1,)) and m2.is_polar((1, 0))
    assert m2.nonpolar_internal() == [(), (0,)]


def test_measure_masses():
    m = flat_market(2)
    P = m.uniform_measure()
    assert P.mass((1, 0)) == F(1, 4)
    assert sum(P.leaf_masses(m.tree).values()) == 1
    Q = TreeMeasure({(): (1, 0), (0,): HALF, (1,): HALF})
    assert Q.mass((1, 1)) == 0 and Q.support(()) == {0}


def test_model_hull():
    kernels = [(1, 0, 0), (0, 1, 0)]
    assert hull_weights(kernels, (F(1, 3), F(2, 3), 0)) == (F(1, 3), F(2, 3))
    assert hull_weights(kernels, (0, 0, 1)) is None
    m = one_period(2, [2, 2, 2], kernels)
    assert m.in_model_hull((), (F(1, 2), F(1, 2), 0))
    assert not m.in_model_hull((), (F(1, 3),) * 3)


def test_product_measure_checks_selection():
    m = one_period(2, [2, 2], [(1, 0), (0, 1)])
    assert m.product_measure({(): HALF}).kernels[()] == HALF
    with pytest.raises(ModelSelectionError, match="not a model selection at node r"):
        one_period(2, [2, 2], [(1, 0)]).product_measure({(): HALF})
    with pytest.raises(ModelSelectionError, match="no kernel chosen"):
        m.product_measure({})
    assert m.extreme_measure(1).kernels[()] == (0, 1)


def test_support_cone_and_dual_generators():
    m = one_period(8, [2, 4])
    lam = m.support_cone(())
    gens = m.support_dual_generators(())
    assert set(gens) == set(m.dual_rays((0,))) | set(m.dual_rays((1,)))
    # the intersection of the two solvency cones is the smaller one (rate 4)
    from ftaplab.cones import same_cone, solvency_cone
    assert same_cone(lam, solvency_cone(BidAskMatrix.constant(2, 4)))


def test_validate_instance_messages():
    assert validate_instance(flat_market(2)) == []
    tree = EventTree.uniform(1, 2)
    good = BidAskMatrix.constant(2, 2)
    flat = BidAskMatrix([[1, F(1, 2)], [2, 1]])
    m = Market(tree, {(): good, (0,): flat, (1,): BidAskMatrix.constant(3, 2)},
               {(): [(F(1, 2), F(1, 3)), (F(-1, 2), F(3, 2)), (1,)], (0,): [(1,)]})
    msgs = validate_instance(m)
    assert any("efficient friction" in s and "node r.0" in s for s in msgs)
    assert any("asset count 3 at node r.1" in s for s in msgs)
    assert any("does not sum to 1" in s for s in msgs)
    assert any("negative entry" in s for s in msgs)
    assert any("expected 2" in s for s in msgs)
    assert any("terminal or unknown node r.0" in s for s in msgs)
    assert validate_instance(flat_market(1), c=3) != []
    assert validate_instance(flat_market(1), c=4) == []
