import json
from fractions import Fraction as F

import pytest

from ftaplab.documents import (InstanceDocument, SchemaError, deserialize, dumps, instance_from_dict,
                               instance_to_dict, serialize)
from ftaplab.generate import GeneratorConfig, gen_instance
from ftaplab.na2 import na2_local
from ftaplab.pce import build_pce, interior_request

from support import drop_market, flat_market


def test_flat_instance_round_trip_is_byte_identical():
    text = serialize(InstanceDocument(flat_market(2), {"name": "flat"}))
    again = serialize(deserialize(text))
    assert text == again
    assert json.loads(text)["bidask"]["r.0"] == [["1", "2"], ["2", "1"]]


def test_generated_instances_round_trip():
    for mode in ("monotone", "planted-arbitrage", "random"):
        doc = gen_instance(GeneratorConfig(mode=mode, d=3, T=2, seed=5))
        text = serialize(doc)
        assert serialize(deserialize(text)) == text


def test_rational_strings_are_exact():
    d = instance_to_dict(InstanceDocument(flat_market(1)))
    d["kernels"]["r"] = [["1/3", "2/3"]]
    inst = instance_from_dict(d)
    assert inst.market.models[()][0] == (F(1, 3), F(2, 3))


def test_malformed_kernel_names_the_node():
    d = instance_to_dict(InstanceDocument(flat_market(2)))
    d["kernels"]["r.1"] = [["1/2", "1/3"]]
    with pytest.raises(SchemaError, match="node r.1"):
        instance_from_dict(d)


def test_schema_errors_carry_paths():
    d = instance_to_dict(InstanceDocument(flat_market(1)))
    bad = dict(d, version=7)
    with pytest.raises(SchemaError, match=r"\$\.version"):
        instance_from_dict(bad)
    bad = json.loads(json.dumps(d))
    bad["bidask"]["r.0"][0][1] = "0.5"
    with pytest.raises(SchemaError, match=r"bidask\.r\.0\[0\]\[1\]"):
        instance_from_dict(bad)
    bad = json.loads(json.dumps(d))
    del bad["bidask"]["r.1"]
    with pytest.raises(SchemaError, match="missing node r.1"):
        instance_from_dict(bad)
    with pytest.raises(SchemaError, match="invalid JSON"):
        deserialize("{")
    with pytest.raises(SchemaError, match="unknown schema"):
        deserialize('{"schema": "other"}')


def test_certificate_and_price_system_round_trip():
    cert = na2_local(drop_market(), ()).certificate
    assert deserialize(serialize(cert)) == cert
    m = flat_market(2)
    ps = build_pce(m, interior_request(m, 0, m.uniform_measure()))
    back = deserialize(serialize(ps))
    assert back.Z == ps.Z and back.Q.kernels == ps.Q.kernels and back.t == ps.t
    assert serialize(back) == serialize(ps)


def test_dumps_sorts_keys():
    assert dumps({"b": 1, "a": 2}).index('"a"') < dumps({"b": 1, "a": 2}).index('"b"')
