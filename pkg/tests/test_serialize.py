import json

import numpy as np
import pytest

from tempocorr import serialize as se
from tempocorr.correlations import (
    Scenario,
    compose_from_conditionals,
    decompose_behavior,
    named_vertex,
    random_conditional_chain,
)
from tempocorr.errors import SchemaError
from tempocorr.realize import canonical_protocols, full_behavior
from tempocorr.witness import builtin_functionals, certify, random_strategy


def roundtrip(obj, to_json, from_json):
    text = se.dumps(to_json(obj))
    parsed = from_json(json.loads(text))
    assert se.dumps(to_json(parsed)) == text
    return parsed


class TestMatrix:
    def test_roundtrip(self):
        m = np.array([[1 + 2j, 0.25], [-1j, 0.125]])
        back = se.matrix_from_json(se.matrix_to_json(m), "m")
        assert np.array_equal(back, m)

    def test_rejects_non_square_length(self):
        with pytest.raises(SchemaError):
            se.matrix_from_json([[1.0, 0.0]] * 3, "m")

    def test_rejects_bad_pair(self):
        with pytest.raises(SchemaError) as exc:
            se.matrix_from_json([[1.0, 0.0], [1.0], [0.0, 0.0], [0.0, 0.0]], "m")
        assert "m[1]" in str(exc.value)


class TestSystemModel:
    def test_roundtrip_all_protocols(self):
        for name, sys_model in canonical_protocols().items():
            parsed = roundtrip(sys_model, se.system_model_to_json, se.system_model_from_json)
            assert parsed.dim == sys_model.dim, name

    def test_lossless_behavior_after_roundtrip(self):
        sys_model = canonical_protocols()["qutrit-e1"]
        parsed = se.system_model_from_json(json.loads(se.dumps(se.system_model_to_json(sys_model))))
        b1 = full_behavior(sys_model, 2)
        b2 = full_behavior(parsed, 2)
        assert np.array_equal(b1.table, b2.table)

    def test_dim_mismatch_reported_with_path(self):
        data = se.system_model_to_json(canonical_protocols()["qubit-B1-3"])
        data["dim"] = 3
        with pytest.raises(SchemaError) as exc:
            se.system_model_from_json(data)
        assert exc.value.path == "initial"

    def test_invalid_instrument_reported_with_path(self):
        data = se.system_model_to_json(canonical_protocols()["qubit-B1-3"])
        data["instruments"][1]["kraus"] = data["instruments"][1]["kraus"][:1]
        with pytest.raises(SchemaError) as exc:
            se.system_model_from_json(data)
        assert "instruments[1]" in exc.value.path


class TestBehavior:
    def test_roundtrip_is_lossless(self):
        rng = np.random.default_rng(40)
        b = compose_from_conditionals(random_conditional_chain(rng, Scenario(2, 3, 2)))
        parsed = se.behavior_from_json(json.loads(se.dumps(se.behavior_to_json(b))))
        assert np.array_equal(parsed.table, b.table)

    def test_missing_block(self):
        data = se.behavior_to_json(full_behavior(canonical_protocols()["qubit-B1-3"], 2))
        del data["table"]["01"]
        with pytest.raises(SchemaError):
            se.behavior_from_json(data)

    def test_bad_key(self):
        data = se.behavior_to_json(full_behavior(canonical_protocols()["qubit-B1-3"], 2))
        data["table"]["02"] = data["table"].pop("01")
        with pytest.raises(SchemaError) as exc:
            se.behavior_from_json(data)
        assert "table.02" in str(exc.value)

    def test_wrong_row_length(self):
        data = se.behavior_to_json(full_behavior(canonical_protocols()["qubit-B1-3"], 2))
        data["table"]["00"] = data["table"]["00"][:3]
        with pytest.raises(SchemaError):
            se.behavior_from_json(data)


class TestVertexAndDecomposition:
    def test_vertex_roundtrip(self):
        for name in ("e1", "e2", "e3", "e4"):
            v = named_vertex(name)
            assert se.vertex_from_json(se.vertex_to_json(v)) == v

    def test_vertex_key_format(self):
        keys = set(se.vertex_to_json(named_vertex("e1"))["assignment"])
        assert "t=1;x=0;a=" in keys
        assert "t=2;x=01;a=0" in keys

    def test_vertex_missing_context(self):
        data = se.vertex_to_json(named_vertex("e1"))
        del data["assignment"]["t=1;x=0;a="]
        with pytest.raises(SchemaError):
            se.vertex_from_json(data)

    def test_decomposition_roundtrip(self):
        rng = np.random.default_rng(41)
        b = compose_from_conditionals(random_conditional_chain(rng, Scenario(2, 2, 2)))
        d = decompose_behavior(b)
        parsed = roundtrip(d, se.decomposition_to_json, se.decomposition_from_json)
        assert len(parsed.terms) == len(d.terms)

    def test_decomposition_weight_validation(self):
        data = se.decomposition_to_json(decompose_behavior_of_e1())
        data["terms"][0]["weight"] = 0.5
        with pytest.raises(SchemaError):
            se.decomposition_from_json(data)


def decompose_behavior_of_e1():
    from tempocorr.correlations import vertex_behavior

    return decompose_behavior(vertex_behavior(named_vertex("e1")))


class TestWitnessObjects:
    def test_functional_roundtrip(self):
        for f in builtin_functionals().values():
            parsed = roundtrip(f, se.functional_to_json, se.functional_from_json)
            assert parsed.terms == f.terms

    def test_functional_term_format(self):
        data = se.functional_to_json(builtin_functionals()["B1"])
        assert {"a": "00", "x": "00", "coeff": 1.0} in data["terms"]

    def test_functional_requires_l2(self):
        data = se.functional_to_json(builtin_functionals()["B1"])
        data["L"] = 3
        with pytest.raises(SchemaError):
            se.functional_from_json(data)

    def test_functional_bad_digits(self):
        data = se.functional_to_json(builtin_functionals()["B1"])
        data["terms"][0]["a"] = "05"
        with pytest.raises(SchemaError):
            se.functional_from_json(data)

    def test_strategy_roundtrip(self):
        rng = np.random.default_rng(42)
        s = random_strategy(rng)
        parsed = roundtrip(s, se.strategy_to_json, se.strategy_from_json)
        assert np.array_equal(parsed.initial, s.initial)
        assert np.array_equal(parsed.post, s.post)

    def test_report_json_fields(self):
        from tempocorr.correlations import vertex_behavior

        report = certify(vertex_behavior(named_vertex("e1")))
        data = se.report_to_json(report)
        assert data["verdict"] == "dimension > 2"
        assert len(data["witnesses"]) == 4
        assert {w["name"] for w in data["witnesses"]} == {"B1", "B2", "B3", "B4"}
