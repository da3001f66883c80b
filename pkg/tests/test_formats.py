from __future__ import annotations

import json
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gptcone import formats as fm
from gptcone.cones import Lorentz, PolyH, PolyV
from gptcone.sandwich import catalog
from gptcone.tensor import TensorElement

rats = st.fractions(min_value=-50, max_value=50, max_denominator=1000)


def reparse(doc):
    return json.loads(fm.dumps(doc))


@given(st.lists(rats, min_size=1, max_size=6))
def test_vector_round_trip(v):
    assert fm.vec_in(reparse(fm.vec_out(v))) == tuple(v)


@given(st.lists(st.lists(rats, min_size=3, max_size=3), min_size=1, max_size=3))
def test_tensor_round_trip(m):
    t = TensorElement(m)
    assert fm.tensor_from_json(reparse(fm.tensor_to_json(t))) == t


def test_cone_round_trips():
    for c in (PolyV(3, [(1, 0, 1), (0, 1, 1), (0, 0, 1)]), PolyH(2, [(1, 0), (0, 1)]), Lorentz(4)):
        assert fm.cone_from_json(reparse(fm.cone_to_json(c))) == c


@pytest.mark.parametrize("name", ["square", "hexagon", "pentagon-rational", "qubit-lorentz"])
def test_catalog_objects_round_trip(name):
    e = catalog(name)
    doc = reparse({"system": fm.system_to_json(e.system), "witness": fm.witness_to_json(e.witness)})
    assert fm.system_from_json(doc) == e.system
    assert fm.witness_from_json(doc) == e.witness
    if e.sandwich is not None:
        assert fm.sandwich_from_json(reparse({"sandwich": fm.sandwich_to_json(e.sandwich)})) == e.sandwich


def test_rationals_are_strings():
    assert fm.vec_out([Fraction(3, 4), 2]) == ["3/4", "2"]
    assert fm.parse_rat(" -7/3 ") == Fraction(-7, 3)
    assert fm.parse_rat(5) == 5
    for bad in (0.5, True, "x", "1/0", None):
        with pytest.raises(fm.FormatError):
            fm.parse_rat(bad)


def test_number_rendering():
    assert fm.number(Fraction(1, 3)) == {"exact": "1/3", "decimal": 0.333333333333}
    assert fm.number(2) == {"exact": "2", "decimal": 2.0}


def test_malformed_documents():
    with pytest.raises(fm.FormatError):
        fm.cone_from_json({"kind": "Q", "dim": 3})
    with pytest.raises(fm.FormatError):
        fm.cone_from_json({"kind": "poly_v", "dim": "3", "vectors": []})
    with pytest.raises(fm.FormatError):
        fm.cone_from_json({"kind": "poly_v", "dim": 3, "vectors": [["1", "0"]]})
    with pytest.raises(fm.FormatError):
        fm.witness_from_json({"x0": ["1"]})
    with pytest.raises(fm.FormatError):
        fm.system_from_json({"cone": {"kind": "lorentz", "dim": 3}})


def test_cone_file_layout():
    assert fm.cone_to_json(PolyH(2, [(1, 0), (0, 1)])) == {"dim": 2, "kind": "poly_h", "vectors": [["1", "0"], ["0", "1"]]}
    assert fm.cone_to_json(Lorentz(3)) == {"dim": 3, "kind": "lorentz"}
    doc = {"dim": 2, "kind": "poly_v", "vectors": [["1/2", 0], [0, "1"]]}
    assert fm.cone_from_json(doc) == PolyV(2, [(Fraction(1, 2), 0), (0, 1)])
    with pytest.raises(fm.FormatError):
        fm.cone_from_json({"dim": 2, "kind": "poly_v", "vectors": [[0.5, 0], [0, 1]]})


def test_dumps_is_canonical():
    assert fm.dumps({"b": 1, "a": [1, 2]}) == fm.dumps({"a": [1, 2], "b": 1})
