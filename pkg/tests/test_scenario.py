import json
from fractions import Fraction as F

import pytest
from hypothesis import given

from conftest import joints
from entlab.dist import EntropyParams, Joint
from entlab.errors import ScenarioError
from entlab.scenario import (
    MAX_DIGITS, Scenario, dumps, fraction_text, load_scenario, parse_scenario, to_jsonable,
)

BASE = {"n": 1, "m": 1, "joint": [["1/2", "0"], ["0", "1/2"]],
        "class": {"kind": "dsl", "circuits": ["x0"]}, "params": {"gamma": "1/2"}}


def test_parse_minimal():
    sc = parse_scenario(BASE)
    assert sc.n == 1 and sc.m == 1 and len(sc.cls) == 1
    assert sc.params.gamma == F(1, 2)


def test_k_and_bare_x():
    sc = parse_scenario({"n": 2, "x": ["1/4"] * 4, "params": {"k": 2}})
    assert sc.m == 0 and sc.params.gamma == F(1, 4)


def test_complement_and_enumerate():
    obj = dict(BASE, **{"class": {"kind": "dsl", "circuits": ["x0"], "complement": True}})
    assert len(parse_scenario(obj).cls) == 2
    obj = dict(BASE, **{"class": {"kind": "enumerate", "max_size": 1}})
    assert len(parse_scenario(obj).cls) > 4


@pytest.mark.parametrize("patch", [
    {"n": -1},
    {"joint": [["1/2", "1/2"]]},              # wrong shape
    {"joint": [["1/2", "0"], ["0", "1/4"]]},  # mass 3/4
    {"joint": [[0.5, 0], [0, 0.5]]},          # floats are rejected
    {"class": {"kind": "mystery"}},
    {"class": {"kind": "dsl", "circuits": ["and(x0"]}},
    {"params": {"epsilon": "1/2"}},
    {"params": {"gamma": "3/2"}},
])
def test_malformed(patch):
    with pytest.raises(ScenarioError):
        parse_scenario(dict(BASE, **patch))


def test_load_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ScenarioError):
        load_scenario(bad)
    with pytest.raises(ScenarioError):
        load_scenario(tmp_path / "missing.json")


def test_shipped_scenarios_load():
    for name in ("uniform", "opposite_signs", "chain", "concentrated"):
        load_scenario(f"scenarios/{name}.json")


def test_fraction_text_abbreviates():
    assert fraction_text(F(3, 8)) == "3/8"
    long = F(1, 3 ** 200)
    assert fraction_text(long).startswith("~") and len(fraction_text(long)) < len(str(long))
    assert fraction_text(F(1, 10 ** (MAX_DIGITS - 3))) == str(F(1, 10 ** (MAX_DIGITS - 3)))


def test_dumps_is_canonical():
    a = dumps({"b": F(1, 2), "a": [F(1, 3)]})
    assert a == dumps({"a": [F(1, 3)], "b": F(1, 2)})
    assert json.loads(a) == {"a": ["1/3"], "b": "1/2"}


def test_to_jsonable_handles_mpq():
    from gmpy2 import mpq
    assert to_jsonable(mpq(3, 6)) == "1/2"


@given(joints(split=True))
def test_round_trip(j):
    sc = Scenario(j, [], EntropyParams(F(1, j.nx), F(1, 8), 30), {"seed": 1})
    back = parse_scenario(json.loads(json.dumps(sc.to_json())))
    assert back.joint == j
    assert back.params == sc.params
    assert back.options == {"seed": 1}
