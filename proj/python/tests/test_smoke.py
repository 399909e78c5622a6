import os
from fractions import Fraction

import pytest

import cmnet

DATA = os.environ.get("CMNET_DATA_DIR", os.path.join(os.path.dirname(__file__), "..", "..", "data"))
FIG1 = os.path.join(DATA, "fig1.json")


def test_validate_fig1():
    r = cmnet.validate(FIG1)
    assert r["valid"] and r["ecs"]
    assert r["weights"] == {"A": "1/2", "B": "1/4", "C": "1/4", "D": "1/2"}


def test_pcolor_is_normalized():
    d = cmnet.pcolor(FIG1)
    assert d["mode"] == "exact"
    assert len(d["table"]) == 25
    assert sum(Fraction(row["p"]) for row in d["table"]) == 1
    f = cmnet.pcolor(FIG1, mode="float")
    assert abs(sum(row["p"] for row in f["table"]) - 1.0) < 1e-12


def test_hidden_patterns():
    assert sorted(cmnet.patterns(FIG1)) == [[0, 1, 2], [1, 2, 0], [2, 0, 1]]


def test_finner_on_pcolor():
    r = cmnet.finner(FIG1, cmnet.pcolor(FIG1))
    assert r["holds"]
    assert len(r["equalities"]) == 6


def test_identity_certify_is_inconclusive():
    assert cmnet.certify(FIG1, "builtin:identity")["result"] == "inconclusive"


def test_search_then_certify():
    s = cmnet.search(FIG1, iterations=50, restarts=1)
    assert s["result"] in ("nonlocal-certified", "inconclusive", "borderline")
    c = cmnet.certify(FIG1, s["refinements"])
    assert abs(c["margin"] - s["margin"]) < 1e-12


def test_dict_inputs_match_files():
    net = cmnet.fig1_network()
    assert cmnet.validate(net)["ecs"]
    assert cmnet.certify(net, "builtin:identity") == cmnet.certify(FIG1, "builtin:identity")
    assert cmnet.generate("kn", 4)["colors"] == 2


def test_errors_map_to_python():
    with pytest.raises(cmnet.SchemaError):
        cmnet.validate({"colors": 3})
    with pytest.raises(ValueError):
        cmnet.pcolor(FIG1, mode="nope")
    with pytest.raises(OSError):
        cmnet.validate("/nonexistent/net.json")
