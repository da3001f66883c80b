from __future__ import annotations

import json

import pytest

from gptcone import formats as fm
from gptcone.cli import main
from gptcone.sandwich import catalog


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out)


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    d = tmp_path_factory.mktemp("catalog")
    paths = {}
    for name in ("triangle", "square", "hexagon", "qubit-lorentz"):
        p = d / f"{name}.json"
        assert main(["catalog", "export", name, "--output", str(p)]) == 0
        paths[name] = str(p)
    bad = d / "bad.json"
    bad.write_text("{not json")
    paths["bad"] = str(bad)
    cfg = d / "bb84.json"
    cfg.write_text(json.dumps({"system": "square.json", "witness": "square.json", "rounds": 100000, "seed": 42}))
    paths["bb84"] = str(cfg)
    return paths


def test_classify(capsys, files):
    code, rep = run(capsys, "classify", files["triangle"])
    assert code == 0 and rep["classical"] is True
    code, rep = run(capsys, "classify", files["square"])
    assert code == 0 and rep["classical"] is False and rep["extreme_rays"] == 4
    code, rep = run(capsys, "classify", files["bad"])
    assert code == 3 and rep["status"] == "error"
    code, _ = run(capsys, "classify", files["bad"] + ".missing")
    assert code == 3


def test_dual_round_trip(capsys, files, tmp_path):
    out = tmp_path / "dual.json"
    assert main(["dual", files["square"], "--output", str(out)]) == 0
    once = fm.cone_from_json(fm.load(out))
    assert once == fm.cone_from_json(fm.load(out))
    out2 = tmp_path / "dual2.json"
    assert main(["dual", str(out), "--output", str(out2)]) == 0
    assert fm.cone_from_json(fm.load(out2)) == catalog("square").system.cone


def test_tensor(capsys, files):
    code, rep = run(capsys, "tensor", "equal", files["triangle"], files["square"])
    assert code == 0 and rep["equal"] is True
    code, rep = run(capsys, "tensor", "equal", files["square"], files["square"])
    assert code == 1 and rep["equal"] is False
    code, rep = run(capsys, "tensor", "max", files["square"], files["square"])
    assert code == 0 and rep["extreme_rays"] == 24
    code, rep = run(capsys, "tensor", "min", files["square"], files["square"])
    assert code == 0 and rep["extreme_rays"] == 16
    code, rep = run(capsys, "tensor", "equal", files["square"], files["square"], "--dim-cap", "4")
    assert code == 2 and rep["status"] == "inconclusive"


def test_witness_commands(capsys, files):
    code, rep = run(capsys, "witness", "verify", files["square"], files["square"])
    assert code == 0 and rep["report"]["ok"]
    code, rep = run(capsys, "witness", "derive", files["square"], files["square"])
    assert code == 0
    assert fm.witness_from_json(rep) == catalog("square").witness
    code, rep = run(capsys, "witness", "search", files["triangle"])
    assert code == 1 and rep["search_status"] == "classical"
    code, rep = run(capsys, "witness", "search", files["hexagon"], "--seed", "1")
    assert code == 0 and rep["search_status"] == "found"
    code, rep = run(capsys, "witness", "verify", files["triangle"], files["square"])
    assert code == 1 and not rep["report"]["ok"]


def test_certify(capsys, files):
    code, rep = run(capsys, "certify", files["square"], files["square"])
    assert code == 0 and rep["certificate"]["magical_value"]["exact"] == "0"
    code, rep = run(capsys, "certify", files["qubit-lorentz"], files["square"])
    assert code == 0 and rep["certificate"]["min_exclusion"] == "by-phi"
    code, rep = run(capsys, "certify", files["triangle"], files["square"], "--witness-a", files["square"])
    assert code >= 3 and rep["clause"] == "witness_A"


def test_bb84_is_deterministic(capsys, files):
    code, first = run(capsys, "bb84", files["bb84"])
    assert code == 0
    assert first["stats"]["error_count"] == 0
    assert first["stats"]["key_rate"] == 1.0
    main(["bb84", files["bb84"]])
    again = capsys.readouterr().out
    assert again == fm.dumps(first)


def test_catalog_list(capsys):
    code, rep = run(capsys, "catalog", "list")
    assert code == 0 and "pentagon-rational" in rep["names"]


def test_catalog_unknown_name(capsys):
    code, _ = run(capsys, "catalog", "export", "heptagon")
    assert code == 3
