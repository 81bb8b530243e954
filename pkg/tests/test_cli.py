import csv
import io
import json
from importlib import resources

import jsonschema
import pytest

from dwell.cli import EXIT_OK, EXIT_UNSTABLE, EXIT_USAGE, run


@pytest.fixture(scope="module")
def schema():
    return json.loads(resources.files("dwell").joinpath("data/report.schema.json").read_text())


def call(*argv):
    out = io.StringIO()
    code = run(list(argv), out)
    return code, out.getvalue()


@pytest.mark.parametrize("argv", [
    ["solve", "--g", "1,6"],
    ["solve", "--g", "3", "--state", "plus", "--iters", "3"],
    ["fsolve", "--g", "3"],
    ["asym", "--g", "8", "--terms", "45"],
    ["pyramid", "--rows", "3"],
    ["oracle", "--g", "2"],
    ["check", "--g", "0.2,2"],
    ["tables", "--which", "3", "--no-oracle"],
])
def test_json_reports_validate(schema, argv):
    code, text = call(*argv, "--format", "json")
    assert code == EXIT_OK
    doc = json.loads(text)
    jsonschema.validate(doc, schema)
    assert doc["command"] == argv[0]


def test_schema_rejects_missing_key(schema):
    bad = {"command": "solve", "sections": [{"name": "x", "records": [{"g": 1}]}]}
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(bad, schema)


def test_output_deterministic():
    assert call("solve", "--g", "3", "--format", "json") == call("solve", "--g", "3", "--format", "json")


def test_solve_text_values():
    code, text = call("solve", "--g", "3")
    assert code == EXIT_OK
    assert "0.517316" in text and "2.48268" in text


def test_pyramid_csv_layout():
    code, text = call("pyramid", "--rows", "2", "--format", "csv")
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["# beta pyramid"]
    assert rows[1] == ["m", "part", "epsilon", "values_l_desc"]
    assert ["2", "beta", "9/64", "5", "9", "9", "9"] in rows


def test_csv_header_is_union_of_keys():
    code, text = call("fsolve", "--g", "0.05", "--iters", "6", "--format", "csv")
    header = text.splitlines()[1].split(",")
    assert {"g", "E1", "stable", "unstable_step", "reason"} <= set(header)


def test_fsolve_instability_exit_code():
    code, text = call("fsolve", "--g", "0.05", "--iters", "6")
    assert code == EXIT_UNSTABLE


@pytest.mark.parametrize("argv", [
    ["solve", "--g", "-1"],
    ["solve", "--g", "abc"],
    ["solve"],
    ["solve", "--g", "1", "--panels", "4"],
    ["tables", "--which", "7"],
    ["nonsense"],
])
def test_usage_errors(argv, capsys):
    code, _ = call(*argv)
    assert code == EXIT_USAGE


def test_out_file(tmp_path):
    target = tmp_path / "r.json"
    code, text = call("pyramid", "--rows", "2", "--format", "json", "--out", str(target))
    assert code == EXIT_OK and text == ""
    assert json.loads(target.read_text())["command"] == "pyramid"


def test_unwritable_out(tmp_path):
    code, _ = call("pyramid", "--out", str(tmp_path / "missing" / "x.txt"))
    assert code == EXIT_USAGE


def test_panels_from_environment(monkeypatch):
    monkeypatch.setenv("DWELL_PANELS", "16")
    _, coarse = call("solve", "--g", "3", "--format", "json")
    monkeypatch.setenv("DWELL_PANELS", "64")
    _, fine = call("solve", "--g", "3", "--format", "json")
    _, explicit = call("solve", "--g", "3", "--format", "json", "--panels", "64")
    assert fine == explicit
    assert json.loads(coarse)["sections"][0]["records"][0]["E1"] == pytest.approx(
        json.loads(fine)["sections"][0]["records"][0]["E1"], abs=1e-5)


def test_asym_plateau_section():
    code, text = call("asym", "--g", "9", "--terms", "45", "--format", "json")
    plate = [s for s in json.loads(text)["sections"] if s["name"] == "plateau"][0]["records"][0]
    assert plate["rounded"] == pytest.approx(0.268339)


def test_asym_reports_too_few_terms():
    code, text = call("asym", "--g", "9", "--terms", "10", "--format", "json")
    plate = json.loads(text)["sections"][1]["records"][0]
    assert code == EXIT_OK and plate["note"]


def test_full_tables_with_oracle(schema):
    code, text = call("tables", "--which", "1,2,3,4", "--format", "json")
    doc = json.loads(text)
    jsonschema.validate(doc, schema)
    t1 = doc["sections"][0]["records"]
    assert [s["name"] for s in doc["sections"]] == ["table 1", "table 2", "table 3", "table 4"]
    assert all(r["abs_dev"] < 1e-3 for r in t1 if r["scheme"] == "tau" and r["g"] >= 1)


def test_solve_json_example():
    code, text = call("solve", "--g", "1", "--state", "ev", "--iters", "5", "--format", "json")
    rec = json.loads(text)["sections"][0]["records"][0]
    assert round(rec["E5"], 4) == 0.4311 and round(rec["E_final"], 4) == 0.5689
