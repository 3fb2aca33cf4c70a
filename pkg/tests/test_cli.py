import csv
import io
import json

import pytest

from photon_sim.cli import EXIT_LEAKAGE, EXIT_USAGE, main


def run_csv(capsys, *argv):
    assert main(list(argv)) == 0
    return list(csv.DictReader(io.StringIO(capsys.readouterr().out)))


def test_run_dsv(capsys):
    (row,) = run_csv(capsys, "run", "dsv", "--r", "0.36")
    assert float(row["herald_prob"]) == pytest.approx(0.105, abs=1e-3)


def test_run_dsv_zero(capsys):
    (row,) = run_csv(capsys, "run", "dsv", "--r", "0")
    assert float(row["herald_prob"]) == 0


def test_run_three_copy(capsys):
    (row,) = run_csv(capsys, "run", "three-copy", "--phi", "1.5708", "--nu", "0.7854")
    assert float(row["purity"]) == pytest.approx(1.0, abs=1e-10)


def test_run_optimize(capsys):
    (row,) = run_csv(capsys, "run", "optimize")
    assert float(row["r_star"]) == pytest.approx(0.881374, abs=1e-5)


def test_unknown_experiment_is_usage_error(capsys):
    assert main(["run", "nonsense"]) == EXIT_USAGE


def test_invalid_parameter_record(capsys):
    assert main(["run", "dsv", "--eta", "1.5"]) == EXIT_USAGE
    record = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert record == {"error": "invalid-parameter", "message": record["message"], "exit_code": 2}


def test_leakage_violation(capsys):
    assert main(["run", "dsv", "--r", "1.2", "--cutoff", "8"]) == EXIT_LEAKAGE
    record = json.loads(capsys.readouterr().err)
    assert record["error"] == "leakage" and record["exit_code"] == 3


def test_csv_format_is_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["sweep", "eta", "--out", str(a)]) == 0
    assert main(["sweep", "eta", "--out", str(b)]) == 0
    raw = a.read_bytes()
    assert raw == b.read_bytes()
    assert b"\r" not in raw
    lines = raw.decode().splitlines()
    assert lines[0] == "eta,herald_prob,purity,closed_form_herald_prob,closed_form_purity,abs_diff,leakage"
    assert len(lines) == 52
    mantissa = lines[10].split(",")[1].split("e")[0].replace(".", "").lstrip("0")
    assert len(mantissa) <= 12


def test_output_dir_env(tmp_path, monkeypatch):
    monkeypatch.setenv("PHOTON_SIM_OUTPUT_DIR", str(tmp_path))
    assert main(["run", "dsv", "--format", "json"]) == 0
    doc = json.loads((tmp_path / "dsv.json").read_text())
    assert doc["config"]["experiment"] == "dsv"
    assert doc["config"]["params"]["eta"] == 1.0
    assert doc["rows"][0]["herald_prob"] == pytest.approx(0.25)
    assert main(["run", "dsv", "--out", "sub/x.csv"]) == 0
    assert (tmp_path / "sub" / "x.csv").exists()


def test_sweep_json_schema(tmp_path):
    out = tmp_path / "s.json"
    assert main(["sweep", "dark", "--points", "3", "--format", "json", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["schema"] == "photon-sim/sweep-result/v1"
    assert doc["kind"] == "sweep-dark"
    assert doc["metadata"]["axes"] == ["eta", "p_dark"]
    assert len(doc["rows"]) == 9
    assert set(doc["columns"]) <= set(doc["rows"][0])


def test_sweep_rejects_tiny_grid(capsys):
    assert main(["sweep", "eta", "--points", "1"]) == EXIT_USAGE


def test_json_output_matches_documented_schema(tmp_path):
    import pathlib

    jsonschema = pytest.importorskip("jsonschema")
    schema = json.loads((pathlib.Path(__file__).parents[1] / "docs" / "sweep_result.schema.json").read_text())
    out = tmp_path / "p.json"
    assert main(["sweep", "perturbed", "--points", "2", "--format", "json", "--out", str(out)]) == 0
    jsonschema.validate(json.loads(out.read_text()), schema)
