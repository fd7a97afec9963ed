import csv
import json
import math
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest

from cvqp.cli import OUTPUT_DIR_ENV, main

SCHEMAS = Path(__file__).resolve().parents[1] / "docs" / "schemas"


def schema(name):
    return json.loads((SCHEMAS / f"{name}.schema.json").read_text())


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture(autouse=True)
def no_env_dir(monkeypatch):
    monkeypatch.delenv(OUTPUT_DIR_ENV, raising=False)


def test_and_table_default(capsys, tmp_path):
    out_file = tmp_path / "and.json"
    code, out, _ = run(capsys, "and-table", "--r", "0", "--r", "1", "--out", str(out_file))
    assert code == 0
    assert "15.87%" in out and "0.3281%" in out and "0.135%" in out
    data = json.loads(out_file.read_text())
    jsonschema.validate(data, schema("table-report"))
    assert [r["r"] for r in data["reports"]] == [0.0, 1.0]
    assert data["reports"][1]["rows"][0]["p_err"] < 1e-15


def test_and_table_coherent(capsys):
    code, out, _ = run(capsys, "and-table", "--delta", "1", "--bias", "-2", "--displacement", "2", "--json")
    assert code == 0
    report = json.loads(out)["reports"][0]
    # 2.275% shown with the reference's truncation to two decimals
    assert math.floor(10000 * report["worst_p_err"]) / 100 == 2.27
    assert report["energy_total"] == 4.0


def test_missing_config(capsys, tmp_path):
    code, _, err = run(capsys, "and-table", "--config", str(tmp_path / "nope.json"))
    assert code != 0
    assert "config file not found" in err


def test_config_file_and_override(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"task": "and", "delta": 0.5, "etas": [1.0, 1.0], "bias": -1.0, "seed": 1}))
    code, out, _ = run(capsys, "and-table", "--config", str(cfg), "--json")
    assert code == 0
    assert json.loads(out)["reports"][0]["delta"] == 0.5
    code, out, _ = run(capsys, "and-table", "--config", str(cfg), "--bias", "-0.5", "--json")
    assert json.loads(out)["reports"][0]["bias"] == -0.5


def test_config_energy_total(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"energy_total": 3.7621956910836314}))
    code, out, _ = run(capsys, "and-table", "--config", str(cfg), "--json")
    assert code == 0
    assert json.loads(out)["reports"][0]["delta"] == pytest.approx(math.exp(-1), rel=1e-9)


@pytest.mark.parametrize(
    "content",
    [
        {"delta": 1.0, "energy_total": 2.0},
        {"bogus": 1},
        {"task": "xor", "delta": 1.0},
        [1, 2],
    ],
)
def test_bad_config(capsys, tmp_path, content):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(content))
    code, _, err = run(capsys, "and-table", "--config", str(cfg))
    assert code != 0 and err


def test_malformed_config(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text("{not json")
    code, _, err = run(capsys, "xor-table", "--config", str(cfg))
    assert code != 0 and "cannot read config" in err


def test_xor_table(capsys):
    code, out, _ = run(capsys, "xor-table", "--energy", "50", "--json")
    assert code == 0
    data = json.loads(out)
    jsonschema.validate(data, schema("table-report"))
    report = data["reports"][0]
    assert report["accuracy"] == pytest.approx(0.75, abs=0.01)
    rows = {tuple(r["inputs"]): r["p_err"] for r in report["rows"]}
    assert rows[(1, 1)] == rows[(-1, -1)]


def test_xor_equal_rows_match_and_minus(capsys):
    _, out, _ = run(capsys, "xor-table", "--r", "1", "--json")
    xor_rows = {tuple(r["inputs"]): r["p_err"] for r in json.loads(out)["reports"][0]["rows"]}
    _, out, _ = run(capsys, "and-table", "--r", "1", "--json")
    and_rows = {tuple(r["inputs"]): r["p_err"] for r in json.loads(out)["reports"][0]["rows"]}
    assert xor_rows[(1, 1)] == and_rows[(-1, 1)]


@pytest.mark.parametrize("flag", [["--delta", "0"], ["--delta", "-1"], ["--energy", "0.5"]])
def test_xor_rejects_bad_width(capsys, flag):
    code, _, err = run(capsys, "xor-table", *flag)
    assert code != 0 and "error" in err


def test_surface_and(capsys, tmp_path):
    path = tmp_path / "and.csv"
    code, _, _ = run(capsys, "surface", "--task", "and", "--out", str(path))
    assert code == 0
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["x", "e_tot", "p_err_plus", "p_err_minus"]
    assert len(rows) == 1 + 121 * 121
    cell = next(r for r in rows[1:] if r[0] == "1.0" and r[1] == "1.0")
    assert float(cell[2]) == pytest.approx(0.1587, abs=1e-4)
    assert any(r[2] == "" for r in rows[1:])


def test_surface_xor_and_rerun_identical(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(capsys, "surface", "--task", "xor", "--resolution", "41", "--out", str(a))[0] == 0
    assert run(capsys, "surface", "--task", "xor", "--resolution", "41", "--out", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    values = [float(r[2]) for r in list(csv.reader(a.open()))[1:] if r[2]]
    assert values and min(values) > 0.5


def test_surface_unwritable(capsys, tmp_path):
    code, _, err = run(capsys, "surface", "--out", str(tmp_path / "missing" / "s.csv"))
    assert code != 0 and "cannot write" in err


def test_surface_needs_destination(capsys):
    code, _, err = run(capsys, "surface")
    assert code != 0 and OUTPUT_DIR_ENV in err


def test_env_output_dir(capsys, tmp_path, monkeypatch):
    target = tmp_path / "artifacts"
    monkeypatch.setenv(OUTPUT_DIR_ENV, str(target))
    assert run(capsys, "surface", "--resolution", "5")[0] == 0
    assert run(capsys, "and-table")[0] == 0
    assert (target / "surface-and.csv").exists()
    jsonschema.validate(json.loads((target / "and-table.json").read_text()), schema("table-report"))


@pytest.mark.slow
def test_oracle_verify_default(capsys, tmp_path):
    path = tmp_path / "o.json"
    code, out, _ = run(capsys, "oracle-verify", "--out", str(path))
    assert code == 0 and "PASS" in out
    data = json.loads(path.read_text())
    jsonschema.validate(data, schema("oracle-verify"))
    assert any(c["kind"] == "superposition" for c in data["cases"])
    assert max(data["max_deviation"].values()) <= 1e-6


def test_oracle_verify_coarse_grid_fails(capsys):
    code, _, err = run(
        capsys, "oracle-verify", "--grid-n", "64", "--product-cases", "1",
        "--superposition-cases", "1", "--convolution-cases", "1",
    )
    assert code != 0
    assert "FAIL" in err
    dumped = [json.loads(line) for line in err.splitlines() if line.startswith("{")]
    assert dumped and not dumped[0]["passed"]


def test_sample_and(capsys, tmp_path):
    path = tmp_path / "s.json"
    code, _, _ = run(capsys, "sample", "--task", "and", "--r", "1", "--shots", "100000", "--seed", "4", "--out", str(path))
    assert code == 0
    data = json.loads(path.read_text())
    jsonschema.validate(data, schema("sample"))
    assert data["analytic_p_err"] == pytest.approx(0.0033, abs=5e-5)
    assert abs(data["empirical_p_err"] - data["analytic_p_err"]) <= 3 * data["standard_error"]
    assert len(data["y"]) == 100000
    assert all(a == max(0.0, y) for y, a in zip(data["y"][:1000], data["activated"][:1000]))


def test_sample_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        run(capsys, "sample", "--task", "xor", "--inputs", "1", "-1", "--shots", "5000", "--seed", "9", "--out", str(p))
    assert a.read_bytes() == b.read_bytes()


def test_sample_xor_opposite(capsys):
    code, out, _ = run(capsys, "sample", "--task", "xor", "--inputs", "1", "-1", "--shots", "100000", "--no-shots")
    assert code == 0
    data = json.loads(out)
    jsonschema.validate(data, schema("sample"))
    assert data["empirical_p_err"] > 0.5


@pytest.mark.parametrize("argv", [["--shots", "0"], ["--inputs", "1", "2"], ["--r", "1", "--delta", "1"]])
def test_sample_rejects(capsys, argv):
    code, _, err = run(capsys, "sample", *argv)
    assert code != 0 and err


def test_train_and(capsys, tmp_path):
    path = tmp_path / "t.json"
    code, out, _ = run(capsys, "train", "--task", "and", "--r", "1", "--out", str(path))
    assert code == 0
    data = json.loads(path.read_text())
    jsonschema.validate(data, schema("train"))
    assert data["worst_p_err"] <= 0.01


def test_train_xor_floor(capsys, tmp_path):
    path = tmp_path / "t.json"
    code, _, _ = run(capsys, "train", "--task", "xor", "--r", "1", "--out", str(path))
    assert code == 0
    data = json.loads(path.read_text())
    jsonschema.validate(data, schema("train"))
    assert data["sweep_floor"] >= 0.25
    assert data["loss"] >= 0.25


@pytest.mark.parametrize("lr", ["0", "-0.5"])
def test_train_rejects_learning_rate(capsys, lr):
    code, _, err = run(capsys, "train", "--lr", lr)
    assert code != 0 and "learning rate" in err


def test_train_rerun_identical(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        run(capsys, "train", "--task", "xor", "--delta", "0.8", "--seed", "5", "--out", str(p))
    assert a.read_bytes() == b.read_bytes()


def test_entry_point_module():
    proc = subprocess.run(
        [sys.executable, "-m", "cvqp.cli", "and-table", "--r", "0"], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0
    assert "accuracy" in proc.stdout
