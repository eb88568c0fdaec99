"""CLI surface: subcommands, exit codes, canonical JSON, golden comparison."""

import json
import os

import pytest

from toprec_kp.cli import canonical_json, golden_compare, main

GOLDEN = os.path.join(os.path.dirname(__file__), "golden")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_omegas_matches_golden_file(tmp_path, capsys):
    out = tmp_path / "omega.json"
    code, _, _ = run(
        capsys, "omegas", "--model", "3,2", "--g", "1", "--n", "1",
        "--format", "json", "--output", str(out),
    )
    assert code == 0
    report = golden_compare(str(out), os.path.join(GOLDEN, "omega_1_1_pure_gravity.json"))
    assert report["passed"]


def test_omegas_from_curve_config(tmp_path, capsys):
    cfg = tmp_path / "curve.toml"
    cfg.write_text('[curve]\nx = "z^2 - 2"\ny = "z^3 - 3*z"\n')
    code, out, _ = run(
        capsys, "omegas", "--config", str(cfg), "--g", "0", "--n", "3", "--format", "json"
    )
    assert code == 0
    data = json.loads(out)
    assert data["schema"] == "toprec-kp/1"
    assert data["omega"]["terms"] == [
        {"coeff": "-1/6", "poles": [{"k": 2, "r": "0"}, {"k": 2, "r": "0"}, {"k": 2, "r": "0"}]}
    ]


def test_limits_enforced_and_overridable(capsys):
    code, _, err = run(capsys, "omegas", "--model", "3,2", "--g", "5", "--n", "1")
    assert code == 2 and "unsafe-limits" in err


def test_config_error_exit_code(capsys):
    code, _, err = run(capsys, "omegas", "--model", "9,7", "--g", "0", "--n", "3")
    assert code == 2
    code, _, err = run(capsys, "omegas", "--config", "/nonexistent.toml", "--g", "0", "--n", "3")
    assert code == 2


def test_string_series_output(capsys):
    code, out, _ = run(capsys, "string-series", "--model", "3,2", "--gmax", "2", "--format", "json")
    assert code == 0
    data = json.loads(out)
    orders = {entry["g"]: entry["value_tau"] for entry in data["orders"]}
    assert orders[1] == "-1/432*tau^-4"
    assert orders[2] == "-49/373248*tau^-9"


def test_free_energy_output(capsys):
    code, out, _ = run(capsys, "free-energy", "--model", "3,2", "--gmax", "2", "--format", "json")
    assert code == 0
    data = json.loads(out)
    table = {e["g"]: e["value_tau"] for e in data["free_energies"]}
    assert table[1] == "1/24*ln(tau)"
    assert table[2] == "-7/51840*tau^-5"


def test_verify_loopeq_pass_report(tmp_path, capsys):
    report_path = tmp_path / "report.json"
    code, out, _ = run(
        capsys, "verify-loopeq", "--d", "3", "--deg", "2", "--seed", "7",
        "--format", "json", "--report", str(report_path),
    )
    assert code == 0
    data = json.loads(report_path.read_text())
    assert data["passed"] and data["schema"] == "toprec-kp/1"
    assert any(c["check"].startswith("linear") for c in data["checks"])


def test_pq_model_battery(capsys):
    code, out, _ = run(
        capsys, "pq-model", "--model", "3,2", "--gmax", "2", "--format", "json"
    )
    assert code == 0
    data = json.loads(out)
    assert data["passed"]
    names = {c.get("check") or c.get("model") for c in data["checks"]}
    assert len(data["checks"]) == 3


def test_lax_text_output(capsys):
    code, out, _ = run(capsys, "lax", "--model", "3,2")
    assert code == 0
    assert "-1/2*h*u'" in out


def test_golden_compare_canonicalizes_key_order(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    a.write_text('{"x": 1, "y": [2, 3]}')
    b.write_text('{"y": [2, 3], "x": 1}')
    assert golden_compare(str(a), str(b))["passed"]


def test_golden_compare_reports_mismatch(tmp_path, capsys):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    a.write_text('{"x": "1/2"}')
    b.write_text('{"x": "1/3"}')
    report = golden_compare(str(a), str(b))
    assert not report["passed"] and report["diff"]
    code, _, _ = run(capsys, "golden-compare", str(a), str(b))
    assert code == 1


def test_canonical_json_is_sorted_and_stable():
    assert canonical_json({"b": 1, "a": "2/3"}) == '{"a":"2/3","b":1}\n'


def test_byte_identical_reruns(tmp_path, capsys):
    outs = []
    for name in ("r1.json", "r2.json"):
        path = tmp_path / name
        code, _, _ = run(
            capsys, "omegas", "--model", "4,3", "--g", "1", "--n", "1",
            "--format", "json", "--output", str(path),
        )
        assert code == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
