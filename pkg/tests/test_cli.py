"""Command-line interface: records, precedence, exit codes, determinism."""

import json
import math
import os
import subprocess
import sys
import xml.dom.minidom

import pytest

CLI = [sys.executable, "-m", "hypcell"]


def run(*args, env_extra=None, check=True):
    env = dict(os.environ)
    env.pop("HYPCELL_SEED", None)
    if env_extra:
        env.update(env_extra)
    proc = subprocess.run(CLI + list(args), capture_output=True,
                          text=True, env=env, timeout=300)
    if check and proc.returncode != 0:
        raise AssertionError(
            f"exit {proc.returncode}: {proc.stderr}\n{proc.stdout}")
    return proc


def records(proc):
    return [json.loads(line) for line in proc.stdout.splitlines() if line]


def test_constants_record():
    proc = run("constants", "--d", "2", "--no-timing")
    (rec,) = records(proc)
    assert rec["command"] == "constants"
    res = rec["result"]
    assert math.isclose(res["gamma_c"], math.pi / 2.0, rel_tol=1e-12)
    assert math.isclose(res["c_d"], 1.0 / math.pi, rel_tol=1e-12)
    assert math.isclose(res["critical_divergence_constant"],
                        math.pi ** 4 / 4.0, rel_tol=1e-12)
    assert math.isclose(res["euclidean_limit_constant"],
                        4.0 * math.pi ** 6 / 7.0, rel_tol=1e-12)


def test_moment1_value():
    proc = run("moment1", "--d", "3", "--gamma", "8", "--no-timing")
    (rec,) = records(proc)
    assert math.isclose(rec["result"]["value"], math.pi / 6.0, rel_tol=1e-8)


def test_moment2_spectral_value():
    proc = run("moment2", "--d", "3", "--gamma", "8", "--method",
               "spectral", "--no-timing")
    (rec,) = records(proc)
    assert math.isclose(rec["result"]["value"], 25.0 * math.pi ** 2 / 216.0,
                        rel_tol=1e-8)


def test_moment2_all_emits_summary():
    proc = run("moment2", "--d", "3", "--gamma", "8", "--method", "all",
               "--n", "20000", "--seed", "1", "--no-timing")
    recs = records(proc)
    methods = [r["result"].get("method") for r in recs[:-1]]
    assert set(methods) == {"spectral", "residue", "direct", "mc"}
    summary = recs[-1]["result"]
    assert summary["summary"] is True
    assert summary["max_rel_spread"] < 0.5


def test_timing_field_toggle():
    rec = records(run("moment1", "--d", "2", "--gamma", "3"))[0]
    assert "wall_time_ms" in rec
    rec = records(run("moment1", "--d", "2", "--gamma", "3",
                      "--no-timing"))[0]
    assert "wall_time_ms" not in rec


def test_usage_errors_exit_2():
    assert run("moment2", "--d", "1", "--gamma", "2", check=False
               ).returncode == 2
    assert run("moment2", "--d", "2", "--gamma", "zz", check=False
               ).returncode == 2
    assert run("frobnicate", check=False).returncode == 2


def test_domain_errors_exit_3():
    # infinite moment below criticality
    assert run("moment2", "--d", "2", "--gamma", "1", "--method",
               "spectral", check=False).returncode == 3
    # residue route needs odd dimension
    assert run("moment2", "--d", "2", "--gamma", "2", "--method",
               "residue", check=False).returncode == 3


def test_io_errors_exit_4(tmp_path):
    proc = run("simulate", "--d", "2", "--gamma", "2", "--R", "3",
               "--svg", str(tmp_path / "no" / "dir" / "x.svg"),
               check=False)
    assert proc.returncode == 4


def test_seed_precedence():
    rec = records(run("simulate", "--d", "2", "--gamma", "2", "--R", "3",
                      "--no-timing", env_extra={"HYPCELL_SEED": "999"}))[0]
    assert rec["params"]["seed"] == 999
    rec = records(run("simulate", "--d", "2", "--gamma", "2", "--R", "3",
                      "--seed", "5", "--no-timing",
                      env_extra={"HYPCELL_SEED": "999"}))[0]
    assert rec["params"]["seed"] == 5
    proc = run("simulate", "--d", "2", "--gamma", "2", "--R", "3",
               check=False, env_extra={"HYPCELL_SEED": "bogus"})
    assert proc.returncode == 2


def test_config_file_precedence(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"gamma": 3.0, "d": 2}))
    rec = records(run("moment1", "--config", str(cfg), "--no-timing"))[0]
    assert rec["params"]["gamma"] == 3.0
    rec = records(run("moment1", "--gamma", "2.5", "--config", str(cfg),
                      "--no-timing"))[0]
    assert rec["params"]["gamma"] == 2.5


def test_csv_output():
    proc = run("spectrum", "--d", "3", "--gamma", "8", "--lambdas",
               "0.5,1", "--csv", "--no-timing")
    lines = proc.stdout.strip().splitlines()
    header = lines[0].split(",")
    assert "transform" in header and "integrand" in header
    assert len(lines) == 3


def test_spectrum_transform_column():
    proc = run("spectrum", "--d", "3", "--gamma", "8", "--lambdas", "1",
               "--no-timing")
    (rec,) = records(proc)
    assert math.isclose(rec["result"]["transform"], 0.8 * math.pi,
                        rel_tol=1e-6)


def test_simulate_writes_valid_svg(tmp_path):
    out = tmp_path / "cell.svg"
    proc = run("simulate", "--d", "2", "--gamma", "2", "--R", "4",
               "--seed", "21", "--svg", str(out), "--no-timing")
    (rec,) = records(proc)
    assert rec["result"]["n_hyperplanes"] > 0
    dom = xml.dom.minidom.parse(str(out))
    assert dom.documentElement.getAttribute("viewBox") == \
        "-1.05 -1.05 2.1 2.1"


def test_svg_rejected_outside_plane(tmp_path):
    proc = run("simulate", "--d", "3", "--gamma", "8", "--R", "2",
               "--svg", str(tmp_path / "x.svg"), check=False)
    assert proc.returncode == 2


def test_determinism_byte_identical():
    args = ("moment2", "--d", "2", "--gamma", "2.2", "--method", "mc",
            "--n", "30000", "--seed", "4", "--no-timing")
    a = run(*args).stdout
    b = run(*args).stdout
    assert a == b
    args = ("simulate", "--d", "2", "--gamma", "2", "--R", "3", "--seed",
            "13", "--no-timing")
    a = run(*args).stdout
    b = run(*args).stdout
    assert a == b


def test_critical_scan_records():
    proc = run("critical-scan", "--d", "2", "--R", "2,4", "--tol", "1e-6",
               "--no-timing")
    recs = records(proc)
    per_radius = [r for r in recs if "second_moment" in r["result"]]
    ratios = [r for r in recs if "second_moment_ratio" in r["result"]]
    assert len(per_radius) == 2 and len(ratios) == 1
    assert ratios[0]["result"]["second_moment_ratio"] == pytest.approx(
        per_radius[1]["result"]["second_moment"]
        / per_radius[0]["result"]["second_moment"], rel=1e-12)
