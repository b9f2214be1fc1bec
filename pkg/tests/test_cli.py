"""End-to-end tests of the command-line interface."""

import subprocess
import sys

import numpy as np
import pytest

BASE = [sys.executable, "-m", "mssim.cli"]


def run_cli(*args, **kwargs):
    return subprocess.run(BASE + list(args), capture_output=True, text=True, **kwargs)


def test_laplace_roundtrip(tmp_path):
    out = tmp_path / "laplace.csv"
    res = run_cli(
        "laplace", "--beta", "constant:0.5", "--theta", "1", "--t", "1",
        "--reps", "400", "--seed", "3", "--out", str(out),
    )
    assert res.returncode == 0, res.stderr
    text = out.read_text()
    assert text.startswith("# command=laplace\n")
    assert "beta_spec,theta,t,mc_mean,mc_se,oracle,bias_bound,pass" in text
    assert text.rstrip().endswith("true")


def test_same_config_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["mfpp", "--beta", "constant:0.5", "--t", "1", "--reps", "300", "--seed", "5"]
    assert run_cli(*args, "--out", str(a)).returncode == 0
    assert run_cli(*args, "--out", str(b), "--workers", "2").returncode == 0
    assert a.read_bytes() == b.read_bytes()


def test_reps_one_is_usage_error():
    res = run_cli("laplace", "--beta", "constant:0.5", "--reps", "1")
    assert res.returncode == 2
    assert "reps" in res.stderr


def test_grid_zero_is_usage_error():
    res = run_cli("paths", "--beta", "constant:0.5", "--grid", "0")
    assert res.returncode == 2
    assert "grid" in res.stderr


def test_bad_beta_spec_is_usage_error():
    res = run_cli("laplace", "--beta", "zigzag:0.5", "--reps", "10")
    assert res.returncode == 2
    assert "beta" in res.stderr or "zigzag" in res.stderr


def test_bad_lfamily_is_usage_error():
    res = run_cli("ctrw", "--beta", "constant:0.5", "--lfamily", "poly")
    assert res.returncode == 2


def test_paths_emits_valid_trajectories(tmp_path):
    prefix = tmp_path / "traj"
    res = run_cli(
        "paths", "--beta", "constant:0.5", "--t", "1", "--grid", "21",
        "--reps", "3", "--seed", "9", "--out", str(prefix),
    )
    assert res.returncode == 0, res.stderr
    files = sorted(tmp_path.glob("traj.rep*.csv"))
    assert len(files) == 3
    for f in files:
        rows = [line.split(",") for line in f.read_text().splitlines()
                if line and not line.startswith("#")][1:]
        assert len(rows) == 21
        d = np.array([float(r[1]) for r in rows])
        assert (np.diff(d) >= 0).all()  # D non-decreasing
        x = np.array([float(r[3]) for r in rows if r[4] == "false"])
        assert (x == np.round(x)).all()  # X integer-valued
        assert (np.diff(x) >= 0).all()  # X non-decreasing


def test_verify_quick_small_scale_passes():
    res = run_cli("verify", "--quick", "--scale", "0.1", "--seed", "1234")
    assert res.returncode == 0, res.stderr
    assert "# command=verify" in res.stdout
    assert ",false" not in res.stdout
