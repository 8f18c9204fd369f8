import json
import math

import numpy as np
import pytest

from coinflow import cli, oracle
from coinflow.asymptotics import laplace_density, laplace_params


def run_cli(args):
    return cli.main(args)


def test_exact_two_state(tmp_path):
    out = tmp_path / "pmf.csv"
    code = run_cli([
        "exact", "--model", "individual", "--n", "2", "--money", "1",
        "--limit", "0", "--out", str(out),
    ])
    assert code == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "c,prob"
    assert [ln.split(",")[0] for ln in lines[1:]] == ["0", "1"]
    assert all(abs(float(ln.split(",")[1]) - 0.5) < 1e-15 for ln in lines[1:])


def test_exact_log_mode_normalized(tmp_path):
    out = tmp_path / "pmf.csv"
    code = run_cli([
        "exact", "--model", "collective", "--n", "5", "--money", "6",
        "--limit", "2", "--mode", "log", "--out", str(out),
    ])
    assert code == 0
    rows = out.read_text().strip().splitlines()[1:]
    total = sum(math.exp(float(r.split(",")[1])) for r in rows)
    assert abs(total - 1.0) < 1e-12


def test_exact_capacity_exit_4(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    code = run_cli([
        "exact", "--model", "collective", "--n", "100", "--money", "50000",
        "--limit", "10000", "--mode", "exact",
    ])
    assert code == 4


def test_simulate_outputs_and_support_floor(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    code = run_cli([
        "simulate", "--model", "individual", "--graph", "named:complete:10",
        "--money", "50", "--limit", "10", "--seed", "4",
        "--burn-in", "200000", "--samples", "200000", "--out-prefix", "run",
    ])
    assert code == 0
    rows = (tmp_path / "run_hist.csv").read_text().strip().splitlines()
    assert rows[0] == "c,count,frequency"
    assert rows[1].split(",")[0] == "-10"  # support floor at -limit
    diag = json.loads((tmp_path / "run_diag.json").read_text())
    assert diag["tv_to_exact"] < 0.05
    manifest = json.loads((tmp_path / "run_manifest.json").read_text())
    assert manifest["command"] == "simulate"
    assert manifest["rng_algorithm"] == "pcg64"
    assert "run_hist.csv" in manifest["outputs"]
    assert manifest["parameters"]["seed"] == 4


def test_simulate_reruns_byte_identical(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    args = [
        "simulate", "--model", "collective", "--graph", "named:cycle:6",
        "--money", "12", "--limit", "3", "--seed", "8",
        "--burn-in", "500", "--samples", "10000",
    ]
    assert run_cli(args + ["--out-prefix", "a"]) == 0
    assert run_cli(args + ["--out-prefix", "b"]) == 0
    assert (tmp_path / "a_hist.csv").read_bytes() == (tmp_path / "b_hist.csv").read_bytes()
    assert (tmp_path / "a_diag.json").read_bytes() == (tmp_path / "b_diag.json").read_bytes()


def test_simulate_replicas_deterministic(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    args = [
        "simulate", "--model", "individual", "--graph", "named:complete:5",
        "--money", "10", "--limit", "1", "--seed", "5",
        "--burn-in", "200", "--samples", "5000", "--replicas", "3",
    ]
    assert run_cli(args + ["--out-prefix", "r1"]) == 0
    assert run_cli(args + ["--out-prefix", "r2", "--threads", "2"]) == 0
    assert (tmp_path / "r1_hist.csv").read_bytes() == (tmp_path / "r2_hist.csv").read_bytes()
    diag = json.loads((tmp_path / "r1_diag.json").read_text())
    assert diag["hist_total"] == 3 * 5000 * 5


def test_simulate_disconnected_graph_exit_2(tmp_path, capsys):
    bad = tmp_path / "disconnected.txt"
    bad.write_text("4\n0 1\n2 3\n")
    code = run_cli([
        "simulate", "--model", "individual", "--graph", f"file:{bad}",
        "--money", "4", "--limit", "0",
    ])
    assert code == 2
    assert "connected" in capsys.readouterr().err


def test_simulate_bad_graph_spec_exit_2():
    code = run_cli([
        "simulate", "--model", "individual", "--graph", "mesh:4",
        "--money", "4", "--limit", "0",
    ])
    assert code == 2


def test_density_shifted_exp_reference_value(tmp_path):
    out = tmp_path / "d.csv"
    code = run_cli([
        "density", "--law", "shifted-exp", "--t", "500", "--li", "1000",
        "--grid=-1000:-990:5", "--out", str(out),
    ])
    assert code == 0
    first = out.read_text().strip().splitlines()[1].split(",")
    assert float(first[0]) == -1000
    assert abs(float(first[1]) - 6.6667e-4) < 1e-7


def test_density_laplace_peak(tmp_path):
    out = tmp_path / "d.csv"
    code = run_cli([
        "density", "--law", "laplace", "--t", "500", "--rho", "0.2",
        "--grid", "0:0:1", "--out", str(out),
    ])
    assert code == 0
    val = float(out.read_text().strip().splitlines()[1].split(",")[1])
    assert abs(val - 8.4043e-4) < 5e-8


def test_density_bad_grid_exit_2(tmp_path):
    code = run_cli([
        "density", "--law", "laplace", "--t", "10", "--rho", "0.5",
        "--grid", "5:1:1", "--out", str(tmp_path / "d.csv"),
    ])
    assert code == 2


def test_density_rho_zero_exit_2(tmp_path):
    code = run_cli([
        "density", "--law", "laplace", "--t", "10", "--rho", "0",
        "--grid", "0:1:1", "--out", str(tmp_path / "d.csv"),
    ])
    assert code == 2


def test_verify_small_grid_exit_0(tmp_path, capsys):
    out = tmp_path / "verify.json"
    code = run_cli([
        "verify", "--grid-max-n", "2", "--grid-max-money", "2",
        "--grid-max-limit", "1", "--graphs", "path,star", "--out", str(out),
    ])
    assert code == 0
    report = json.loads(out.read_text())
    assert report["pass"]
    summary = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert summary["failed"] == 0


def test_verify_injected_count_bug_exit_5(monkeypatch, capsys):
    true_count = oracle.count_states_collective
    monkeypatch.setattr(
        oracle, "count_states_collective", lambda n, m, limit: true_count(n, m, limit) + 1
    )
    code = run_cli([
        "verify", "--grid-max-n", "2", "--grid-max-money", "1",
        "--grid-max-limit", "1", "--graphs", "path",
    ])
    assert code == 5
    summary = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert summary["failed"] > 0


def test_fit_self_consistency(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    p = laplace_params(500.0, 0.2)
    cs = np.arange(-2000, 6001)
    dens = laplace_density(cs.astype(float), p)
    pmf_path = tmp_path / "pmf.csv"
    with open(pmf_path, "w") as fh:
        fh.write("c,prob\n")
        for c, d in zip(cs, dens):
            fh.write(f"{c},{d:.17g}\n")
    code = run_cli(["fit", "--pmf", str(pmf_path), "--t", "500", "--rho", "0.2"])
    assert code == 0
    result = json.loads((tmp_path / "fit.json").read_text())
    assert result["relative_errors"]["a"] < 1e-6
    assert result["relative_errors"]["b"] < 1e-6
    assert result["relative_errors"]["k"] < 1e-6


def test_fit_malformed_csv_exit_2(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("nonsense\n1,2,3\n")
    code = run_cli(["fit", "--pmf", str(bad), "--t", "10", "--rho", "0.5"])
    assert code == 2


def test_fit_missing_rho_usage_error():
    with pytest.raises(SystemExit) as exc:
        run_cli(["fit", "--pmf", "x.csv", "--t", "10"])
    assert exc.value.code == 2


def test_unknown_subcommand_usage_error():
    with pytest.raises(SystemExit) as exc:
        run_cli(["frobnicate"])
    assert exc.value.code == 2
