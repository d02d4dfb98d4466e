import hashlib
import json

import numpy as np
import pytest

from fbmcrw.cli import main


def _kv(path):
    with open(path) as fh:
        return dict(line.split("=", 1) for line in fh.read().splitlines())


def test_advise_command(capsys):
    code = main(["advise", "--hurst", "0.75", "--steps", "1000",
                 "--target-error", "0.1", "--k", "1"])
    out = capsys.readouterr().out
    assert code == 0
    kv = dict(line.split("=", 1) for line in out.strip().splitlines())
    assert kv["walks"] == "388"
    assert kv["family"] == "mu-k"
    assert float(kv["predicted_error"]) <= 0.1
    assert kv["rate_condition_ok"] == "true"


def test_advise_infeasible_exit_code(capsys):
    code = main(["advise", "--hurst", "0.75", "--steps", "1000",
                 "--target-error", "0.001", "--k", "1"])
    assert code == 3
    assert "infeasible" in capsys.readouterr().err


def test_simulate_csv_reproducible(tmp_path, capsys):
    out = str(tmp_path / "traj.csv")
    argv = ["simulate", "--hurst", "0.75", "--steps", "64", "--walks", "50",
            "--seed", "9", "--format", "csv", "--out", out]
    assert main(argv) == 0
    first = open(out, "rb").read()
    lines = first.decode().splitlines()
    assert lines[0] == "t,value"
    assert len(lines) == 66
    assert lines[1] == "0,0"

    manifest = json.load(open(out + ".manifest.json"))
    assert manifest["outputs"]["traj.csv"] == hashlib.sha256(
        first).hexdigest()
    assert manifest["master_seed"] == 9
    assert manifest["parameters"]["walks"] == 50

    assert main(argv) == 0
    assert open(out, "rb").read() == first


def test_simulate_binary_matches_csv(tmp_path, capsys):
    csv_path = str(tmp_path / "t.csv")
    bin_path = str(tmp_path / "t.f64le")
    base = ["simulate", "--hurst", "0.25", "--steps", "32", "--walks", "40",
            "--seed", "4"]
    assert main(base + ["--format", "csv", "--out", csv_path]) == 0
    assert main(base + ["--format", "f64le", "--out", bin_path]) == 0
    binary = np.frombuffer(open(bin_path, "rb").read(), dtype="<f8")
    assert binary.size == 33
    text = [float(line.split(",")[1])
            for line in open(csv_path).read().splitlines()[1:]]
    assert np.array_equal(binary, np.array(text))  # .17g round-trips exactly


def test_simulate_target_error_picks_plan(tmp_path, capsys):
    out = str(tmp_path / "t.f64le")
    code = main(["simulate", "--hurst", "0.75", "--steps", "1000",
                 "--target-error", "0.1", "--k", "1", "--seed", "2",
                 "--format", "f64le", "--out", out])
    assert code == 0
    stdout = capsys.readouterr().out
    assert "walks=388" in stdout


def test_simulate_usage_errors(tmp_path, capsys):
    out = str(tmp_path / "x.csv")
    base = ["simulate", "--hurst", "0.75", "--steps", "64", "--out", out]
    assert main(base) == 2  # neither sizing flag
    assert main(base + ["--walks", "10", "--target-error", "0.1"]) == 2
    assert main(["simulate", "--hurst", "1.5", "--steps", "64",
                 "--walks", "10", "--out", out]) == 2
    capsys.readouterr()


def test_validate_passes_at_reference_seed(tmp_path, capsys):
    report = str(tmp_path / "report.txt")
    code = main(["validate", "--hurst", "0.75", "--steps", "64",
                 "--walks", "150", "--replications", "120",
                 "--seed", "6", "--report", report])
    assert code == 0
    kv = _kv(report)
    assert kv["overall"] == "pass"
    assert kv["verdict_autocovariance"] == "pass"
    assert kv["verdict_covariance"] == "pass"
    assert kv["verdict_hurst"] == "pass"
    assert float(kv["covariance_max_z"]) <= 4.0
    assert "rise_n10_probability" in kv
    assert float(kv["threshold_covariance_z"]) == 4.0
    # theory column is the finite-N value, not the asymptote
    assert kv["autocov_lag1_theory"] != kv["autocov_asymptote_lag1"]
    manifest = json.load(open(report + ".manifest.json"))
    assert "report.txt" in manifest["outputs"]


def test_validate_fail_exit_code(tmp_path, capsys):
    report = str(tmp_path / "report.txt")
    code = main(["validate", "--hurst", "0.75", "--steps", "64",
                 "--walks", "150", "--replications", "120",
                 "--seed", "6", "--hurst-tolerance", "0.0001",
                 "--report", report])
    assert code == 4
    kv = _kv(report)
    assert kv["overall"] == "fail"
    assert kv["verdict_hurst"] == "fail"


def test_validate_usage_errors(tmp_path, capsys):
    report = str(tmp_path / "r.txt")
    assert main(["validate", "--hurst", "0.75", "--steps", "64",
                 "--walks", "50", "--replications", "10",
                 "--report", report]) == 2
    assert main(["validate", "--hurst", "0.75", "--steps", "70",
                 "--walks", "50", "--replications", "40",
                 "--report", report]) == 2
    capsys.readouterr()


def test_validate_skips_sections_when_underpowered(tmp_path, capsys):
    # below 100 replications there is no Hurst verdict, below 500 no KS row
    report = str(tmp_path / "report.txt")
    code = main(["validate", "--hurst", "0.25", "--steps", "64",
                 "--walks", "80", "--replications", "48",
                 "--seed", "3", "--report", report])
    kv = _kv(report)
    assert code in (0, 4)
    assert "hurst_estimate" not in kv
    assert "ks_statistic" not in kv
    assert "rise_n10_probability" not in kv  # antipersistent: no rise table
    assert "verdict_hurst" not in kv


def test_compare_command(capsys):
    code = main(["compare", "--hurst", "0.75", "--steps", "128",
                 "--walks", "120", "--replications", "150", "--seed", "12"])
    out = capsys.readouterr().out
    assert code == 0
    kv = dict(line.split("=", 1) for line in out.strip().splitlines())
    assert abs(float(kv["crw_hurst_estimate"])
               - float(kv["oracle_hurst_estimate"])) < 0.35
    for lag in range(4):
        est = float(kv[f"crw_lag{lag}_estimate"])
        ose = float(kv[f"oracle_lag{lag}_estimate"])
        se = float(kv[f"crw_lag{lag}_se"]) + float(kv[f"oracle_lag{lag}_se"])
        assert abs(est - ose) <= 6.0 * se
    assert float(kv["crw_draws"]) == (128 + 2) * 120 * 150
    assert float(kv["oracle_draws"]) == 128 * 150


def test_compare_usage_errors(capsys):
    assert main(["compare", "--hurst", "0.75", "--steps", "8192",
                 "--walks", "10", "--replications", "100"]) == 2
    assert main(["compare", "--hurst", "0.75", "--steps", "128",
                 "--walks", "10", "--replications", "50"]) == 2
    capsys.readouterr()
