import json
import math

import numpy as np
import pytest

from qtmpair.cli import main
from qtmpair.relaxation import parse_dataset_csv

SUBCOMMANDS = ("spectrum-ua", "spectrum-field", "eigen", "extract", "fit", "synth", "evolve")


def run_ok(capsys, argv):
    assert main(argv) == 0
    return capsys.readouterr().out


def run_usage_error(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2
    return capsys.readouterr().err


# ------------------------------------------------------------------- help

def test_help_exits_zero_and_documents_units(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--help"])
    assert exc.value.code == 0
    capsys.readouterr()
    for sub in SUBCOMMANDS:
        with pytest.raises(SystemExit) as exc:
            main([sub, "--help"])
        assert exc.value.code == 0
        text = capsys.readouterr().out
        assert "usage" in text
        assert any(
            unit in text
            for unit in ("kelvin", "tesla", "nanoseconds", "seconds", "dimensionless")
        )


# ------------------------------------------------------------ spectrum-ua

def test_spectrum_ua_row_at_ten(capsys):
    out = run_ok(capsys, ["spectrum-ua", "--min", "0", "--max", "20", "--points", "201"])
    lines = out.strip().split("\n")
    assert lines[0] == "axis,lambda1,lambda2,lambda3,lambda4"
    assert len(lines) == 202
    row = next(line for line in lines[1:] if line.startswith("10.0,"))
    values = [float(x) for x in row.split(",")][1:]
    s = math.sqrt(100.0 + 16.0)
    np.testing.assert_allclose(values, [(10 - s) / 2, 0.0, 10.0, (10 + s) / 2], atol=1e-12)


def test_spectrum_ua_json(capsys):
    out = run_ok(capsys, ["spectrum-ua", "--min", "0", "--max", "10", "--points", "3",
                          "--format", "json"])
    data = json.loads(out)
    assert data["axis"] == [0.0, 5.0, 10.0]
    assert len(data["lambda1"]) == 3


def test_spectrum_ua_rejects_bad_range(capsys):
    err = run_usage_error(capsys, ["spectrum-ua", "--min", "3", "--max", "1", "--points", "5"])
    assert "usage" in err


# ---------------------------------------------------------- spectrum-field

def test_spectrum_field_table(capsys):
    out = run_ok(capsys, ["spectrum-field", "--u", "10", "--a", "1", "--mu-y", "10",
                          "--max", "2", "--points", "41"])
    lines = out.strip().split("\n")
    assert lines[0] == "axis,lambda1,lambda2,lambda3,lambda4,mx,my"
    rows = np.array([[float(x) for x in line.split(",")] for line in lines[1:]])
    assert rows.shape == (41, 7)
    assert np.max(np.abs(rows[:, 2])) < 1e-10          # lambda2 column stays zero
    assert rows[-1, 6] > 0.0                           # ground moment develops along y


def test_spectrum_field_rejects_zero_u(capsys):
    run_usage_error(capsys, ["spectrum-field", "--u", "0", "--a", "1", "--mu-y", "10",
                             "--max", "2", "--points", "11"])


# ------------------------------------------------------------------ eigen

def test_eigen_report(capsys):
    out = run_ok(capsys, ["eigen", "--u", "10", "--a", "1", "--mu-y", "10"])
    data = json.loads(out)
    assert data["basis"] == ["1", "1bar", "2", "2bar"]
    assert "convention" in data
    s = math.sqrt(116.0)
    np.testing.assert_allclose(
        data["values_K"], [(10 - s) / 2, 0.0, 10.0, (10 + s) / 2], atol=1e-10
    )
    np.testing.assert_allclose(
        np.abs(data["vectors"][0]), [0.6943, 0.6943, 0.1337, 0.1337], atol=1e-4
    )


# ---------------------------------------------------------------- extract

def test_extract_quarter_rule(capsys):
    out = run_ok(capsys, ["extract", "--delta", "0.34", "--mode", "paper"])
    report = json.loads(out)
    assert report["tunneling_paper_K"] == 0.085
    assert report["tunneling_exact_K"] is None
    np.testing.assert_allclose(report["frequency_GHz"], 0.34 * 20.836619, rtol=1e-12)
    assert report["notes"]


def test_extract_full_report(capsys):
    out = run_ok(capsys, ["extract", "--u", "10", "--a", "1", "--mu-y", "10"])
    report = json.loads(out)
    s = math.sqrt(116.0)
    np.testing.assert_allclose(report["splitting_K"], (s - 10) / 2, rtol=1e-12)
    np.testing.assert_allclose(report["tunneling_exact_K"], 1.0, rtol=1e-10)
    np.testing.assert_allclose(
        report["zeeman_threshold_T"], 10.0 / (2.0 * 10.0 * 0.671714), rtol=1e-12
    )


def test_extract_requires_some_input(capsys):
    run_usage_error(capsys, ["extract", "--mode", "paper"])
    run_usage_error(capsys, ["extract", "--delta", "0.3", "--mode", "exact"])


# ------------------------------------------------------------ synth + fit

def test_synth_writes_dataset(capsys, tmp_path):
    path = tmp_path / "data.csv"
    run_ok(capsys, ["synth", "--process", "2.1e-3", "16.1", "--t-min", "0.4",
                    "--t-max", "30", "--points", "12", "--output", str(path)])
    ds = parse_dataset_csv(path.read_text())
    assert len(ds.points) == 12
    # noise-free points lie on the single-channel model
    tau = 2.1e-3 * math.exp(16.1 / ds.points[0].t_kelvin)
    np.testing.assert_allclose(ds.points[0].tau_s, tau, rtol=1e-12)


def test_fit_round_trip(capsys, tmp_path):
    data = tmp_path / "synth.csv"
    curve = tmp_path / "curve.csv"
    run_ok(capsys, ["synth", "--process", "4.0e2", "0.34", "--process", "2.1e-3", "16.1",
                    "--t-min", "0.4", "--t-max", "30", "--points", "30",
                    "--noise", "0.05", "--seed", "1", "--output", str(data)])
    out = run_ok(capsys, ["fit", "--input", str(data), "--processes", "2",
                          "--format", "json", "--curve-output", str(curve)])
    report = json.loads(out)
    assert report["converged"] is True
    deltas = [p["delta_K"] for p in report["model"]["processes"]]
    assert abs(deltas[0] - 0.34) <= 0.034 and abs(deltas[1] - 16.1) <= 1.61
    assert len(report["std_errors"]) == 4
    assert len(report["covariance"]) == 4

    lines = curve.read_text().strip().split("\n")
    assert lines[0] == "T_K,tau_s"
    assert len(lines) >= 201


def test_fit_degenerate_is_domain_error(capsys, tmp_path):
    data = tmp_path / "single.csv"
    run_ok(capsys, ["synth", "--process", "2.1e-3", "16.1", "--t-min", "0.4",
                    "--t-max", "30", "--points", "30", "--output", str(data)])
    assert main(["fit", "--input", str(data), "--processes", "2"]) == 3
    err = capsys.readouterr().err
    diagnostic = json.loads(err)
    assert diagnostic["error"] == "DegenerateParameters"
    assert len(diagnostic["parameter_pair"]) == 2


def test_fit_missing_input_is_usage_error(capsys, tmp_path):
    run_usage_error(capsys, ["fit", "--input", str(tmp_path / "nope.csv"), "--processes", "2"])


def test_fit_bad_content_is_domain_error(capsys, tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("wrong,header\n1,2\n")
    assert main(["fit", "--input", str(bad), "--processes", "2"]) == 3
    diagnostic = json.loads(capsys.readouterr().err)
    assert diagnostic["error"] == "DatasetError"


# ----------------------------------------------------------------- evolve

def test_evolve_trace(capsys):
    out = run_ok(capsys, ["evolve", "--u", "10", "--a", "1", "--mu-y", "10",
                          "--t-max", "0.25", "--points", "26"])
    lines = out.strip().split("\n")
    assert lines[0] == "t_ns,p1,p1bar,p2,p2bar,mx,my"
    rows = np.array([[float(x) for x in line.split(",")] for line in lines[1:]])
    assert rows.shape == (26, 7)
    np.testing.assert_allclose(rows[:, 1:5].sum(axis=1), 1.0, atol=1e-12)
    assert rows[0, 1] == pytest.approx(1.0, abs=1e-12)   # starts in |1>
    assert rows[:, 2].max() > 0.9                        # strong transfer to |1bar>


# ----------------------------------------------------------- determinism

def test_outputs_are_byte_identical_across_runs(capsys, tmp_path):
    dataset = tmp_path / "ds.csv"
    run_ok(capsys, ["synth", "--process", "1.9e1", "0.97", "--process", "8.9e-3", "10.0",
                    "--t-min", "0.4", "--t-max", "30", "--points", "30",
                    "--noise", "0.05", "--seed", "3", "--output", str(dataset)])
    invocations = {
        "spectrum-ua": ["spectrum-ua", "--min", "0", "--max", "20", "--points", "101"],
        "spectrum-field": ["spectrum-field", "--u", "10", "--a", "1", "--mu-y", "10",
                           "--max", "2", "--points", "51"],
        "eigen": ["eigen", "--u", "10", "--a", "1", "--mu-y", "10", "--by", "0.3"],
        "extract": ["extract", "--u", "10", "--a", "1", "--mu-y", "10"],
        "fit": ["fit", "--input", str(dataset), "--processes", "2"],
        "synth": ["synth", "--process", "4.0e2", "0.34", "--t-min", "0.4", "--t-max", "30",
                  "--points", "20", "--noise", "0.02", "--seed", "7"],
        "evolve": ["evolve", "--u", "10", "--a", "1", "--mu-y", "10",
                   "--t-max", "0.5", "--points", "40"],
    }
    for name, argv in invocations.items():
        first = tmp_path / f"{name}-1.out"
        second = tmp_path / f"{name}-2.out"
        assert main(argv + ["--output", str(first)]) == 0
        assert main(argv + ["--output", str(second)]) == 0
        assert first.read_bytes() == second.read_bytes(), name
    capsys.readouterr()
