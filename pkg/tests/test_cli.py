"""Command-line driver tests: artifacts, exit codes, determinism, round trips."""

import csv
import json

import pytest

from circulant_ilc.cli import build_config, main


def run(args):
    return main([str(a) for a in args])


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def test_analyze_default_reproduces_full_map_table(tmp_path, capsys):
    assert run(["analyze", "--out", tmp_path]) == 0
    header, rows = read_csv(tmp_path / "table.csv")
    assert header == ["order", "singular_value", "eigenvalue_magnitude"]
    assert float(rows[0][1]) == pytest.approx(18.2151, rel=1e-2)
    assert float(rows[0][2]) == pytest.approx(1.0, abs=1e-3)
    assert "monotonic = False" in capsys.readouterr().out


def test_analyze_deleted_reproduces_deleted_table(tmp_path):
    assert run(["analyze", "--q", 1, "--out", tmp_path]) == 0
    _, rows = read_csv(tmp_path / "table.csv")
    assert float(rows[0][1]) == pytest.approx(13.8093, rel=1e-2)
    assert float(rows[1][1]) == pytest.approx(0.5417, rel=1e-2)
    report = json.loads((tmp_path / "report.json").read_text())
    assert float(report["spectral_radius"]) == pytest.approx(0.9987, abs=1e-3)
    assert report["monotonic"] is False


def test_optimize_degeneracy_exits_three(tmp_path, capsys, monkeypatch):
    import numpy as np

    from circulant_ilc import LearningLaw, OptimizationTrace
    from circulant_ilc import cli as cli_module

    stub = OptimizationTrace(
        sigma=np.array([1.0]),
        rho=np.array([1.0]),
        gain=np.eye(51, 50),
        law=LearningLaw(np.eye(51, 50), "optimized_inverse_circulant", 1),
        diagnostic="singular value 0 is degenerate: test stub",
    )
    monkeypatch.setattr(cli_module, "_optimize", lambda ws: stub)
    assert run(["optimize", "--out", tmp_path]) == 3
    assert "degenerate" in capsys.readouterr().err


def test_analyze_sixth_power(tmp_path):
    assert run(["analyze", "--power", 6, "--out", tmp_path]) == 0
    _, rows = read_csv(tmp_path / "table.csv")
    assert float(rows[0][1]) == pytest.approx(12.7055, rel=1e-2)
    assert float(rows[1][1]) < 2.7e-12  # second singular value at the noise floor


def test_optimize_writes_trace_and_law(tmp_path, capsys):
    assert run(["optimize", "--opt-iterations", 5, "--out", tmp_path]) == 0
    header, rows = read_csv(tmp_path / "trace.csv")
    assert header == ["iteration", "sigma_max", "spectral_radius"]
    assert len(rows) == 6
    law = tmp_path / "law_optimized_inverse_circulant_N51_q1.csv"
    sidecar = json.loads((tmp_path / "law_optimized_inverse_circulant_N51_q1.json").read_text())
    assert law.exists()
    assert sidecar["kind"] == "optimized_inverse_circulant"
    assert sidecar["q"] == 1
    assert "sigma_max" in capsys.readouterr().out


def test_optimize_rejects_zero_iterations(tmp_path, capsys):
    assert run(["optimize", "--iterations", 0, "--out", tmp_path]) == 2
    assert "opt_iterations" in capsys.readouterr().err


def test_simulate_rms_decays(tmp_path):
    assert run(["simulate", "--traj", "yd1", "--law", "partial_isometry",
                "--iterations", 8, "--out", tmp_path]) == 0
    _, rows = read_csv(tmp_path / "rms.csv")
    rms = [float(r[1]) for r in rows]
    assert len(rms) == 9
    assert rms[-1] < rms[0]


def test_simulate_worst_case_stalls(tmp_path):
    assert run(["simulate", "--traj", "worst_case", "--power", 6,
                "--iterations", 10, "--out", tmp_path]) == 0
    _, rows = read_csv(tmp_path / "rms.csv")
    rms = [float(r[1]) for r in rows]
    assert abs(rms[-1] / rms[1] - 1.0) < 0.05


def test_compare_emits_four_law_columns(tmp_path):
    assert run(["compare", "--opt-iterations", 5, "--iterations", 6,
                "--out", tmp_path]) == 0
    header, rows = read_csv(tmp_path / "compare.csv")
    assert header == [
        "iteration",
        "rms_optimized_inverse_circulant",
        "rms_partial_isometry",
        "rms_contraction_mapping",
        "rms_quadratic_cost",
    ]
    assert len(rows) == 7


def test_sweep_minimum_at_zero_gain(tmp_path, capsys):
    assert run(["sweep", "--phi-min", -0.2, "--phi-max", 0.3, "--phi-step", 0.1,
                "--out", tmp_path]) == 0
    _, rows = read_csv(tmp_path / "sweep.csv")
    gains = [float(r[0]) for r in rows]
    sigmas = [float(r[1]) for r in rows]
    assert len(rows) == 6
    assert gains[sigmas.index(min(sigmas))] == pytest.approx(0.0, abs=1e-12)
    assert "at phi = 0" in capsys.readouterr().out


def test_sensitivity_writes_surface_and_flags(tmp_path):
    assert run(["sensitivity", "--out", tmp_path]) == 0
    _, rows = read_csv(tmp_path / "sensitivity_N51_q1.csv")
    assert len(rows) + 1 == 51  # 51 rows total including the first
    meta = json.loads((tmp_path / "sensitivity_meta.json").read_text())
    assert meta["resolved"]["flagged_columns"]


def test_config_file_with_flag_override(tmp_path):
    cfg = {"plant": "third_order", "q": 0, "iterations": 4}
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    out = tmp_path / "out"
    assert run(["analyze", "--config", path, "--q", 1, "--out", out]) == 0
    meta = json.loads((out / "analyze_meta.json").read_text())
    assert meta["config"]["q"] == 1  # flag wins over file


def test_config_errors_name_the_field(tmp_path, capsys):
    assert run(["analyze", "--plant", "sixth_order", "--out", tmp_path]) == 2
    assert "plant" in capsys.readouterr().err
    assert run(["analyze", "--n", 0, "--out", tmp_path]) == 2
    assert "n:" in capsys.readouterr().err
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"horizon": 51}))
    assert run(["analyze", "--config", bad, "--out", tmp_path]) == 2
    assert "horizon" in capsys.readouterr().err


def test_plant_spec_file(tmp_path):
    spec = {
        "first_order": [8.8],
        "second_order": [{"omega": 37.0, "zeta": 0.5}],
        "sample_hz": 50.0,
        "N": 51,
    }
    path = tmp_path / "plant.json"
    path.write_text(json.dumps(spec))
    out = tmp_path / "out"
    assert run(["analyze", "--plant", path, "--out", out]) == 0
    _, rows = read_csv(out / "table.csv")
    assert float(rows[0][1]) == pytest.approx(18.2151, rel=1e-2)
    meta = json.loads((out / "analyze_meta.json").read_text())
    assert meta["config"]["n"] == 51 and meta["config"]["sample_hz"] == 50.0


def test_inline_plant_in_config_file(tmp_path):
    cfg = {
        "plant": {
            "first_order": [2.0],
            "second_order": [],
            "sample_hz": 10.0,
            "N": 12,
        },
        "q": 0,
    }
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    out = tmp_path / "out"
    assert run(["analyze", "--config", path, "--out", out]) == 0
    _, rows = read_csv(out / "table.csv")
    assert len(rows) == 12
    meta = json.loads((out / "analyze_meta.json").read_text())
    assert meta["config"]["plant"]["first_order"] == [2.0]
    reparsed = build_config(None, meta["config"])
    assert reparsed.n == 12 and reparsed.sample_hz == 10.0


def test_nondefault_horizon(tmp_path):
    assert run(["analyze", "--n", 20, "--q", 1, "--out", tmp_path]) == 0
    _, rows = read_csv(tmp_path / "table.csv")
    assert len(rows) == 19  # N - q spectrum entries


def test_byte_identical_reruns(tmp_path):
    out = tmp_path / "a"
    args = ["sweep", "--phi-min", -1, "--phi-max", 2, "--phi-step", 0.25, "--out", out]
    assert run(args) == 0
    first = ((out / "sweep.csv").read_bytes(), (out / "sweep_meta.json").read_bytes())
    assert run(args) == 0
    second = ((out / "sweep.csv").read_bytes(), (out / "sweep_meta.json").read_bytes())
    assert first == second


def test_metadata_round_trips_to_equivalent_config(tmp_path):
    from dataclasses import asdict

    out = tmp_path / "out"
    assert run(["analyze", "--q", 1, "--power", 3, "--out", out]) == 0
    meta = json.loads((out / "analyze_meta.json").read_text())
    reparsed = build_config(None, meta["config"])
    assert asdict(reparsed) == meta["config"]
