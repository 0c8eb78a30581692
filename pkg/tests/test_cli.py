import json
import math
import subprocess
import sys
from pathlib import Path

import pytest

from hubbard_scatter import __version__, propagator
from hubbard_scatter.cli import EXIT_CONFIG, EXIT_NUMERIC, EXIT_OK, main
from hubbard_scatter.config import parse_config

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

BETHE = {
    "schema_version": 1,
    "experiment": "bethe-check",
    "U": [0.5, 2.0, -1.0],
    "alpha": 0.08,
    "bethe": {"k": 1.0471975511965976, "K": 0.0, "length": 200},
}
CASCADE = {"schema_version": 1, "experiment": "cascade-1vN", "N": [1, 2, 3], "theta": [0.3, 1.5707963267948966]}


def _write(tmp_path, doc, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


def _run(*args):
    return main([str(a) for a in args])


def test_run_writes_summary_and_curves(tmp_path):
    cfg = _write(tmp_path, CASCADE)
    assert _run("run", "--config", cfg, "--out", tmp_path / "o") == EXIT_OK
    summary = json.loads((tmp_path / "o" / "summary.json").read_text())
    assert summary["metadata"]["version"] == __version__
    assert summary["metadata"]["config_sha256"] == parse_config(CASCADE).digest()
    assert len(summary["rows"]) == 6
    assert [r["N"] for r in summary["rows"]] == [1, 1, 2, 2, 3, 3]
    assert all(r["max_amplitude_error"] < 1e-12 for r in summary["rows"])
    csv_lines = (tmp_path / "o" / "cascade-1vN.csv").read_text().splitlines()
    assert csv_lines[0] == "# artifact: hubbard-scatter"
    assert any(line.startswith("# config_sha256: ") for line in csv_lines)
    # amplitude tables differ in length, so the curve file is in long format
    assert csv_lines[5].startswith("N,theta,j,final_spins,re,im")


def test_fig2_curves_are_wide_columns(tmp_path):
    doc = {"schema_version": 1, "experiment": "fig2-fidelity", "L": 24, "alpha": [0.5, 0.6],
           "packets": {"left_centers": [5], "right_centers": [17], "k": 1.5707963267948966},
           "times": {"start": 0.0, "stop": 6.0, "num": 7}}
    assert _run("run", "--config", _write(tmp_path, doc), "--out", tmp_path / "o") == EXIT_OK
    lines = (tmp_path / "o" / "fig2-fidelity.csv").read_text().splitlines()
    header = [line for line in lines if not line.startswith("#")][0]
    assert header.startswith('t,"fidelity[alpha=0.5,U_over_vr=1.0]"')
    assert "# v_r: 4.0" in lines
    rows = json.loads((tmp_path / "o" / "summary.json").read_text())["rows"]
    assert [r["alpha"] for r in rows] == [0.5, 0.6]
    assert all(r["U"] == 4.0 and r["theta"] == pytest.approx(-math.pi / 2) for r in rows)


def test_run_is_byte_identical(tmp_path):
    cfg = _write(tmp_path, BETHE)
    for out in ("a", "b"):
        assert _run("run", "--config", cfg, "--out", tmp_path / out) == EXIT_OK
    assert (tmp_path / "a" / "summary.json").read_bytes() == (tmp_path / "b" / "summary.json").read_bytes()


def test_sweep_is_order_independent(tmp_path):
    cfg = _write(tmp_path, BETHE)
    assert _run("sweep", "--config", cfg, "--out", tmp_path / "serial", "--workers", 1) == EXIT_OK
    assert _run("sweep", "--config", cfg, "--out", tmp_path / "pool", "--workers", 3) == EXIT_OK
    for name in ("sweep.csv", "sweep.json"):
        assert (tmp_path / "serial" / name).read_bytes() == (tmp_path / "pool" / name).read_bytes()
    rows = json.loads((tmp_path / "pool" / "sweep.json").read_text())["rows"]
    assert [r["U"] for r in rows] == [0.5, 2.0, -1.0]
    assert max(r["phase_error"] for r in rows) < 1e-2


def test_single_point_sweep_equals_run(tmp_path):
    doc = dict(CASCADE, N=2, theta=0.9)
    cfg = _write(tmp_path, doc)
    assert _run("run", "--config", cfg, "--out", tmp_path / "r") == EXIT_OK
    assert _run("sweep", "--config", cfg, "--out", tmp_path / "s", "--workers", 2) == EXIT_OK
    run_rows = json.loads((tmp_path / "r" / "summary.json").read_text())["rows"]
    sweep_rows = json.loads((tmp_path / "s" / "sweep.json").read_text())["rows"]
    assert run_rows == sweep_rows and len(run_rows) == 1


@pytest.mark.parametrize(
    "doc",
    [
        {"schema_version": 1, "experiment": "cascade-1vN", "extra": True},
        {"schema_version": 1, "experiment": "cascade-1vN", "theta": []},
        {"schema_version": 1, "experiment": "cascade-1vN", "N": list(range(1, 11)), "theta": [0.1] * 11, "sweep_cap": 100},
    ],
)
def test_config_errors_exit_1(tmp_path, doc, capsys):
    assert _run("run", "--config", _write(tmp_path, doc), "--out", tmp_path / "o") == EXIT_CONFIG
    assert "config error" in capsys.readouterr().err
    assert not (tmp_path / "o").exists()


def test_missing_file_and_bad_workers(tmp_path):
    assert _run("run", "--config", tmp_path / "nope.json", "--out", tmp_path / "o") == EXIT_CONFIG
    cfg = _write(tmp_path, CASCADE)
    assert _run("sweep", "--config", cfg, "--out", tmp_path / "o", "--workers", 0) == EXIT_CONFIG


def test_unwritable_output(tmp_path):
    cfg = _write(tmp_path, dict(CASCADE, N=1, theta=1.0))
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert _run("run", "--config", cfg, "--out", blocker / "sub") == EXIT_CONFIG


def test_unseparated_packets_exit_2(tmp_path, capsys):
    doc = {"schema_version": 1, "experiment": "regime-gallery", "L": 30, "alpha": 0.1, "U": 1.0,
           "packets": {"left_centers": [10], "right_centers": [14], "k": 1.5707963267948966}}
    assert _run("run", "--config", _write(tmp_path, doc), "--out", tmp_path / "o") == EXIT_NUMERIC
    assert "numeric contract" in capsys.readouterr().err


def test_norm_drift_exit_2(tmp_path, monkeypatch):
    real = propagator._propagate
    monkeypatch.setattr(propagator, "_propagate", lambda *a: 1.01 * real(*a))
    doc = {"schema_version": 1, "experiment": "fig2-fidelity", "L": 24, "alpha": 0.5,
           "packets": {"left_centers": [5], "right_centers": [17], "k": 1.5707963267948966},
           "times": {"start": 0.0, "stop": 1.0, "num": 2}}
    assert _run("run", "--config", _write(tmp_path, doc), "--out", tmp_path / "o") == EXIT_NUMERIC


def test_selftest_passes(capsys):
    assert _run("selftest", "--quick") == EXIT_OK
    out = capsys.readouterr().out
    assert "FAIL" not in out and out.count("PASS") == 5


@pytest.mark.parametrize("path", sorted(CONFIGS.glob("*.json")), ids=lambda p: p.stem)
def test_shipped_configs_validate(path):
    from hubbard_scatter.config import load_config

    cfg = load_config(path)
    assert cfg.n_points() >= 1


def test_console_entry_point(tmp_path):
    cfg = _write(tmp_path, dict(CASCADE, N=1, theta=1.0))
    proc = subprocess.run(
        [sys.executable, "-m", "hubbard_scatter", "run", "--config", str(cfg), "--out", str(tmp_path / "o")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.strip().endswith("cascade-1vN.csv")
