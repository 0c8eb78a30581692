"""Deterministic execution of experiment configs and Cartesian sweeps.

Every grid point is a pure function of its scalar config.  Rows come back in grid
order whatever order the workers finish in, and all numbers are written with
``repr`` so identical inputs give byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .config import PAIR_EXPERIMENTS, ExperimentConfig
from .experiments import (
    PairSetup,
    TrainSetup,
    bethe_phase_check,
    collision_summary,
    fidelity_curve,
    train_collision_check,
)
from .basis import DOWN, UP
from .spin_smatrix import (
    SpinTrainState,
    cascade,
    equal_spacing_schedule,
    lambda_population,
    purity,
    reduced_single_spin,
    single_vs_train_amplitudes,
    spin_string,
)
from .wavepacket import WavepacketSpec


@dataclass
class PointResult:
    row: dict
    curve: dict | None = None  # column name -> list, first column is the index


@dataclass
class RunResult:
    config: ExperimentConfig
    rows: list[dict]
    curves: list[dict | None] = field(default_factory=list)


def pair_setup(cfg: ExperimentConfig) -> PairSetup:
    p = cfg.packets
    left = WavepacketSpec(p.left_centers[0], cfg.alpha, p.k, UP)
    right = WavepacketSpec(p.right_centers[0], cfg.alpha, -p.k, DOWN)
    return PairSetup(cfg.L, cfg.kappa, left, right)


def interaction(cfg: ExperimentConfig, closing_speed: float) -> float:
    return cfg.U if cfg.U is not None else cfg.U_over_vr * closing_speed


def metadata(cfg: ExperimentConfig) -> dict:
    meta = {
        "artifact": "hubbard-scatter",
        "version": __version__,
        "schema_version": cfg.schema_version,
        "experiment": cfg.experiment,
        "config_sha256": cfg.digest(),
    }
    if cfg.experiment in PAIR_EXPERIMENTS or cfg.lattice_check:
        v = 2 * cfg.kappa * math.sin(cfg.packets.k)
        meta["v_left"] = v
        meta["v_right"] = -v
        # U_over_vr is measured in units of the closing speed v_left - v_right
        meta["v_r"] = 2 * v
    return meta


def _clean(x):
    if isinstance(x, (np.floating, np.integer)):
        x = x.item()
    if isinstance(x, float) and not math.isfinite(x):
        raise ValueError("non-finite value in results")
    return x


def evaluate_point(cfg: ExperimentConfig) -> PointResult:
    """Run one scalar grid point."""
    exp = cfg.experiment
    labels = cfg.grid_labels()
    if exp == "fig2-fidelity":
        setup = pair_setup(cfg)
        U = interaction(cfg, setup.closing_speed)
        table = fidelity_curve(setup, U, cfg.times.values(), tol=cfg.tol)
        i = int(np.argmax(table["fidelity"]))
        row = dict(labels, U=U, theta=table["theta"], peak_fidelity=table["fidelity"][i], t_peak=table["t"][i],
                   max_norm_drift=float(np.max(np.abs(table["norm"] - 1))))
        curve = {name: list(table[name]) for name in ("t", "fidelity", "norm", "energy")}
        return PointResult(row, curve)
    if exp in ("regime-gallery", "resonance-sweep"):
        setup = pair_setup(cfg)
        U = interaction(cfg, setup.closing_speed)
        summary = collision_summary(setup, U, tol=cfg.tol)
        summary.pop("U")
        return PointResult(dict(labels, U=U, **summary))
    if exp == "bethe-check":
        b = cfg.bethe
        res = bethe_phase_check(cfg.U, k=b.k, K=b.K, alpha=cfg.alpha, length=b.length, kappa=cfg.kappa, tol=cfg.tol)
        res.pop("U")
        return PointResult(dict(labels, **res))
    if exp == "cascade-1vN":
        return _cascade_1vn(cfg, labels)
    if exp == "cascade-2v2":
        return _cascade_2v2(cfg, labels)
    raise ValueError(f"unknown experiment {exp}")


def _cascade_1vn(cfg: ExperimentConfig, labels: dict) -> PointResult:
    N, theta = cfg.N, cfg.theta
    schedule = equal_spacing_schedule(1, N)
    final = cascade(SpinTrainState.product("u", "d" * N), schedule, theta)
    closed = single_vs_train_amplitudes(N, theta)
    # the up spin ends in slot j-1 (flip j) or in the last slot (no flip)
    slots = ["d" * (j - 1) + "u" + "d" * (N + 1 - j) for j in range(1, N + 2)]
    amps = np.array([final.amplitudes[int(s.replace("u", "0").replace("d", "1"), 2)] for s in slots])
    rho = final.reduced_density(N)
    row = dict(
        labels,
        schedule=" ".join(f"({l},{r})" for l, r in schedule.pairs()),
        Lambda=lambda_population(N, theta),
        Lambda_cascade=float(rho[0, 0].real),
        purity=purity(reduced_single_spin(N, theta)),
        purity_cascade=purity(rho),
        max_amplitude_error=float(np.max(np.abs(amps - closed))),
    )
    if cfg.lattice_check:
        p = cfg.packets
        setup = TrainSetup(cfg.L, cfg.kappa, cfg.alpha, p.left_centers[0], tuple(p.right_centers), p.k)
        check = train_collision_check(setup, theta, tol=cfg.tol)
        row.update(U=check["U"], t_final=check["t_final"], separated_probability=check["separated_probability"],
                   lattice_max_abs_diff=check["max_abs_diff"])
        for key, val in check["lattice"].items():
            row[f"p_lattice_{key}"] = val
    curve = {
        "j": list(range(1, N + 2)),
        "final_spins": slots,
        "re": list(amps.real),
        "im": list(amps.imag),
        "probability": list(np.abs(amps) ** 2),
        "closed_form_re": list(closed.real),
        "closed_form_im": list(closed.imag),
    }
    return PointResult(row, curve)


def _cascade_2v2(cfg: ExperimentConfig, labels: dict) -> PointResult:
    schedule = equal_spacing_schedule(2, 2)
    final = cascade(SpinTrainState.product(cfg.left_spins, cfg.right_spins), schedule, cfg.theta)
    strings = [spin_string(i, 4) for i in range(16)]
    amps = final.amplitudes
    row = dict(
        labels,
        initial=cfg.left_spins + cfg.right_spins,
        schedule=" ".join(f"({l},{r})" for l, r in schedule.pairs()),
        total_sz=final.total_sz(),
        norm=float(np.linalg.norm(amps)),
    )
    curve = {
        "final_spins": strings,
        "re": list(amps.real),
        "im": list(amps.imag),
        "probability": list(np.abs(amps) ** 2),
    }
    return PointResult(row, curve)


def _evaluate_indexed(args):
    idx, cfg = args
    return idx, evaluate_point(cfg)


def execute(cfg: ExperimentConfig, workers: int = 1) -> RunResult:
    points = cfg.points()
    if workers <= 1 or len(points) == 1:
        results = [evaluate_point(p) for p in points]
    else:
        results: list = [None] * len(points)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for idx, res in pool.map(_evaluate_indexed, enumerate(points)):
                results[idx] = res
    rows = [{k: _clean(v) for k, v in r.row.items()} for r in results]
    curves = [None if r.curve is None else {k: [_clean(x) for x in v] for k, v in r.curve.items()} for r in results]
    return RunResult(cfg, rows, curves)


# ---- serialization -------------------------------------------------------


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _csv_text(meta: dict, header: list[str], records: list[list]) -> str:
    buf = io.StringIO()
    for key, val in meta.items():
        buf.write(f"# {key}: {_fmt(val)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for rec in records:
        writer.writerow([_fmt(x) for x in rec])
    return buf.getvalue()


def rows_csv(meta: dict, rows: list[dict]) -> str:
    header: list[str] = []
    for r in rows:
        header.extend(k for k in r if k not in header)
    return _csv_text(meta, header, [[r.get(k, "") for k in header] for r in rows])


def _point_label(row_labels: dict) -> str:
    return ",".join(f"{k}={_fmt(v)}" for k, v in row_labels.items())


def curves_csv(meta: dict, points: list[ExperimentConfig], curves: list[dict]) -> str:
    """Wide table when every point shares the index column, long table otherwise."""
    index = next(iter(curves[0]))
    same_index = all(next(iter(c)) == index and c[index] == curves[0][index] for c in curves)
    if same_index:
        header = [index]
        cols = []
        for p, c in zip(points, curves):
            suffix = f"[{_point_label(p.grid_labels())}]" if len(points) > 1 else ""
            for name, vals in c.items():
                if name != index:
                    header.append(name + suffix)
                    cols.append(vals)
        records = [[curves[0][index][i]] + [col[i] for col in cols] for i in range(len(curves[0][index]))]
        return _csv_text(meta, header, records)
    axis_names = list(points[0].grid_labels())
    header = axis_names + list(curves[0])
    records = []
    for p, c in zip(points, curves):
        lab = p.grid_labels()
        n = len(next(iter(c.values())))
        for i in range(n):
            records.append([lab[a] for a in axis_names] + [c[name][i] for name in c])
    return _csv_text(meta, header, records)


def summary_json(meta: dict, rows: list[dict], config: ExperimentConfig) -> str:
    doc = {"metadata": meta, "config": config.model_dump(mode="json"), "rows": rows}
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _write(path: Path, text: str) -> None:
    path.write_text(text, encoding="utf-8", newline="")


def write_run(result: RunResult, out: Path) -> list[Path]:
    out.mkdir(parents=True, exist_ok=True)
    meta = metadata(result.config)
    written = [out / "summary.json"]
    _write(written[0], summary_json(meta, result.rows, result.config))
    if any(c is not None for c in result.curves):
        path = out / f"{result.config.experiment}.csv"
        _write(path, curves_csv(meta, result.config.points(), result.curves))
        written.append(path)
    return written


def write_sweep(result: RunResult, out: Path) -> list[Path]:
    out.mkdir(parents=True, exist_ok=True)
    meta = dict(metadata(result.config), points=len(result.rows))
    paths = [out / "sweep.csv", out / "sweep.json"]
    _write(paths[0], rows_csv(meta, result.rows))
    _write(paths[1], summary_json(meta, result.rows, result.config))
    return paths

