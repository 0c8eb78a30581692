"""Experiment configuration: a versioned JSON schema with fail-fast validation.

Fields listed in ``GRID_FIELDS`` may hold a scalar or a non-empty list; every list
is one axis of the Cartesian product that ``run`` and ``sweep`` iterate over.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
from pathlib import Path
from typing import Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

SCHEMA_VERSION = 1
DEFAULT_SWEEP_CAP = 10_000
# order of the grid axes; the last one varies fastest
GRID_FIELDS = ("alpha", "U", "U_over_vr", "N", "theta")

Experiment = Literal["fig2-fidelity", "regime-gallery", "resonance-sweep", "bethe-check", "cascade-1vN", "cascade-2v2"]
PAIR_EXPERIMENTS = ("fig2-fidelity", "regime-gallery", "resonance-sweep")

FloatGrid = Union[float, list[float]]
IntGrid = Union[int, list[int]]


class ConfigError(ValueError):
    """Invalid configuration; ``errors`` holds (field path, message) pairs."""

    def __init__(self, errors: list[tuple[str, str]]):
        self.errors = errors
        super().__init__("; ".join(f"{path}: {msg}" for path, msg in errors))


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True, allow_inf_nan=False)


class TimeGrid(_Strict):
    start: float = 0.0
    stop: float
    num: int = Field(ge=1, le=100_000)

    @model_validator(mode="after")
    def _ordered(self) -> "TimeGrid":
        if self.start < 0 or self.stop < self.start:
            raise ValueError("need 0 <= start <= stop")
        return self

    def values(self) -> list[float]:
        if self.num == 1:
            return [self.start]
        step = (self.stop - self.start) / (self.num - 1)
        return [self.start + i * step for i in range(self.num)]


class Packets(_Strict):
    """Centers of the left (moving right, momentum +k) and right (momentum -k) trains."""

    left_centers: list[float] = Field(min_length=1)
    right_centers: list[float] = Field(min_length=1)
    k: float = Field(gt=0, lt=math.pi)

    @model_validator(mode="after")
    def _separated(self) -> "Packets":
        if max(self.left_centers) >= min(self.right_centers):
            raise ValueError("left train must lie entirely left of the right train")
        return self


class BetheProbe(_Strict):
    k: float = Field(default=math.pi / 3, gt=0, lt=math.pi)
    K: float = Field(default=0.0, gt=-math.pi, lt=math.pi)
    length: int = Field(default=600, ge=50, le=100_000)


class ExperimentConfig(_Strict):
    schema_version: Literal[1]
    experiment: Experiment
    L: Optional[int] = Field(default=None, ge=2, le=400)
    kappa: float = Field(default=1.0, gt=0)
    U: Optional[FloatGrid] = None
    U_over_vr: Optional[FloatGrid] = None
    alpha: Optional[FloatGrid] = None
    N: Optional[IntGrid] = None
    theta: Optional[FloatGrid] = None
    packets: Optional[Packets] = None
    times: Optional[TimeGrid] = None
    bethe: Optional[BetheProbe] = None
    left_spins: Optional[str] = Field(default=None, pattern="^[ud]{1,8}$")
    right_spins: Optional[str] = Field(default=None, pattern="^[ud]{1,8}$")
    lattice_check: bool = False
    tol: float = Field(default=1e-10, ge=1e-14, le=1e-4)
    sweep_cap: int = Field(default=DEFAULT_SWEEP_CAP, ge=1)

    @field_validator("U", "U_over_vr", "alpha", "theta", "N")
    @classmethod
    def _non_empty(cls, v):
        if isinstance(v, list) and not v:
            raise ValueError("grid must be non-empty")
        return v

    @field_validator("alpha")
    @classmethod
    def _alpha_positive(cls, v):
        if v is not None and any(a <= 0 for a in _as_list(v)):
            raise ValueError("alpha must be positive")
        return v

    @field_validator("N")
    @classmethod
    def _n_positive(cls, v):
        if v is not None and any(n < 1 or n > 20 for n in _as_list(v)):
            raise ValueError("N must lie in 1..20")
        return v

    @model_validator(mode="after")
    def _consistent(self) -> "ExperimentConfig":
        if self.U is not None and self.U_over_vr is not None:
            raise ValueError("give at most one of U and U_over_vr")
        return self

    def axes(self) -> list[tuple[str, list]]:
        return [(name, _as_list(getattr(self, name))) for name in GRID_FIELDS if getattr(self, name) is not None]

    def n_points(self) -> int:
        return math.prod(len(vals) for _, vals in self.axes())

    def points(self) -> list["ExperimentConfig"]:
        """One scalar config per grid point, in grid order."""
        axes = self.axes()
        if self.n_points() > self.sweep_cap:
            raise ConfigError([("sweep_cap", f"{self.n_points()} grid points exceed the cap of {self.sweep_cap}")])
        names = [n for n, _ in axes]
        return [self.model_copy(update=dict(zip(names, combo))) for combo in itertools.product(*(v for _, v in axes))]

    def grid_labels(self) -> dict[str, object]:
        """Axis values of a scalar (single-point) config."""
        return {name: getattr(self, name) for name in GRID_FIELDS if getattr(self, name) is not None}

    def canonical_json(self) -> str:
        return json.dumps(self.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))

    def digest(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()


def _as_list(v) -> list:
    return list(v) if isinstance(v, list) else [v]


_PAIR_PRESET = dict(
    L=81,
    packets=dict(left_centers=[20.0], right_centers=[62.0], k=math.pi / 2),
)
DEFAULTS: dict[str, dict] = {
    "fig2-fidelity": dict(_PAIR_PRESET, alpha=[0.13, 0.26, 0.33], times=dict(start=0.0, stop=30.0, num=121)),
    "regime-gallery": dict(_PAIR_PRESET, alpha=0.1),
    "resonance-sweep": dict(_PAIR_PRESET, alpha=0.1),
    "bethe-check": dict(U=[0.5, 1.0, 2.0, 4.0], alpha=0.05, bethe={}),
    "cascade-1vN": dict(N=3, theta=math.pi / 2),
    "cascade-2v2": dict(theta=math.pi / 2, left_spins="uu", right_spins="dd"),
}
# defaults that apply only when neither U nor U_over_vr is given
_INTERACTION_DEFAULTS = {
    "fig2-fidelity": dict(U_over_vr=1.0),
    "regime-gallery": dict(U=[0.0, 1e9, 4.0, -4.0]),
    "resonance-sweep": dict(U_over_vr=[round(-4 + 0.1 * i, 10) for i in range(81)]),
}
_LATTICE_CHECK_PRESET = dict(L=60, alpha=0.1, packets=dict(left_centers=[10.0], right_centers=[30.0, 50.0], k=math.pi / 2))


def _apply_defaults(raw: dict) -> dict:
    exp = raw.get("experiment")
    out = dict(raw)
    for key, val in DEFAULTS.get(exp, {}).items():
        out.setdefault(key, val)
    if "U" not in raw and "U_over_vr" not in raw:
        out.update(_INTERACTION_DEFAULTS.get(exp, {}))
    if exp == "cascade-1vN" and raw.get("lattice_check"):
        for key, val in _LATTICE_CHECK_PRESET.items():
            out.setdefault(key, val)
    return out


def _check_experiment_fields(cfg: ExperimentConfig) -> None:
    errs: list[tuple[str, str]] = []

    def forbid(*names):
        for n in names:
            if getattr(cfg, n) not in (None, False):
                errs.append((n, f"not used by experiment {cfg.experiment!r}"))

    if cfg.experiment in PAIR_EXPERIMENTS:
        forbid("N", "theta", "bethe", "left_spins", "right_spins", "lattice_check")
        p = cfg.packets
        if len(p.left_centers) != 1 or len(p.right_centers) != 1:
            errs.append(("packets", "pair experiments take exactly one packet per side"))
        if cfg.experiment != "fig2-fidelity":
            forbid("times")
        elif cfg.times is None:
            errs.append(("times", "required"))
    elif cfg.experiment == "bethe-check":
        forbid("L", "U_over_vr", "N", "theta", "packets", "times", "left_spins", "right_spins", "lattice_check")
        if cfg.U is None:
            errs.append(("U", "required"))
    elif cfg.experiment == "cascade-1vN":
        forbid("U", "U_over_vr", "bethe", "times", "left_spins", "right_spins")
        if cfg.lattice_check:
            p = cfg.packets
            if len(p.left_centers) != 1:
                errs.append(("packets.left_centers", "the lattice check takes one left packet"))
            if cfg.N is not None and _as_list(cfg.N) != [len(p.right_centers)]:
                errs.append(("N", "must equal the number of right packets for the lattice check"))
        else:
            forbid("L", "alpha", "packets")
    elif cfg.experiment == "cascade-2v2":
        forbid("L", "U", "U_over_vr", "alpha", "N", "packets", "times", "bethe", "lattice_check")
        if len(cfg.left_spins) != 2 or len(cfg.right_spins) != 2:
            errs.append(("left_spins/right_spins", "cascade-2v2 takes two spins per side"))
    if errs:
        raise ConfigError(errs)


def parse_config(raw: object) -> ExperimentConfig:
    """Validate a decoded JSON document, filling per-experiment defaults."""
    if not isinstance(raw, dict):
        raise ConfigError([("<root>", "config must be a JSON object")])
    if raw.get("experiment") == "cascade-1vN" and raw.get("lattice_check") and "N" not in raw:
        raw = dict(raw, N=len(((raw.get("packets") or {}).get("right_centers")) or [30.0, 50.0]))
    try:
        cfg = ExperimentConfig.model_validate(_apply_defaults(raw))
    except ValidationError as exc:
        raise ConfigError(_field_errors(exc)) from None
    _check_experiment_fields(cfg)
    return cfg


# union-member tags pydantic inserts into error locations
_UNION_TAGS = {"float", "int", "list[float]", "list[int]"}


def _field_errors(exc: ValidationError) -> list[tuple[str, str]]:
    out: list[tuple[str, str]] = []
    for e in exc.errors():
        path = ".".join(str(p) for p in e["loc"] if p not in _UNION_TAGS) or "<root>"
        if (path, e["msg"]) not in out:
            out.append((path, e["msg"]))
    return out


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError([("<file>", f"cannot read {path}: {exc.strerror}")]) from None
    try:
        raw = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise ConfigError([("<file>", f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}")]) from None
    except ValueError as exc:
        raise ConfigError([("<file>", str(exc))]) from None
    return parse_config(raw)


def _reject_constant(name: str):
    raise ValueError(f"non-finite constant {name} is not allowed")
