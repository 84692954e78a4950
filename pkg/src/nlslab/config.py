"""
Flat experiment configuration files.

One ``section.key = value`` per line, UTF-8, ``#`` starts a comment.
Lists are comma separated.  Unknown keys, duplicate keys and malformed
values are rejected with the offending line number.  Example::

    grid.n = 64
    grid.half_width = 24
    data.recipe = gaussian
    data.amplitude = 0.5
    data.width = 1
    solver.dt = 0.02
    solver.t_end = 4
    report.kind = decay
    output.dir = out/decay
"""

from __future__ import annotations

import dataclasses
import math
import os
from dataclasses import dataclass, field
from typing import Any, Callable

from .grid import Grid
from .littlewood_paley import is_dyadic
from .solver import SolverConfig

__all__ = [
    "ConfigError",
    "GridSpec",
    "DataSpec",
    "SolverSpec",
    "ReportSpec",
    "SweepSpec",
    "ExperimentConfig",
    "parse_config",
    "load_config",
    "REPORT_KINDS",
    "RECIPES",
]

REPORT_KINDS = ("decay", "dispersive", "duhamel", "besov-sums", "property-suite")
RECIPES = ("zero", "gaussian", "radial_bump", "dyadic_superposition")


class ConfigError(ValueError):
    """Malformed or inconsistent experiment configuration."""


@dataclass(frozen=True)
class GridSpec:
    dim: int = 3
    n: int = 32
    half_width: float = 8.0


@dataclass(frozen=True)
class DataSpec:
    recipe: str = "gaussian"
    amplitude: float = 1.0
    width: float = 1.0
    radius: float = 1.0
    center: tuple[float, ...] = ()
    scales: tuple[float, ...] = ()
    weights: tuple[float, ...] = ()
    seed: int = 0
    window: bool = True


@dataclass(frozen=True)
class SolverSpec:
    dt: float = 0.01
    t_end: float = 1.0
    sample_stride: int = 1
    dealias: bool = True
    boundary_threshold: float = 1e-6
    nonlinear: bool = True


@dataclass(frozen=True)
class ReportSpec:
    kind: str = "decay"
    t0: float = 1.0
    times: tuple[float, ...] = (0.25, 0.5, 1.0, 2.0)
    plateau_tol: float = 0.02
    refinement_tol: float = 0.05
    refine_n: int = 0  # 0: pick 3n/2 (or 2n when 3n/2 is not FFT friendly)
    linf_factor: float = 2.0
    dispersive_tol: float = 0.01
    duhamel_tol: float = 1e-3
    strides: tuple[int, ...] = ()  # duhamel refinement strides; () -> 4s, 2s, s
    order_tol: float = 0.5
    p: float = 10 / 3
    q: float = 10 / 3
    snapshots: bool = False
    seed: int = 0


@dataclass(frozen=True)
class SweepSpec:
    dt: tuple[float, ...] = ()
    n: tuple[int, ...] = ()
    amplitude: tuple[float, ...] = ()
    # "lambda" is a keyword; the file key is sweep.lambda
    lam: tuple[float, ...] = ()
    slope_tol: float = 0.3
    scaling_tol: float = 0.05

    def axes(self) -> dict[str, tuple]:
        return {k: v for k, v in (("dt", self.dt), ("n", self.n), ("amplitude", self.amplitude), ("lambda", self.lam)) if v}


@dataclass(frozen=True)
class ExperimentConfig:
    grid: GridSpec = field(default_factory=GridSpec)
    data: DataSpec = field(default_factory=DataSpec)
    solver: SolverSpec = field(default_factory=SolverSpec)
    report: ReportSpec = field(default_factory=ReportSpec)
    sweep: SweepSpec = field(default_factory=SweepSpec)
    output_dir: str = "nlslab-out"
    workers: int = 1

    def with_changes(self, **sections) -> "ExperimentConfig":
        """``cfg.with_changes(solver={"dt": 0.01})`` returns an updated copy."""
        updates = {}
        for name, changes in sections.items():
            updates[name] = dataclasses.replace(getattr(self, name), **changes)
        return dataclasses.replace(self, **updates)


# -- value parsers -------------------------------------------------------------


def _float(s: str) -> float:
    v = float(s)
    if not math.isfinite(v):
        raise ValueError("must be finite")
    return v


def _int(s: str) -> int:
    return int(s)


def _bool(s: str) -> bool:
    low = s.lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise ValueError("expected true or false")


def _list(item: Callable[[str], Any]) -> Callable[[str], tuple]:
    def parse(s: str) -> tuple:
        parts = [p.strip() for p in s.split(",")]
        if not parts or any(p == "" for p in parts):
            raise ValueError("expected a nonempty comma-separated list")
        return tuple(item(p) for p in parts)

    return parse


def _choice(options: tuple[str, ...]) -> Callable[[str], str]:
    def parse(s: str) -> str:
        if s not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return s

    return parse


_SCHEMA: dict[str, tuple[str, str, Callable[[str], Any]]] = {
    "grid.dim": ("grid", "dim", _int),
    "grid.n": ("grid", "n", _int),
    "grid.half_width": ("grid", "half_width", _float),
    "data.recipe": ("data", "recipe", _choice(RECIPES)),
    "data.amplitude": ("data", "amplitude", _float),
    "data.width": ("data", "width", _float),
    "data.radius": ("data", "radius", _float),
    "data.center": ("data", "center", _list(_float)),
    "data.scales": ("data", "scales", _list(_float)),
    "data.weights": ("data", "weights", _list(_float)),
    "data.seed": ("data", "seed", _int),
    "data.window": ("data", "window", _bool),
    "solver.dt": ("solver", "dt", _float),
    "solver.t_end": ("solver", "t_end", _float),
    "solver.sample_stride": ("solver", "sample_stride", _int),
    "solver.dealias": ("solver", "dealias", _bool),
    "solver.boundary_threshold": ("solver", "boundary_threshold", _float),
    "solver.nonlinear": ("solver", "nonlinear", _bool),
    "report.kind": ("report", "kind", _choice(REPORT_KINDS)),
    "report.t0": ("report", "t0", _float),
    "report.times": ("report", "times", _list(_float)),
    "report.plateau_tol": ("report", "plateau_tol", _float),
    "report.refinement_tol": ("report", "refinement_tol", _float),
    "report.refine_n": ("report", "refine_n", _int),
    "report.linf_factor": ("report", "linf_factor", _float),
    "report.dispersive_tol": ("report", "dispersive_tol", _float),
    "report.duhamel_tol": ("report", "duhamel_tol", _float),
    "report.strides": ("report", "strides", _list(_int)),
    "report.order_tol": ("report", "order_tol", _float),
    "report.p": ("report", "p", _float),
    "report.q": ("report", "q", _float),
    "report.snapshots": ("report", "snapshots", _bool),
    "report.seed": ("report", "seed", _int),
    "sweep.dt": ("sweep", "dt", _list(_float)),
    "sweep.n": ("sweep", "n", _list(_int)),
    "sweep.amplitude": ("sweep", "amplitude", _list(_float)),
    "sweep.lambda": ("sweep", "lam", _list(_float)),
    "sweep.slope_tol": ("sweep", "slope_tol", _float),
    "sweep.scaling_tol": ("sweep", "scaling_tol", _float),
    "output.dir": ("", "output_dir", str),
    "run.workers": ("", "workers", _int),
}


def parse_config(text: str, source: str = "<config>") -> ExperimentConfig:
    sections: dict[str, dict[str, Any]] = {s: {} for s in ("grid", "data", "solver", "report", "sweep", "")}
    seen: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"{source}:{lineno}"
        if "=" not in line:
            raise ConfigError(f"{where}: expected 'section.key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _SCHEMA:
            raise ConfigError(f"{where}: unknown key '{key}'")
        if key in seen:
            raise ConfigError(f"{where}: duplicate key '{key}' (first set on line {seen[key]})")
        seen[key] = lineno
        section, name, parse = _SCHEMA[key]
        try:
            sections[section][name] = parse(value)
        except ValueError as exc:
            raise ConfigError(f"{where}: invalid value for {key}: {exc}") from None
    top = sections.pop("")
    try:
        cfg = ExperimentConfig(
            grid=GridSpec(**sections["grid"]),
            data=DataSpec(**sections["data"]),
            solver=SolverSpec(**sections["solver"]),
            report=ReportSpec(**sections["report"]),
            sweep=SweepSpec(**sections["sweep"]),
            **top,
        )
    except TypeError as exc:  # pragma: no cover - schema and dataclasses agree
        raise ConfigError(f"{source}: {exc}") from None
    validate(cfg, source, seen)
    return cfg


def _line(seen: dict[str, int], key: str) -> str:
    return f":{seen[key]}" if key in seen else ""


def validate(cfg: ExperimentConfig, source: str = "<config>", seen: dict[str, int] | None = None) -> None:
    """Cross-field checks; raises ConfigError naming the field."""
    seen = seen or {}

    def fail(key: str, msg: str):
        raise ConfigError(f"{source}{_line(seen, key)}: {key}: {msg}")

    try:
        Grid(cfg.grid.dim, cfg.grid.n, cfg.grid.half_width)
    except ValueError as exc:
        fail("grid.n" if "n must" in str(exc) else "grid.half_width" if "half_width" in str(exc) else "grid.dim", str(exc))
    s = cfg.solver
    try:
        SolverConfig(s.dt, s.t_end, s.sample_stride, s.dealias, s.boundary_threshold, s.nonlinear)
    except ValueError as exc:
        msg = str(exc)
        key = (
            "solver.sample_stride" if "sample_stride" in msg
            else "solver.boundary_threshold" if "boundary_threshold" in msg
            else "solver.dt"
        )
        fail(key, msg)
    d = cfg.data
    if d.recipe == "dyadic_superposition":
        if not d.scales:
            fail("data.scales", "dyadic_superposition needs data.scales")
        if len(d.scales) != len(d.weights):
            fail("data.weights", "needs one weight per scale")
    if d.center and len(d.center) != cfg.grid.dim:
        fail("data.center", f"needs {cfg.grid.dim} coordinates")
    if cfg.workers < 1:
        fail("run.workers", "must be >= 1")
    if cfg.report.t0 <= 0:
        fail("report.t0", "must be positive")
    if any(t <= 0 for t in cfg.report.times):
        fail("report.times", "times must be positive")
    if any(k < 1 for k in cfg.report.strides):
        fail("report.strides", "strides must be >= 1")
    for lam in cfg.sweep.lam:
        if not is_dyadic(lam):
            fail("sweep.lambda", f"{lam} is not a power of two")
    for n in cfg.sweep.n:
        try:
            Grid(cfg.grid.dim, n, cfg.grid.half_width)
        except ValueError as exc:
            fail("sweep.n", str(exc))
    for dt in cfg.sweep.dt:
        if not 0 < dt <= s.t_end:
            fail("sweep.dt", f"dt = {dt} must lie in (0, t_end]")
    if any(a < 0 for a in cfg.sweep.amplitude):
        fail("sweep.amplitude", "amplitudes must be nonnegative")


def load_config(path: str | os.PathLike) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except UnicodeDecodeError as exc:
        raise ConfigError(f"{path}: not valid UTF-8 ({exc.reason})") from None
    return parse_config(text, str(path))
