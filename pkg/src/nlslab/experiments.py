"""
Experiment pipelines behind the command line: decay verdicts, dispersive
and Duhamel reports, Besov-Strichartz sums, the property suite and sweeps.

Every pipeline returns a plain result object whose ``status`` is one of
``"pass"``, ``"fail"`` or ``"inconclusive"``; :func:`run` writes the files
and maps the status onto the exit-code contract (0 pass or inconclusive,
2 property failure, 1 operational error).
"""

from __future__ import annotations

import itertools
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any

import numpy as np

from .config import ExperimentConfig
from .duhamel import duhamel_residual, duhamel_split, duhamel_table, f1_decay_curve
from .grid import Field, Grid, _is_fft_friendly, fftn, ifftn
from .history import History
from .initial_data import dyadic_superposition, gaussian, radial_bump, rescale
from .io import write_csv, write_snapshot
from .norms import besov_strichartz_sum, decay_functional, is_admissible, lebesgue_norm
from .propagator import kernel_constant, linear_symbol, verify_dispersive
from .solver import SolverConfig, solve
from .suite import run_suite

__all__ = [
    "build_grid",
    "build_initial_data",
    "solver_config",
    "refined_n",
    "plateau_growth",
    "DecayRun",
    "DecayVerdict",
    "decay_experiment",
    "dispersive_experiment",
    "DuhamelVerdict",
    "duhamel_experiment",
    "suite_experiment",
    "sweep",
    "run",
    "worker_count",
]

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"


def _plain(obj, skip: tuple[str, ...]) -> dict:
    """Shallow field dict of a result dataclass, without the heavy members."""
    return {f.name: getattr(obj, f.name) for f in fields(obj) if f.name not in skip}


# -- building blocks -----------------------------------------------------------


def build_grid(cfg: ExperimentConfig, n: int | None = None) -> Grid:
    return Grid(cfg.grid.dim, cfg.grid.n if n is None else n, cfg.grid.half_width)


def build_initial_data(cfg: ExperimentConfig, grid: Grid) -> Field:
    d = cfg.data
    thr = cfg.solver.boundary_threshold
    center = d.center or None
    if d.recipe == "zero" or d.amplitude == 0 and d.recipe != "dyadic_superposition":
        return Field.zeros(grid)
    if d.recipe == "gaussian":
        return gaussian(grid, d.amplitude, d.width, center, boundary_threshold=thr)
    if d.recipe == "radial_bump":
        return radial_bump(grid, d.amplitude, d.radius, center, boundary_threshold=thr)
    return dyadic_superposition(
        grid, list(d.scales), list(d.weights), d.seed, window=d.window, boundary_threshold=thr
    )


def solver_config(
    cfg: ExperimentConfig, dt: float | None = None, nonlinear: bool | None = None,
    sample_stride: int | None = None,
) -> SolverConfig:
    s = cfg.solver
    return SolverConfig(
        dt=s.dt if dt is None else dt,
        t_end=s.t_end,
        sample_stride=s.sample_stride if sample_stride is None else sample_stride,
        dealias=s.dealias,
        boundary_threshold=s.boundary_threshold,
        nonlinear=s.nonlinear if nonlinear is None else nonlinear,
    )


def refined_n(cfg: ExperimentConfig) -> int:
    """The refinement resolution: ``report.refine_n`` or the next 3n/2 (else 2n)."""
    if cfg.report.refine_n:
        return cfg.report.refine_n
    n = cfg.grid.n
    m = 3 * n // 2
    return m if (3 * n) % 2 == 0 and _is_fft_friendly(m) else 2 * n


def plateau_growth(times: np.ndarray, A: np.ndarray, t0: float) -> float:
    """
    Relative growth of the non-decreasing series A over the final third of
    [t0, T], T the last time: (A(T) - A(t1)) / A(T), t1 = t0 + 2 (T - t0) / 3.
    """
    if times.size == 0 or times[-1] <= t0:
        return math.nan
    T = times[-1]
    t1 = t0 + 2.0 * (T - t0) / 3.0
    i1 = int(np.searchsorted(times, t1, side="right")) - 1
    aT = A[-1]
    if aT == 0:
        return 0.0
    return float((aT - A[max(i1, 0)]) / aT)


def _sup_between(times: np.ndarray, values: np.ndarray, lo: float, hi: float) -> float:
    sel = (times >= lo) & (times <= hi * (1 + 1e-12))
    return float(values[sel].max()) if sel.any() else math.nan


def _rel_delta(a: float, b: float) -> float:
    if a == b:
        return 0.0
    return abs(a - b) / abs(a) if a else math.inf


# -- decay ---------------------------------------------------------------------


@dataclass
class DecayRun:
    """One solver run reduced to the decay observables."""

    n: int
    dt: float
    l1: float
    horizon: float
    stop_reason: str | None
    times: np.ndarray  # step times up to the horizon (t > 0)
    linf: np.ndarray
    ratio: np.ndarray  # t^(d/2) ||u||_inf / ||u0||_1
    A: np.ndarray  # running max of ratio
    mass_drift: float
    history: History | None = field(default=None, repr=False)

    def sup(self, t0: float, t_max: float | None = None) -> float:
        return _sup_between(self.times, self.ratio, t0, self.horizon if t_max is None else t_max)


def decay_run(
    cfg: ExperimentConfig, n: int | None = None, dt: float | None = None,
    nonlinear: bool | None = None, dense: bool = False,
) -> DecayRun:
    """
    Solve once and reduce to decay observables.  ``dense=True`` keeps
    slices at the configured sampling interval (Besov sums need them);
    otherwise only the endpoints are stored.
    """
    grid = build_grid(cfg, n)
    u0 = build_initial_data(cfg, grid)
    l1 = lebesgue_norm(u0, 1)
    dt = cfg.solver.dt if dt is None else dt
    stride = cfg.solver.sample_stride
    if dense:
        stride = max(1, int(round(stride * cfg.solver.dt / dt)))
    else:
        stride = max(1, int(round(cfg.solver.t_end / dt)))
    h = solve(u0, solver_config(cfg, dt=dt, nonlinear=nonlinear, sample_stride=stride))
    A = decay_functional(h, "steps")
    d = grid.dim
    keep = (h.step_times > 0) & (h.step_times <= h.horizon)
    t = h.step_times[keep]
    linf = h.linf[keep]
    ratio = t ** (d / 2) * linf / l1 if l1 > 0 else np.zeros_like(t)
    m0 = h.mass[0]
    drift = float(np.max(np.abs(h.mass - m0)) / m0) if m0 > 0 else 0.0
    return DecayRun(
        n=grid.n, dt=dt, l1=l1, horizon=h.horizon, stop_reason=h.stop_reason,
        times=t, linf=linf, ratio=ratio,
        A=A.values / l1 if l1 > 0 else np.zeros_like(A.values),
        mass_drift=drift, history=h,
    )


def free_linf(cfg: ExperimentConfig, times: np.ndarray, n: int | None = None) -> np.ndarray:
    """||e^{it Laplacian} u0||_inf at the given times, by the exact lattice flow."""
    grid = build_grid(cfg, n)
    u0h = fftn(build_initial_data(cfg, grid).values)
    return np.array([np.abs(ifftn(linear_symbol(grid, t) * u0h)).max() for t in times])


@dataclass
class DecayVerdict:
    status: str
    checks: dict[str, bool]
    t0: float
    kernel_constant: float
    sup_ratio: float
    sup_ratio_refined: float
    sup_ratio_dt_half: float
    refinement_delta: float
    dt_delta: float
    horizon: float
    horizons: dict[str, float]
    plateau_growth: float
    plateau_growth_refined: float
    linf_factor: float
    besov: dict[str, Any] | None = None
    notes: list[str] = field(default_factory=list)
    runs: dict[str, DecayRun] = field(default_factory=dict, repr=False)
    free: np.ndarray | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        out = _plain(self, ("runs", "free"))
        out["runs"] = {
            k: {"n": r.n, "dt": r.dt, "l1": r.l1, "horizon": r.horizon,
                "stop_reason": r.stop_reason, "mass_drift": r.mass_drift}
            for k, r in self.runs.items()
        }
        return out


def _vacuous_decay(cfg: ExperimentConfig, note: str, status: str = PASS) -> DecayVerdict:
    return DecayVerdict(
        status=status, checks={}, t0=cfg.report.t0, kernel_constant=kernel_constant(cfg.grid.dim),
        sup_ratio=0.0, sup_ratio_refined=0.0, sup_ratio_dt_half=0.0,
        refinement_delta=0.0, dt_delta=0.0, horizon=0.0, horizons={},
        plateau_growth=0.0, plateau_growth_refined=0.0, linf_factor=1.0, notes=[note],
    )


def decay_experiment(cfg: ExperimentConfig, besov: bool = False) -> DecayVerdict:
    """
    Decay verdict: base run, one grid refinement, one dt halving, and the free flow.

    PASS iff the sup ratio over [t0, horizon] is finite, A(t)/||u0||_1 grows
    by less than ``report.plateau_tol`` over the final third of [t0, horizon]
    on both resolutions, the sup moves by less than ``report.refinement_tol``
    under refinement and under dt halving (compared over the common horizon),
    and ||u||_inf stays within ``report.linf_factor`` of the free flow.
    With ``besov=True`` the Besov-Strichartz sums of the base and refined
    runs are added (and must agree within ``report.refinement_tol``).
    """
    rep = cfg.report
    t0 = rep.t0
    grid = build_grid(cfg)
    if lebesgue_norm(build_initial_data(cfg, grid), 1) == 0:
        v = _vacuous_decay(cfg, "zero data: all ratios vanish")
        if besov:
            v.besov = {"status": PASS, "sum": 0.0, "sum_refined": 0.0, "delta": 0.0,
                       "p": rep.p, "q": rep.q, "gate": _gate()}
        return v

    base = decay_run(cfg, dense=besov)
    if base.horizon < t0:
        return _vacuous_decay(
            cfg, f"wrap contamination before t0 = {t0} (horizon {base.horizon:g})", INCONCLUSIVE
        )
    n_ref = refined_n(cfg)
    fine = decay_run(cfg, n=n_ref, dense=besov)
    half = decay_run(cfg, dt=cfg.solver.dt / 2)
    T = min(base.horizon, fine.horizon, half.horizon)
    if T < t0:
        return _vacuous_decay(cfg, f"refined runs lose containment before t0 = {t0}", INCONCLUSIVE)

    sup = base.sup(t0, T)
    sup_f = fine.sup(t0, T)
    sup_h = half.sup(t0, T)
    sel = base.times > 0
    free = free_linf(cfg, base.times[sel])
    with np.errstate(divide="ignore", invalid="ignore"):
        q = base.linf[sel] / free
    lf = float(np.max(np.maximum(q, 1 / q))) if q.size else 1.0

    growth = plateau_growth(base.times, base.A, t0)
    growth_f = plateau_growth(fine.times, fine.A, t0)
    checks = {
        "sup_finite": bool(math.isfinite(sup)),
        "plateau": bool(growth < rep.plateau_tol),
        "plateau_refined": bool(growth_f < rep.plateau_tol),
        "grid_refinement": bool(_rel_delta(sup, sup_f) < rep.refinement_tol),
        "dt_halving": bool(_rel_delta(sup, sup_h) < rep.refinement_tol),
        "linf_vs_free": bool(lf <= rep.linf_factor),
    }
    v = DecayVerdict(
        status=PASS if all(checks.values()) else FAIL,
        checks=checks, t0=t0, kernel_constant=kernel_constant(grid.dim),
        sup_ratio=sup, sup_ratio_refined=sup_f, sup_ratio_dt_half=sup_h,
        refinement_delta=_rel_delta(sup, sup_f), dt_delta=_rel_delta(sup, sup_h),
        horizon=T,
        horizons={"base": base.horizon, "refined": fine.horizon, "dt_half": half.horizon},
        plateau_growth=growth, plateau_growth_refined=growth_f, linf_factor=lf,
        runs={"base": base, "refined": fine, "dt_half": half}, free=free,
    )
    if besov:
        v.besov = besov_sums(base.history, fine.history, T, rep.p, rep.q, rep.refinement_tol)
    return v


def _gate() -> dict[str, bool]:
    return {
        "accepts_10/3_10/3": is_admissible(10 / 3, 10 / 3),
        "accepts_5_30/11": is_admissible(5, 30 / 11),
        "rejects_2_2": not is_admissible(2, 2),
    }


def besov_sums(
    base: History, fine: History, horizon: float, p: float, q: float, tol: float
) -> dict[str, Any]:
    """Besov-Strichartz sums over [0, horizon] on two resolutions."""
    s = besov_strichartz_sum(base.until(horizon), p, q)
    s_f = besov_strichartz_sum(fine.until(horizon), p, q)
    gate = _gate()
    delta = _rel_delta(s, s_f)
    ok = math.isfinite(s) and math.isfinite(s_f) and delta < tol and all(gate.values())
    return {"status": PASS if ok else FAIL, "sum": s, "sum_refined": s_f, "delta": delta,
            "p": p, "q": q, "horizon": horizon, "gate": gate}


# -- dispersive ----------------------------------------------------------------


def dispersive_experiment(cfg: ExperimentConfig):
    grid = build_grid(cfg)
    u0 = build_initial_data(cfg, grid)
    r = verify_dispersive(
        u0, cfg.report.times, cfg.solver.boundary_threshold, cfg.report.dispersive_tol
    )
    return r


# -- Duhamel -------------------------------------------------------------------


@dataclass
class DuhamelVerdict:
    status: str
    checks: dict[str, bool]
    default_stride: int
    max_residual: float
    strides: list[int]
    compare_time: float
    residuals: list[float]
    order_factors: list[float]
    f1_growth: float | None
    horizon: float
    table: Any = field(default=None, repr=False)
    f1_curve: Any = field(default=None, repr=False)
    history: History | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return _plain(self, ("table", "f1_curve", "history"))


def _subsample(h: History, every: int) -> History:
    idx = list(range(0, len(h), every))
    return History(grid=h.grid, times=h.times[idx], slices=[h.slices[i] for i in idx])


def duhamel_experiment(cfg: ExperimentConfig) -> DuhamelVerdict:
    """
    Duhamel consistency on the configured run.

    The run is sampled at the finest requested stride.  The residual table
    uses the default stride (``solver.sample_stride``); refinement uses
    ``report.strides`` (default 4s, 2s, s) and compares residuals at the
    last time sampled by every stride.  Successive residual ratios are
    normalized to a halving of the sampling interval and must lie within
    4 (1 +- report.order_tol).
    """
    rep = cfg.report
    s = cfg.solver.sample_stride
    strides = sorted(rep.strides or (4 * s, 2 * s, s), reverse=True)
    finest = math.gcd(*strides, s)
    grid = build_grid(cfg)
    u0 = build_initial_data(cfg, grid)
    raw = solve(u0, solver_config(cfg, sample_stride=finest))
    h = raw
    dt = cfg.solver.dt
    # keep only samples on the finest stride grid (drops an off-grid final sample)
    on_grid = [i for i, t in enumerate(h.times) if abs(t / (finest * dt) - round(t / (finest * dt))) < 1e-6]
    h = History(grid=grid, times=h.times[on_grid], slices=[h.slices[i] for i in on_grid],
                horizon=h.horizon)
    if len(h) < 2:
        raise ValueError("run too short for Duhamel quadrature")

    default = _subsample(h, s // finest)
    table = duhamel_table(default, cfg.solver.dealias)
    max_res = float(np.nanmax(table.residual))

    step = max(strides) // finest
    last = (len(h) - 1) // step * step
    compare_time = float(h.times[last])
    residuals = []
    for st in strides:
        sub = _subsample(h, st // finest)
        j = sub.index_of(compare_time)
        residuals.append(float(duhamel_residual(sub, cfg.solver.dealias)[j]) if j > 0 else math.nan)
    factors = []
    for (a, ra), (b, rb) in zip(zip(strides, residuals), zip(strides[1:], residuals[1:])):
        factors.append((ra / rb) ** (math.log(2) / math.log(a / b)) if rb > 0 else math.inf)

    ft, fv = f1_decay_curve(default, cfg.solver.dealias)
    f1_growth = None
    if ft.size >= 3 and ft[-1] > rep.t0:
        f1_growth = plateau_growth(ft[ft >= rep.t0], np.maximum.accumulate(fv[ft >= rep.t0]), rep.t0)

    checks = {
        "residual": bool(max_res < rep.duhamel_tol),
        "order_2": bool(
            compare_time > 0
            and all(abs(f - 4.0) <= 4.0 * rep.order_tol for f in factors)
        ),
    }
    return DuhamelVerdict(
        status=PASS if all(checks.values()) else FAIL, checks=checks, default_stride=s,
        max_residual=max_res, strides=list(strides), compare_time=compare_time,
        residuals=residuals, order_factors=factors, f1_growth=f1_growth, horizon=h.horizon,
        table=table, f1_curve=(ft, fv), history=raw,
    )


# -- suite ---------------------------------------------------------------------


def suite_experiment(cfg: ExperimentConfig | None = None):
    if cfg is None:
        return run_suite()
    return run_suite(cfg.grid.n, cfg.grid.half_width, cfg.report.seed)


# -- sweeps --------------------------------------------------------------------


def worker_count(cfg: ExperimentConfig) -> int:
    env = os.environ.get("NLSLAB_WORKERS")
    if env:
        try:
            w = int(env)
        except ValueError:
            raise ValueError(f"NLSLAB_WORKERS must be an integer, got {env!r}") from None
        if w < 1:
            raise ValueError("NLSLAB_WORKERS must be >= 1")
        return w
    return cfg.workers


_AXIS_DEFAULTS = ("dt", "n", "amplitude", "lambda")


def _row_config(cfg: ExperimentConfig, point: dict[str, float]) -> tuple[ExperimentConfig, float]:
    """The config of one sweep point plus its lambda (applied by the worker)."""
    grid, data, solver = {}, {}, {}
    if "n" in point:
        grid["n"] = int(point["n"])
    if "amplitude" in point:
        data["amplitude"] = point["amplitude"]
    if "dt" in point:
        solver["dt"] = point["dt"]
    return cfg.with_changes(grid=grid, data=data, solver=solver), float(point.get("lambda", 1.0))


def _sweep_row(args) -> dict[str, Any]:
    cfg, point = args
    row: dict[str, Any] = {k: point.get(k, math.nan) for k in _AXIS_DEFAULTS}
    try:
        rc, lam = _row_config(cfg, point)
        grid = build_grid(rc)
        u0 = build_initial_data(rc, grid)
        s = rc.solver
        scfg = SolverConfig(s.dt, s.t_end, max(1, int(round(s.t_end / s.dt))), s.dealias,
                            s.boundary_threshold, s.nonlinear)
        if lam != 1:
            u0 = rescale(u0, lam)
            scfg = SolverConfig(s.dt / lam**2, s.t_end / lam**2, scfg.sample_stride, s.dealias,
                                s.boundary_threshold, s.nonlinear)
        h = solve(u0, scfg)
        d = u0.grid.dim
        l1 = lebesgue_norm(u0, 1)
        t0 = rc.report.t0 / lam**2
        A = decay_functional(h, "steps")
        keep = (h.step_times >= t0) & (h.step_times <= h.horizon)
        ratio = h.step_times[keep] ** (d / 2) * h.linf[keep] / l1 if l1 > 0 else np.zeros(keep.sum())
        split = duhamel_split(h)
        final = h.slices[-1]
        row.update(
            status="ok" if not h.stopped_early else "stopped",
            horizon=h.horizon * lam**2,
            final_time=float(h.times[-1]) * lam**2,
            sup_ratio=float(ratio.max()) if ratio.size else math.nan,
            plateau_growth=plateau_growth(A.times, A.values, t0) if l1 > 0 else 0.0,
            norm_unl=lebesgue_norm(split.u_nl[-1], 2),
            mass_drift=float(np.max(np.abs(h.mass / h.mass[0] - 1))) if h.mass[0] > 0 else 0.0,
            _final=final.values if lam == 1 else None,
            _complete=not h.stopped_early,
        )
    except Exception as exc:  # recorded per row, reflected in the exit code
        row.update(status="error", error=f"{type(exc).__name__}: {exc}")
    return row


def _map(func, items, workers: int):
    if workers <= 1 or len(items) <= 1:
        return [func(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(func, items))


def _dt_analysis(rows, ref_rows, tol):
    out = []
    groups: dict[tuple, list] = {}
    for r in rows + ref_rows:
        key = (r["n"], r["amplitude"], r["lambda"])
        groups.setdefault(key, []).append(r)
    for key, grp in groups.items():
        grp = sorted(grp, key=lambda r: -r["dt"])
        if len(grp) < 3 or any(not r.get("_complete") or r.get("_final") is None for r in grp):
            out.append({"axis": "dt", "group": list(key), "status": INCONCLUSIVE,
                        "note": "needs three completed runs on the base box"})
            continue
        diffs = [float(np.linalg.norm(a["_final"] - b["_final"])) for a, b in zip(grp, grp[1:])]
        factors = []
        for (a, b, c), (d1, d2) in zip(zip(grp, grp[1:], grp[2:]), zip(diffs, diffs[1:])):
            # normalize to halving: diffs scale like dt^2
            r_ab = a["dt"] / b["dt"]
            factors.append((d1 / d2) ** (math.log(2) / math.log(r_ab)) if d2 > 0 else math.inf)
        ok = all(abs(f - 4.0) <= 4.0 * tol for f in factors)
        out.append({"axis": "dt", "group": list(key), "dts": [r["dt"] for r in grp],
                    "differences": diffs, "factors": factors, "status": PASS if ok else FAIL})
    return out


def _amplitude_analysis(rows, tol):
    out = []
    groups: dict[tuple, list] = {}
    for r in rows:
        groups.setdefault((r["dt"], r["n"], r["lambda"]), []).append(r)
    for key, grp in groups.items():
        grp = [r for r in grp if r.get("status") != "error" and r["amplitude"] > 0]
        if len(grp) < 2:
            continue
        a = np.log([r["amplitude"] for r in grp])
        y = np.log([max(r["norm_unl"], 1e-300) for r in grp])
        slope = float(np.polyfit(a, y, 1)[0])
        out.append({"axis": "amplitude", "group": list(key), "slope": slope,
                    "status": PASS if abs(slope - 3.0) <= tol else FAIL})
    return out


def _lambda_analysis(rows, tol):
    out = []
    groups: dict[tuple, list] = {}
    for r in rows:
        groups.setdefault((r["dt"], r["n"], r["amplitude"]), []).append(r)
    for key, grp in groups.items():
        grp = [r for r in grp if r.get("status") != "error"]
        if len(grp) < 2:
            continue
        sups = [r["sup_ratio"] for r in grp]
        if not all(math.isfinite(s) for s in sups):
            out.append({"axis": "lambda", "group": list(key), "status": INCONCLUSIVE,
                        "note": "sup ratio undefined (horizon before t0)"})
            continue
        spread = max(sups) / min(sups) - 1 if min(sups) > 0 else 0.0
        out.append({"axis": "lambda", "group": list(key), "lambdas": [r["lambda"] for r in grp],
                    "sup_ratios": sups, "spread": spread,
                    "status": PASS if spread < tol else FAIL})
    return out


def sweep(cfg: ExperimentConfig, workers: int | None = None) -> dict[str, Any]:
    """
    One row per point of the Cartesian product of the sweep axes, plus
    per-axis analyses:

    * dt: a reference run at half the smallest dt is added; successive
      terminal-state differences must shrink by 4 (1 +- report.order_tol)
      per halving;
    * amplitude: the log-log slope of ||u_nl(t_end)||_2 must be 3 +- sweep.slope_tol;
    * lambda: decay sup ratios (dimensionless, hence scale invariant)
      must agree within sweep.scaling_tol.
    """
    axes = cfg.sweep.axes()
    if not axes:
        raise ValueError("sweep needs at least one nonempty axis (sweep.dt, sweep.n, ...)")
    names = list(axes)
    points = [dict(zip(names, combo)) for combo in itertools.product(*axes.values())]
    full = [{**{"dt": cfg.solver.dt, "n": cfg.grid.n, "amplitude": cfg.data.amplitude,
                "lambda": 1.0}, **p} for p in points]
    ref_points = []
    if "dt" in axes:
        finest = min(axes["dt"])
        seen = set()
        for p in full:
            key = (p["n"], p["amplitude"], p["lambda"])
            if key not in seen:
                seen.add(key)
                ref_points.append({**p, "dt": finest / 2})
    w = worker_count(cfg) if workers is None else workers
    results = _map(_sweep_row, [(cfg, p) for p in full + ref_points], w)
    rows, ref_rows = results[: len(full)], results[len(full):]

    analyses = []
    if "dt" in axes:
        analyses += _dt_analysis(rows, ref_rows, cfg.report.order_tol)
    if "amplitude" in axes:
        analyses += _amplitude_analysis(rows, cfg.sweep.slope_tol)
    if "lambda" in axes:
        analyses += _lambda_analysis(rows, cfg.sweep.scaling_tol)

    if any(r["status"] == "error" for r in results):
        status = "error"
    elif any(a["status"] == FAIL for a in analyses):
        status = FAIL
    else:
        status = PASS
    for r in results:
        r.pop("_final", None)
        r.pop("_complete", None)
    return {"status": status, "axes": {k: list(v) for k, v in axes.items()},
            "rows": rows, "reference_rows": ref_rows, "analyses": analyses}


# -- driver --------------------------------------------------------------------


def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to None."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def write_json(path: Path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_clean(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _config_dict(cfg: ExperimentConfig) -> dict:
    return asdict(cfg)


def _write_decay(out: Path, v: DecayVerdict) -> None:
    base = v.runs.get("base")
    if base is None:
        return
    _write_diagnostics(out, base.history)
    write_csv(
        out / "decay.csv",
        ("t", "linf", "ratio", "A", "free_linf"),
        zip(base.times, base.linf, base.ratio, base.A, v.free if v.free is not None else base.linf),
    )
    write_csv(out / "decay_functional.csv", ("t", "value"), zip(base.times, base.A * base.l1))


def _write_diagnostics(out: Path, h: History) -> None:
    write_csv(out / "diagnostics.csv", ("step", "t", "mass", "linf", "boundary_fraction"),
              h.diagnostics_rows())


def run(cfg: ExperimentConfig, out_dir: str | os.PathLike | None = None) -> tuple[int, dict]:
    """
    Execute the configured report, write ``report.json`` plus CSVs, and
    return ``(exit_code, report)``.  Operational errors propagate.
    """
    out = Path(out_dir if out_dir is not None else cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    kind = cfg.report.kind
    report: dict[str, Any] = {"kind": kind, "config": _config_dict(cfg)}

    if kind in ("decay", "besov-sums"):
        v = decay_experiment(cfg, besov=kind == "besov-sums")
        _write_decay(out, v)
        if kind == "decay":
            status = v.status
        else:
            status = v.besov["status"] if v.besov else v.status
            if v.status == INCONCLUSIVE:
                status = INCONCLUSIVE
        report["verdict"] = v.to_dict()
    elif kind == "dispersive":
        r = dispersive_experiment(cfg)
        r.write_csv(out / "dispersive.csv")
        status = PASS if r.within_bound else FAIL
        report["verdict"] = {
            "status": status, "sup_ratio": r.sup_ratio, "sup_ratio_clean": r.sup_ratio_clean,
            "bound": r.bound, "kernel_constant": kernel_constant(r.dim),
            "flagged_times": [float(t) for t, f in zip(r.times, r.flagged) if f],
            "l1_norm": r.l1_norm,
        }
    elif kind == "duhamel":
        v = duhamel_experiment(cfg)
        v.table.write_csv(out / "duhamel.csv")
        ft, fv = v.f1_curve
        write_csv(out / "f1_decay.csv", ("t", "value"), zip(ft, fv))
        _write_diagnostics(out, v.history)
        status = v.status
        report["verdict"] = v.to_dict()
        if cfg.report.snapshots:
            write_snapshot(out / "final.nlsf", v.history.slices[-1])
    else:
        rows = suite_experiment(cfg)
        write_csv(out / "suite.csv", ("invariant", "value", "relation", "threshold", "passed"),
                  (r.as_tuple() for r in rows))
        status = PASS if all(r.passed for r in rows) else FAIL
        report["verdict"] = {"status": status, "rows": len(rows),
                             "failed": [r.invariant for r in rows if not r.passed]}

    if cfg.report.snapshots and kind != "property-suite":
        write_snapshot(out / "initial.nlsf", build_initial_data(cfg, build_grid(cfg)))
    report["status"] = status
    write_json(out / "report.json", report)
    return (2 if status == FAIL else 0), report


def run_sweep(cfg: ExperimentConfig, out_dir: str | os.PathLike | None = None,
              workers: int | None = None) -> tuple[int, dict]:
    out = Path(out_dir if out_dir is not None else cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    res = sweep(cfg, workers)
    cols = ("dt", "n", "amplitude", "lambda", "status", "horizon", "final_time", "sup_ratio",
            "plateau_growth", "norm_unl", "mass_drift")
    write_csv(out / "sweep.csv", cols,
              ([r.get(c, "") for c in cols] for r in res["rows"] + res["reference_rows"]))
    report = {"kind": "sweep", "config": _config_dict(cfg), **res}
    write_json(out / "report.json", report)
    code = {"error": 1, FAIL: 2}.get(res["status"], 0)
    return code, report
