"""
Lebesgue, Sobolev, Besov and spacetime norms, plus the decay functional.

All spatial integrals use the rectangle rule with weight ``dx^dim``; time
integrals use the trapezoidal rule on the sampled times.  Homogeneous
norms drop the zero mode (the torus analogue of quotienting constants).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid

from .grid import Field, fftn, forward_transform, ifftn
from .history import History
from .littlewood_paley import band_symbol, low_symbol, resolvable_scales
from .io import write_csv

__all__ = [
    "DegenerateHistoryWarning",
    "lebesgue_norm",
    "sobolev_norm",
    "besov_norm",
    "low_residual_norm",
    "band_norms",
    "mixed_norm",
    "is_admissible",
    "besov_strichartz_sum",
    "DecaySeries",
    "decay_functional",
]


class DegenerateHistoryWarning(UserWarning):
    """A time integral was requested over a history with zero duration."""


def _check_exponent(p: float, name: str = "p") -> None:
    if not p >= 1:
        raise ValueError(f"{name} must be >= 1, got {p}")


def _lp(values: np.ndarray, p: float, cell_volume: float) -> float:
    a = np.abs(values)
    if math.isinf(p):
        return float(a.max()) if a.size else 0.0
    if p == 2:
        return float(np.sqrt(np.sum(a * a) * cell_volume))
    if p == 1:
        return float(a.sum() * cell_volume)
    return float((np.sum(a**p) * cell_volume) ** (1.0 / p))


def lebesgue_norm(f: Field, p: float) -> float:
    """Rectangle-rule L^p norm; ``p = inf`` gives max |f|."""
    _check_exponent(p)
    return _lp(f.values, p, f.grid.cell_volume)


def sobolev_norm(f: Field, s: float) -> float:
    """Homogeneous H^s norm, (sum |xi|^(2s) |f_hat|^2 dxi^dim)^(1/2)."""
    if s < 0:
        raise ValueError("s must be non-negative")
    g = f.grid
    fh = forward_transform(f).coeffs
    w = np.abs(fh) ** 2
    if s == 0:
        return float(np.sqrt(w.sum() * g.mode_volume))
    k = g.xi_norm
    nz = k > 0
    return float(np.sqrt(np.sum(k[nz] ** (2 * s) * w[nz]) * g.mode_volume))


def band_norms(f: Field, p: float) -> tuple[list[float], np.ndarray]:
    """``(scales, [||P_N f||_p for N in scales])`` over the resolvable scales."""
    _check_exponent(p)
    g = f.grid
    scales = resolvable_scales(g)
    fh = fftn(f.values)
    vals = np.array([_lp(ifftn(band_symbol(g, N) * fh), p, g.cell_volume) for N in scales])
    return scales, vals


def besov_norm(f: Field, s: float, p: float, q: float) -> float:
    """
    Homogeneous Besov norm (sum_N (N^s ||P_N f||_p)^q)^(1/q) over resolvable N.

    Content below the smallest band (the zero mode) is excluded; see
    :func:`low_residual_norm` to bound its size.
    """
    _check_exponent(p)
    _check_exponent(q, "q")
    scales, vals = band_norms(f, p)
    terms = np.asarray(scales) ** s * vals
    if math.isinf(q):
        return float(terms.max())
    return float(np.sum(terms**q) ** (1.0 / q))


def low_residual_norm(f: Field) -> float:
    """L^2 norm of the sub-band residual left out of Besov sums."""
    g = f.grid
    N0 = resolvable_scales(g)[0]
    r = ifftn(low_symbol(g, N0 / 2) * fftn(f.values))
    return _lp(r, 2, g.cell_volume)


def _time_norm(times: np.ndarray, vals: np.ndarray, p: float) -> float:
    if math.isinf(p):
        return float(np.max(vals))
    if len(times) < 2:
        warnings.warn(
            "single-slice history: time integral over an empty interval is 0",
            DegenerateHistoryWarning,
            stacklevel=3,
        )
        return 0.0
    return float(trapezoid(vals**p, times) ** (1.0 / p))


def mixed_norm(h: History, p: float, q: float) -> float:
    """L^p_t L^q_x over the sampled interval (trapezoidal rule in time)."""
    if len(h) == 0:
        raise ValueError("empty history")
    _check_exponent(p)
    _check_exponent(q, "q")
    vals = np.array([_lp(s.values, q, h.grid.cell_volume) for s in h.slices])
    return _time_norm(h.times, vals, p)


def is_admissible(p: float, q: float, dim: int = 3, tol: float = 1e-12) -> bool:
    """Schrodinger admissibility: 2 <= p, q <= inf and 2/p + dim/q = dim/2."""
    if not (p >= 2 and q >= 2):
        return False
    if dim == 2 and p == 2 and math.isinf(q):
        return False
    inv_p = 0.0 if math.isinf(p) else 1.0 / p
    inv_q = 0.0 if math.isinf(q) else 1.0 / q
    return abs(2 * inv_p + dim * inv_q - dim / 2) <= tol


def besov_strichartz_sum(h: History, p: float, q: float) -> float:
    """sum_N N^(1/2) ||P_N u||_{L^p_t L^q_x} over resolvable scales."""
    if len(h) == 0:
        raise ValueError("empty history")
    if not is_admissible(p, q, h.grid.dim):
        raise ValueError(f"(p, q) = ({p}, {q}) is not Schrodinger admissible in d = {h.grid.dim}")
    per_slice = []
    for s in h.slices:
        scales, vals = band_norms(s, q)
        per_slice.append(vals)
    table = np.array(per_slice)
    total = 0.0
    for j, N in enumerate(scales):
        total += math.sqrt(N) * _time_norm(h.times, table[:, j], p)
    return total


@dataclass(frozen=True)
class DecaySeries:
    """A(t) = sup_{0 < s <= t} s^(d/2) ||u(s)||_inf on sampled times."""

    times: np.ndarray
    values: np.ndarray

    def write_csv(self, path) -> None:
        write_csv(path, ("t", "value"), zip(self.times, self.values))


def decay_functional(
    h: History, source: str = "slices", t_max: float | None = None
) -> DecaySeries:
    """
    Running maximum of ``t^(d/2) ||u(t)||_inf`` over sampled ``t > 0``.

    ``source="steps"`` uses the per-step L^inf diagnostics instead of the
    stored slices (denser in time for decimated runs).  Samples later than
    ``t_max`` (default: the history's horizon) are dropped.
    """
    d = h.grid.dim
    if source == "slices":
        t = h.times
        linf = np.array([np.abs(s.values).max() for s in h.slices])
    elif source == "steps":
        t, linf = h.step_times, h.linf
    else:
        raise ValueError("source must be 'slices' or 'steps'")
    t_max = h.horizon if t_max is None else t_max
    keep = (t > 0) & (t <= t_max)
    t, linf = np.asarray(t)[keep], np.asarray(linf)[keep]
    return DecaySeries(t, np.maximum.accumulate(t ** (d / 2) * linf) if t.size else t.copy())
