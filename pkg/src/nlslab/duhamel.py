"""
Duhamel reconstruction of a recorded solution.

For i u_t + Laplacian u = |u|^2 u the integral equation reads

    u(t) = e^{it Laplacian} u0 - i int_0^t e^{i(t-s) Laplacian} (|u|^2 u)(s) ds
         = u_l(t) + u_nl(t).

The integral is split at t/2 into F1 (early times) and F2 (late times).
Both are evaluated by the trapezoidal rule over the sampled times with
exact propagation of every sample.  In the interaction picture the
integrand is ``e^{it Laplacian} G(s)`` with ``G(s) = e^{-is Laplacian} g(s)``,
so a single cumulative trapezoid over G gives every partial integral.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import Field, cubic_nonlinearity, fftn, ifftn
from .history import History
from .io import write_csv
from .propagator import linear_symbol

__all__ = [
    "DuhamelSplit",
    "duhamel_split",
    "time_split_integrals",
    "duhamel_residual",
    "DuhamelTable",
    "duhamel_table",
    "f1_decay_curve",
]

_EPS = 1e-30


@dataclass(frozen=True)
class DuhamelSplit:
    times: np.ndarray
    u_l: list[Field]
    u_nl: list[Field]


def duhamel_split(h: History) -> DuhamelSplit:
    """u_l(t) = e^{it Laplacian} u0 and u_nl = u - u_l at every sampled t."""
    u0 = h.initial
    u0h = fftn(u0.values)
    ul, unl = [], []
    for t, u in zip(h.times, h.slices):
        lin = u0 if t == 0 else Field(h.grid, ifftn(linear_symbol(h.grid, t) * u0h))
        ul.append(lin)
        unl.append(u - lin)
    return DuhamelSplit(h.times.copy(), ul, unl)


class _Integrator:
    """Cumulative trapezoid of G(s) over the history's samples (Fourier space)."""

    def __init__(self, h: History, dealias: bool = True):
        if len(h) < 2:
            raise ValueError("need at least two samples for the Duhamel quadrature")
        h.initial  # noqa: B018 -- validates the t = 0 slice
        self.h = h
        g = h.grid
        self.cum = [np.zeros(g.shape, dtype=np.complex128)]
        prev = None
        for j, (s, u) in enumerate(zip(h.times, h.slices)):
            G = np.conj(linear_symbol(g, s)) * fftn(cubic_nonlinearity(u, dealias).values)
            if prev is not None:
                ds = s - h.times[j - 1]
                self.cum.append(self.cum[-1] + 0.5 * ds * (prev + G))
            prev = G

    def integral(self, a: int, b: int, t: float) -> Field:
        """-i int_{s_a}^{s_b} e^{i(t-s) Laplacian} g(s) ds."""
        g = self.h.grid
        return Field(g, -1j * ifftn(linear_symbol(g, t) * (self.cum[b] - self.cum[a])))


def time_split_integrals(h: History, t: float, dealias: bool = True) -> tuple[Field, Field]:
    """
    (F1(t), F2(t)): the Duhamel integral over [0, t/2] and [t/2, t].

    Both t and t/2 must be sampled times and [0, t/2] must hold at least
    two samples.
    """
    i_t = h.index_of(t)
    try:
        i_half = h.index_of(t / 2)
    except ValueError:
        raise ValueError(f"t/2 = {t / 2} is not a sampled time") from None
    if i_half < 1:
        raise ValueError("[0, t/2] must contain at least two samples")
    q = _Integrator(h, dealias)
    return q.integral(0, i_half, h.times[i_t]), q.integral(i_half, i_t, h.times[i_t])


def _l2(v: np.ndarray, cell: float) -> float:
    return math.sqrt(float(np.sum(np.abs(v) ** 2)) * cell)


def duhamel_residual(h: History, dealias: bool = True) -> np.ndarray:
    """
    ||u(t) - u_l(t) - F1(t) - F2(t)||_2 / max(||u(t)||_2, 1e-30) per sampled t.

    F1 + F2 is the trapezoid over all samples in [0, t], so the residual is
    defined at every sample, including those whose t/2 is not sampled.
    """
    q = _Integrator(h, dealias)
    split = duhamel_split(h)
    cell = h.grid.cell_volume
    out = np.empty(len(h))
    for j, t in enumerate(h.times):
        F = q.integral(0, j, t)
        r = split.u_nl[j].values - F.values
        out[j] = _l2(r, cell) / max(_l2(h.slices[j].values, cell), _EPS)
    return out


@dataclass(frozen=True)
class DuhamelTable:
    """Per-time L^2 norms of every Duhamel component (NaN where F1/F2 are undefined)."""

    times: np.ndarray
    norm_u: np.ndarray
    norm_ul: np.ndarray
    norm_unl: np.ndarray
    norm_F1: np.ndarray
    norm_F2: np.ndarray
    residual: np.ndarray

    def write_csv(self, path) -> None:
        write_csv(
            path,
            ("t", "norm_u", "norm_ul", "norm_unl", "norm_F1", "norm_F2", "residual"),
            zip(
                self.times, self.norm_u, self.norm_ul, self.norm_unl,
                self.norm_F1, self.norm_F2, self.residual,
            ),
        )


def _half_index(h: History, j: int) -> int | None:
    try:
        i = h.index_of(h.times[j] / 2)
    except ValueError:
        return None
    return i if i >= 1 else None


def duhamel_table(h: History, dealias: bool = True) -> DuhamelTable:
    q = _Integrator(h, dealias)
    split = duhamel_split(h)
    cell = h.grid.cell_volume
    cols = {k: np.full(len(h), np.nan) for k in ("u", "ul", "unl", "F1", "F2", "res")}
    for j, t in enumerate(h.times):
        u = h.slices[j].values
        F = q.integral(0, j, t)
        cols["u"][j] = _l2(u, cell)
        cols["ul"][j] = _l2(split.u_l[j].values, cell)
        cols["unl"][j] = _l2(split.u_nl[j].values, cell)
        cols["res"][j] = _l2(split.u_nl[j].values - F.values, cell) / max(cols["u"][j], _EPS)
        i = _half_index(h, j)
        if i is not None:
            F1 = q.integral(0, i, t)
            cols["F1"][j] = _l2(F1.values, cell)
            cols["F2"][j] = _l2(F.values - F1.values, cell)
    return DuhamelTable(
        h.times.copy(), cols["u"], cols["ul"], cols["unl"], cols["F1"], cols["F2"], cols["res"]
    )


def f1_decay_curve(h: History, dealias: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """
    ``(t, t^(d/2) ||F1(t)||_inf)`` at every sampled t > 0 whose half is
    also sampled (with at least two samples in [0, t/2]).
    """
    q = _Integrator(h, dealias)
    d = h.grid.dim
    ts, vals = [], []
    for j, t in enumerate(h.times):
        if t <= 0:
            continue
        i = _half_index(h, j)
        if i is None:
            continue
        F1 = q.integral(0, i, t)
        ts.append(t)
        vals.append(t ** (d / 2) * float(np.abs(F1.values).max()))
    return np.array(ts), np.array(vals)
