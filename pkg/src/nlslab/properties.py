"""
Empirical checks of the harmonic-analysis inequalities.

The inequalities hold with unspecified constants, so every check here
returns *statistics* (ratios per field and per scale) and leaves the
verdict to the caller: scale independence, field independence, or a
comparison against a calibrated constant.

Scale independence of Bernstein-type ratios is probed by dilation: a
random localized profile h is evaluated as h(N x) and paired with the
band P_N.  On R^d every ratio is then exactly N-independent, so any
drift across N measures discretization error of the implementation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .grid import Field, Grid, fractional_derivative, make_grid, product
from .initial_data import dyadic_superposition, random_band_field, random_smooth_field
from .littlewood_paley import (
    band_decomposition,
    maximal_function,
    paraproduct_pieces,
    project_band,
    project_low,
    resolvable_scales,
)
from .norms import besov_norm, lebesgue_norm, sobolev_norm

__all__ = [
    "ScaleStatistics",
    "wave_packets",
    "bernstein_dilation_statistics",
    "bernstein_band_statistics",
    "embedding_ratios",
    "localized_smooth_field",
    "almost_orthogonality_ratios",
    "maximal_constants",
    "paraproduct_errors",
]

INF = math.inf


@dataclass(frozen=True)
class ScaleStatistics:
    """Per-scale summary of one family of ratios over an ensemble of fields."""

    name: str
    scales: np.ndarray
    ratios: np.ndarray  # shape (n_scales, n_fields)

    @property
    def means(self) -> np.ndarray:
        return self.ratios.mean(axis=1)

    @property
    def variation(self) -> float:
        """max/min - 1 of the per-scale means."""
        m = self.means
        return float(m.max() / m.min() - 1.0)

    @property
    def lower(self) -> float:
        return float(self.ratios.min())

    @property
    def upper(self) -> float:
        return float(self.ratios.max())


def wave_packets(
    grid: Grid,
    centers: np.ndarray,
    widths: np.ndarray,
    wavenumbers: np.ndarray,
    coeffs: np.ndarray,
    dilation: float = 1.0,
) -> Field:
    """
    h(N x) for h(y) = sum_j c_j exp(-|y - a_j|^2 / (2 w_j^2)) exp(i k_j . y).

    ``centers`` and ``wavenumbers`` have shape (J, dim); ``widths`` and
    ``coeffs`` have shape (J,).
    """
    ys = [dilation * x for x in grid.mesh()]
    out = np.zeros(grid.shape, dtype=np.complex128)
    for a, w, k, c in zip(centers, widths, wavenumbers, coeffs):
        r2 = sum((y - ai) ** 2 for y, ai in zip(ys, a))
        phase = sum(ki * y for y, ki in zip(ys, k))
        out += c * np.exp(-r2 / (2 * w**2)) * np.exp(1j * phase)
    return Field(grid, out)


def _random_packet_params(rng: np.random.Generator, dim: int, count: int):
    return (
        rng.uniform(-2, 2, (count, dim)),
        rng.uniform(0.5, 1.5, count),
        rng.uniform(-2, 2, (count, dim)),
        rng.standard_normal(count) + 1j * rng.standard_normal(count),
    )


def _bernstein_ratios(f: Field, N: float, dim: int) -> dict[str, float]:
    pn = project_band(f, N)
    pl = project_low(f, N)
    out = {}
    for s in (0.5, 1.0, 2.0):
        for p in (2, INF):
            tag = f"s{s:g}_p{'inf' if p == INF else p}"
            out[f"derivative_band_{tag}"] = lebesgue_norm(fractional_derivative(pn, s), p) / (
                N**s * lebesgue_norm(pn, p)
            )
            out[f"derivative_low_{tag}"] = lebesgue_norm(fractional_derivative(pl, s), p) / (
                N**s * lebesgue_norm(pl, p)
            )
    for p, q in ((1, 2), (1, INF), (2, INF)):
        e = dim * (1 / p - (0 if q == INF else 1 / q))
        tag = f"{p}_{'inf' if q == INF else q}"
        out[f"lebesgue_band_{tag}"] = lebesgue_norm(pn, q) / (N**e * lebesgue_norm(pn, p))
        out[f"lebesgue_low_{tag}"] = lebesgue_norm(pl, q) / (N**e * lebesgue_norm(pl, p))
    return out


def _collect(per_scale: list[list[dict[str, float]]], scales) -> list[ScaleStatistics]:
    names = list(per_scale[0][0])
    return [
        ScaleStatistics(
            name,
            np.asarray(scales, dtype=float),
            np.array([[r[name] for r in rows] for rows in per_scale]),
        )
        for name in names
    ]


def bernstein_dilation_statistics(
    n_fields: int = 100,
    scales: Sequence[float] = (1, 2, 4, 8, 16, 32, 64),
    n: int = 2**14,
    half_width: float = 16.0,
    packets: int = 4,
    seed: int = 0,
    dim: int = 1,
) -> list[ScaleStatistics]:
    """
    Bernstein ratios for dilated random wave-packet profiles.

    Field k at scale N is ``h_k(N x)`` (same random parameters for every N)
    and is paired with P_N and P_<=N.  Families: ``derivative_band_*``
    (|grad|^s P_N vs N^s P_N), ``derivative_low_*`` (same with P_<=N) and
    ``lebesgue_*`` (L^q vs N^(d(1/p-1/q)) L^p).
    """
    grid = make_grid(dim, n, half_width)
    params = [
        _random_packet_params(np.random.default_rng([seed, k]), dim, packets)
        for k in range(n_fields)
    ]
    per_scale = []
    for N in scales:
        rows = [_bernstein_ratios(wave_packets(grid, *p, dilation=N), N, dim) for p in params]
        per_scale.append(rows)
    return _collect(per_scale, scales)


def bernstein_band_statistics(
    grid: Grid, n_fields: int = 20, seed: int = 0, s_values=(0.5, 1.0, 2.0)
) -> list[ScaleStatistics]:
    """
    L^2 Bernstein ratios ||grad|^s P_N f||_2 / (N^s ||P_N f||_2) for
    stationary random band fields at every resolvable scale with at least
    a full annulus of modes below the Nyquist limit.
    """
    scales = [N for N in resolvable_scales(grid) if 2 * N <= grid.xi_max and N / 2 >= grid.dxi]
    per_scale = []
    for N in scales:
        rows = []
        for k in range(n_fields):
            f = random_band_field(grid, N, np.random.default_rng([seed, k, int(N * 1024)]))
            rows.append(
                {
                    f"derivative_band_s{s:g}_p2": lebesgue_norm(fractional_derivative(f, s), 2)
                    / (N**s * lebesgue_norm(f, 2))
                    for s in s_values
                }
            )
        per_scale.append(rows)
    return _collect(per_scale, scales)


def localized_smooth_field(grid: Grid, seed: int, decay: float = 2.0) -> Field:
    """
    Random smooth localized field: windowed dyadic superposition over the
    lower three quarters (in octaves) of the resolvable scales with weights
    N^(-decay) times a uniform factor in [0.5, 1.5).
    """
    scales = resolvable_scales(grid)
    scales = [N for N in scales if N <= scales[-1] / 4]
    rng = np.random.default_rng([seed, 7])
    weights = [N**-decay * rng.uniform(0.5, 1.5) for N in scales]
    return dyadic_superposition(
        grid, scales, weights, seed=seed, window=True, boundary_threshold=1.0
    )


def embedding_ratios(grid: Grid, n_fields: int = 100, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """
    ``(H^1/2 / B^1/2_{2,1}, B^1/2_{2,1} / B^2_{1,1})`` per localized random field.
    """
    r1, r2 = [], []
    for k in range(n_fields):
        f = localized_smooth_field(grid, seed + k)
        h = sobolev_norm(f, 0.5)
        b1 = besov_norm(f, 0.5, 2, 1)
        b2 = besov_norm(f, 2, 1, 1)
        r1.append(h / b1)
        r2.append(b1 / b2)
    return np.array(r1), np.array(r2)


def almost_orthogonality_ratios(grid: Grid, n_fields: int = 20, seed: int = 0) -> np.ndarray:
    """||(sum_N |f_N|^2)^(1/2)||_2 / ||f - residual_low||_2, alternating periodic and localized fields."""
    out = []
    for k in range(n_fields):
        f = random_smooth_field(grid, seed + k) if k % 2 == 0 else localized_smooth_field(grid, seed + k)
        d = band_decomposition(f)
        sq = math.sqrt(float(np.sum(d.square_function() ** 2)) * grid.cell_volume)
        out.append(sq / lebesgue_norm(f - d.residual_low, 2))
    return np.array(out)


def maximal_constants(grid: Grid, n_fields: int = 10, seed: int = 0) -> dict[str, np.ndarray]:
    """
    Per scale N, the largest pointwise ratio ``|P f| / M f`` over the
    ensemble, for P = P_N (key ``band``) and P = P_<=N (key ``low``).
    """
    scales = resolvable_scales(grid)
    band = np.zeros(len(scales))
    low = np.zeros(len(scales))
    for k in range(n_fields):
        f = random_smooth_field(grid, seed + k) if k % 2 == 0 else localized_smooth_field(grid, seed + k)
        M = maximal_function(f).values.real
        for i, N in enumerate(scales):
            band[i] = max(band[i], float(np.max(np.abs(project_band(f, N).values) / M)))
            low[i] = max(low[i], float(np.max(np.abs(project_low(f, N).values) / M)))
    return {"scales": np.array(scales), "band": band, "low": low}


def paraproduct_errors(grid: Grid, n_triples: int = 50, seed: int = 0) -> np.ndarray:
    """
    For each random triple, the worst relative L^2 mismatch over all
    resolvable N between the summed pieces and P_N(f1 f2 f3), relative to
    ||f1 f2 f3||_2.
    """
    scales = resolvable_scales(grid)
    out = []
    for k in range(n_triples):
        f1, f2, f3 = (random_smooth_field(grid, 3 * (seed + k) + j) for j in range(3))
        prod = product(f1, f2, f3)
        ref = lebesgue_norm(prod, 2)
        worst = 0.0
        for N in scales:
            a, b, c = paraproduct_pieces(f1, f2, f3, N)
            s = a + b + c
            worst = max(worst, lebesgue_norm(s - project_band(prod, N), 2) / ref)
        out.append(worst)
    return np.array(out)
