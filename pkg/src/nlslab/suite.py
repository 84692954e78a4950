"""
Built-in property suite: one row per invariant, cheap enough for a 32^3 grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .grid import Field, Grid, forward_transform, inverse_transform, make_grid
from .history import History
from .initial_data import gaussian, random_smooth_field, rescale
from .littlewood_paley import (
    band_decomposition,
    project_band,
    project_high,
    project_low,
    read_constants,
    resolvable_scales,
)
from .norms import decay_functional, is_admissible, lebesgue_norm, sobolev_norm
from .propagator import evolve_linear
from .properties import (
    almost_orthogonality_ratios,
    bernstein_band_statistics,
    maximal_constants,
    paraproduct_errors,
)
from .solver import SolverConfig, nonlinear_substep, solve, strang_step

__all__ = ["SuiteRow", "calibrated_constants", "run_suite"]


@dataclass(frozen=True)
class SuiteRow:
    invariant: str
    value: float
    threshold: float
    relation: str  # "<=" or ">="

    @property
    def passed(self) -> bool:
        if not math.isfinite(self.value):
            return False
        return self.value <= self.threshold if self.relation == "<=" else self.value >= self.threshold

    def as_tuple(self):
        return (self.invariant, self.value, self.relation, self.threshold, self.passed)


def calibrated_constants() -> dict[str, float]:
    """The frozen empirical constants shipped with the package."""
    with resources.as_file(resources.files("nlslab") / "calibrated_constants.txt") as p:
        return read_constants(p)


def _rel(a: np.ndarray, b: np.ndarray) -> float:
    nb = np.linalg.norm(b)
    return float(np.linalg.norm(a - b) / nb) if nb else float(np.linalg.norm(a))


def run_suite(n: int = 32, half_width: float = 8.0, seed: int = 0) -> list[SuiteRow]:
    g = make_grid(3, n, half_width)
    rows: list[SuiteRow] = []
    add = lambda name, v, thr, rel="<=": rows.append(SuiteRow(name, float(v), thr, rel))  # noqa: E731
    rng = np.random.default_rng(seed)

    fields = [
        Field(g, rng.standard_normal(g.shape) + 1j * rng.standard_normal(g.shape)) for _ in range(5)
    ]
    cell, mode = g.cell_volume, g.mode_volume
    add(
        "plancherel",
        max(
            abs(
                math.sqrt(np.sum(np.abs(forward_transform(f).coeffs) ** 2) * mode)
                / lebesgue_norm(f, 2)
                - 1
            )
            for f in fields
        ),
        1e-12,
    )
    add("roundtrip", max(_rel(inverse_transform(forward_transform(f)).values, f.values) for f in fields), 1e-12)
    f = fields[0]
    shifted = Field(g, np.roll(f.values, 1, axis=0))
    k0 = g.frequency_mesh()[0]
    add(
        "translation_covariance",
        _rel(forward_transform(shifted).coeffs, forward_transform(f).coeffs * np.exp(-1j * k0 * g.dx)),
        1e-12,
    )

    smooth = [random_smooth_field(g, seed + k) for k in range(3)]
    add(
        "band_reconstruction",
        max(_rel(band_decomposition(s).reconstruct().values, s.values) for s in smooth),
        1e-12,
    )
    scales = resolvable_scales(g)
    add(
        "low_plus_high_identity",
        max(
            _rel((project_low(s, N) + project_high(s, N)).values, s.values)
            for s in smooth
            for N in scales
        ),
        1e-12,
    )
    add("paraproduct_identity", paraproduct_errors(g, 3, seed).max(), 1e-12)
    leak = 0.0
    for N in scales:
        if 8 * N <= scales[-1]:
            leak = max(leak, lebesgue_norm(project_band(project_band(fields[1], 8 * N), N), 2) / lebesgue_norm(fields[1], 2))
    add("disjoint_annuli", leak, 1e-12)

    bern = bernstein_band_statistics(g, n_fields=5, seed=seed)
    add("bernstein_l2_scale_variation", max(b.variation for b in bern), 0.10)
    ao = almost_orthogonality_ratios(g, 6, seed)
    add("almost_orthogonality_min", ao.min(), 0.5, ">=")
    add("almost_orthogonality_max", ao.max(), 2.0)
    consts = calibrated_constants()
    mc = maximal_constants(g, 4, seed)
    add("maximal_pointwise_band", mc["band"].max(), consts["maximal_band_3d"] * 1.1)
    add("maximal_pointwise_low", mc["low"].max(), consts["maximal_low_3d"] * 1.1)

    a, b = smooth[0], smooth[1]
    add(
        "holder_slack",
        lebesgue_norm(a * b, 1) - lebesgue_norm(a, 2) * lebesgue_norm(b, 2),
        1e-10,
    )
    nonneg = Field(g, np.abs(fields[2].values))
    add(
        "interpolation_slack",
        lebesgue_norm(nonneg, 2) ** 2
        - lebesgue_norm(nonneg, 1) ** 0.5 * lebesgue_norm(nonneg, 3) ** 1.5,
        1e-10 * lebesgue_norm(nonneg, 2) ** 2,
    )

    add(
        "linear_unitarity",
        max(abs(lebesgue_norm(evolve_linear(f, t), 2) / lebesgue_norm(f, 2) - 1) for t in (0.1, 1.0, 7.3)),
        1e-12,
    )
    add(
        "projection_commutation",
        _rel(evolve_linear(project_band(f, 1.0), 0.7).values, project_band(evolve_linear(f, 0.7), 1.0).values),
        1e-12,
    )
    add(
        "nonlinear_modulus",
        float(np.max(np.abs(np.abs(nonlinear_substep(f, 0.3).values) - np.abs(f.values)))),
        1e-12,
    )

    u0 = gaussian(g, 1.0, 1.0, boundary_threshold=1.0)
    h = solve(u0, SolverConfig(0.01, 1.0, sample_stride=20, boundary_threshold=0.5))
    add("mass_drift_100_steps", float(np.max(np.abs(h.mass / h.mass[0] - 1))), 1e-11)
    A = decay_functional(h, "steps")
    add("decay_functional_monotone", float(np.min(np.diff(A.values))) if A.values.size > 1 else 0.0, 0.0, ">=")

    small = gaussian(g, 0.5, 1.0, boundary_threshold=1.0)
    T = 0.4
    ref = small
    for _ in range(64):
        ref = strang_step(ref, T / 64)
    errs = []
    for k in (2, 4, 8):
        u = small
        for _ in range(k):
            u = strang_step(u, T / k)
        errs.append(lebesgue_norm(u - ref, 2))
    add("strang_order_min_ratio", min(errs[0] / errs[1], errs[1] / errs[2]), 2.0, ">=")
    add("strang_order_max_ratio", max(errs[0] / errs[1], errs[1] / errs[2]), 6.0)

    gate = (
        is_admissible(10 / 3, 10 / 3)
        and is_admissible(5, 30 / 11)
        and not is_admissible(2, 2)
    )
    add("admissibility_gate", 1.0 if gate else 0.0, 1.0, ">=")
    u_l = rescale(u0, 2.0)
    add("scaling_h_half", abs(sobolev_norm(u_l, 0.5) / sobolev_norm(u0, 0.5) - 1), 1e-3)
    add("scaling_l1", abs(lebesgue_norm(u_l, 1) / (2.0 ** (1 - 3) * lebesgue_norm(u0, 1)) - 1), 1e-6)
    return rows
