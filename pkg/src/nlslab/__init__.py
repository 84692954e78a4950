"""Pseudo-spectral cubic NLS simulator with dyadic harmonic-analysis diagnostics."""

from .grid import (
    Field,
    Grid,
    SpectralField,
    apply_multiplier,
    forward_transform,
    fractional_derivative,
    inverse_transform,
    make_grid,
)
from .history import History, StepDiagnostics
from .littlewood_paley import (
    BandDecomposition,
    band_decomposition,
    bump,
    maximal_function,
    paraproduct_pieces,
    project_band,
    project_high,
    project_low,
)
from .norms import (
    DecaySeries,
    besov_norm,
    besov_strichartz_sum,
    decay_functional,
    is_admissible,
    lebesgue_norm,
    mixed_norm,
    sobolev_norm,
)
from .propagator import DispersiveReport, evolve_linear, verify_dispersive
from .solver import SolverConfig, mass, nonlinear_substep, solve, strang_step
from .duhamel import DuhamelSplit, duhamel_residual, duhamel_split, time_split_integrals
from .initial_data import dyadic_superposition, gaussian, min_gaussian_width, radial_bump, rescale

__version__ = "0.1.0"

__all__ = [
    "Field", "Grid", "SpectralField", "apply_multiplier", "forward_transform",
    "fractional_derivative", "inverse_transform", "make_grid",
    "History", "StepDiagnostics",
    "BandDecomposition", "band_decomposition", "bump", "maximal_function",
    "paraproduct_pieces", "project_band", "project_high", "project_low",
    "DecaySeries", "besov_norm", "besov_strichartz_sum", "decay_functional",
    "is_admissible", "lebesgue_norm", "mixed_norm", "sobolev_norm",
    "DispersiveReport", "evolve_linear", "verify_dispersive",
    "SolverConfig", "mass", "nonlinear_substep", "solve", "strang_step",
    "DuhamelSplit", "duhamel_residual", "duhamel_split", "time_split_integrals",
    "dyadic_superposition", "gaussian", "min_gaussian_width", "radial_bump", "rescale",
]
