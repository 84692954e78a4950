"""
Initial-data generators.

Every generator checks containment: the generated field must keep its
boundary mass fraction (mass within two cells of the faces) at or below
``boundary_threshold``.  Random band fields follow a fixed recipe so a
seed reproduces them bit for bit:

1. draw i.i.d. standard complex normal coefficients on every lattice mode
   with ``numpy.random.default_rng(seed)``, in FFT order;
2. multiply by the band symbol ``phi(|xi|/N) - phi(2|xi|/N)``;
3. transform back and normalize to unit L^2.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .grid import Field, Grid, boundary_fraction, ifftn
from .littlewood_paley import band_symbol, bump, check_admissible, is_dyadic, resolvable_scales
from .norms import lebesgue_norm

__all__ = [
    "ContainmentError",
    "gaussian",
    "min_gaussian_width",
    "radial_bump",
    "random_band_field",
    "dyadic_superposition",
    "random_smooth_field",
    "rescale",
]

DEFAULT_BOUNDARY_THRESHOLD = 1e-6
_RESOLUTION_DECADES = 3


def min_gaussian_width(grid: Grid) -> float:
    """Smallest Gaussian width whose Nyquist-frequency amplitude is <= 1e-3 of the peak."""
    return grid.dx * math.sqrt(2 * _RESOLUTION_DECADES * math.log(10)) / math.pi


class ContainmentError(ValueError):
    """Generated data is under-resolved or leaks mass to the box faces."""


def _check_contained(f: Field, threshold: float) -> Field:
    bf = boundary_fraction(f)
    if bf > threshold:
        raise ContainmentError(
            f"boundary mass fraction {bf:.3g} exceeds {threshold:g}; enlarge the box"
        )
    return f


def _offsets(grid: Grid, center) -> tuple[np.ndarray, ...]:
    if center is None:
        return grid.mesh()
    c = np.asarray(center, dtype=float)
    if c.shape != (grid.dim,):
        raise ValueError(f"center must have {grid.dim} coordinates")
    return tuple(x - ci for x, ci in zip(grid.mesh(), c))


def gaussian(
    grid: Grid,
    amplitude: float,
    width: float,
    center: Sequence[float] | None = None,
    boundary_threshold: float = DEFAULT_BOUNDARY_THRESHOLD,
) -> Field:
    """
    amplitude * exp(-|x - center|^2 / (2 width^2)).

    The width must be spectrally resolved: the Fourier amplitude at the
    Nyquist frequency, exp(-(pi width / dx)^2 / 2), may not exceed 1e-3
    of its peak, i.e. width >= about 1.18 dx.
    """
    if not width > 0:
        raise ValueError("width must be positive")
    if width < min_gaussian_width(grid):
        raise ContainmentError(
            f"width {width} is under-resolved on dx = {grid.dx:g} (needs >= {min_gaussian_width(grid):.4g})"
        )
    r2 = sum(x**2 for x in _offsets(grid, center))
    f = Field(grid, amplitude * np.exp(-r2 / (2.0 * width**2)))
    return _check_contained(f, boundary_threshold) if amplitude != 0 else f


def radial_bump(
    grid: Grid,
    amplitude: float,
    radius: float,
    center: Sequence[float] | None = None,
    boundary_threshold: float = DEFAULT_BOUNDARY_THRESHOLD,
) -> Field:
    """amplitude * phi(|x - center| / radius), supported in |x - center| <= 2 radius."""
    if not radius > 0:
        raise ValueError("radius must be positive")
    r = np.sqrt(sum(x**2 for x in _offsets(grid, center))) * np.ones(grid.shape)
    f = Field(grid, amplitude * bump(r / radius))
    return _check_contained(f, boundary_threshold) if amplitude != 0 else f


def random_band_field(grid: Grid, N: float, seed: int | np.random.Generator) -> Field:
    """Unit-L^2 random field with spectrum in N/2 <= |xi| <= 2N (recipe above)."""
    check_admissible(grid, N)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    c = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    v = ifftn(c * band_symbol(grid, N))
    nrm = math.sqrt(float(np.sum(np.abs(v) ** 2)) * grid.cell_volume)
    if nrm == 0:
        raise ValueError(f"band {N} contains no lattice modes")
    return Field(grid, v / nrm)


def _window(grid: Grid, window_radius: float | None) -> np.ndarray:
    # phi(|x| / R) with the support 2R ending four cells inside the faces
    R = (grid.half_width - 4 * grid.dx) / 2 if window_radius is None else window_radius
    if not 0 < 2 * R <= grid.half_width - 3 * grid.dx:
        raise ContainmentError(f"window radius {R} does not fit inside the box")
    return bump(grid.radius / R)


def dyadic_superposition(
    grid: Grid,
    scales: Sequence[float],
    weights: Sequence[float],
    seed: int,
    window: bool = False,
    window_radius: float | None = None,
    boundary_threshold: float = DEFAULT_BOUNDARY_THRESHOLD,
) -> Field:
    """
    sum_k weight_k * b_k with b_k a unit-L^2 random band field at scale N_k.

    Band k uses seed ``seed`` spawned into independent streams, one per band.
    With ``window=True`` each band is multiplied by a compactly supported
    radial window and renormalized before summing, which makes the data
    localized (and subject to the containment guard); the window broadens
    each band's spectrum by roughly 1/window_radius.
    """
    if len(scales) != len(weights):
        raise ValueError("scales and weights differ in length")
    if not scales:
        raise ValueError("need at least one scale")
    for N in scales:
        check_admissible(grid, N)
    streams = np.random.SeedSequence(seed).spawn(len(scales))
    w = _window(grid, window_radius) if window else None
    out = np.zeros(grid.shape, dtype=np.complex128)
    for N, a, ss in zip(scales, weights, streams):
        b = random_band_field(grid, N, np.random.default_rng(ss))
        if w is not None:
            b = Field(grid, w * b.values)
            b = b / lebesgue_norm(b, 2)
        out += a * b.values
    f = Field(grid, out)
    return _check_contained(f, boundary_threshold) if window else f


def random_smooth_field(
    grid: Grid, seed: int, decay: float = 2.0, max_scale: float | None = None
) -> Field:
    """
    Random mean-zero smooth field: bands N from the smallest resolvable scale up
    to ``max_scale`` (default: a quarter of the largest) with weights N^(-decay)
    times a random factor in [0.5, 1.5).  Periodic, not localized.
    """
    scales = resolvable_scales(grid)
    top = scales[-1] / 4 if max_scale is None else max_scale
    scales = [N for N in scales if N <= top]
    rng = np.random.default_rng(seed)
    weights = [N**-decay * rng.uniform(0.5, 1.5) for N in scales]
    return dyadic_superposition(grid, scales, weights, seed=int(rng.integers(2**32)))


def rescale(u0: Field, lam: float) -> Field:
    """
    The scaling map u_lam(x) = lam * u0(lam x), placed on the grid (n, L/lam).

    With the same n the new nodes are ``x_j / lam``, so the samples are
    exactly ``lam * u0(x_j)`` and no interpolation is needed.
    """
    if not is_dyadic(lam):
        raise ValueError(f"lambda must be a power of two, got {lam}")
    if lam == 1:
        return u0
    return Field(u0.grid.rescaled(lam), lam * u0.values)
