"""
Dyadic frequency calculus on the periodic lattice.

The bump profile is frozen for the whole package:

    phi(r) = 1                                   r <= 1
    phi(r) = g(2 - r) / (g(2 - r) + g(r - 1))    1 < r < 2,   g(t) = exp(-1/t)
    phi(r) = 0                                   r >= 2

It is C-infinity, non-increasing, and ``phi(r) + phi(3 - r) = 1`` on [1, 2].
Projections use the symbols ``phi(|xi|/N)`` (P_<=N), ``1 - phi(|xi|/N)``
(P_>N) and ``phi(|xi|/N) - phi(2|xi|/N)`` (P_N), N a power of two.

On a grid the resolvable scales run from the largest power of two not
above the frequency spacing ``pi/L`` up to the smallest power of two not
below the corner frequency ``sqrt(dim)*xi_max``.  With that range the
zero mode is the only sub-band content and ``P_<=N_max`` is the identity,
so the band pieces telescope back to the field.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .grid import Field, Grid, apply_multiplier, fftn, ifftn, product

__all__ = [
    "bump",
    "is_dyadic",
    "resolvable_scales",
    "check_admissible",
    "band_symbol",
    "low_symbol",
    "project_band",
    "project_low",
    "project_high",
    "project_below",
    "BandDecomposition",
    "band_decomposition",
    "paraproduct_pieces",
    "maximal_function",
    "maximal_radii",
    "read_constants",
    "write_constants",
]


def _g(t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def bump(r):
    """Evaluate the frozen bump profile phi at ``r >= 0`` (scalar or array)."""
    r_arr = np.asarray(r, dtype=float)
    a = _g(2.0 - r_arr)
    b = _g(r_arr - 1.0)
    denom = a + b
    mid = np.divide(a, denom, out=np.zeros_like(a), where=denom > 0)
    out = np.where(r_arr <= 1.0, 1.0, np.where(r_arr >= 2.0, 0.0, mid))
    return float(out) if np.ndim(r) == 0 else out


def is_dyadic(N: float) -> bool:
    if not (N > 0 and math.isfinite(N)):
        return False
    mantissa, _ = math.frexp(N)
    return mantissa == 0.5


def resolvable_scales(grid: Grid) -> list[float]:
    """Ascending list of dyadic scales carrying the grid's nonzero modes."""
    jmin = math.floor(math.log2(grid.dxi))
    jmax = math.ceil(math.log2(grid.xi_corner))
    return [2.0**j for j in range(jmin, jmax + 1)]


def check_admissible(grid: Grid, N: float) -> None:
    if not is_dyadic(N):
        raise ValueError(f"scale {N} is not a power of two")
    scales = resolvable_scales(grid)
    if not scales[0] <= N <= scales[-1]:
        raise ValueError(
            f"scale {N} outside the resolvable range [{scales[0]}, {scales[-1]}]"
        )


@lru_cache(maxsize=24)
def low_symbol(grid: Grid, N: float) -> np.ndarray:
    s = bump(grid.xi_norm / N)
    s.flags.writeable = False
    return s


@lru_cache(maxsize=24)
def band_symbol(grid: Grid, N: float) -> np.ndarray:
    s = low_symbol(grid, N) - low_symbol(grid, N / 2)
    s.flags.writeable = False
    return s


def project_band(f: Field, N: float) -> Field:
    """P_N f; spectrum supported in N/2 <= |xi| <= 2N."""
    check_admissible(f.grid, N)
    return apply_multiplier(f, band_symbol(f.grid, N))


def project_low(f: Field, N: float) -> Field:
    """P_<=N f.  Any power of two is accepted."""
    if not is_dyadic(N):
        raise ValueError(f"scale {N} is not a power of two")
    return apply_multiplier(f, low_symbol(f.grid, N))


def project_high(f: Field, N: float) -> Field:
    """P_>N f = f - P_<=N f."""
    if not is_dyadic(N):
        raise ValueError(f"scale {N} is not a power of two")
    return apply_multiplier(f, 1.0 - low_symbol(f.grid, N))


def project_below(f: Field, N: float) -> Field:
    """f_{<N} = sum of P_M f over dyadic M < N, i.e. P_<=N/2 f."""
    return project_low(f, N / 2)


@dataclass(frozen=True)
class BandDecomposition:
    scales: list[float]
    pieces: list[Field]
    residual_low: Field

    def reconstruct(self) -> Field:
        out = self.residual_low.values.copy()
        for p in self.pieces:
            out += p.values
        return Field(self.residual_low.grid, out)

    def square_function(self) -> np.ndarray:
        """(sum_N |f_N|^2)^(1/2) pointwise."""
        acc = np.zeros(self.residual_low.grid.shape)
        for p in self.pieces:
            acc += np.abs(p.values) ** 2
        return np.sqrt(acc)


def band_decomposition(f: Field) -> BandDecomposition:
    grid = f.grid
    scales = resolvable_scales(grid)
    fh = fftn(f.values)
    pieces = [Field(grid, ifftn(band_symbol(grid, N) * fh)) for N in scales]
    residual = Field(grid, ifftn(low_symbol(grid, scales[0] / 2) * fh))
    return BandDecomposition(scales, pieces, residual)


def paraproduct_pieces(
    f1: Field, f2: Field, f3: Field, N: float, dealias: bool = True
) -> list[Field]:
    """
    The three paraproduct terms of P_N(f1 f2 f3).

    With ``lo = P_<N/8`` and ``hi = 1 - lo`` returns

        P_N(hi f1 * f2 * f3),
        P_N(lo f1 * hi f2 * f3),
        P_N(lo f1 * lo f2 * hi f3),

    which add up to P_N(f1 f2 f3): the remaining term lo*lo*lo has
    spectrum in |xi| <= 3N/8 where the band symbol vanishes.
    """
    grid = f1.grid
    if f2.grid != grid or f3.grid != grid:
        raise ValueError("fields live on different grids")
    check_admissible(grid, N)
    lo = [project_below(f, N / 8) for f in (f1, f2, f3)]
    hi = [f - l for f, l in zip((f1, f2, f3), lo)]
    terms = [
        product(hi[0], f2, f3, dealias=dealias),
        product(lo[0], hi[1], f3, dealias=dealias),
        product(lo[0], lo[1], hi[2], dealias=dealias),
    ]
    return [project_band(t, N) for t in terms]


# -- maximal function ----------------------------------------------------------


def _box_sum(a: np.ndarray, m: int, axis: int) -> np.ndarray:
    # periodic window sum of width 2m+1 via a 1D summed-area table
    n = a.shape[axis]
    idx = np.arange(-m, n + m) % n
    ext = np.take(a, idx, axis=axis)
    c = np.cumsum(ext, axis=axis)
    zero = np.zeros_like(np.take(c, [0], axis=axis))
    c = np.concatenate([zero, c], axis=axis)
    w = 2 * m + 1
    hi = np.take(c, np.arange(w, w + n), axis=axis)
    lo = np.take(c, np.arange(0, n), axis=axis)
    return hi - lo


def maximal_radii(grid: Grid) -> list[int]:
    """Cube half-widths in cells: 0, 1, 2, 4, ... up to n/2 (the whole torus)."""
    radii = [0]
    m = 1
    while m <= grid.n // 2:
        radii.append(m)
        m *= 2
    return radii


def maximal_function(f: Field) -> Field:
    """
    Discrete centered maximal function of |f|.

    At each point, the largest average of |f| over the periodic cubes of
    half-width r in {0, dx, 2dx, 4dx, ..., L}.  A cube that would cover
    the torus more than once is replaced by the whole-torus average.  The
result is real and nonnegative (stored as a Field).
    """
    grid = f.grid
    a = np.abs(f.values)
    best = a.copy()
    for m in maximal_radii(grid)[1:]:
        w = 2 * m + 1
        if w > grid.n:
            avg = np.full(grid.shape, a.mean())
        else:
            s = a
            for ax in range(grid.dim):
                s = _box_sum(s, m, ax)
            avg = s / w**grid.dim
        np.maximum(best, avg, out=best)
    return Field(grid, best)


# -- calibrated constants ------------------------------------------------------


def read_constants(path: str | os.PathLike) -> dict[str, float]:
    """Parse a ``name = value`` file; ``#`` starts a comment."""
    out: dict[str, float] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'name = value'")
            name, value = (s.strip() for s in line.split("=", 1))
            out[name] = float(value)
    return out


def write_constants(
    path: str | os.PathLike, constants: dict[str, float], comment: Sequence[str] = ()
) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for c in comment:
            fh.write(f"# {c}\n")
        for name in sorted(constants):
            fh.write(f"{name} = {constants[name]:.17g}\n")
