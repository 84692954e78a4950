"""
Periodic grids, lattice fields and the unitary discrete Fourier pair.

The physical domain is the periodic cube ``[-L, L)^dim`` sampled at
``x_j = -L + j*dx`` with ``dx = 2L/n``.  Mode frequencies are
``xi_k = (pi/L) * k`` for ``k in {-n/2, ..., n/2 - 1}``.

Transforms use the unitary convention

    f_hat(xi) = (2 pi)^(-dim/2) * sum_j f(x_j) exp(-i xi.x_j) dx^dim
    f(x)      = (2 pi)^(-dim/2) * sum_k f_hat(xi_k) exp(+i xi_k.x) dxi^dim

so Plancherel holds exactly on the lattice:
``sum |f|^2 dx^dim == sum |f_hat|^2 dxi^dim``.

Spectral coefficients are stored in numpy FFT order throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Callable, Sequence, Union

import numpy as np
import scipy.fft as sfft

__all__ = [
    "Grid",
    "Field",
    "SpectralField",
    "make_grid",
    "forward_transform",
    "inverse_transform",
    "apply_multiplier",
    "radial_symbol",
    "fractional_derivative",
    "product",
    "cubic_nonlinearity",
    "upsample",
    "downsample",
    "boundary_fraction",
    "fftn",
    "ifftn",
]

Multiplier = Union[np.ndarray, Callable[[tuple], np.ndarray]]


def fftn(a: np.ndarray) -> np.ndarray:
    return sfft.fftn(a, workers=-1)


def ifftn(a: np.ndarray) -> np.ndarray:
    return sfft.ifftn(a, workers=-1)


def _is_fft_friendly(n: int) -> bool:
    # even and 3-smooth: 8, 12, 16, 24, 32, 48, 64, 96, ...
    if n < 8 or n % 2:
        return False
    while n % 2 == 0:
        n //= 2
    while n % 3 == 0:
        n //= 3
    return n == 1


@dataclass(frozen=True)
class Grid:
    """
    Uniform periodic grid on ``[-half_width, half_width)^dim``.

    Attributes
    ----------
    dim : int
        Spatial dimension (1, 2 or 3).
    n : int
        Points per axis. Must be even, at least 8 and of the form
        ``2^a * 3^b`` so the FFT stays fast (64, 96, 128, ...).
    half_width : float
        L, the half side of the periodic cube.
    """

    dim: int
    n: int
    half_width: float

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ValueError(f"dim must be 1, 2 or 3, got {self.dim}")
        if not isinstance(self.n, (int, np.integer)) or not _is_fft_friendly(int(self.n)):
            raise ValueError(
                f"n must be an even integer >= 8 of the form 2^a 3^b, got {self.n}"
            )
        if not (self.half_width > 0 and math.isfinite(self.half_width)):
            raise ValueError(f"half_width must be positive and finite, got {self.half_width}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "half_width", float(self.half_width))

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.dim

    @property
    def size(self) -> int:
        return self.n**self.dim

    @property
    def dx(self) -> float:
        return 2.0 * self.half_width / self.n

    @property
    def dxi(self) -> float:
        """Frequency spacing pi/L."""
        return math.pi / self.half_width

    @property
    def xi_max(self) -> float:
        """Nyquist magnitude pi*n/(2L) along one axis."""
        return math.pi * self.n / (2.0 * self.half_width)

    @property
    def xi_corner(self) -> float:
        """Largest frequency magnitude present on the lattice, sqrt(dim)*xi_max."""
        return math.sqrt(self.dim) * self.xi_max

    @property
    def cell_volume(self) -> float:
        return self.dx**self.dim

    @property
    def mode_volume(self) -> float:
        return self.dxi**self.dim

    @cached_property
    def coordinates(self) -> np.ndarray:
        return -self.half_width + self.dx * np.arange(self.n)

    @cached_property
    def frequencies(self) -> np.ndarray:
        """Per-axis mode frequencies in ascending order."""
        return self.dxi * np.arange(-self.n // 2, self.n // 2)

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """Per-axis mode frequencies in FFT order."""
        return self.dxi * self.mode_numbers

    @cached_property
    def mode_numbers(self) -> np.ndarray:
        return np.fft.fftfreq(self.n, d=1.0 / self.n).round().astype(np.int64)

    def mesh(self) -> tuple[np.ndarray, ...]:
        """Open (broadcastable) coordinate arrays, one per axis."""
        return _open_mesh(self.coordinates, self.dim)

    def frequency_mesh(self) -> tuple[np.ndarray, ...]:
        """Open frequency arrays in FFT order, one per axis."""
        return _open_mesh(self.wavenumbers, self.dim)

    @cached_property
    def radius(self) -> np.ndarray:
        """|x| at every grid point."""
        return np.sqrt(sum(c**2 for c in self.mesh())) * np.ones(self.shape)

    @cached_property
    def xi_squared(self) -> np.ndarray:
        """|xi|^2 on the full lattice, FFT order."""
        return sum(k**2 for k in self.frequency_mesh()) * np.ones(self.shape)

    @cached_property
    def xi_norm(self) -> np.ndarray:
        return np.sqrt(self.xi_squared)

    @cached_property
    def _phase_sign(self) -> np.ndarray:
        # exp(i xi_k L) = (-1)^k per axis: the offset of x_0 = -L
        s = np.where(self.mode_numbers % 2 == 0, 1.0, -1.0)
        return np.prod(np.broadcast_arrays(*_open_mesh(s, self.dim)), axis=0)

    def rescaled(self, lam: float) -> "Grid":
        """Grid with the same n on the box shrunk by ``lam``."""
        return Grid(self.dim, self.n, self.half_width / lam)

    def with_n(self, n: int) -> "Grid":
        return Grid(self.dim, n, self.half_width)


def _open_mesh(axis: np.ndarray, dim: int) -> tuple[np.ndarray, ...]:
    out = []
    for a in range(dim):
        shape = [1] * dim
        shape[a] = axis.size
        out.append(axis.reshape(shape))
    return tuple(out)


def make_grid(dim: int, n: int, half_width: float) -> Grid:
    """Build a :class:`Grid`; raises ``ValueError`` on invalid parameters."""
    return Grid(dim, n, half_width)


class Field:
    """
    Complex lattice function on a :class:`Grid`.

    Values are held as a read-only array of shape ``grid.shape``; a flat
    row-major array of length ``n**dim`` is accepted on construction.
    Non-finite input is rejected.
    """

    __slots__ = ("grid", "values")

    def __init__(self, grid: Grid, values):
        v = np.array(values, dtype=np.complex128)
        if v.size != grid.size:
            raise ValueError(f"expected {grid.size} samples, got {v.size}")
        v = v.reshape(grid.shape)
        if not np.isfinite(v).all():
            raise ValueError("field contains non-finite values")
        v.flags.writeable = False
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", v)

    def __setattr__(self, name, value):
        raise AttributeError("Field is immutable")

    def __repr__(self) -> str:
        return f"Field(grid={self.grid!r})"

    @classmethod
    def zeros(cls, grid: Grid) -> "Field":
        return cls(grid, np.zeros(grid.shape, dtype=np.complex128))

    def _check(self, other: "Field") -> None:
        if other.grid != self.grid:
            raise ValueError("fields live on different grids")

    def __add__(self, other):
        if isinstance(other, Field):
            self._check(other)
            return Field(self.grid, self.values + other.values)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, Field):
            self._check(other)
            return Field(self.grid, self.values - other.values)
        return NotImplemented

    def __neg__(self):
        return Field(self.grid, -self.values)

    def __mul__(self, other):
        if isinstance(other, Field):
            self._check(other)
            return Field(self.grid, self.values * other.values)
        if np.isscalar(other):
            return Field(self.grid, self.values * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if np.isscalar(other):
            return Field(self.grid, self.values / other)
        return NotImplemented

    def conj(self) -> "Field":
        return Field(self.grid, self.values.conj())

    def abs(self) -> np.ndarray:
        return np.abs(self.values)

    def ravel(self) -> np.ndarray:
        return self.values.ravel()


class SpectralField:
    """
    Fourier coefficients ``f_hat(xi_k)`` of a :class:`Field`, FFT order.

    Use :meth:`at` to read a coefficient by its integer mode tuple
    (negative modes allowed), and ``grid.frequency_mesh()`` for the
    matching frequencies.
    """

    __slots__ = ("grid", "coeffs")

    def __init__(self, grid: Grid, coeffs):
        c = np.array(coeffs, dtype=np.complex128).reshape(grid.shape)
        c.flags.writeable = False
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "coeffs", c)

    def __setattr__(self, name, value):
        raise AttributeError("SpectralField is immutable")

    def at(self, mode: Sequence[int]) -> complex:
        n = self.grid.n
        if len(mode) != self.grid.dim:
            raise ValueError("mode tuple length must equal grid.dim")
        idx = tuple(int(k) % n for k in mode)
        return complex(self.coeffs[idx])

    def centered(self) -> np.ndarray:
        """Coefficients with the zero mode moved to the array center."""
        return np.fft.fftshift(self.coeffs)


def _forward_scale(grid: Grid) -> float:
    return grid.cell_volume * (2.0 * math.pi) ** (-grid.dim / 2)


def _inverse_scale(grid: Grid) -> float:
    return grid.size * grid.mode_volume * (2.0 * math.pi) ** (-grid.dim / 2)


def forward_transform(f: Field) -> SpectralField:
    g = f.grid
    return SpectralField(g, fftn(f.values) * (_forward_scale(g) * g._phase_sign))


def inverse_transform(s: SpectralField) -> Field:
    g = s.grid
    return Field(g, ifftn(s.coeffs * g._phase_sign) * _inverse_scale(g))


def _symbol(grid: Grid, m: Multiplier) -> np.ndarray:
    sym = m(grid.frequency_mesh()) if callable(m) else np.asarray(m)
    sym = np.broadcast_to(sym, grid.shape)
    if not np.isfinite(sym).all():
        raise ValueError("multiplier is not finite on every grid frequency")
    return sym


def apply_multiplier(f: Field, m: Multiplier) -> Field:
    """
    Apply the Fourier multiplier ``m`` to ``f``.

    ``m`` is either an array broadcastable to ``grid.shape`` (FFT order)
    or a callable receiving the tuple ``grid.frequency_mesh()``.  For
    singular symbols the caller must supply the value at ``xi = 0``.
    """
    sym = _symbol(f.grid, m)
    # scale and phase factors of the unitary pair cancel for multipliers
    return Field(f.grid, ifftn(sym * fftn(f.values)))


def radial_symbol(grid: Grid, func: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Evaluate ``func(|xi|)`` on the lattice (FFT order)."""
    return func(grid.xi_norm)


def fractional_derivative(f: Field, s: float) -> Field:
    """|nabla|^s f, with the zero-frequency symbol set to 0 (also for s = 0)."""
    if s < 0:
        raise ValueError("s must be non-negative")
    k = f.grid.xi_norm
    sym = np.zeros_like(k)
    nz = k > 0
    sym[nz] = k[nz] ** s
    return apply_multiplier(f, sym)


# -- dealiased products ------------------------------------------------------


def _pad_index(n: int, m: int) -> np.ndarray:
    h = n // 2
    return np.r_[0:h, m - h : m]


def upsample(values: np.ndarray, grid: Grid, factor: int = 2) -> np.ndarray:
    """Exact trigonometric interpolation onto a grid ``factor`` times finer."""
    n, m = grid.n, factor * grid.n
    uh = fftn(values)
    big = np.zeros((m,) * grid.dim, dtype=np.complex128)
    big[np.ix_(*[_pad_index(n, m)] * grid.dim)] = uh
    return ifftn(big) * factor**grid.dim


def downsample(values: np.ndarray, grid: Grid, factor: int = 2) -> np.ndarray:
    """Spectral truncation of a fine-grid array back onto ``grid``."""
    n, m = grid.n, factor * grid.n
    big = fftn(values)
    uh = big[np.ix_(*[_pad_index(n, m)] * grid.dim)]
    return ifftn(uh) / factor**grid.dim


def product(*fields: Field, dealias: bool = True) -> Field:
    """
    Pointwise product of fields.

    With ``dealias`` the factors are interpolated onto a 2x grid, multiplied
    there and truncated back, which removes all aliasing for products of up
    to three factors.
    """
    if not fields:
        raise ValueError("need at least one field")
    grid = fields[0].grid
    for f in fields[1:]:
        if f.grid != grid:
            raise ValueError("fields live on different grids")
    if not dealias:
        out = np.ones(grid.shape, dtype=np.complex128)
        for f in fields:
            out = out * f.values
        return Field(grid, out)
    out = None
    for f in fields:
        up = upsample(f.values, grid)
        out = up if out is None else out * up
    return Field(grid, downsample(out, grid))


def cubic_nonlinearity(f: Field, dealias: bool = True) -> Field:
    """|f|^2 f."""
    if not dealias:
        return Field(f.grid, np.abs(f.values) ** 2 * f.values)
    up = upsample(f.values, f.grid)
    return Field(f.grid, downsample(np.abs(up) ** 2 * up, f.grid))


@lru_cache(maxsize=16)
def _boundary_mask(grid: Grid, width: int = 2) -> np.ndarray:
    edge = np.zeros(grid.n, dtype=bool)
    edge[: width + 1] = True
    edge[grid.n - width :] = True
    mask = np.zeros(grid.shape, dtype=bool)
    for ax in _open_mesh(edge, grid.dim):
        mask = mask | ax
    mask.flags.writeable = False
    return mask


def boundary_fraction(f: Field | np.ndarray, grid: Grid | None = None) -> float:
    """
    Fraction of the L^2 mass within two cells of the box faces.

    Returns 0 for the zero field.
    """
    if isinstance(f, Field):
        grid, values = f.grid, f.values
    else:
        values = f
    dens = np.abs(values) ** 2
    total = dens.sum()
    if total == 0:
        return 0.0
    return float(dens[_boundary_mask(grid)].sum() / total)
