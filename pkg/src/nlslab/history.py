"""Time histories produced by solver runs (or assembled by hand)."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .grid import Field, Grid, boundary_fraction

__all__ = ["StepDiagnostics", "History", "step_diagnostics"]


class StepDiagnostics(NamedTuple):
    mass: float
    linf: float
    boundary_fraction: float


def step_diagnostics(values: np.ndarray, grid: Grid) -> StepDiagnostics:
    dens = np.abs(values) ** 2
    return StepDiagnostics(
        mass=float(dens.sum() * grid.cell_volume),
        linf=float(np.sqrt(dens.max())),
        boundary_fraction=boundary_fraction(values, grid),
    )


@dataclass
class History:
    """
    Sampled solution slices plus per-step scalar diagnostics.

    ``times``/``slices`` hold the decimated samples; ``step_*`` arrays hold
    one entry per integrator step (step 0 is the initial state).  When a run
    stops early the history is partial and ``stop_reason`` says why; the
    breaching step is kept in the step arrays, and ``horizon`` is the last
    time whose state passed the boundary monitor.
    """

    grid: Grid
    times: np.ndarray
    slices: list[Field]
    step_index: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))
    step_times: np.ndarray = field(default_factory=lambda: np.zeros(0))
    mass: np.ndarray = field(default_factory=lambda: np.zeros(0))
    linf: np.ndarray = field(default_factory=lambda: np.zeros(0))
    boundary: np.ndarray = field(default_factory=lambda: np.zeros(0))
    stopped_early: bool = False
    stop_reason: str | None = None
    horizon: float | None = None

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if len(self.times) != len(self.slices):
            raise ValueError("times and slices differ in length")
        if len(self.times) > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("times must be strictly increasing")
        for s in self.slices:
            if s.grid != self.grid:
                raise ValueError("all slices must share the history's grid")
        if self.horizon is None:
            self.horizon = float(self.times[-1]) if len(self.times) else 0.0

    @classmethod
    def from_slices(cls, times: Sequence[float], slices: Sequence[Field]) -> "History":
        """Build a history from samples alone; diagnostics are taken per sample."""
        if not slices:
            raise ValueError("need at least one slice")
        grid = slices[0].grid
        diags = [step_diagnostics(s.values, grid) for s in slices]
        return cls(
            grid=grid,
            times=np.asarray(times, dtype=float),
            slices=list(slices),
            step_index=np.arange(len(slices)),
            step_times=np.asarray(times, dtype=float),
            mass=np.array([d.mass for d in diags]),
            linf=np.array([d.linf for d in diags]),
            boundary=np.array([d.boundary_fraction for d in diags]),
        )

    def __len__(self) -> int:
        return len(self.times)

    @property
    def initial(self) -> Field:
        if len(self) == 0 or self.times[0] != 0.0:
            raise ValueError("history has no t = 0 slice")
        return self.slices[0]

    def index_of(self, t: float, rtol: float = 1e-9) -> int:
        """Index of the sample at time ``t``; ValueError if not sampled."""
        scale = max(abs(t), 1.0)
        hits = np.nonzero(np.abs(self.times - t) <= rtol * scale)[0]
        if hits.size == 0:
            raise ValueError(f"time {t} is not a sampled time")
        return int(hits[0])

    def until(self, t_max: float) -> "History":
        """The samples with t <= t_max (step diagnostics are not carried over)."""
        keep = [i for i, t in enumerate(self.times) if t <= t_max * (1 + 1e-12)]
        return History(
            grid=self.grid,
            times=self.times[keep],
            slices=[self.slices[i] for i in keep],
        )

    def diagnostics_rows(self):
        return zip(self.step_index, self.step_times, self.mass, self.linf, self.boundary)
