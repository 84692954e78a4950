import csv
import math

import numpy as np
import pytest

from nlslab.duhamel import (
    duhamel_residual,
    duhamel_split,
    duhamel_table,
    f1_decay_curve,
    time_split_integrals,
)
from nlslab.grid import Field, make_grid
from nlslab.history import History
from nlslab.initial_data import gaussian
from nlslab.norms import lebesgue_norm
from nlslab.solver import SolverConfig, solve


@pytest.fixture(scope="module")
def grid():
    return make_grid(3, 32, 8.0)


def _run(grid, amp, dt=0.01, t_end=0.32, stride=1, nonlinear=True):
    u0 = gaussian(grid, amp, 1.0, boundary_threshold=1.0)
    return solve(u0, SolverConfig(dt, t_end, stride, boundary_threshold=0.5, nonlinear=nonlinear))


@pytest.fixture(scope="module")
def hist(grid):
    return _run(grid, 1.0)


def test_zero_data(grid):
    h = History.from_slices([0.0, 0.1, 0.2], [Field.zeros(grid)] * 3)
    assert not np.any(duhamel_residual(h))
    t = duhamel_table(h)
    assert not np.any(t.norm_u) and not np.any(t.norm_F1[~np.isnan(t.norm_F1)])


def test_split_identity(hist):
    s = duhamel_split(hist)
    assert not np.any(s.u_nl[0].values)
    assert s.u_l[0] is hist.initial
    for j in range(len(hist)):
        np.testing.assert_allclose((s.u_l[j] + s.u_nl[j]).values, hist.slices[j].values, rtol=0, atol=1e-15)


def test_linear_run_has_zero_nonlinear_part(grid):
    h = _run(grid, 1.0, nonlinear=False)
    s = duhamel_split(h)
    assert max(lebesgue_norm(f, 2) for f in s.u_nl) < 1e-13


def test_residual_zero_at_start_and_small(hist):
    r = duhamel_residual(hist)
    assert r[0] == 0.0
    assert r.max() < 1e-3


def test_residual_second_order(grid):
    # at dt = 0.01 the spatial floor (~1e-5) starts to show, so compare coarser pairs
    coarse = duhamel_residual(_run(grid, 1.0, dt=0.04))[-1]
    fine = duhamel_residual(_run(grid, 1.0, dt=0.02))[-1]
    assert 3.0 <= coarse / fine <= 5.0


def test_time_split_adds_up(hist):
    t = hist.times[-1]
    F1, F2 = time_split_integrals(hist, t)
    s = duhamel_split(hist)
    r = lebesgue_norm(s.u_nl[-1] - F1 - F2, 2) / lebesgue_norm(hist.slices[-1], 2)
    assert r == pytest.approx(duhamel_residual(hist)[-1], rel=1e-9, abs=1e-15)


def test_time_split_errors(hist):
    with pytest.raises(ValueError, match="not a sampled time"):
        time_split_integrals(hist, 0.05)  # 0.025 is not sampled
    with pytest.raises(ValueError, match="two samples"):
        time_split_integrals(hist, 0.0)
    with pytest.raises(ValueError):
        time_split_integrals(hist, 0.123)


def test_needs_two_samples_and_origin(grid):
    one = History.from_slices([0.0], [Field.zeros(grid)])
    with pytest.raises(ValueError):
        duhamel_residual(one)
    late = History.from_slices([0.1, 0.2], [Field.zeros(grid)] * 2)
    with pytest.raises(ValueError, match="t = 0"):
        duhamel_residual(late)


def test_cubic_amplitude_scaling(grid):
    # u_nl is O(a^3) for small data: halving a divides it by ~8
    n1 = lebesgue_norm(duhamel_split(_run(grid, 0.02)).u_nl[-1], 2)
    n2 = lebesgue_norm(duhamel_split(_run(grid, 0.01)).u_nl[-1], 2)
    assert n1 / n2 == pytest.approx(8.0, rel=1e-3)


def test_table(hist, tmp_path):
    t = duhamel_table(hist)
    assert math.isnan(t.norm_F1[0]) and math.isnan(t.norm_F1[1])
    j = hist.index_of(0.32)
    assert np.isfinite(t.norm_F1[j]) and np.isfinite(t.norm_F2[j])
    # odd multiples of dt have no sampled midpoint
    assert math.isnan(t.norm_F1[hist.index_of(0.03)])
    np.testing.assert_allclose(t.residual, duhamel_residual(hist), rtol=1e-12, atol=1e-18)
    path = tmp_path / "d.csv"
    t.write_csv(path)
    rows = list(csv.reader(open(path)))
    assert rows[0] == ["t", "norm_u", "norm_ul", "norm_unl", "norm_F1", "norm_F2", "residual"]
    assert len(rows) == len(hist) + 1
    assert rows[1][4] == "nan"


def test_f1_curve(hist):
    ts, vals = f1_decay_curve(hist)
    assert ts[0] == pytest.approx(0.02)
    assert np.all(np.isfinite(vals)) and np.all(vals > 0)
    t = ts[-1]
    F1, _ = time_split_integrals(hist, t)
    assert vals[-1] == pytest.approx(t**1.5 * np.abs(F1.values).max(), rel=1e-12)
