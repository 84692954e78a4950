import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nlslab.grid import (
    Field,
    SpectralField,
    apply_multiplier,
    boundary_fraction,
    cubic_nonlinearity,
    forward_transform,
    fractional_derivative,
    inverse_transform,
    make_grid,
    product,
)
from nlslab.initial_data import random_band_field
from nlslab.norms import lebesgue_norm

from conftest import random_field, single_mode


def rel(a, b):
    return np.linalg.norm(a - b) / np.linalg.norm(b)


class TestMakeGrid:
    def test_spacing_and_nyquist(self):
        g = make_grid(3, 64, 8 * math.pi)
        assert g.dx == pytest.approx(math.pi / 4, rel=1e-15)
        assert g.xi_max == pytest.approx(4.0, rel=1e-15)
        assert g.dx * g.n == pytest.approx(2 * g.half_width, rel=0, abs=0)

    def test_frequency_table(self):
        g = make_grid(1, 8, 4)
        np.testing.assert_allclose(g.frequencies, math.pi / 4 * np.arange(-4, 4), rtol=0, atol=1e-15)
        assert sorted(g.wavenumbers) == pytest.approx(list(g.frequencies))

    @pytest.mark.parametrize("args", [(3, 63, 8), (3, 4, 8), (3, 40, 8), (4, 8, 1), (0, 8, 1), (2, 8, 0), (2, 8, -1), (1, 8, math.inf)])
    def test_rejects(self, args):
        with pytest.raises(ValueError):
            make_grid(*args)

    @pytest.mark.parametrize("n", [8, 12, 16, 24, 48, 96])
    def test_accepts_three_smooth(self, n):
        assert make_grid(1, n, 1.0).n == n


class TestField:
    def test_rejects_non_finite(self):
        g = make_grid(1, 8, 1)
        v = np.zeros(8)
        v[3] = np.nan
        with pytest.raises(ValueError):
            Field(g, v)

    def test_rejects_wrong_length(self):
        with pytest.raises(ValueError):
            Field(make_grid(1, 8, 1), np.zeros(9))

    def test_flat_row_major_input(self):
        g = make_grid(2, 8, 1)
        flat = np.arange(64.0)
        f = Field(g, flat)
        assert f.values[1, 0] == 8 and f.values[0, 1] == 1

    def test_immutable(self):
        f = Field.zeros(make_grid(1, 8, 1))
        with pytest.raises(AttributeError):
            f.values = None
        with pytest.raises(ValueError):
            f.values[0] = 1

    def test_grid_mismatch(self):
        a = Field.zeros(make_grid(1, 8, 1))
        b = Field.zeros(make_grid(1, 8, 2))
        with pytest.raises(ValueError):
            a + b


class TestTransforms:
    def test_zero(self, grid3):
        z = forward_transform(Field.zeros(grid3))
        assert not np.any(z.coeffs)
        assert not np.any(inverse_transform(SpectralField(grid3, np.zeros(grid3.shape))).values)

    def test_gaussian_closed_form_1d(self):
        g = make_grid(1, 128, 20.0)
        (x,) = g.mesh()
        f = Field(g, np.exp(-x**2 / 2))
        (k,) = g.frequency_mesh()
        c = forward_transform(f).coeffs
        assert rel(c, np.exp(-k**2 / 2)) < 1e-8

    def test_roundtrip(self, grid3, rng):
        f = random_field(grid3, rng)
        assert rel(inverse_transform(forward_transform(f)).values, f.values) < 1e-12

    def test_single_mode_amplitude(self):
        g = make_grid(2, 16, 3.0)
        c = np.zeros(g.shape, dtype=complex)
        c[2, -3] = 1.0
        f = inverse_transform(SpectralField(g, c))
        x, y = g.mesh()
        expected = (2 * math.pi) ** -1 * g.mode_volume * np.exp(1j * g.dxi * (2 * x - 3 * y))
        assert rel(f.values, expected) < 1e-13

    def test_at_reads_negative_modes(self):
        g = make_grid(1, 16, math.pi)
        f = single_mode(g, (-3,))
        s = forward_transform(f)
        assert abs(s.at((-3,))) > 1
        assert abs(s.at((3,))) < 1e-12

    def test_plancherel_100_fields(self, grid3, rng):
        for _ in range(100):
            f = random_field(grid3, rng)
            lhs = lebesgue_norm(f, 2)
            rhs = math.sqrt(np.sum(np.abs(forward_transform(f).coeffs) ** 2) * grid3.mode_volume)
            assert abs(lhs / rhs - 1) < 1e-12

    def test_linearity(self, grid3, rng):
        f, g = random_field(grid3, rng), random_field(grid3, rng)
        a, b = 0.3 - 2j, 1.7
        lhs = forward_transform(a * f + b * g).coeffs
        rhs = a * forward_transform(f).coeffs + b * forward_transform(g).coeffs
        assert rel(lhs, rhs) < 1e-13

    def test_translation_covariance(self, grid3, rng):
        f = random_field(grid3, rng)
        for axis in range(3):
            shifted = Field(grid3, np.roll(f.values, 1, axis=axis))
            k = grid3.frequency_mesh()[axis]
            expected = forward_transform(f).coeffs * np.exp(-1j * k * grid3.dx)
            assert rel(forward_transform(shifted).coeffs, expected) < 1e-12

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.sampled_from([8, 12, 16]), st.integers(1, 3))
    def test_roundtrip_property(self, seed, n, dim):
        g = make_grid(dim, n, 2.5)
        f = random_field(g, np.random.default_rng(seed))
        assert rel(inverse_transform(forward_transform(f)).values, f.values) < 1e-12


class TestMultipliers:
    def test_identity(self, grid3, rng):
        f = random_field(grid3, rng)
        assert rel(apply_multiplier(f, lambda xi: np.ones(grid3.shape)).values, f.values) < 1e-12
        assert rel(apply_multiplier(f, 1.0).values, f.values) < 1e-12

    def test_laplacian_symbol_on_mode(self, grid3):
        f = single_mode(grid3, (1, -2, 3))
        xi2 = grid3.dxi**2 * 14
        out = apply_multiplier(f, lambda xi: sum(k**2 for k in xi))
        assert rel(out.values, xi2 * f.values) < 1e-12

    def test_half_power_two_modes(self, grid3):
        a, b = single_mode(grid3, (1, 0, 0)), single_mode(grid3, (0, 3, 4))
        out = apply_multiplier(2 * a + b, grid3.xi_norm**0.5)
        expected = 2 * grid3.dxi**0.5 * a.values + (5 * grid3.dxi) ** 0.5 * b.values
        assert rel(out.values, expected) < 1e-12

    def test_rejects_non_finite_symbol(self, grid3):
        f = single_mode(grid3, (1, 0, 0))
        with pytest.raises(ValueError), np.errstate(divide="ignore"):
            apply_multiplier(f, lambda xi: 1 / (xi[0] * np.ones(grid3.shape)))

    def test_fractional_derivative(self, grid3, rng):
        f = single_mode(grid3, (2, 0, 1))
        assert rel(fractional_derivative(f, 2).values, 5 * grid3.dxi**2 * f.values) < 1e-12
        c = Field(grid3, np.full(grid3.shape, 3.0 + 1j))
        assert np.abs(fractional_derivative(c, 0).values).max() < 1e-13
        g = random_field(grid3, rng)
        mean_free = Field(grid3, g.values - g.values.mean())
        assert rel(fractional_derivative(mean_free, 0).values, mean_free.values) < 1e-12
        with pytest.raises(ValueError):
            fractional_derivative(f, -0.5)

    def test_half_derivative_on_band_field(self, grid32):
        for N in (1.0, 2.0, 4.0):
            f = random_band_field(grid32, N, 7)
            r = lebesgue_norm(fractional_derivative(f, 0.5), 2) / (N**0.5 * lebesgue_norm(f, 2))
            assert 2**-0.5 <= r <= 2**0.5


class TestProducts:
    def test_dealiased_product_band_limited_exact(self):
        g = make_grid(1, 32, math.pi)
        a, b = single_mode(g, (5,)), single_mode(g, (7,))
        out = product(a, b)
        assert rel(out.values, single_mode(g, (12,)).values) < 1e-12
        c = single_mode(g, (10,))
        # 5 + 7 + 10 = 22 is beyond the Nyquist mode 16: truncated, not aliased
        assert np.abs(product(a, b, c).values).max() < 1e-12
        assert rel(product(a, b, c, dealias=False).values, single_mode(g, (-10,)).values) < 1e-12

    def test_cubic_matches_product(self, grid3, rng):
        # without Nyquist content, interpolating conj(f) and conjugating the
        # interpolant coincide
        f = apply_multiplier(random_field(grid3, rng), grid3.xi_norm < 0.9 * grid3.xi_max)
        assert rel(cubic_nonlinearity(f).values, product(f, f.conj(), f).values) < 1e-12
        assert rel(cubic_nonlinearity(f, False).values, (np.abs(f.values) ** 2 * f.values)) < 1e-15

    def test_boundary_fraction(self):
        g = make_grid(1, 16, 1)
        assert boundary_fraction(Field.zeros(g)) == 0
        v = np.zeros(16)
        v[0] = 1
        v[8] = 1
        assert boundary_fraction(Field(g, v)) == pytest.approx(0.5)
        v = np.zeros(16)
        v[3] = 1
        assert boundary_fraction(Field(g, v)) == 0
        v[14] = 1
        assert boundary_fraction(Field(g, v)) == pytest.approx(0.5)
