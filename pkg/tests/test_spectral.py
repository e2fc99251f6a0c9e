"""
Tests for the spectral core.

Validates:
- Grid construction, wavenumber tables and the 2/3 dealias mask
- SpectralField transforms, symmetry checks and arithmetic
- Fourier multipliers (fractional Laplacian, Leray projector, Riesz transforms, derivatives)
- Dealiased products and the nonlinear term
- Dilation and scaled interpolation
"""

import numpy as np
import pytest

from leraylab.spectral import (
    SpectralField, make_grid, fractional_laplacian, leray_project, riesz_transform, partial, gradient,
    divergence, dealias, tensor_product, divergence_residual, nonlinear_term, advective_term, lp_norm,
    random_field, gaussian_bump, dilate, interpolate_scaled, MultiplierSpec, apply_multiplier
)
from leraylab.spectral.grid import THREADS_ENV, fft_workers


def _rel(a, b):
    return np.max(np.abs(a - b)) / np.max(np.abs(b))


class TestGrid:
    """Grid construction and wavenumber conventions."""

    def test_validation(self):
        with pytest.raises(ValueError, match="n must be even"):
            make_grid(2, 31)
        with pytest.raises(ValueError, match="dim must be"):
            make_grid(4, 16)
        with pytest.raises(ValueError, match="box_length must be positive"):
            make_grid(2, 16, -1.0)
        with pytest.raises(ValueError, match="at least 4"):
            make_grid(1, 2)

    def test_wavenumbers_fft_order(self):
        grid = make_grid(1, 8, 2 * np.pi)

        assert list(grid.axis_modes) == [0, 1, 2, 3, -4, -3, -2, -1]
        assert np.allclose(grid.axis_wavenumbers, grid.axis_modes)

        # odd-order symbols drop the Nyquist mode
        assert grid.axis_derivative_wavenumbers[4] == 0.0
        assert grid.axis_derivative_wavenumbers[3] == 3.0

    def test_centered_coordinates(self):
        grid = make_grid(2, 16, 16 * np.pi)

        assert grid.axis_coordinates[8] == 0.0
        assert np.isclose(grid.axis_coordinates[0], -8 * np.pi)
        assert grid.radius()[8, 8] == 0.0
        assert grid.window_mask(0.35)[8, 8]
        assert not grid.window_mask(0.35)[0, 0]

    def test_dealias_mask(self):
        grid = make_grid(1, 12, 2 * np.pi)

        # |m| < n/3 = 4 survives
        kept = sorted(grid.axis_modes[grid.dealias_mask])
        assert kept == [-3, -2, -1, 0, 1, 2, 3]

    def test_grid_equality(self):
        assert make_grid(2, 16, 1.0) == make_grid(2, 16, 1.0)
        assert make_grid(2, 16, 1.0) != make_grid(2, 32, 1.0)

    def test_fft_workers(self, monkeypatch):
        monkeypatch.setenv(THREADS_ENV, "3")
        assert fft_workers() == 3

        monkeypatch.setenv(THREADS_ENV, "many")
        assert fft_workers() == 1

        monkeypatch.setenv(THREADS_ENV, "0")
        assert fft_workers() == 1


class TestSpectralField:
    """Transforms, symmetry and arithmetic of SpectralField."""

    def test_physical_roundtrip(self, grid2d):
        values = np.random.default_rng(0).standard_normal(grid2d.shape)
        f = SpectralField.from_physical(grid2d, values)

        assert f.rank == "scalar"
        assert f.hermitian
        assert np.allclose(f.physical(), values, atol=1e-12)

    def test_rank_inferred_from_shape(self, grid2d):
        f = SpectralField.from_physical(grid2d, np.zeros((2, 2) + grid2d.shape))
        assert f.rank == "tensor"
        assert f.ncomponents == 4

    def test_rejects_asymmetric_coefficients(self, grid1d):
        coeffs = np.zeros(grid1d.shape, dtype=complex)
        coeffs[3] = 1.0

        with pytest.raises(ValueError, match="conjugate symmetric"):
            SpectralField(grid1d, coeffs)

        # complex fields are allowed without the symmetry
        f = SpectralField(grid1d, coeffs, hermitian=False)
        assert np.iscomplexobj(f.physical())

    def test_rejects_wrong_shape(self, grid2d):
        with pytest.raises(ValueError, match="needs coefficients of shape"):
            SpectralField(grid2d, np.zeros((2,) + grid2d.shape), rank="scalar")

    def test_coefficients_read_only(self, grid2d):
        f = random_field(grid2d)
        with pytest.raises(ValueError):
            f.coeffs[0, 0] = 1.0

    def test_parseval(self, grid2d):
        f = random_field(grid2d, seed=3)
        direct = np.sqrt(grid2d.cell_volume * np.sum(f.physical() ** 2))
        assert np.isclose(f.l2_norm(), direct, rtol=1e-12)

    def test_arithmetic(self, grid2d):
        f = random_field(grid2d, seed=1)
        g = random_field(grid2d, seed=2)

        assert np.allclose((f + g).physical(), f.physical() + g.physical())
        assert np.allclose((f - g).physical(), f.physical() - g.physical())
        assert np.allclose((2.5 * f).physical(), 2.5 * f.physical())
        assert np.allclose((-f).physical(), -f.physical())

    def test_incompatible_fields(self, grid2d):
        f = random_field(grid2d)
        v = random_field(grid2d, rank="vector")
        with pytest.raises(ValueError, match="incompatible"):
            f + v
        with pytest.raises(ValueError, match="incompatible"):
            f + random_field(make_grid(2, 16, 2 * np.pi))

    def test_mean_and_component(self, grid2d):
        values = np.ones((2,) + grid2d.shape)
        values[1] *= 3.0
        u = SpectralField.from_physical(grid2d, values, rank="vector")

        assert np.allclose(u.mean(), [1.0, 3.0])
        assert not u.is_mean_zero()
        assert u.component(1).rank == "scalar"
        assert np.allclose(u.component(1).physical(), 3.0)


class TestMultipliers:
    """Fourier multipliers and derivatives."""

    def test_fractional_laplacian_of_sine(self, grid1d):
        x = grid1d.axis_points
        f = SpectralField.from_physical(grid1d, np.sin(3 * x))

        for s in (0.5, 1.0, 1.7, -1.0):
            assert np.allclose(fractional_laplacian(f, s).physical(), 3.0 ** s * np.sin(3 * x), atol=1e-12)

    def test_fractional_laplacian_composition(self, grid3d):
        f = random_field(grid3d, seed=5)
        twice = fractional_laplacian(fractional_laplacian(f, 0.6), 0.9)
        once = fractional_laplacian(f, 1.5)
        assert _rel(twice.coeffs, once.coeffs) < 1e-13

    def test_fractional_laplacian_validation(self, grid1d):
        f = SpectralField.from_physical(grid1d, np.ones(grid1d.shape))
        with pytest.raises(ValueError, match="must lie in"):
            fractional_laplacian(f, 5.0)
        with pytest.raises(ValueError, match="nonintegrable zero mode"):
            fractional_laplacian(f, -0.5)

    def test_multiplier_zero_mode(self, grid1d):
        f = SpectralField.from_physical(grid1d, 2.0 + np.cos(grid1d.axis_points))
        spec = MultiplierSpec(lambda grid: grid.kmag ** 2, zero_mode_value=5.0)
        g = apply_multiplier(f, spec)
        assert np.isclose(g.mean(), 10.0)

        with pytest.raises(ValueError, match="must be finite"):
            MultiplierSpec(lambda grid: grid.kmag, zero_mode_value=np.inf)

    def test_leray_projection(self, grid3d):
        u = random_field(grid3d, rank="vector", seed=7)
        pu = leray_project(u)

        assert divergence_residual(u) > 1e-2
        assert divergence_residual(pu) < 1e-13
        assert _rel(leray_project(pu).coeffs, pu.coeffs) < 1e-13

    def test_leray_removes_gradients(self, grid3d):
        phi = random_field(grid3d, seed=8)
        assert leray_project(gradient(phi)).l2_norm() < 1e-13 * gradient(phi).l2_norm()

    def test_leray_needs_vector(self, grid2d):
        with pytest.raises(ValueError, match="expected a vector"):
            leray_project(random_field(grid2d))

    def test_riesz_square_sum(self, grid2d):
        f = random_field(grid2d, seed=9)
        total = sum(riesz_transform(riesz_transform(f, i), i).coeffs for i in range(2))
        assert _rel(total, -f.coeffs) < 1e-12

    def test_riesz_recovers_lambda(self, grid2d):
        f = random_field(grid2d, seed=13)
        total = sum(riesz_transform(partial(f, i), i).coeffs for i in range(2))
        lam = fractional_laplacian(f, 1.0).coeffs
        assert _rel(-total, lam) < 1e-12
        assert _rel(total + lam, lam) < 1e-12

    def test_riesz_plane_wave(self, grid1d):
        x = grid1d.axis_points
        f = SpectralField.from_physical(grid1d, np.cos(2 * x) + 3.0)
        assert np.allclose(riesz_transform(f, 0).physical(), -np.sin(2 * x), atol=1e-13)

    def test_derivatives(self, grid1d):
        x = grid1d.axis_points
        f = SpectralField.from_physical(grid1d, np.sin(3 * x))
        assert np.allclose(partial(f, 0).physical(), 3 * np.cos(3 * x), atol=1e-12)

    def test_divergence_of_gradient(self, grid2d):
        f = random_field(grid2d, seed=10)
        lap = divergence(gradient(f))
        assert _rel(lap.coeffs, -grid2d.k2 * f.coeffs) < 1e-12

    def test_tensor_divergence_contracts_first_index(self, grid2d):
        u = leray_project(random_field(grid2d, rank="vector", seed=11))
        v = random_field(grid2d, rank="vector", seed=12)
        assert _rel(divergence(tensor_product(u, v)).coeffs, advective_term(u, v).coeffs) < 1e-10


class TestProducts:
    """Dealiasing and the nonlinear term."""

    def test_dealias(self, grid2d):
        f = dealias(random_field(grid2d, band=grid2d.n))
        assert np.all(f.coeffs[~grid2d.dealias_mask] == 0)

    def test_tensor_product_is_dealiased(self, grid2d):
        u = random_field(grid2d, rank="vector", seed=13, band=grid2d.n)
        T = tensor_product(u, u)

        assert T.rank == "tensor"
        assert np.all(T.coeffs[:, :, ~grid2d.dealias_mask] == 0)
        assert np.allclose(T.coeffs[0, 1], T.coeffs[1, 0])

    def test_nonlinear_term_warns_on_divergent_input(self, grid2d):
        u = random_field(grid2d, rank="vector", seed=14)
        with pytest.warns(RuntimeWarning, match="relative divergence"):
            nonlinear_term(u, u)


class TestNormsAndFields:
    """Grid norms and seeded test fields."""

    def test_lp_norms(self):
        grid = make_grid(1, 16, 2 * np.pi)
        f = SpectralField.from_physical(grid, np.sin(grid.axis_points))

        assert np.isclose(lp_norm(f, np.inf), 1.0)
        assert np.isclose(lp_norm(f, 2), np.sqrt(np.pi))
        with pytest.raises(ValueError, match="at least 1"):
            lp_norm(f, 0.5)

    def test_random_field_seeded(self, grid2d):
        a = random_field(grid2d, "vector", seed=42)
        b = random_field(grid2d, "vector", seed=42)
        c = random_field(grid2d, "vector", seed=43)

        assert np.array_equal(a.coeffs, b.coeffs)
        assert not np.array_equal(a.coeffs, c.coeffs)
        assert a.is_mean_zero()
        assert divergence_residual(random_field(grid2d, "vector", solenoidal=True)) < 1e-13

    def test_random_field_band(self, grid2d):
        f = random_field(grid2d, band=4)
        outside = grid2d.kmag / grid2d.fundamental > 4 + 1e-9
        assert np.all(f.coeffs[outside] == 0)


class TestScaling:
    """Dilation and scaled interpolation about the box center."""

    def test_dilate_identity(self):
        grid = make_grid(1, 128, 16 * np.pi)
        f = gaussian_bump(grid, 2.0)
        assert np.max(np.abs(dilate(f, 1.0).physical() - f.physical())) < 1e-12

    def test_dilate_compresses_bump(self):
        grid = make_grid(1, 128, 16 * np.pi)
        f = gaussian_bump(grid, 2.0)
        expected = gaussian_bump(grid, 1.0).physical()
        assert np.max(np.abs(dilate(f, 0.5).physical() - expected)) < 1e-8

    def test_dilate_validation(self, grid1d):
        with pytest.raises(ValueError, match="dilation factor"):
            dilate(gaussian_bump(grid1d, 0.5), 1.5)

    def test_interpolate_scaled(self):
        grid = make_grid(1, 128, 16 * np.pi)
        f = gaussian_bump(grid, 2.0)

        assert np.max(np.abs(interpolate_scaled(f, 1.0) - f.physical())) < 1e-12
        expected = gaussian_bump(grid, 1.0).physical()
        assert np.max(np.abs(interpolate_scaled(f, 2.0) - expected)) < 1e-10

    def test_interpolate_validation(self, grid1d):
        with pytest.raises(ValueError, match="must be positive"):
            interpolate_scaled(gaussian_bump(grid1d, 0.5), 0.0)
