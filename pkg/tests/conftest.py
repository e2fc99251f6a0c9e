import numpy as np
import pytest

from leraylab.spectral import SpectralField, make_grid, partial


@pytest.fixture
def grid1d():
    return make_grid(1, 64, 2 * np.pi)


@pytest.fixture
def grid2d():
    return make_grid(2, 32, 2 * np.pi)


@pytest.fixture
def grid3d():
    return make_grid(3, 16, 2 * np.pi)


def curl_of_bump(grid, width, amplitude=1.0):
    """Divergence-free 2D field (-d2 psi, d1 psi) of a centered Gaussian stream function"""
    r2 = grid.radius() ** 2
    psi = SpectralField.from_physical(grid, amplitude * np.exp(-r2 / (2.0 * width ** 2)), rank="scalar")
    coeffs = np.stack([-partial(psi, 1).coeffs, partial(psi, 0).coeffs])
    return psi.with_coeffs(coeffs, rank="vector")


def tensor_bump(grid, width, amplitude=1.0):
    """Symmetric tensor field amplitude * exp(-|y|^2 / 2 width^2) * M with a fixed matrix M"""
    matrix = np.arange(1, grid.dim ** 2 + 1, dtype=float).reshape(grid.dim, grid.dim)
    matrix = 0.5 * (matrix + matrix.T) / np.max(matrix)
    bump = amplitude * np.exp(-grid.radius() ** 2 / (2.0 * width ** 2))
    values = matrix[(Ellipsis,) + (np.newaxis,) * grid.dim] * bump
    return SpectralField.from_physical(grid, values, rank="tensor")
