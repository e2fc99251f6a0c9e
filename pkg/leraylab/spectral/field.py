import numpy as np
import scipy.fft

from leraylab.spectral.grid import fft_workers


RANKS = ("scalar", "vector", "tensor")

#number of leading component axes per rank
COMPONENT_AXES = {"scalar": 0, "vector": 1, "tensor": 2}

HERMITIAN_TOL = 1e-13


def component_shape(rank, dim):
    return (dim,) * COMPONENT_AXES[rank]


def rank_from_shape(shape, grid):
    """Infer the rank of an array of values sampled on grid"""
    extra = tuple(shape[:len(shape) - grid.dim])
    if tuple(shape[len(shape) - grid.dim:]) != grid.shape:
        raise ValueError("array of shape {0} does not match {1}".format(shape, grid))
    for rank in RANKS:
        if extra == component_shape(rank, grid.dim):
            return rank
    raise ValueError("cannot infer rank from component shape {0}".format(extra))


def forward(values, grid):
    """Physical samples -> coefficients c_k with f(x) = sum_k c_k exp(ik.x)"""
    axes = tuple(range(-grid.dim, 0))
    return scipy.fft.fftn(values, axes=axes, norm="forward", workers=fft_workers())


def backward(coeffs, grid):
    axes = tuple(range(-grid.dim, 0))
    return scipy.fft.ifftn(coeffs, axes=axes, norm="forward", workers=fft_workers())


def reflect(coeffs, grid):
    """Coefficient array evaluated at -k"""
    out = coeffs
    for a in range(grid.dim):
        ax = coeffs.ndim - grid.dim + a
        out = np.roll(np.flip(out, axis=ax), 1, axis=ax)
    return out


def hermitian_defect(coeffs, grid):
    scale = np.max(np.abs(coeffs)) if coeffs.size else 0.0
    if scale == 0:
        return 0.0
    return np.max(np.abs(coeffs - np.conj(reflect(coeffs, grid)))) / scale


class SpectralField(object):
    """
    Scalar, vector or tensor field on a periodic grid, stored as Fourier coefficients.

    Coefficient arrays have shape component_shape + grid.shape and are read-only.
    Vector components run along axis 0, tensor components along axes (0, 1).
    """

    def __init__(self, grid, coeffs, rank="scalar", hermitian=True, meta=None, check=True):

        if rank not in RANKS:
            raise ValueError("rank must be one of {0} (got {1})".format(RANKS, rank))

        coeffs = np.array(coeffs, dtype=np.complex128)
        expected = component_shape(rank, grid.dim) + grid.shape
        if coeffs.shape != expected:
            raise ValueError("{0} field on {1} needs coefficients of shape {2}, got {3}".format(
                rank, grid, expected, coeffs.shape))

        if hermitian and check:
            defect = hermitian_defect(coeffs, grid)
            if defect > HERMITIAN_TOL:
                raise ValueError("coefficients are not conjugate symmetric (defect {0:g})".format(defect))

        coeffs.flags.writeable = False

        self.grid = grid
        self.coeffs = coeffs
        self.rank = rank
        self.hermitian = hermitian
        self.meta = dict(meta) if meta else {}

    @classmethod
    def from_physical(cls, grid, values, rank=None, meta=None):
        """Transform real or complex samples on the grid"""
        values = np.asarray(values)
        if rank is None:
            rank = rank_from_shape(values.shape, grid)
        hermitian = not np.iscomplexobj(values)
        return cls(grid, forward(values, grid), rank=rank, hermitian=hermitian, meta=meta, check=False)

    @classmethod
    def zeros(cls, grid, rank="scalar"):
        return cls(grid, np.zeros(component_shape(rank, grid.dim) + grid.shape), rank=rank, check=False)

    @property
    def ncomponents(self):
        return int(np.prod(component_shape(self.rank, self.grid.dim)))

    def physical(self):
        values = backward(self.coeffs, self.grid)
        if self.hermitian:
            return values.real
        return values

    def with_coeffs(self, coeffs, rank=None, hermitian=None, meta=None):
        """New field on the same grid; symmetry is inherited and not re-checked"""
        return SpectralField(
            self.grid, coeffs,
            rank=self.rank if rank is None else rank,
            hermitian=self.hermitian if hermitian is None else hermitian,
            meta=meta, check=False)

    def component(self, *index):
        rank = RANKS[COMPONENT_AXES[self.rank] - len(index)]
        return self.with_coeffs(self.coeffs[index], rank=rank)

    def mean(self):
        """Zero-mode coefficient of every component"""
        return self.coeffs[(Ellipsis,) + self.grid.zero_mode()]

    def is_mean_zero(self, tol=1e-12):
        scale = np.max(np.abs(self.coeffs))
        if scale == 0:
            return True
        return np.max(np.abs(self.mean())) <= tol * scale

    def l2_norm(self):
        """L^2 norm over the box via Parseval"""
        return np.sqrt(self.grid.volume * np.sum(np.abs(self.coeffs) ** 2))

    def is_zero(self):
        return not np.any(self.coeffs)

    def _check_compatible(self, other):
        if not isinstance(other, SpectralField):
            raise TypeError("expected SpectralField, got {0}".format(type(other).__name__))
        if other.grid != self.grid or other.rank != self.rank:
            raise ValueError("incompatible fields: {0} vs {1}".format(self, other))

    def __add__(self, other):
        self._check_compatible(other)
        return self.with_coeffs(self.coeffs + other.coeffs, hermitian=self.hermitian and other.hermitian)

    def __sub__(self, other):
        self._check_compatible(other)
        return self.with_coeffs(self.coeffs - other.coeffs, hermitian=self.hermitian and other.hermitian)

    def __neg__(self):
        return self.with_coeffs(-self.coeffs)

    def __mul__(self, scalar):
        if not np.isscalar(scalar):
            return NotImplemented
        hermitian = self.hermitian and np.isrealobj(scalar)
        return self.with_coeffs(self.coeffs * scalar, hermitian=hermitian)

    __rmul__ = __mul__

    def __repr__(self):
        return "<SpectralField {0} on {1}>".format(self.rank, self.grid)
