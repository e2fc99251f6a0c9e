import os
import numpy as np


#environment variable capping the number of FFT threads
THREADS_ENV = "LERAYLAB_THREADS"


def fft_workers():
    """
    Number of threads handed to scipy.fft, read from LERAYLAB_THREADS (default 1)
    """
    value = os.environ.get(THREADS_ENV, "1")
    try:
        workers = int(value)
    except ValueError:
        workers = 1
    return max(workers, 1)


class Grid(object):
    """
    Periodic box [0, L)^dim sampled with n points per axis.

    Wavenumber tables are stored in FFT order and shaped for broadcasting
    against arrays of shape (n,)*dim.
    """

    def __init__(self, dim, n, box_length):

        self.dim = dim
        self.n = n
        self.box_length = float(box_length)

        self.spacing = self.box_length / n
        self.shape = (n,) * dim
        self.size = n ** dim
        self.volume = self.box_length ** dim
        self.cell_volume = self.spacing ** dim
        self.fundamental = 2 * np.pi / self.box_length

        #integer mode indices in FFT order: 0, 1, ..., n/2-1, -n/2, ..., -1
        self.axis_modes = np.fft.fftfreq(n, 1.0 / n).astype(int)
        self.axis_wavenumbers = self.axis_modes * self.fundamental

        #odd-order symbols drop the unpaired Nyquist mode
        self.axis_derivative_wavenumbers = np.where(
            self.axis_modes == -n // 2, 0.0, self.axis_wavenumbers)

        #sample positions relative to the box center, origin sits at index n/2
        self.axis_points = np.arange(n) * self.spacing
        self.axis_coordinates = self.axis_points - self.box_length / 2

        self.wavenumbers = [self.along(self.axis_wavenumbers, a) for a in range(dim)]
        self.derivative_wavenumbers = [self.along(self.axis_derivative_wavenumbers, a) for a in range(dim)]
        self.coordinates = [self.along(self.axis_coordinates, a) for a in range(dim)]

        self.k2 = sum(k * k for k in self.wavenumbers)
        self.kmag = np.sqrt(self.k2)
        self.kd2 = sum(k * k for k in self.derivative_wavenumbers)

        self.dealias_mask = np.ones(self.shape, dtype=bool)
        for a in range(dim):
            keep = np.abs(self.axis_modes) < n / 3.0
            self.dealias_mask = self.dealias_mask & self.along(keep, a)

    def along(self, values, axis):
        shape = [1] * self.dim
        shape[axis] = self.n
        return np.reshape(values, shape)

    def radius(self):
        """Distance of every sample point from the box center"""
        return np.sqrt(sum(y * y for y in self.coordinates)) * np.ones(self.shape)

    def bracket(self):
        """Japanese bracket (e + |y|^2)^(1/2) of the centered coordinate"""
        return np.sqrt(np.e + self.radius() ** 2)

    def window_mask(self, fraction=0.35):
        """Sample points within fraction * L of the box center"""
        return self.radius() <= fraction * self.box_length

    def zero_mode(self):
        return (0,) * self.dim

    def get_parameters(self):
        return {"dim": self.dim, "n": self.n, "box_length": self.box_length}

    def __eq__(self, other):
        if not isinstance(other, Grid):
            return NotImplemented
        return (self.dim, self.n, self.box_length) == (other.dim, other.n, other.box_length)

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash((self.dim, self.n, self.box_length))

    def __repr__(self):
        return "<Grid dim={0} n={1} L={2:g}>".format(self.dim, self.n, self.box_length)


def make_grid(dim, n, box_length=16 * np.pi):
    """
    Build a periodic grid

    :param dim: spatial dimension, one of 1, 2, 3
    :param n: samples per axis, even and at least 4
    :param box_length: side length L of the periodic box
    :return: Grid
    """

    if dim not in (1, 2, 3):
        raise ValueError("dim must be 1, 2 or 3 (got {0})".format(dim))
    if int(n) != n:
        raise ValueError("n must be an integer (got {0})".format(n))
    n = int(n)
    if n % 2 != 0:
        raise ValueError("n must be even (got {0})".format(n))
    if n < 4:
        raise ValueError("n must be at least 4 (got {0})".format(n))
    if not np.isfinite(box_length) or box_length <= 0:
        raise ValueError("box_length must be positive (got {0})".format(box_length))

    return Grid(dim, n, box_length)
