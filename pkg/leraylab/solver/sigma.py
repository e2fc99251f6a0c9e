import numpy as np
from scipy.interpolate import RegularGridInterpolator

from leraylab.spectral import SpectralField, leray_project, divergence_residual
from leraylab.littlewood_paley.dyadic import smooth_step
from leraylab.semigroup.heat import heat_step, check_alpha
import leraylab.sanity_check as sanity


SIGMA_KINDS = ("rotational_canonical", "user_table")

#divergence defect of the sampled data tolerated without a warning
DIVERGENCE_EPS = 1e-6


class SigmaSpec(object):
    """
    Angular profile sigma of the homogeneous initial data U0 = sigma(x/|x|) / |x|^(2 alpha - 1).

    rotational_canonical: sigma(w) = A (-w_2, w_1, 0), divergence-free by symmetry.
    user_table: samples of sigma on a (theta, phi) mesh of the sphere, shape (3, ntheta, nphi),
    interpolated linearly with phi periodic.
    """

    def __init__(self, kind="rotational_canonical", amplitude=0.1, table=None, theta=None, phi=None):

        if kind not in SIGMA_KINDS:
            raise ValueError("sigma kind must be one of {0} (got {1})".format(SIGMA_KINDS, kind))

        self.kind = kind
        self.amplitude = float(amplitude)
        self.table = None
        self.theta = None
        self.phi = None
        self._interpolator = None

        if kind == "user_table":
            self._set_table(table, theta, phi)

    def _set_table(self, table, theta, phi):

        if table is None:
            raise ValueError("user_table sigma needs a table")
        table = np.asarray(table, dtype=float)
        if table.ndim != 3 or table.shape[0] != 3:
            raise ValueError("sigma table must have shape (3, ntheta, nphi), got {0}".format(table.shape))

        ntheta, nphi = table.shape[1:]
        theta = np.linspace(0, np.pi, ntheta) if theta is None else np.asarray(theta, dtype=float)
        phi = np.linspace(0, 2 * np.pi, nphi, endpoint=False) if phi is None else np.asarray(phi, dtype=float)
        if theta.shape != (ntheta,) or phi.shape != (nphi,):
            raise ValueError("theta/phi meshes do not match the sigma table")

        self.table = table
        self.theta = theta
        self.phi = phi

        #close the phi period so the interpolator sees 2 pi
        phi_closed = np.append(phi, phi[0] + 2 * np.pi)
        values = np.concatenate([table, table[:, :, :1]], axis=2)
        self._interpolator = RegularGridInterpolator(
            (theta, phi_closed), np.moveaxis(values, 0, -1), bounds_error=False, fill_value=None)

    def evaluate(self, directions):
        """
        sigma at unit vectors

        :param directions: array (dim, ...) of unit vectors
        :return: array (dim, ...) of sigma values
        """

        directions = np.asarray(directions, dtype=float)
        dim = directions.shape[0]

        if self.kind == "rotational_canonical":
            if dim < 2:
                raise ValueError("rotational sigma needs dim >= 2")
            out = np.zeros_like(directions)
            out[0] = -self.amplitude * directions[1]
            out[1] = self.amplitude * directions[0]
            return out

        if dim != 3:
            raise ValueError("tabulated sigma is defined on the 2-sphere, dim must be 3")
        theta = np.arccos(np.clip(directions[2], -1.0, 1.0))
        phi = np.mod(np.arctan2(directions[1], directions[0]), 2 * np.pi)
        points = np.stack([theta.ravel(), phi.ravel()], axis=-1)
        values = self.amplitude * self._interpolator(points)
        return np.moveaxis(values, -1, 0).reshape(directions.shape)

    def get_parameters(self):
        parameters = {"kind": self.kind, "amplitude": self.amplitude}
        if self.table is not None:
            parameters["table_shape"] = list(self.table.shape)
        return parameters

    def __repr__(self):
        return "<SigmaSpec {0} A={1:g}>".format(self.kind, self.amplitude)


class InitialData(object):
    """Windowed homogeneous data and its mollification u0 = P exp(-(-Delta)^alpha) U0"""

    def __init__(self, sigma, alpha, grid, values, U0, U0_projected, u0, divergence_defect):
        self.sigma = sigma
        self.alpha = alpha
        self.grid = grid
        self.values = values
        self.U0 = U0
        self.U0_projected = U0_projected
        self.u0 = u0
        self.divergence_defect = divergence_defect

    def __repr__(self):
        return "<InitialData {0} alpha={1} on {2} defect={3:.2g}>".format(
            self.sigma, self.alpha, self.grid, self.divergence_defect)


def radial_window(grid, window=(0.3, 0.4)):
    """1 inside window[0] * L, 0 beyond window[1] * L, C-infinity in between"""
    lo, hi = window[0] * grid.box_length, window[1] * grid.box_length
    return 1.0 - smooth_step((grid.radius() - lo) / (hi - lo))


def homogeneous_values(sigma, alpha, grid):
    """sigma(y/|y|) / |y|^(2 alpha - 1) on the centered grid, 0 at the origin"""

    r = grid.radius()
    safe = np.where(r > 0, r, 1.0)
    directions = np.stack([grid.coordinates[a] / safe * np.ones(grid.shape) for a in range(grid.dim)])
    values = sigma.evaluate(directions) / safe ** (2 * alpha - 1)
    values[:, r == 0] = 0.0
    return values


def make_initial_data(sigma, alpha, grid, window=(0.3, 0.4)):
    """
    Build the self-similar initial data on the grid

    :param sigma: SigmaSpec
    :param alpha: in [5/6, 1]
    :param window: radii (in units of L) where the smooth cutoff starts and ends
    :return: InitialData
    """

    check_alpha(alpha, 5.0 / 6.0, 1.0, closed_lo=True)
    if not 0 < window[0] < window[1] <= 0.5:
        raise ValueError("window radii must satisfy 0 < start < end <= 0.5 (got {0})".format(window))

    values = homogeneous_values(sigma, alpha, grid) * radial_window(grid, window)

    U0 = SpectralField.from_physical(grid, values, rank="vector", meta={"sigma": sigma.get_parameters()})
    defect = divergence_residual(U0)
    sanity.check_divergence(defect, DIVERGENCE_EPS, "windowed U0")

    U0_projected = leray_project(U0)
    u0 = heat_step(U0_projected, 1.0, alpha)

    return InitialData(sigma, alpha, grid, values, U0, U0_projected, u0, defect)
