import numpy as np

from leraylab.spectral import (
    SpectralField, divergence, divergence_residual, fractional_laplacian, gradient, interpolate_scaled,
    partial, tensor_product
)
from leraylab.semigroup.heat import check_alpha


#every stored velocity must be solenoidal to this relative level
SNAPSHOT_DIV_TOL = 1e-10

#snapshot times closer than this are the same time
TIME_TOL = 1e-12


class ProfileRun(object):
    """
    Time-stamped velocity snapshots of one self-similar run.

    trajectory maps time -> vector SpectralField; residual_history holds one dict
    per logged step or iteration; profile holds the extracted v and P once computed.
    """

    def __init__(self, alpha, grid, sigma=None, initial=None, meta=None):

        self.alpha = alpha
        self.grid = grid
        self.sigma = sigma
        self.initial = initial
        self.trajectory = {}
        self.residual_history = []
        self.profile = {}
        self.meta = dict(meta) if meta else {}

    def _key(self, t):
        for known in self.trajectory:
            if abs(known - t) <= TIME_TOL * max(1.0, abs(t)):
                return known
        return None

    def add_snapshot(self, t, u):

        if u.rank != "vector" or u.grid != self.grid:
            raise ValueError("snapshot must be a vector field on {0}".format(self.grid))
        residual = divergence_residual(u)
        if residual > SNAPSHOT_DIV_TOL:
            raise ValueError("snapshot at t={0:g} has relative divergence {1:g}".format(t, residual))

        key = self._key(t)
        self.trajectory[float(t) if key is None else key] = u

    def has_snapshot(self, t):
        return self._key(t) is not None

    def snapshot(self, t):
        key = self._key(t)
        if key is None:
            raise ValueError("missing snapshot at t={0:g} (have {1})".format(t, self.times()))
        return self.trajectory[key]

    def times(self):
        return sorted(self.trajectory.keys())

    def energy(self, t):
        """||u(t)||_2^2"""
        return float(self.snapshot(t).l2_norm() ** 2)

    def get_parameters(self):
        parameters = {
            "alpha": self.alpha,
            "grid": self.grid.get_parameters(),
            "times": self.times()
        }
        if self.sigma is not None:
            parameters["sigma"] = self.sigma.get_parameters()
        return parameters

    def __repr__(self):
        return "<ProfileRun alpha={0} {1} snapshots={2}>".format(self.alpha, self.grid, len(self.trajectory))


def dissipation(u, alpha):
    """||Lambda^alpha u||_2^2"""
    return float(fractional_laplacian(u, alpha).l2_norm() ** 2)


def _window_l2(values, grid, mask):
    squared = np.abs(np.reshape(values, (-1,) + grid.shape)) ** 2
    return float(np.sqrt(grid.cell_volume * np.sum(np.sum(squared, axis=0)[mask])))


def self_similarity_residual(run, t1, t2, alpha=None, window=0.35):
    """
    Relative L^2(window) distance between u(., t1) and mu^(2 alpha - 1) u(mu ., t2),
    mu = (t2/t1)^(1/(2 alpha)), which vanishes for an exactly self-similar run
    """

    alpha = run.alpha if alpha is None else alpha
    u1 = run.snapshot(t1)
    u2 = run.snapshot(t2)

    if abs(t1 - t2) <= TIME_TOL * max(1.0, abs(t1)):
        return 0.0

    grid = run.grid
    mu = (t2 / t1) ** (1.0 / (2 * alpha))
    predicted = mu ** (2 * alpha - 1) * interpolate_scaled(u2, mu)

    mask = grid.window_mask(window)
    num = _window_l2(predicted - u1.physical(), grid, mask)
    den = _window_l2(u1.physical(), grid, mask)
    if den == 0:
        return 0.0 if num == 0 else np.inf
    return num / den


def pressure_from_velocity(u, f=None):
    """
    Zero-mean P solving -Delta P = div div(u (x) u - f)

    :param u: vector SpectralField
    :param f: optional force tensor
    """

    grid = u.grid
    T = tensor_product(u, u)
    coeffs = np.array(T.coeffs)
    if f is not None:
        coeffs = coeffs - f.coeffs

    kd = grid.derivative_wavenumbers
    dd = sum(kd[a] * kd[b] * coeffs[a, b] for a in range(grid.dim) for b in range(grid.dim))
    safe = np.where(grid.k2 > 0, grid.k2, 1.0)
    P = -dd / safe
    P[grid.zero_mode()] = 0
    return SpectralField(grid, P, rank="scalar", hermitian=u.hermitian, check=False)


def profile_extract(run, f=None):
    """
    Split u(., 1) = u0 + v and recover the pressure

    :return: (v, P); both are also stored in run.profile
    """

    if run.initial is None:
        raise ValueError("profile extraction needs the run's initial data")

    u1 = run.snapshot(1.0)
    v = u1 - run.initial.u0
    P = pressure_from_velocity(u1, f)

    run.profile = {"v": v, "P": P}
    return v, P


def transport_term(v):
    """Physical samples of (y . grad) v with the centered coordinate y"""
    grid = v.grid
    return sum(grid.coordinates[a] * partial(v, a).physical() for a in range(grid.dim))


def profile_residual(v, P, u0, alpha, f=None, window=0.25):
    """
    Momentum balance of the profile system on the window

    R = Lambda^(2 alpha) v - beta v - gamma y.grad v + grad P + div(u (x) u) - div f,
    beta = (2 alpha - 1)/(2 alpha), gamma = 1/(2 alpha), u = u0 + v.

    :return: dict with the relative L^2(window) residual and the norm of every term
    """

    check_alpha(alpha)
    grid = v.grid
    beta = (2 * alpha - 1) / (2 * alpha)
    gamma = 1.0 / (2 * alpha)
    u = v + u0

    terms = {
        "dissipation": fractional_laplacian(v, 2 * alpha).physical(),
        "growth": -beta * v.physical(),
        "transport": -gamma * transport_term(v),
        "pressure": gradient(P).physical(),
        "nonlinear": divergence(tensor_product(u, u)).physical()
    }
    if f is not None:
        terms["force"] = -divergence(f).physical()

    total = sum(terms.values())

    mask = grid.window_mask(window)
    norms = {name: _window_l2(values, grid, mask) for name, values in terms.items()}
    scale = sum(norms.values())
    absolute = _window_l2(total, grid, mask)

    return {
        "relative": absolute / scale if scale > 0 else 0.0,
        "absolute": absolute,
        "terms": norms,
        "window": window
    }
