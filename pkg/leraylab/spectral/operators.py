import warnings
import numpy as np

from leraylab.spectral.field import SpectralField, forward, component_shape


class MultiplierSpec(object):
    """
    Fourier multiplier m(k).

    symbol is a callable taking the Grid and returning an array broadcastable
    to grid.shape; zero_mode_value replaces the symbol at k = 0.
    """

    def __init__(self, symbol, zero_mode_value=0.0, name="multiplier", preserves_real=True):

        if not np.isfinite(zero_mode_value):
            raise ValueError("zero_mode_value must be finite (got {0})".format(zero_mode_value))

        self.symbol = symbol
        self.zero_mode_value = zero_mode_value
        self.name = name
        self.preserves_real = preserves_real

    def evaluate(self, grid):
        values = np.array(np.broadcast_to(self.symbol(grid), grid.shape), dtype=np.complex128)
        values[grid.zero_mode()] = self.zero_mode_value
        if not np.all(np.isfinite(values)):
            raise ValueError("symbol of {0} is not finite on the grid".format(self.name))
        return values

    def __repr__(self):
        return "<MultiplierSpec {0}>".format(self.name)


def apply_multiplier(f, spec):
    symbol = spec.evaluate(f.grid)
    return f.with_coeffs(f.coeffs * symbol, hermitian=f.hermitian and spec.preserves_real)


def _safe(values):
    return np.where(values > 0, values, 1.0)


def fractional_laplacian(f, s):
    """
    Apply Lambda^s = (-Delta)^(s/2), the multiplier |k|^s

    :param f: SpectralField of any rank
    :param s: order in [-4, 4]; for s < 0 the field must be mean-zero
    :return: SpectralField
    """

    if not -4 <= s <= 4:
        raise ValueError("order s must lie in [-4, 4] (got {0})".format(s))
    if s == 0:
        return f.with_coeffs(f.coeffs)
    if s < 0 and not f.is_mean_zero():
        raise ValueError("nonintegrable zero mode: Lambda^{0} needs a mean-zero field".format(s))

    spec = MultiplierSpec(lambda grid: _safe(grid.kmag) ** s, 0.0, name="Lambda^{0}".format(s))
    return apply_multiplier(f, spec)


def _require_rank(f, *ranks):
    if f.rank not in ranks:
        raise ValueError("expected a {0} field, got {1}".format(" or ".join(ranks), f.rank))


def leray_project(f):
    """Project a vector field onto its divergence-free part, symbol I - k k^T/|k|^2"""

    _require_rank(f, "vector")
    grid = f.grid
    kd = grid.derivative_wavenumbers
    c = f.coeffs

    dot = sum(kd[a] * c[a] for a in range(grid.dim))
    ratio = dot / _safe(grid.kd2)
    out = np.empty_like(c)
    for a in range(grid.dim):
        out[a] = c[a] - kd[a] * ratio

    return f.with_coeffs(out)


def riesz_transform(f, i):
    """Riesz transform R_i, symbol i k_i/|k|, so that -sum_i R_i d_i = Lambda"""

    _require_rank(f, "scalar")
    if not 0 <= i < f.grid.dim:
        raise ValueError("axis {0} outside 0..{1}".format(i, f.grid.dim - 1))

    spec = MultiplierSpec(
        lambda grid: 1j * grid.derivative_wavenumbers[i] / _safe(grid.kmag), 0.0, name="R_{0}".format(i))
    return apply_multiplier(f, spec)


def partial(f, a):
    """Spectral derivative along axis a"""
    return f.with_coeffs(1j * f.grid.derivative_wavenumbers[a] * f.coeffs)


def gradient(f):
    """Scalar -> vector, vector -> tensor with T[a, b] = d_a f_b"""

    _require_rank(f, "scalar", "vector")
    kd = f.grid.derivative_wavenumbers
    out = np.stack([1j * kd[a] * f.coeffs for a in range(f.grid.dim)])
    rank = "vector" if f.rank == "scalar" else "tensor"
    return f.with_coeffs(out, rank=rank)


def divergence(f):
    """Vector -> scalar, tensor -> vector contracting the first index: (div T)_b = sum_a d_a T[a, b]"""

    _require_rank(f, "vector", "tensor")
    kd = f.grid.derivative_wavenumbers
    out = sum(1j * kd[a] * f.coeffs[a] for a in range(f.grid.dim))
    rank = "scalar" if f.rank == "vector" else "vector"
    return f.with_coeffs(out, rank=rank)


def dealias(f):
    """2/3 rule: zero every mode with some |m_a| >= n/3"""
    return f.with_coeffs(f.coeffs * f.grid.dealias_mask)


def tensor_product(u, v):
    """Dealiased outer product T[a, b] = u_a v_b"""

    _require_rank(u, "vector")
    _require_rank(v, "vector")
    up = dealias(u).physical()
    vp = up if v is u else dealias(v).physical()
    values = up[:, np.newaxis] * vp[np.newaxis, :]

    coeffs = forward(values, u.grid) * u.grid.dealias_mask
    return SpectralField(u.grid, coeffs, rank="tensor", hermitian=u.hermitian and v.hermitian, check=False)


def divergence_residual(u):
    """||div u||_2 / ||Lambda u||_2 evaluated on the coefficients"""

    _require_rank(u, "vector")
    grid = u.grid
    div = sum(grid.derivative_wavenumbers[a] * u.coeffs[a] for a in range(grid.dim))
    num = np.sqrt(np.sum(np.abs(div) ** 2))
    den = np.sqrt(np.sum(grid.k2 * np.sum(np.abs(u.coeffs) ** 2, axis=0)))
    if den == 0:
        return 0.0
    return num / den


def nonlinear_term(u, v, div_tol=1e-8):
    """
    Dealiased (u.grad) v in conservative form div(u (x) v)

    A RuntimeWarning is issued when u is not solenoidal to div_tol.
    """

    residual = divergence_residual(u)
    if residual > div_tol:
        warnings.warn("nonlinear_term: relative divergence of u is {0:g}".format(residual), RuntimeWarning)

    return divergence(tensor_product(u, v))


def advective_term(u, v):
    """Dealiased (u.grad) v computed pointwise as sum_a u_a d_a v"""

    _require_rank(u, "vector")
    _require_rank(v, "vector")
    up = dealias(u).physical()
    grad = gradient(dealias(v)).physical()
    values = np.einsum("a...,ab...->b...", up, grad)

    coeffs = forward(values, u.grid) * u.grid.dealias_mask
    return u.with_coeffs(coeffs)


def pointwise_magnitude(f):
    """Pointwise modulus; Euclidean over vector components, Frobenius over tensor components"""

    values = f.physical() if isinstance(f, SpectralField) else np.asarray(f)
    if isinstance(f, SpectralField) and f.rank != "scalar":
        ncomp = f.grid.dim if f.rank == "vector" else f.grid.dim ** 2
        values = values.reshape((ncomp,) + f.grid.shape)
        return np.sqrt(np.sum(np.abs(values) ** 2, axis=0))
    return np.abs(values)


def lp_norm(f, p, window=None):
    """
    Grid L^p norm: volume-weighted sum for p < inf, grid max for p = inf

    :param f: SpectralField
    :param p: exponent >= 1 or np.inf
    :param window: optional boolean mask restricting the sample points
    """

    if p < 1:
        raise ValueError("p must be at least 1 (got {0})".format(p))

    mag = pointwise_magnitude(f)
    if window is not None:
        mag = mag[window]
    if mag.size == 0:
        return 0.0
    if np.isinf(p):
        return float(np.max(mag))
    return float((f.grid.cell_volume * np.sum(mag ** p)) ** (1.0 / p))


def random_field(grid, rank="scalar", seed=42, band=None, mean_zero=True, solenoidal=False):
    """
    Seeded real random field, band-limited to |m| <= band in integer mode units

    :param band: defaults to n/4
    """

    if band is None:
        band = grid.n / 4.0

    rng = np.random.default_rng(seed)
    noise = rng.standard_normal(component_shape(rank, grid.dim) + grid.shape)
    coeffs = forward(noise, grid)

    modes = grid.kmag / grid.fundamental
    keep = modes <= band + 1e-9
    for a in range(grid.dim):
        keep = keep & grid.along(grid.axis_modes != -grid.n // 2, a)
    coeffs = coeffs * keep
    if mean_zero:
        coeffs[(Ellipsis,) + grid.zero_mode()] = 0

    f = SpectralField(grid, coeffs, rank=rank, check=False, meta={"seed": seed, "band": band})
    if solenoidal:
        f = leray_project(f)
    return f


def gaussian_bump(grid, width, center=None, amplitude=1.0):
    """Scalar exp(-|y - center|^2 / (2 width^2)) in centered coordinates"""

    center = np.zeros(grid.dim) if center is None else np.asarray(center, dtype=float)
    r2 = sum((grid.coordinates[a] - center[a]) ** 2 for a in range(grid.dim))
    values = amplitude * np.exp(-r2 / (2.0 * width ** 2)) * np.ones(grid.shape)
    return SpectralField.from_physical(grid, values, rank="scalar")


def wave_packet(grid, wavevector, width, center=None, amplitude=1.0):
    """Gaussian envelope times cos(k.y), spectrally concentrated near +-k"""

    center = np.zeros(grid.dim) if center is None else np.asarray(center, dtype=float)
    wavevector = np.asarray(wavevector, dtype=float)
    shifted = [grid.coordinates[a] - center[a] for a in range(grid.dim)]
    r2 = sum(y ** 2 for y in shifted)
    phase = sum(wavevector[a] * shifted[a] for a in range(grid.dim))
    values = amplitude * np.exp(-r2 / (2.0 * width ** 2)) * np.cos(phase) * np.ones(grid.shape)
    return SpectralField.from_physical(grid, values, rank="scalar")


def _apply_axis_matrices(values, matrix, grid):
    """Apply the same (n x n) matrix along every spatial axis"""
    out = values
    for a in range(grid.dim):
        ax = out.ndim - grid.dim + a
        out = np.moveaxis(np.tensordot(matrix, out, axes=([1], [ax])), 0, ax)
    return out


def dilate(f, lam):
    """
    Coefficients of y -> f(y / lam) about the box center, for 0 < lam <= 1.

    Evaluated as a separable non-uniform DFT of the samples of f; accurate when
    f is negligible near the box faces. The unpaired Nyquist modes are dropped.
    """

    if not 0 < lam <= 1:
        raise ValueError("dilation factor must lie in (0, 1] (got {0})".format(lam))

    grid = f.grid
    k = grid.axis_wavenumbers
    x_c = grid.box_length / 2.0
    matrix = (lam / grid.n) * np.exp(-1j * np.outer(k, x_c + lam * grid.axis_coordinates))
    matrix[grid.axis_modes == -grid.n // 2, :] = 0

    coeffs = _apply_axis_matrices(f.physical(), matrix, grid)
    return f.with_coeffs(coeffs)


def interpolate_scaled(f, mu):
    """
    Physical samples of y -> f(mu * y) by trigonometric interpolation.

    Points whose image mu * y leaves the home cell are set to zero.
    """

    if mu <= 0:
        raise ValueError("scale factor must be positive (got {0})".format(mu))

    grid = f.grid
    x_c = grid.box_length / 2.0
    targets = mu * grid.axis_coordinates
    matrix = np.exp(1j * np.outer(x_c + targets, grid.axis_wavenumbers))

    values = _apply_axis_matrices(f.coeffs, matrix, grid)
    if f.hermitian:
        values = values.real

    inside = np.abs(targets) < grid.box_length / 2.0
    mask = np.ones(grid.shape, dtype=bool)
    for a in range(grid.dim):
        mask = mask & grid.along(inside, a)
    return values * mask
