import numpy as np

from leraylab.spectral.operators import fractional_laplacian, lp_norm, pointwise_magnitude
from leraylab.littlewood_paley.dyadic import build_dyadic_family


class BesovSpec(object):
    """Regularity s, integrability p, summation index r of a Besov norm"""

    def __init__(self, s, p=2, r=2, homogeneous=True):

        if p < 1 or r < 1:
            raise ValueError("Besov indices need p, r >= 1 (got p={0}, r={1})".format(p, r))

        self.s = s
        self.p = p
        self.r = r
        self.homogeneous = homogeneous

    def get_parameters(self):
        return {"s": self.s, "p": self.p, "r": self.r, "homogeneous": self.homogeneous}

    def __repr__(self):
        return "<BesovSpec {0}B^{1}_{{{2},{3}}}>".format(
            "" if self.homogeneous else "in", self.s, self.p, self.r)


class WeightSpec(object):
    """Weight w = <y - center>^(2 beta) with <y> = (e + |y|^2)^(1/2)"""

    def __init__(self, beta, center=None):

        if beta < 0:
            raise ValueError("weight exponent beta must be nonnegative (got {0})".format(beta))

        self.beta = beta
        self.center = center

    def bracket(self, grid):
        center = np.zeros(grid.dim) if self.center is None else np.asarray(self.center, dtype=float)
        r2 = sum((grid.coordinates[a] - center[a]) ** 2 for a in range(grid.dim))
        return np.sqrt(np.e + r2) * np.ones(grid.shape)

    def power(self, grid, exponent):
        """<y - center>^exponent"""
        return self.bracket(grid) ** exponent

    def weight(self, grid):
        return self.power(grid, 2 * self.beta)

    def __repr__(self):
        return "<WeightSpec beta={0}>".format(self.beta)


def _require_mean_zero(f):
    if not f.is_mean_zero():
        raise ValueError("homogeneous norm requires a mean-zero field")


def besov_sequence(f, spec, family=None):
    """
    Per-block terms 2^(qs) ||Delta_q f||_p

    :return: (indices, terms) as numpy arrays
    """

    family = build_dyadic_family(f.grid) if family is None else family

    if spec.homogeneous:
        _require_mean_zero(f)
        indices = np.array(list(family.block_range()))
        symbols = [family.block_symbol(q) for q in indices]
    else:
        indices = np.arange(-1, family.q_hi + 1)
        symbols = [family.inhomog_symbol(q) for q in indices]

    terms = np.zeros(len(indices))
    for i, (q, symbol) in enumerate(zip(indices, symbols)):
        if not np.any(symbol):
            continue
        terms[i] = 2.0 ** (q * spec.s) * lp_norm(f.with_coeffs(f.coeffs * symbol), spec.p)

    return indices, terms


def besov_norm(f, spec, family=None, full_output=False):
    """
    Besov norm over the representable block range

    With full_output, also return a dict holding the block indices, the per-block
    terms and the relative size of the outermost block ("truncation").
    """

    indices, terms = besov_sequence(f, spec, family)

    if np.isinf(spec.r):
        norm = float(np.max(terms)) if terms.size else 0.0
    else:
        norm = float(np.sum(terms ** spec.r) ** (1.0 / spec.r))

    if not full_output:
        return norm

    info = {
        "indices": indices,
        "terms": terms,
        "truncation": float(terms[-1] / norm) if norm > 0 else 0.0
    }
    return norm, info


def sobolev_norm(f, s):
    """Homogeneous H-dot^s norm via Parseval"""
    if s < 0:
        _require_mean_zero(f)
    grid = f.grid
    active = grid.kmag > 0
    symbol = np.zeros(grid.shape)
    symbol[active] = grid.kmag[active] ** (2 * s)
    if s == 0:
        symbol[grid.zero_mode()] = 1.0
    return float(np.sqrt(grid.volume * np.sum(symbol * np.abs(f.coeffs) ** 2)))


def sobolev_besov_bracket(family, s):
    """
    Exact range of ||f||_{B-dot^s_{2,2}} / ||f||_{H-dot^s} over fields on the grid,
    from the mode-wise ratio sum_q 2^(2qs) phi_q(k)^2 / |k|^(2s)
    """

    grid = family.grid
    active = grid.kmag > 0
    total = np.zeros(grid.shape)
    for q in family.block_range():
        total = total + 2.0 ** (2 * q * s) * family.block_symbol(q) ** 2
    ratio = total[active] / grid.kmag[active] ** (2 * s)
    return float(np.sqrt(np.min(ratio))), float(np.sqrt(np.max(ratio)))


def weighted_sobolev_norm(f, s, w):
    """
    (int |f|^2 w)^(1/2) + (int |Lambda^s f|^2 w)^(1/2) on the grid

    :param w: WeightSpec
    """

    if s < 0:
        raise ValueError("weighted Sobolev norm needs s >= 0 (got {0})".format(s))

    grid = f.grid
    weight = w.weight(grid)

    def weighted_l2(g):
        return np.sqrt(grid.cell_volume * np.sum(pointwise_magnitude(g) ** 2 * weight))

    return float(weighted_l2(f) + weighted_l2(fractional_laplacian(f, s)))


def holder_seminorm(f, gamma, family=None):
    """C-dot^gamma seminorm through sup_q 2^(q gamma) ||Delta_q f||_inf"""

    if not 0 < gamma < 1:
        raise ValueError("Hoelder exponent must lie in (0, 1) (got {0})".format(gamma))
    return besov_norm(f, BesovSpec(gamma, np.inf, np.inf), family)
