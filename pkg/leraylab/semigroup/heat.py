import numpy as np
from scipy.stats import linregress

from leraylab.spectral import make_grid, leray_project, divergence, lp_norm, random_field
from leraylab.littlewood_paley import build_dyadic_family
from leraylab.lab.report import VerificationReport


#norms below this are treated as underflow and left out of the slope fit
UNDERFLOW = 1e-280


def check_alpha(alpha, lo=0.0, hi=1.0, closed_lo=False):
    ok = (lo <= alpha if closed_lo else lo < alpha) and alpha <= hi
    if not ok:
        raise ValueError("alpha must lie in {0}{1}, {2}] (got {3})".format("[" if closed_lo else "(", lo, hi, alpha))


def heat_symbol(grid, t, alpha):
    """exp(-t |k|^(2 alpha)), equal to 1 at k = 0"""
    return np.exp(-t * grid.kmag ** (2 * alpha))


def heat_step(f, t, alpha):
    """
    Apply the fractional heat semigroup exp(-t (-Delta)^alpha)

    :param f: SpectralField of any rank
    :param t: time, t >= 0
    :param alpha: dissipation order in (0, 1]
    """

    if t < 0:
        raise ValueError("heat_step needs t >= 0 (got {0})".format(t))
    check_alpha(alpha)
    if t == 0:
        return f.with_coeffs(f.coeffs)
    return f.with_coeffs(f.coeffs * heat_symbol(f.grid, t, alpha))


def oseen_apply(T, t, alpha):
    """P exp(-t (-Delta)^alpha) div T for a tensor field T"""
    if T.rank != "tensor":
        raise ValueError("oseen_apply needs a tensor field, got {0}".format(T.rank))
    return leray_project(heat_step(divergence(T), t, alpha))


def default_probe_grid():
    return make_grid(2, 128, 2 * np.pi)


def kernel_annulus_decay_probe(q, alpha, t_list=None, p=2, f=None, grid=None, seed=42, delta=None, family=None):
    """
    Decay rate of t -> ||Delta_q P exp(-t (-Delta)^alpha) f||_p.

    The slope of log-norm against t is fitted by linear regression and reported
    relative to -2^(2 q alpha). Its bracket follows from the annulus support of the block.

    :param q: block index
    :param alpha: dissipation order in (0, 1]
    :param t_list: increasing positive times, default spans 2^(-2 q alpha) * [0.5, 4]
    :param p: 2 or np.inf
    :param f: vector SpectralField, a seeded random field when None
    :param delta: bracket slack, 0.1 for p = 2 and 0.2 otherwise
    """

    check_alpha(alpha)

    if f is None:
        grid = default_probe_grid() if grid is None else grid
        f = random_field(grid, rank="vector", seed=seed, band=grid.n / 3.0)
    grid = f.grid
    family = build_dyadic_family(grid) if family is None else family
    family.check_index(q)

    scale = 2.0 ** (2 * q * alpha)
    if t_list is None:
        t_list = np.linspace(0.5, 4.0, 8) / scale
    t_list = np.asarray(t_list, dtype=float)
    if np.any(t_list <= 0) or np.any(np.diff(t_list) <= 0):
        raise ValueError("t_list must be increasing and positive")

    if delta is None:
        delta = 0.1 if p == 2 else 0.2

    blocked = leray_project(f.with_coeffs(f.coeffs * family.block_symbol(q)))
    norms = np.array([lp_norm(heat_step(blocked, t, alpha), p) for t in t_list])

    keep = norms >= UNDERFLOW
    notes = []
    if np.sum(~keep):
        notes.append("dropped {0} times with norm below {1:g}".format(int(np.sum(~keep)), UNDERFLOW))

    bound = ((3.0 / 4.0) ** (2 * alpha) - delta, (8.0 / 3.0) ** (2 * alpha) + delta)
    parameters = {"q": q, "alpha": alpha, "p": p, "seed": seed}

    if np.sum(keep) < 2:
        notes.append("fewer than two usable times, slope undefined")
        return VerificationReport("kernel_decay", parameters, [("q={0}".format(q), np.nan)], bound, notes)

    fit = linregress(t_list[keep], np.log(norms[keep]))
    ratio = fit.slope / (-scale)

    details = {
        "slope": fit.slope,
        "intercept": fit.intercept,
        "times": t_list[keep],
        "log_norms": np.log(norms[keep])
    }
    return VerificationReport("kernel_decay", parameters, [("q={0}".format(q), ratio)], bound, notes, details)
