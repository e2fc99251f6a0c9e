import numpy as np
import pandas as pd
from scipy.stats import linregress

from leraylab.spectral import SpectralField, divergence, partial, pointwise_magnitude
from leraylab.littlewood_paley import holder_seminorm
from leraylab.semigroup.heat import heat_step
from leraylab.solver.sigma import radial_window
from leraylab.lab.report import VerificationReport, DecayFit


DECAY_MODELS = ("pure_power", "log_corrected")

#minimum number of usable radial shells for a fit
MIN_SHELLS = 8

#rms ratio between the pure and log models above which a profile shows log loss
LOG_LOSS_THRESHOLD = 1.5


def _magnitude(f):
    if isinstance(f, SpectralField):
        return pointwise_magnitude(f)
    return np.asarray(f)


def radial_shells(f, grid, annulus, n_bins=16):
    """
    Bin |f| into logarithmically spaced radial shells

    :param f: SpectralField, or physical magnitudes on grid
    :param annulus: (r_lo, r_hi) in absolute length units
    :return: pandas.DataFrame with columns r, r_argmax, shell_max, shell_mean, count
    """

    mag = _magnitude(f)
    r = grid.radius()
    edges = np.geomspace(annulus[0], annulus[1], n_bins + 1)

    rows = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        inside = (r >= lo) & (r < hi)
        count = int(np.sum(inside))
        if count == 0:
            rows.append({"r": np.sqrt(lo * hi), "r_argmax": np.nan, "shell_max": 0.0, "shell_mean": 0.0,
                         "count": 0})
            continue
        values = mag[inside]
        radii = r[inside]
        i = int(np.argmax(values))
        rows.append({
            "r": float(np.mean(radii)),
            "r_argmax": float(radii[i]),
            "shell_max": float(values[i]),
            "shell_mean": float(np.mean(values)),
            "count": count
        })

    return pd.DataFrame(rows, columns=["r", "r_argmax", "shell_max", "shell_mean", "count"])


def resolve_annulus(grid, annulus=None):
    """Annulus in units of L -> absolute radii, checked against the window and the grid spacing"""

    annulus = (0.1, 0.3) if annulus is None else annulus
    r_lo, r_hi = annulus[0] * grid.box_length, annulus[1] * grid.box_length

    if not r_lo < r_hi:
        raise ValueError("empty annulus {0}".format(annulus))
    if r_hi > 0.35 * grid.box_length + 1e-12:
        raise ValueError("annulus outer radius must stay within 0.35 L (got {0} L)".format(annulus[1]))
    if r_lo < 4 * grid.spacing - 1e-12:
        raise ValueError("annulus inner radius must be at least 4 grid cells (got {0:g}, need {1:g})".format(
            r_lo, 4 * grid.spacing))
    return r_lo, r_hi


def decay_fit(f, annulus=None, model="pure_power", n_bins=16, alpha=None, grid=None):
    """
    Fit |f| ~ C r^-m (pure_power) or |f| ~ C r^-m (log r)^b (log_corrected) on shell maxima

    :param f: SpectralField, or physical magnitudes together with grid
    :param annulus: (lo, hi) in units of L, default (0.1, 0.3)
    :param alpha: stored on the fit so that the expected exponent 4 alpha - 1 is reported
    :return: DecayFit
    """

    if model not in DECAY_MODELS:
        raise ValueError("decay model must be one of {0} (got {1})".format(DECAY_MODELS, model))
    grid = f.grid if isinstance(f, SpectralField) else grid
    if grid is None:
        raise ValueError("decay_fit on raw samples needs the grid")

    r_lo, r_hi = resolve_annulus(grid, annulus)
    shells = radial_shells(f, grid, (r_lo, r_hi), n_bins)

    usable = shells[(shells["count"] > 0) & (shells["shell_max"] > 0)]
    if len(usable) < MIN_SHELLS:
        raise ValueError("empty shells: only {0} usable radial shells, need {1}".format(len(usable), MIN_SHELLS))

    log_r = np.log(usable["r_argmax"].values)
    log_f = np.log(usable["shell_max"].values)
    annulus = (r_lo / grid.box_length, r_hi / grid.box_length)

    if model == "pure_power":
        fit = linregress(log_r, log_f)
        residual = log_f - (fit.intercept + fit.slope * log_r)
        return DecayFit(alpha, annulus, model, -fit.slope, None, np.sqrt(np.mean(residual ** 2)), shells)

    if np.min(usable["r_argmax"].values) <= 1:
        raise ValueError("log-corrected model needs r > 1 throughout the annulus")

    design = np.stack([np.ones_like(log_r), -log_r, np.log(log_r)], axis=1)
    coef, _, _, _ = np.linalg.lstsq(design, log_f, rcond=None)
    residual = log_f - design.dot(coef)
    return DecayFit(alpha, annulus, model, coef[1], coef[2], np.sqrt(np.mean(residual ** 2)), shells)


def compare_decay_models(pure, log, threshold=LOG_LOSS_THRESHOLD):
    """Classify a profile as log_loss or optimal from a pure and a log-corrected fit of the same data"""

    if pure.rms_residual == 0:
        ratio = 1.0
    elif log.rms_residual == 0:
        ratio = np.inf
    else:
        ratio = pure.rms_residual / log.rms_residual

    log_loss = ratio > threshold and log.log_coefficient is not None and log.log_coefficient > 0
    return {
        "classification": "log_loss" if log_loss else "optimal",
        "rms_ratio": ratio,
        "log_coefficient": log.log_coefficient,
        "pure_exponent": pure.exponent,
        "log_exponent": log.exponent
    }


def _uniformity(values):
    """max/min of a list of nonnegative constants; 1 when all vanish"""
    values = np.asarray(values, dtype=float)
    if np.all(values == 0):
        return 1.0
    if np.min(values) == 0:
        return np.inf
    return float(np.max(values) / np.min(values))


def pointwise_selfsimilar_bound_check(run, alpha=None, window=0.35):
    """
    t-uniformity of the constants in the pointwise self-similar bounds

    C(t) = max_window |u(y, t)| (|y|^(2a-1) + t^(1/(2a))) and, when the run carries its
    initial data, D(t) = max_window |u - exp(-t Lambda^(2a)) U0| (|y|^(4a-1) + t^((4a-1)/(2a))).
    Each passes when max_t / min_t lies in [1, 3].
    """

    alpha = run.alpha if alpha is None else alpha
    times = run.times()
    if len(times) < 3:
        raise ValueError("pointwise bound check needs at least 3 snapshots (got {0})".format(len(times)))

    grid = run.grid
    mask = grid.window_mask(window)
    r = grid.radius()

    C, D = [], []
    for t in times:
        u = run.snapshot(t)
        weight = r ** (2 * alpha - 1) + t ** (1.0 / (2 * alpha))
        C.append(float(np.max((pointwise_magnitude(u) * weight)[mask])))

        if run.initial is not None:
            w = u - heat_step(run.initial.U0_projected, t, alpha)
            weight = r ** (4 * alpha - 1) + t ** ((4 * alpha - 1) / (2 * alpha))
            D.append(float(np.max((pointwise_magnitude(w) * weight)[mask])))

    measured = [("C", _uniformity(C))]
    details = {"times": times, "C": C}
    if D:
        measured.append(("D", _uniformity(D)))
        details["D"] = D

    return VerificationReport("pointwise_selfsimilar_bound", {"alpha": alpha, "window": window},
                              measured, (1.0, 3.0), [], details)


def derivative_magnitude(f, order):
    """Pointwise (sum over all order-k partial derivatives of |d^k f|^2)^(1/2)"""

    fields = [f]
    for _ in range(order):
        fields = [partial(g, a) for g in fields for a in range(f.grid.dim)]
    return np.sqrt(sum(pointwise_magnitude(g) ** 2 for g in fields))


def derivative_scaling_check(run, alpha=None, orders=(0, 1, 2), window=0.35):
    """
    C_k(t) = t^((2a - 1 + k)/(2a)) max_window |D^k (u - exp(-t Lambda^(2a)) U0)| must be t-uniform
    """

    alpha = run.alpha if alpha is None else alpha
    if run.initial is None:
        raise ValueError("derivative scaling check needs the run's initial data")

    grid = run.grid
    mask = grid.window_mask(window)
    times = run.times()

    constants = {k: [] for k in orders}
    for t in times:
        w = run.snapshot(t) - heat_step(run.initial.U0_projected, t, alpha)
        for k in orders:
            scale = t ** ((2 * alpha - 1 + k) / (2 * alpha))
            constants[k].append(float(scale * np.max(derivative_magnitude(w, k)[mask])))

    measured = [("order={0}".format(k), _uniformity(constants[k])) for k in orders]
    return VerificationReport("derivative_scaling", {"alpha": alpha, "orders": list(orders)}, measured, (1.0, 3.0),
                              [], {"times": times, "constants": constants})


def forcing_hypothesis(f, alpha, gamma=0.5, window=0.35):
    """
    Quantities in the hypotheses on a force tensor f under which the decay 4 alpha - 1 holds

    weighted_holder = ||  |y|^(4a-1+gamma) div f ||_{C-dot^gamma} with the weighted field cut off smoothly
    outside the window; weighted_sup = max_window (|y|^(4a-1) |div f| + |y|^(4a-2) |f|).
    """

    if f.rank != "tensor":
        raise ValueError("force must be a tensor field, got {0}".format(f.rank))
    if not 0 < gamma < 1:
        raise ValueError("Hoelder exponent must lie in (0, 1) (got {0})".format(gamma))

    grid = f.grid
    r = grid.radius()
    div_f = divergence(f)

    cut = radial_window(grid, (window - 0.05, window))
    weighted = SpectralField.from_physical(grid, r ** (4 * alpha - 1 + gamma) * cut * div_f.physical(), rank="vector")
    coeffs = np.array(weighted.coeffs)
    coeffs[(Ellipsis,) + grid.zero_mode()] = 0

    mask = grid.window_mask(window)
    sup = r ** (4 * alpha - 1) * pointwise_magnitude(div_f) + r ** (4 * alpha - 2) * pointwise_magnitude(f)

    return {
        "alpha": alpha,
        "gamma": gamma,
        "weighted_holder": holder_seminorm(weighted.with_coeffs(coeffs), gamma),
        "weighted_sup": float(np.max(sup[mask]))
    }
