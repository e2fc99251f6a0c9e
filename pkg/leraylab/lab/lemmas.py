import numpy as np
from scipy.stats import linregress

from leraylab.spectral import (
    SpectralField, make_grid, dealias, divergence, divergence_residual, fractional_laplacian, gradient,
    gaussian_bump, lp_norm, pointwise_magnitude, random_field, tensor_product, wave_packet
)
from leraylab.littlewood_paley import BesovSpec, besov_norm, build_dyadic_family, commutator_x_block
from leraylab.lab.report import VerificationReport, TORUS_NOTE


#largest |slope| of log ratio against q accepted by the fractional Bernstein sweep
MAX_Q_SLOPE = 0.1


def _l2(values, grid):
    """L^2 norm of physical samples of any rank"""
    return float(np.sqrt(grid.cell_volume * np.sum(np.abs(values) ** 2)))


def _q_list(q, family):
    if q is None:
        return list(range(max(family.q_min, 0), family.q_max + 1))
    return [q] if np.isscalar(q) else list(q)


def verify_bernstein(p=2, q_list=None, trials=5, seed=42, grid=None):
    """
    ||grad Delta_q f||_p / (2^q ||Delta_q f||_p) for seeded band-limited f

    The p = 2 bracket [3/4, 8/3] is exact by Plancherel; other p get a loose uniform band.
    """

    grid = make_grid(2, 64, 2 * np.pi) if grid is None else grid
    family = build_dyadic_family(grid)
    q_list = _q_list(q_list, family)

    measured = []
    notes = []
    for t in range(trials):
        f = random_field(grid, "scalar", seed=seed + t, band=grid.n / 3.0)
        for q in q_list:
            family.check_index(q)
            block = f.with_coeffs(f.coeffs * family.block_symbol(q))
            den = 2.0 ** q * lp_norm(block, p)
            if den == 0:
                notes.append("q={0} trial={1}: empty block skipped".format(q, t))
                continue
            measured.append(("q={0},trial={1}".format(q, t), lp_norm(gradient(block), p) / den))

    bound = (0.75 - 0.05, 8.0 / 3.0 + 0.05) if p == 2 else (0.25, 8.0)
    return VerificationReport("bernstein", {"p": p, "q": q_list, "trials": trials, "seed": seed}, measured,
                              bound, notes)


def signed_power(values, exponent):
    """|g|^(exponent - 1) g, equal to |g|^exponent in modulus"""
    mag = np.abs(values)
    safe = np.where(mag > 0, mag, 1.0)
    return np.where(mag > 0, safe ** (exponent - 1.0) * values, 0.0)


def new_bernstein_ratio(f, alpha, p, q, family):
    """
    ||Lambda^alpha (|Delta_q f|^(p/2))||_2^(2/p) / (2^(2 alpha q/p) ||Delta_q f||_p), None for an empty block
    """

    block = f.with_coeffs(f.coeffs * family.block_symbol(q))
    den = 2.0 ** (2 * alpha * q / p) * lp_norm(block, p)
    if den == 0:
        return None

    grid = f.grid
    powered = dealias(SpectralField.from_physical(grid, signed_power(block.physical(), p / 2.0), rank="scalar"))
    num = _l2(fractional_laplacian(powered, alpha).physical(), grid) ** (2.0 / p)
    return num / den


def new_bernstein_report(alpha, p, ratios, notes=None, parameters=None):
    """
    Verdict of the fractional Bernstein sweep from per-block ratios

    :param ratios: dict q -> list of (trial-id, ratio)
    """

    notes = list(notes) if notes else []
    measured = [("q={0},{1}".format(q, tid), r) for q, rows in sorted(ratios.items()) for tid, r in rows]

    details = {}
    criteria = {}
    values = np.array([v for _, v in measured])
    if p == 2:
        bound = ((3.0 / 4.0) ** alpha - 1e-10, (8.0 / 3.0) ** alpha + 1e-10)
    elif values.size:
        mid = np.sqrt(np.min(values) * np.max(values))
        bound = (mid / np.sqrt(10.0), mid * np.sqrt(10.0))
        details["spread"] = np.max(values) / np.min(values)
    else:
        bound = (0.0, np.inf)

    means = [(q, np.exp(np.mean(np.log([r for _, r in rows])))) for q, rows in sorted(ratios.items()) if rows]
    if len(means) >= 2:
        slope = linregress([m[0] for m in means], np.log([m[1] for m in means])).slope
        details["q_trend_slope"] = slope
        if abs(slope) > MAX_Q_SLOPE:
            notes.append("log ratio trends with q, slope {0:.3g}".format(slope))
        #p = 2 is decided by the exact bracket alone
        if p > 2:
            criteria["q_trend"] = abs(slope) <= MAX_Q_SLOPE

    parameters = dict(parameters) if parameters else {"alpha": alpha, "p": p}
    return VerificationReport("new_bernstein", parameters, measured, bound, notes, details, criteria)


def verify_new_bernstein(alpha, p=2, q=None, trials=20, seed=42, grid=None, fields=None):
    """
    Ratio of the fractional Bernstein inequality across blocks and seeded trials

    p = 2 is checked against the exact bracket [(3/4)^alpha, (8/3)^alpha]; for p > 2 the
    ratios must stay within a factor 10 of each other and the slope of log ratio
    against q must not exceed 0.1 in modulus.
    """

    if p < 2:
        raise ValueError("new Bernstein check needs p >= 2 (got {0})".format(p))

    grid = make_grid(2, 128, 2 * np.pi) if grid is None else grid
    family = build_dyadic_family(grid)
    q_list = _q_list(q, family)

    if fields is None:
        fields = [random_field(grid, "scalar", seed=seed + t, band=grid.n / 3.0) for t in range(trials)]

    notes = []
    ratios = {qq: [] for qq in q_list}
    for t, f in enumerate(fields):
        if f.is_zero():
            notes.append("trial {0}: zero field skipped, ratio undefined".format(t))
            continue
        for qq in q_list:
            family.check_index(qq)
            ratio = new_bernstein_ratio(f, alpha, p, qq, family)
            if ratio is None:
                notes.append("q={0} trial={1}: empty block skipped".format(qq, t))
                continue
            ratios[qq].append(("trial={0}".format(t), ratio))

    parameters = {"alpha": alpha, "p": p, "q": q_list, "trials": len(fields), "seed": seed}
    return new_bernstein_report(alpha, p, ratios, notes, parameters)


def weighted_commutator(f, s, beta):
    """<y>^beta Lambda^s f - Lambda^s(<y>^beta f) in physical samples"""

    if not 0 < s < 1:
        raise ValueError("commutator order s must lie in (0, 1) (got {0})".format(s))
    if not 0 <= beta <= 1:
        raise ValueError("weight exponent beta must lie in [0, 1] (got {0})".format(beta))

    grid = f.grid
    weight = grid.bracket() ** beta
    weighted = SpectralField.from_physical(grid, weight * f.physical(), rank=f.rank)
    return weight * fractional_laplacian(f, s).physical() - fractional_laplacian(weighted, s).physical()


def _commutator_ratio(f, s, beta):
    grid = f.grid
    commutator = weighted_commutator(f, s, beta)
    if beta < s:
        den = _l2(f.physical(), grid)
    else:
        den = _l2(grid.bracket() ** beta * f.physical(), grid)
    if den == 0:
        return None
    return _l2(commutator, grid) / den


def verify_weighted_commutator(s, beta, trials=3, seed=42, grid=None, widths=None, fields=None, refine=False):
    """
    ||[<y>^beta, Lambda^s] f||_2 against ||f||_2 (beta < s) or ||<y>^beta f||_2 (beta >= s)

    Test fields are Gaussian bumps of several widths near the box center. With refine,
    every bump is resampled on the grid with 2n points and the relative change of
    the ratio is reported.
    """

    grid = make_grid(2, 64, 16 * np.pi) if grid is None else grid
    L = grid.box_length
    widths = [L / 32.0, L / 16.0, L / 8.0] if widths is None else widths

    rng = np.random.default_rng(seed)
    if fields is None:
        specs = []
        for t in range(trials):
            center = rng.uniform(-0.02 * L, 0.02 * L, grid.dim)
            for w in widths:
                specs.append(("trial={0},width={1:.4g}".format(t, w), w, center))
        fields = [(name, gaussian_bump(grid, w, c), (w, c)) for name, w, c in specs]
    else:
        specs = None
        fields = [("field={0}".format(i), f, None) for i, f in enumerate(fields)]

    measured = []
    retained = []
    notes = [TORUS_NOTE]
    for name, f, bump in fields:
        ratio = _commutator_ratio(f, s, beta)
        if ratio is None:
            notes.append("{0}: zero field skipped".format(name))
            continue
        measured.append((name, ratio))
        retained.append((bump, ratio))

    details = {"regime": "beta < s" if beta < s else "beta >= s"}
    criteria = {}
    if refine and specs is not None:
        fine = make_grid(grid.dim, 2 * grid.n, L)
        changes = []
        for (w, c), coarse in retained:
            ratio = _commutator_ratio(gaussian_bump(fine, w, c), s, beta)
            changes.append(abs(ratio - coarse) / coarse if coarse > 0 else 0.0)
        details["refinement_change"] = max(changes) if changes else 0.0
        if details["refinement_change"] > 0.2:
            notes.append("ratio changes by {0:.3g} under n -> 2n".format(details["refinement_change"]))
        criteria["refinement"] = details["refinement_change"] <= 0.2

    parameters = {"s": s, "beta": beta, "trials": trials, "seed": seed}
    return VerificationReport("weighted_commutator", parameters, measured, (0.0, 50.0), notes, details, criteria)


def riesz_weight_ratio(f, beta):
    """||<y>^beta grad f||_2 / ||<y>^beta Lambda f||_2, None for f = 0"""

    grid = f.grid
    weight = grid.bracket() ** beta
    grad = _l2(weight * gradient(f).physical(), grid)
    lam = _l2(weight * fractional_laplacian(f, 1.0).physical(), grid)
    if lam == 0:
        return None
    return grad / lam


def verify_riesz_weight_equiv(beta, trials=3, seed=42, grid=None, fields=None):
    """Both ratios between ||<y>^beta grad f||_2 and ||<y>^beta Lambda f||_2 must stay below 20"""

    if not 0 <= beta <= 1:
        raise ValueError("weight exponent beta must lie in [0, 1] (got {0})".format(beta))

    grid = make_grid(2, 64, 16 * np.pi) if grid is None else grid
    L = grid.box_length

    if fields is None:
        rng = np.random.default_rng(seed)
        fields = []
        for t in range(trials):
            direction = rng.standard_normal(grid.dim)
            direction /= np.linalg.norm(direction)
            k = rng.uniform(0.5, 1.5) * direction
            fields.append(wave_packet(grid, k, L / 16.0, rng.uniform(-0.02 * L, 0.02 * L, grid.dim)))

    measured = []
    notes = [TORUS_NOTE]
    for i, f in enumerate(fields):
        ratio = riesz_weight_ratio(f, beta)
        if ratio is None or ratio == 0:
            notes.append("field {0}: zero field skipped".format(i))
            continue
        measured.append(("field={0},grad/Lambda".format(i), ratio))
        measured.append(("field={0},Lambda/grad".format(i), 1.0 / ratio))

    parameters = {"beta": beta, "trials": len(fields), "seed": seed}
    return VerificationReport("riesz_weight", parameters, measured, (0.0, 20.0), notes)


def commutator_test_setup(dim):
    """Grid, block index and packet wavenumber where the x-commutator identity is resolvable"""
    if dim == 1:
        return make_grid(1, 1024, 32 * np.pi), 4, 16 * 1.05
    if dim == 2:
        return make_grid(2, 512, 24 * np.pi), 3, 8.4
    raise ValueError("no resolvable commutator setup for dim {0}".format(dim))


def verify_commutator_x(trials=10, seed=42, dim=1, grid=None, q=None, fields=None, width=4.0):
    """
    Relative gap between the direct commutator [Delta_q, y] v and its Fourier-side identity

    Default fields are wave packets whose spectrum sits on the slope of the block
    cutoff and whose support is far from the box faces.
    """

    if grid is None:
        grid, q_default, k_center = commutator_test_setup(dim)
    else:
        q_default, k_center = 0, 1.5
    q = q_default if q is None else q
    family = build_dyadic_family(grid)

    rng = np.random.default_rng(seed)
    if fields is None:
        fields = []
        for t in range(trials):
            direction = np.zeros(grid.dim)
            direction[0] = 1.0
            if grid.dim > 1:
                direction = rng.standard_normal(grid.dim)
                direction /= np.linalg.norm(direction)
            k = k_center * rng.uniform(0.98, 1.02) * direction
            center = rng.uniform(-0.01, 0.01, grid.dim) * grid.box_length
            fields.append(wave_packet(grid, k, width, center))

    measured = []
    notes = [TORUS_NOTE]
    for i, v in enumerate(fields):
        direct, via = commutator_x_block(v, q, family)
        scale = via.l2_norm()
        if scale == 0:
            notes.append("field {0}: identity side vanishes, skipped".format(i))
            continue
        measured.append(("field={0}".format(i), (direct - via).l2_norm() / scale))

    parameters = {"q": q, "dim": grid.dim, "n": grid.n, "trials": len(fields), "seed": seed}
    return VerificationReport("commutator_x", parameters, measured, (0.0, 1e-9), notes)


def compactness_split(u, v, N, p=2, family=None):
    """
    Terms of the high/low splitting of ||div(u (x) v)||_{B-dot^0_{p,p}}

    high_tail = sup_{k >= N} 2^(5k/6) ||Delta_k u||_2,
    low_bulk = 2^(5N/3) ||u||_{B-dot^{5/6}_{2,inf}},
    kappa = lhs / (high_tail ||v||_{5/3} + low_bulk ||v||_0 + ||v||_{5/3}^(3/5) ||v||_0^(2/5) ||u||_{5/6}).

    :param u: divergence-free vector field
    :param v: vector field
    :param N: splitting block index
    :param p: integrability in [2, 9/2)
    :return: dict
    """

    if not 2 <= p < 4.5:
        raise ValueError("compactness lemma needs p in [2, 9/2) (got {0})".format(p))
    if divergence_residual(u) > 1e-8:
        raise ValueError("compactness split needs a divergence-free u")

    family = build_dyadic_family(u.grid) if family is None else family
    family.check_index(N)

    lhs = besov_norm(divergence(tensor_product(u, v)), BesovSpec(0, p, p), family)

    tail = [2.0 ** (5.0 * k / 6.0) * lp_norm(u.with_coeffs(u.coeffs * family.block_symbol(k)), 2)
            for k in family.block_range() if k >= N]
    high_tail = max(tail) if tail else 0.0

    u_besov = besov_norm(u, BesovSpec(5.0 / 6.0, 2, np.inf), family)
    low_bulk = 2.0 ** (5.0 * N / 3.0) * u_besov

    v_high = besov_norm(v, BesovSpec(5.0 / 3.0, p, p), family)
    v_low = besov_norm(v, BesovSpec(0, p, p), family)

    rhs = high_tail * v_high + low_bulk * v_low + v_high ** 0.6 * v_low ** 0.4 * u_besov
    if rhs == 0:
        kappa = 0.0 if lhs == 0 else np.inf
    else:
        kappa = lhs / rhs

    return {
        "lhs": lhs,
        "high_tail": high_tail,
        "low_bulk": low_bulk,
        "v_high": v_high,
        "v_low": v_low,
        "kappa": kappa,
        "N": N,
        "p": p
    }


#observed kappa above this is reported as a failure
KAPPA_MAX = 1e3


def verify_compactness(N_list=None, p=2, trials=3, seed=42, grid=None):
    """Observed kappa of the compactness splitting over an N sweep, with the tail monotonicity check"""

    grid = make_grid(2, 64, 2 * np.pi) if grid is None else grid
    family = build_dyadic_family(grid)
    N_list = list(range(family.q_min, family.q_max + 1)) if N_list is None else list(N_list)

    measured = []
    notes = []
    tails = {}
    for t in range(trials):
        u = random_field(grid, "vector", seed=seed + 2 * t, solenoidal=True)
        v = random_field(grid, "vector", seed=seed + 2 * t + 1)
        tails[t] = []
        for N in N_list:
            split = compactness_split(u, v, N, p, family)
            measured.append(("trial={0},N={1}".format(t, N), split["kappa"]))
            tails[t].append(split["high_tail"])
        if np.any(np.diff(tails[t]) > 1e-12 * max(tails[t][0], 1.0)):
            notes.append("trial {0}: high_tail increases with N".format(t))

    parameters = {"p": p, "N": N_list, "trials": trials, "seed": seed}
    return VerificationReport("compactness", parameters, measured, (0.0, KAPPA_MAX), notes, {"high_tail": tails})


def weighted_sup(f, m, window=0.35):
    """max over the window of <y>^m |f|"""

    if m < 0:
        raise ValueError("weight exponent m must be nonnegative (got {0})".format(m))
    grid = f.grid
    mask = grid.window_mask(window)
    weighted = grid.bracket() ** m * pointwise_magnitude(f)
    return float(np.max(weighted[mask]))
