import numpy as np
from scipy.stats import linregress

from leraylab.spectral import divergence, gradient, lp_norm
from leraylab.littlewood_paley import build_dyadic_family
from leraylab.lab.report import VerificationReport


def linear_block_estimate_probe(v, P, f, q, p=2, alpha=1.0, family=None):
    """
    Implied constant of the per-block elliptic estimate

    ratio_q = 2^(2 q alpha) ||Delta_q v||_p / (||grad Delta_q P||_p + ||Delta_q f||_p + C ||Delta-tilde_q v||_p)
    with C = 1 + 3/(2 alpha). A block is flagged when ratio_q exceeds (8/3)^(2 alpha).

    :param v: vector SpectralField
    :param P: scalar SpectralField
    :param f: force, vector or tensor (a tensor is replaced by its divergence), or None
    :param q: block index or list of block indices
    """

    family = build_dyadic_family(v.grid) if family is None else family
    if f is not None and f.rank == "tensor":
        f = divergence(f)

    qs = [q] if np.isscalar(q) else list(q)
    C = 1.0 + 3.0 / (2.0 * alpha)

    measured = []
    terms = {}
    for qq in qs:
        family.check_index(qq)
        block = family.block_symbol(qq)
        near = family.neighbour_symbol(qq)

        lhs = 2.0 ** (2 * qq * alpha) * lp_norm(v.with_coeffs(v.coeffs * block), p)
        pressure = lp_norm(gradient(P.with_coeffs(P.coeffs * block)), p)
        force = 0.0 if f is None else lp_norm(f.with_coeffs(f.coeffs * block), p)
        neighbours = lp_norm(v.with_coeffs(v.coeffs * near), p)

        rhs = pressure + force + C * neighbours
        if rhs == 0:
            ratio = 0.0 if lhs == 0 else np.inf
        else:
            ratio = lhs / rhs

        measured.append(("q={0}".format(qq), ratio))
        terms["q={0}".format(qq)] = {"lhs": lhs, "pressure": pressure, "force": force, "neighbours": neighbours}

    bound = (0.0, (8.0 / 3.0) ** (2 * alpha))
    ratios = np.array([r for _, r in measured])
    flagged = [qq for qq, r in zip(qs, ratios) if r > bound[1]]

    details = {"terms": terms, "flagged": flagged, "C": C}
    notes = []
    usable = np.isfinite(ratios) & (ratios > 0)
    if np.sum(usable) >= 2:
        details["log_ratio_slope"] = linregress(np.array(qs)[usable], np.log(ratios[usable])).slope
    if flagged:
        notes.append("estimate would force c_p above (8/3)^(2 alpha) at q in {0}".format(flagged))

    return VerificationReport("linear_block_estimate", {"alpha": alpha, "p": p, "q": qs}, measured, bound,
                              notes, details)
