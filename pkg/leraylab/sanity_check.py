import numpy as np


def check_divergence(residual, epsilon=1e-6, what="field"):
    """Soft check on a relative spectral divergence"""

    if not residual <= epsilon:
        print("Warning: {0} has relative divergence {1:g} (eps={2}).".format(what, residual, epsilon))
        return 0

    return 1


def check_mean_zero(f, epsilon=1e-12, what="field"):

    if not f.is_mean_zero(epsilon):
        print("Warning: {0} is not mean-zero, max |mean| = {1:g} (eps={2}).".format(
            what, np.max(np.abs(f.mean())), epsilon))
        return 0

    return 1


def check_finite(values, what="field"):

    values = np.asarray(values)
    bad = np.sum(~np.isfinite(values))
    if bad:
        print("Warning: {0} has {1}/{2} non-finite entries.".format(what, bad, values.size))
        return 0

    return 1


def check_window_mass(fraction, threshold=0.999, what="field"):
    """Soft version of the representability test used by the Duhamel map"""

    if fraction < threshold:
        print("Warning: only {0:.5f} of the squared mass of {1} lies in the inner cube (threshold {2}).".format(
            fraction, what, threshold))
        return 0

    return 1
