import numpy as np


TORUS_NOTE = "torus-approximation: whole-space statement checked on a periodic box with centered weights"


def to_plain(value):
    """Convert numpy scalars and arrays into JSON-friendly python values"""
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_plain(v) for v in value.tolist()]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        value = float(value)
    if isinstance(value, float) and not np.isfinite(value):
        return repr(value)
    return value


class VerificationReport(object):
    """
    Outcome of one numerical check.

    measured holds (input-id, constant) pairs; the verdict is "pass" iff every
    constant lies inside the closed interval bound and every named criterion holds.
    """

    def __init__(self, name, parameters, measured, bound, notes=None, details=None, criteria=None):

        self.name = name
        self.parameters = dict(parameters)
        self.measured = [(str(i), float(v)) for i, v in measured]
        self.bound = (float(bound[0]), float(bound[1]))
        self.notes = list(notes) if notes else []
        self.details = dict(details) if details else {}
        self.criteria = {str(k): bool(v) for k, v in (criteria or {}).items()}

    @property
    def verdict(self):
        lo, hi = self.bound
        ok = all(np.isfinite(v) and lo <= v <= hi for _, v in self.measured)
        ok = ok and all(self.criteria.values())
        return "pass" if ok else "fail"

    @property
    def passed(self):
        return self.verdict == "pass"

    def values(self):
        return np.array([v for _, v in self.measured])

    def to_dict(self):
        return to_plain({
            "name": self.name,
            "parameters": self.parameters,
            "measured": [[i, v] for i, v in self.measured],
            "bound": list(self.bound),
            "verdict": self.verdict,
            "notes": self.notes,
            "details": self.details,
            "criteria": self.criteria
        })

    def __repr__(self):
        values = self.values()
        if values.size:
            spread = "min={0:g} max={1:g}".format(np.min(values), np.max(values))
        else:
            spread = "no measurements"
        return "<VerificationReport {0} {1} bound=[{2:g}, {3:g}] {4}>".format(
            self.name, self.verdict, self.bound[0], self.bound[1], spread)


class DecayFit(object):
    """Power-law fit |f| ~ r^-m (optionally times (log r)^b) over a radial annulus"""

    def __init__(self, alpha, annulus, model, exponent, log_coefficient=None, rms_residual=0.0,
                 shells=None):

        self.alpha = alpha
        self.annulus = (float(annulus[0]), float(annulus[1]))
        self.model = model
        self.exponent = float(exponent)
        self.log_coefficient = None if log_coefficient is None else float(log_coefficient)
        self.rms_residual = float(rms_residual)
        self.shells = shells

    @property
    def expected(self):
        if self.alpha is None:
            return None
        return 4 * self.alpha - 1

    def to_dict(self):
        return to_plain({
            "alpha": self.alpha,
            "annulus": list(self.annulus),
            "model": self.model,
            "exponent": self.exponent,
            "log_coefficient": self.log_coefficient,
            "rms_residual": self.rms_residual,
            "expected": self.expected
        })

    def __repr__(self):
        return "<DecayFit {0} m={1:.4g} expected={2} rms={3:.3g}>".format(
            self.model, self.exponent, self.expected, self.rms_residual)
