import numpy as np


#radial cutoff h equals 1 on [0, INNER] and vanishes on [OUTER, inf)
INNER = 3.0 / 4.0
OUTER = 4.0 / 3.0

VARIANTS = ("homog_block", "homog_lowpass", "inhomog_block")


def _psi(t):
    t = np.asarray(t, dtype=float)
    positive = t > 0
    return np.where(positive, np.exp(-1.0 / np.where(positive, t, 1.0)), 0.0)


def _dpsi(t):
    t = np.asarray(t, dtype=float)
    positive = t > 0
    safe = np.where(positive, t, 1.0)
    return np.where(positive, np.exp(-1.0 / safe) / safe ** 2, 0.0)


def smooth_step(t):
    """C-infinity step: 0 for t <= 0, 1 for t >= 1"""
    a = _psi(t)
    b = _psi(1.0 - np.asarray(t, dtype=float))
    return a / (a + b)


def smooth_step_derivative(t):
    t = np.asarray(t, dtype=float)
    a, b = _psi(t), _psi(1.0 - t)
    da, db = _dpsi(t), _dpsi(1.0 - t)
    return (da * b + a * db) / (a + b) ** 2


def h_profile(r):
    """Radial profile of h-hat"""
    return 1.0 - smooth_step((np.asarray(r, dtype=float) - INNER) / (OUTER - INNER))


def h_profile_derivative(r):
    return -smooth_step_derivative((np.asarray(r, dtype=float) - INNER) / (OUTER - INNER)) / (OUTER - INNER)


def phi_profile(r):
    """Radial profile of phi-hat(xi) = h-hat(xi/2) - h-hat(xi), supported in [3/4, 8/3]"""
    r = np.asarray(r, dtype=float)
    return h_profile(r / 2.0) - h_profile(r)


def phi_profile_derivative(r):
    r = np.asarray(r, dtype=float)
    return 0.5 * h_profile_derivative(r / 2.0) - h_profile_derivative(r)


class DyadicFamily(object):
    """
    Littlewood-Paley cutoffs on a grid.

    q_min/q_max bound the blocks whose annulus fits inside the dealiased spectrum.
    Blocks are evaluated over the wider range [q_lo, q_hi] so that every grid mode
    is covered and sum_q Delta_q f = f holds for mean-zero f.
    """

    def __init__(self, grid):

        self.grid = grid

        shift = int(np.ceil(np.log2(grid.box_length / (2 * np.pi)) - 1e-12))
        self.q_min = -shift - 1
        self.q_max = int(np.floor(np.log2(grid.n / 3.0) - 1)) - shift

        #smallest q with h(2^-(q+1) xi) = 1 on every grid mode
        kmax = np.max(grid.kmag)
        q_cover = int(np.ceil(np.log2(kmax / (2 * INNER))))

        self.q_lo = self.q_min - 1
        self.q_hi = max(self.q_max + 1, q_cover)

        self._cache = {}

    def h_hat(self, xi):
        return h_profile(xi)

    def phi_hat(self, xi):
        return phi_profile(xi)

    def block_range(self):
        return range(self.q_lo, self.q_hi + 1)

    def check_index(self, q, variant="homog_block"):
        if variant not in VARIANTS:
            raise ValueError("unknown block variant {0}".format(variant))
        lo = -1 if variant == "inhomog_block" else self.q_lo
        hi = self.q_hi + 1 if variant == "homog_lowpass" else self.q_hi
        if not lo <= q <= hi:
            raise ValueError("block index q={0} outside representable range [{1}, {2}]".format(q, lo, hi))

    def block_symbol(self, q):
        """phi-hat(2^-q xi) on the grid"""
        key = ("block", q)
        if key not in self._cache:
            self._cache[key] = phi_profile(self.grid.kmag * 2.0 ** (-q))
        return self._cache[key]

    def lowpass_symbol(self, q):
        """S_q: h-hat(2^-q xi)"""
        key = ("lowpass", q)
        if key not in self._cache:
            self._cache[key] = h_profile(self.grid.kmag * 2.0 ** (-q))
        return self._cache[key]

    def neighbour_symbol(self, q):
        """Delta-tilde_q = Delta_{q-1} + Delta_q + Delta_{q+1}"""
        return self.block_symbol(q - 1) + self.block_symbol(q) + self.block_symbol(q + 1)

    def inhomog_symbol(self, q):
        if q == -1:
            return self.lowpass_symbol(0)
        return self.block_symbol(q)

    def block_gradient_symbol(self, q):
        """Components of (grad phi-hat)(2^-q xi), direction taken from the derivative wavenumbers"""
        grid = self.grid
        eta = grid.kmag * 2.0 ** (-q)
        radial = phi_profile_derivative(eta)
        safe = np.where(grid.kmag > 0, grid.kmag, 1.0)
        return [radial * grid.derivative_wavenumbers[a] / safe for a in range(grid.dim)]

    def __repr__(self):
        return "<DyadicFamily q_min={0} q_max={1} blocks {2}..{3} on {4}>".format(
            self.q_min, self.q_max, self.q_lo, self.q_hi, self.grid)


def build_dyadic_family(grid):
    return DyadicFamily(grid)


def dyadic_block(f, q, variant="homog_block", family=None):
    """
    Frequency localisation of f

    :param f: SpectralField
    :param q: block index
    :param variant: homog_block (Delta-dot_q), homog_lowpass (S-dot_q) or inhomog_block (Delta_q, Delta_-1 = S_0)
    :param family: DyadicFamily for f.grid, built on demand
    """

    family = build_dyadic_family(f.grid) if family is None else family
    family.check_index(q, variant)

    if variant == "homog_block":
        symbol = family.block_symbol(q)
    elif variant == "homog_lowpass":
        symbol = family.lowpass_symbol(q)
    else:
        symbol = family.inhomog_symbol(q)

    return f.with_coeffs(f.coeffs * symbol)


def block_sum(f, family=None):
    """sum over the block range of Delta-dot_q f"""
    family = build_dyadic_family(f.grid) if family is None else family
    total = np.zeros_like(f.coeffs)
    for q in family.block_range():
        total = total + f.coeffs * family.block_symbol(q)
    return f.with_coeffs(total)
