import numpy as np
from numpy.polynomial.legendre import leggauss

from leraylab.spectral import SpectralField, leray_project, divergence, dilate, pointwise_magnitude
from leraylab.semigroup.heat import check_alpha, heat_symbol


#fraction of int |G|^2 that must sit inside the cube |y|_inf <= MASS_CUBE * L
MASS_FRACTION = 0.999
MASS_CUBE = 0.45


class DuhamelQuadrature(object):
    """
    Composite Gauss-Legendre rule for int_{s_min}^1 ds.

    [s_min, 1/2] is mapped by s = sigma^g (g = 2 alpha unless grading is given) and
    cut into dyadic panels in sigma. [1/2, 1] is cut into dyadic panels in 1 - s
    that cluster at s = 1. Every panel carries `nodes` points.
    """

    def __init__(self, s_min=1e-2, nodes=6, grading=None):

        if not 1e-4 < s_min < 0.5:
            raise ValueError("s_min must lie in (1e-4, 0.5) (got {0})".format(s_min))
        if nodes < 4:
            raise ValueError("nodes must be at least 4 (got {0})".format(nodes))
        if grading is not None and grading <= 0:
            raise ValueError("grading exponent must be positive (got {0})".format(grading))

        self.s_min = s_min
        self.nodes = int(nodes)
        self.grading = grading

    def _panel(self, a, b):
        x, w = leggauss(self.nodes)
        return 0.5 * (b - a) * x + 0.5 * (b + a), 0.5 * (b - a) * w

    def nodes_and_weights(self, alpha):
        """
        :return: (s, w) with sum_i w_i g(s_i) ~ int_{s_min}^1 g(s) ds, s increasing
        """

        g = 2.0 * alpha if self.grading is None else self.grading

        s_parts, w_parts = [], []

        #lower part in sigma = s^(1/g)
        sig_lo, sig_hi = self.s_min ** (1.0 / g), 0.5 ** (1.0 / g)
        edges = [sig_hi]
        while edges[-1] / 2.0 > sig_lo:
            edges.append(edges[-1] / 2.0)
        edges.append(sig_lo)
        edges = edges[::-1]
        for a, b in zip(edges[:-1], edges[1:]):
            sig, w = self._panel(a, b)
            s_parts.append(sig ** g)
            w_parts.append(w * g * sig ** (g - 1.0))

        #upper part in d = 1 - s, panels [2^(-j-1), 2^(-j)] and a last one touching s = 1
        levels = int(np.ceil(np.log2(1.0 / self.s_min)))
        upper = [(2.0 ** (-j - 1), 2.0 ** (-j)) for j in range(1, levels + 1)] + [(0.0, 2.0 ** (-levels - 1))]
        for a, b in upper:
            d, w = self._panel(a, b)
            s_parts.append(1.0 - d)
            w_parts.append(w)

        s = np.concatenate(s_parts)
        w = np.concatenate(w_parts)
        order = np.argsort(s, kind="stable")
        return s[order], w[order]

    def refined(self):
        """Same rule with twice the nodes per panel"""
        return DuhamelQuadrature(self.s_min, 2 * self.nodes, self.grading)

    def get_parameters(self):
        return {"s_min": self.s_min, "nodes": self.nodes, "grading": self.grading}

    def __repr__(self):
        return "<DuhamelQuadrature s_min={0:g} nodes={1} grading={2}>".format(self.s_min, self.nodes, self.grading)


def mass_inside(G, cube=MASS_CUBE):
    """Fraction of int |G|^2 inside the centered cube |y|_inf <= cube * L"""

    grid = G.grid
    density = pointwise_magnitude(G) ** 2
    total = np.sum(density)
    if total == 0:
        return 1.0
    inside = np.ones(grid.shape, dtype=bool)
    for a in range(grid.dim):
        inside = inside & (np.abs(grid.coordinates[a]) <= cube * grid.box_length)
    return float(np.sum(density[inside]) / total)


def duhamel_integrand(div_G, s, alpha):
    """
    s^(1/alpha - 2) exp(-(1-s)|k|^(2 alpha)) P div(G(./lam)), lam = s^(1/(2 alpha)),
    from div G using div(G(./lam)) = (div G)(./lam) / lam
    """

    lam = s ** (1.0 / (2.0 * alpha))
    stretched = dilate(div_G, lam)
    prefactor = s ** (1.0 / alpha - 2.0) / lam
    coeffs = prefactor * heat_symbol(div_G.grid, 1.0 - s, alpha) * stretched.coeffs
    return leray_project(stretched.with_coeffs(coeffs))


def duhamel_map(G, alpha, quad=None):
    """
    Duhamel representation of a profile driven by the tensor G:
    int_{s_min}^1 exp(-(1-s)(-Delta)^alpha) P div(s^(1/alpha-2) G(./s^(1/(2 alpha)))) ds

    The neglected piece int_0^{s_min} is estimated by s_min times the integrand
    norm at s_min and stored as meta["tail_estimate"].

    :param G: real tensor SpectralField, concentrated well inside the box
    :param alpha: in [5/6, 1]
    :param quad: DuhamelQuadrature
    :return: divergence-free vector SpectralField
    """

    if G.rank != "tensor":
        raise ValueError("duhamel_map needs a tensor field, got {0}".format(G.rank))
    check_alpha(alpha, 5.0 / 6.0, 1.0, closed_lo=True)
    quad = DuhamelQuadrature() if quad is None else quad

    grid = G.grid
    if G.is_zero():
        return SpectralField.zeros(grid, rank="vector")

    fraction = mass_inside(G)
    if fraction < MASS_FRACTION:
        raise ValueError("dilation not representable: only {0:.5f} of the mass of G lies in the inner cube".format(
            fraction))

    div_G = divergence(G)
    s_nodes, weights = quad.nodes_and_weights(alpha)

    total = np.zeros((grid.dim,) + grid.shape, dtype=np.complex128)
    for s, w in zip(s_nodes, weights):
        total += w * duhamel_integrand(div_G, s, alpha).coeffs

    tail = quad.s_min * duhamel_integrand(div_G, quad.s_min, alpha).l2_norm()

    meta = {
        "tail_estimate": float(tail),
        "quadrature": quad.get_parameters(),
        "num_nodes": len(s_nodes),
        "mass_inside": fraction
    }
    return SpectralField(grid, total, rank="vector", hermitian=G.hermitian, meta=meta, check=False)
