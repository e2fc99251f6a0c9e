import numpy as np

from leraylab.spectral.field import SpectralField, forward, backward
from leraylab.littlewood_paley.dyadic import build_dyadic_family


def _physical(coeffs, grid):
    return backward(coeffs, grid).real


def paraproduct(f, g, family=None):
    """
    Bony decomposition fg = T_f g + T_g f + R(f, g)

    T_f g = sum_q S_{q-1} f * Delta_q g and R(f, g) = sum_q Delta-tilde_q f * Delta_q g,
    with every product dealiased.

    :param f: mean-zero real scalar SpectralField
    :param g: mean-zero real scalar SpectralField on the same grid
    :return: (T_f g, T_g f, R(f, g))
    """

    for h in (f, g):
        if h.rank != "scalar":
            raise ValueError("paraproduct needs scalar fields, got {0}".format(h.rank))
        if not h.is_mean_zero():
            raise ValueError("paraproduct needs mean-zero fields")

    grid = f.grid
    family = build_dyadic_family(grid) if family is None else family

    t_fg = np.zeros(grid.shape)
    t_gf = np.zeros(grid.shape)
    rest = np.zeros(grid.shape)

    for q in family.block_range():
        block = family.block_symbol(q)
        if not np.any(block):
            continue
        low = family.lowpass_symbol(q - 1)
        near = family.neighbour_symbol(q)

        f_q = _physical(f.coeffs * block, grid)
        g_q = _physical(g.coeffs * block, grid)

        t_fg += _physical(f.coeffs * low, grid) * g_q
        t_gf += _physical(g.coeffs * low, grid) * f_q
        rest += _physical(f.coeffs * near, grid) * g_q

    def to_field(values):
        return SpectralField(grid, forward(values, grid) * grid.dealias_mask, rank="scalar", check=False)

    return to_field(t_fg), to_field(t_gf), to_field(rest)


def dealiased_product(f, g):
    """Pointwise product fg of two scalar fields with the 2/3 mask applied"""
    grid = f.grid
    values = f.physical() * g.physical()
    return SpectralField(grid, forward(values, grid) * grid.dealias_mask, rank="scalar", check=False)


def commutator_x_block(v, q, family=None):
    """
    [Delta-dot_q, y_a] v computed two ways

    direct evaluates Delta_q(y_a v) - y_a Delta_q v with the centered sawtooth
    coordinate y; via_identity applies the Fourier symbol -i 2^-q (d_a phi-hat)(2^-q xi).
    The coordinate index a is the leading component of both outputs.

    :param v: scalar or vector SpectralField
    :return: (direct, via_identity)
    """

    if v.rank not in ("scalar", "vector"):
        raise ValueError("commutator_x_block needs a scalar or vector field, got {0}".format(v.rank))

    grid = v.grid
    family = build_dyadic_family(grid) if family is None else family
    family.check_index(q)

    block = family.block_symbol(q)
    values = v.physical()
    blocked = _physical(v.coeffs * block, grid)

    direct = []
    for a in range(grid.dim):
        y = grid.coordinates[a]
        moved = forward(y * values, grid) * block
        direct.append(moved - forward(y * blocked, grid))

    gradient = family.block_gradient_symbol(q)
    via = [-1j * 2.0 ** (-q) * gradient[a] * v.coeffs for a in range(grid.dim)]

    rank = "vector" if v.rank == "scalar" else "tensor"
    return (v.with_coeffs(np.stack(direct), rank=rank),
            v.with_coeffs(np.stack(via), rank=rank))
