from leraylab.spectral.grid import Grid, make_grid, fft_workers
from leraylab.spectral.field import SpectralField, forward, backward
from leraylab.spectral.operators import (
    MultiplierSpec, apply_multiplier, fractional_laplacian, leray_project, riesz_transform,
    partial, gradient, divergence, dealias, tensor_product, nonlinear_term, advective_term,
    divergence_residual, pointwise_magnitude, lp_norm, random_field, gaussian_bump, wave_packet,
    dilate, interpolate_scaled
)
