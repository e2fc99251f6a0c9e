from leraylab.littlewood_paley.dyadic import (
    DyadicFamily, build_dyadic_family, dyadic_block, block_sum,
    smooth_step, h_profile, phi_profile, phi_profile_derivative
)
from leraylab.littlewood_paley.norms import (
    BesovSpec, WeightSpec, besov_sequence, besov_norm, sobolev_norm, sobolev_besov_bracket,
    weighted_sobolev_norm, holder_seminorm
)
from leraylab.littlewood_paley.products import paraproduct, dealiased_product, commutator_x_block
