from leraylab.semigroup.heat import heat_step, heat_symbol, oseen_apply, kernel_annulus_decay_probe, check_alpha
from leraylab.semigroup.duhamel import DuhamelQuadrature, duhamel_map, duhamel_integrand, mass_inside
