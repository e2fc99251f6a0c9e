from leraylab.solver.sigma import SigmaSpec, InitialData, make_initial_data, radial_window, homogeneous_values
from leraylab.solver.profile import (
    ProfileRun, dissipation, self_similarity_residual, pressure_from_velocity, profile_extract, profile_residual
)
from leraylab.solver.timestepping import TimeStepper, SolverAbort, evolve_fns
from leraylab.solver.picard import PicardIteration, picard_profile_solve
from leraylab.solver.probes import linear_block_estimate_probe
