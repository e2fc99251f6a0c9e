import numpy as np

from leraylab.spectral import SpectralField, make_grid, tensor_product, divergence_residual
from leraylab.semigroup.duhamel import duhamel_map, DuhamelQuadrature
from leraylab.semigroup.heat import check_alpha
from leraylab.solver.profile import pressure_from_velocity
from leraylab.solver.timestepping import SolverAbort, max_velocity


class PicardIteration():
    """Damped fixed-point iteration v <- (1 - theta) v + theta D(v)"""

    def __init__(self, progress=None, maxit=50, tol=1e-6, damping=1.0, growth_limit=3):

        if not tol > 0:
            raise ValueError("tol must be positive (got {0})".format(tol))
        if not 0 < damping <= 1:
            raise ValueError("damping must lie in (0, 1] (got {0})".format(damping))
        if maxit < 1:
            raise ValueError("maxit must be at least 1 (got {0})".format(maxit))

        self.maxit = maxit
        self.tol = tol
        self.damping = damping

        #abort after this many consecutive growing updates
        self.growth_limit = growth_limit

        #optimization progress logger
        self.progress = progress

    def __repr__(self):
        rep_str = "Picard iteration (damping={0})\n".format(self.damping)
        rep_str += "\tconvergence criteria: maxit={0} tol={1} growth_limit={2}\n".format(
            self.maxit, self.tol, self.growth_limit)
        return rep_str

    def solve(self, mapping, v):
        """
        :param mapping: callable v -> D(v)
        :param v: starting field
        :return: (v, ret, history)
        """

        ret = {
            "code": 2,
            "message": "Reached maximum number of iterations",
            "num_iterations": self.maxit
        }

        history = []
        prev_norm = None
        growth = 0
        for i in range(self.maxit):

            try:
                image = mapping(v)
            except ValueError as e:
                ret = {
                    "code": -3,
                    "message": str(e),
                    "num_iterations": i
                }
                return v, ret, history

            v_new = (1 - self.damping) * v + self.damping * image if self.damping < 1 else image

            if not np.all(np.isfinite(v_new.coeffs)):
                ret = {
                    "code": -1,
                    "message": "Non-finite iterate",
                    "num_iterations": i + 1
                }
                return v, ret, history

            update_norm = (v_new - v).l2_norm()
            new_norm = v_new.l2_norm()
            l2_update = update_norm / new_norm if new_norm > 0 else update_norm

            row = {
                "step": i + 1,
                "time": 1.0,
                "l2_update": float(l2_update),
                "update_norm": float(update_norm),
                "div_residual": divergence_residual(v_new),
                "max_velocity": max_velocity(v_new)
            }
            history.append(row)

            if self.progress is not None:
                self.progress.log_progress(i + 1, **{k: val for k, val in row.items() if k not in ("step", "time")})

            v = v_new

            if l2_update < self.tol:
                ret = {
                    "code": 0,
                    "message": "Stopping condition (relative update < {0}) successfull.".format(self.tol),
                    "num_iterations": i + 1
                }
                return v, ret, history

            growth = growth + 1 if prev_norm is not None and update_norm > prev_norm else 0
            prev_norm = update_norm
            if growth >= self.growth_limit:
                ret = {
                    "code": -2,
                    "message": "amplitude too large: update grew over {0} consecutive iterations".format(growth),
                    "num_iterations": i + 1
                }
                return v, ret, history

        return v, ret, history

    def get_parameters(self):
        parameters = {}

        parameters['convergence'] = {}
        parameters['convergence']['maxit'] = self.maxit
        parameters['convergence']['tol'] = self.tol
        parameters['convergence']['growth_limit'] = self.growth_limit

        parameters['damping'] = self.damping

        return parameters


def profile_forcing(v, u0, f):
    """G = f - (u0 + v) (x) (u0 + v), expanded so that u0 (x) u0 enters as the fixed part"""

    G = f - tensor_product(v, v)
    if u0 is not None:
        G = G - tensor_product(u0, v) - tensor_product(v, u0) - tensor_product(u0, u0)
    return G


def picard_profile_solve(f, alpha, tol=1e-6, max_iter=50, damping=1.0, u0=None, quad=None, progress=None,
                         grid=None):
    """
    Solve the profile system by Picard iteration on the Duhamel map

    :param f: force tensor SpectralField, or None for zero force on `grid`
    :param alpha: in [5/6, 1]
    :param u0: optional mollified initial data; adds f0 = -u0 (x) u0 and the cross terms
    :param quad: DuhamelQuadrature
    :return: (v, P, residual_history)
    :raises SolverAbort: unless the iteration converged
    """

    check_alpha(alpha, 5.0 / 6.0, 1.0, closed_lo=True)
    if f is None:
        grid = make_grid(3, 32, 8 * np.pi) if grid is None else grid
        f = SpectralField.zeros(grid, rank="tensor")
    if f.rank != "tensor":
        raise ValueError("force must be a tensor field, got {0}".format(f.rank))
    quad = DuhamelQuadrature() if quad is None else quad

    solver = PicardIteration(progress, maxit=max_iter, tol=tol, damping=damping)

    def mapping(v):
        return duhamel_map(profile_forcing(v, u0, f), alpha, quad)

    v, ret, history = solver.solve(mapping, SpectralField.zeros(f.grid, rank="vector"))

    if ret["code"] != 0:
        raise SolverAbort(ret["message"], ret, history)

    u = v if u0 is None else v + u0
    P = pressure_from_velocity(u, f)
    return v, P, history
