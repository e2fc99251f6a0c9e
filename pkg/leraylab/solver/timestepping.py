import sys
import numpy as np

from leraylab.spectral import leray_project, nonlinear_term, divergence_residual
from leraylab.semigroup.heat import heat_symbol, check_alpha
from leraylab.solver.profile import ProfileRun, SNAPSHOT_DIV_TOL


SCHEMES = ("integrating_factor_rk2", "imex_euler")


class SolverAbort(RuntimeError):
    """Raised when a solver stops early; carries the ret dict and the residual history"""

    def __init__(self, reason, ret=None, history=None):
        super(SolverAbort, self).__init__(reason)
        self.reason = reason
        self.ret = ret if ret is not None else {"code": -1, "message": reason, "num_iterations": 0}
        self.history = history if history is not None else []


class TimeStepper(object):
    """
    Pseudo-spectral step for u_t + P div(u (x) u) + (-Delta)^alpha u = 0

    integrating_factor_rk2 treats the dissipation exactly through E = exp(-dt |k|^(2 alpha))
    and the nonlinearity by Heun's method; imex_euler is first order with the
    dissipation implicit.
    """

    def __init__(self, dt=2e-3, scheme="integrating_factor_rk2", cfl_safety=1.0):

        if not dt > 0:
            raise ValueError("time step dt must be positive (got {0})".format(dt))
        if scheme not in SCHEMES:
            raise ValueError("scheme must be one of {0} (got {1})".format(SCHEMES, scheme))
        if not 0 < cfl_safety <= 1:
            raise ValueError("cfl_safety must lie in (0, 1] (got {0})".format(cfl_safety))

        self.dt = dt
        self.scheme = scheme
        self.cfl_safety = cfl_safety

    def __repr__(self):
        return "Time stepping {0} (dt={1:g}, cfl_safety={2:g})\n".format(self.scheme, self.dt, self.cfl_safety)

    def rhs(self, u, nonlinear=True):
        """N(u) = -P div(u (x) u)"""
        if not nonlinear:
            return u.with_coeffs(np.zeros_like(u.coeffs))
        return -leray_project(nonlinear_term(u, u))

    def step(self, u, dt, alpha, nonlinear=True):

        grid = u.grid
        n0 = self.rhs(u, nonlinear)

        if self.scheme == "integrating_factor_rk2":
            E = heat_symbol(grid, dt, alpha)
            u1 = u.with_coeffs(E * (u.coeffs + dt * n0.coeffs))
            n1 = self.rhs(u1, nonlinear)
            coeffs = E * u.coeffs + 0.5 * dt * (E * n0.coeffs + n1.coeffs)
        else:
            coeffs = (u.coeffs + dt * n0.coeffs) / (1.0 + dt * grid.kmag ** (2 * alpha))

        return leray_project(u.with_coeffs(coeffs))

    def get_parameters(self):
        return {"dt": self.dt, "scheme": self.scheme, "cfl_safety": self.cfl_safety}


def max_velocity(u):
    values = u.physical()
    return float(np.max(np.sqrt(np.sum(values ** 2, axis=0))))


def relative_update(new, old):
    diff = np.sqrt(np.sum(np.abs(new.coeffs - old.coeffs) ** 2))
    scale = np.sqrt(np.sum(np.abs(new.coeffs) ** 2))
    if scale == 0:
        return float(diff)
    return float(diff / scale)


def evolve_fns(u_init, alpha, t_end, ts, snapshot_times=None, nonlinear=True, progress=None, log_every=10,
               sigma=None, initial=None):
    """
    Integrate the fractional Navier-Stokes system from u_init up to t_end

    The step is shortened inside each segment so that every snapshot time is hit exactly.

    :param u_init: divergence-free vector SpectralField
    :param alpha: dissipation order in (0, 1]
    :param ts: TimeStepper
    :param snapshot_times: times in (0, t_end] to record, t_end is always recorded
    :param nonlinear: False drops the nonlinearity (pure dissipation)
    :param progress: optional Progress logger
    :return: ProfileRun
    """

    check_alpha(alpha)
    if u_init.rank != "vector":
        raise ValueError("u_init must be a vector field, got {0}".format(u_init.rank))
    if not t_end > 0:
        raise ValueError("t_end must be positive (got {0})".format(t_end))
    residual = divergence_residual(u_init)
    if residual > SNAPSHOT_DIV_TOL:
        raise ValueError("u_init has relative divergence {0:g}, project it first".format(residual))

    times = set([float(t_end)])
    for t in (snapshot_times or []):
        if not 0 < t <= t_end:
            raise ValueError("snapshot time {0} outside (0, {1}]".format(t, t_end))
        times.add(float(t))
    times = sorted(times)

    grid = u_init.grid
    run = ProfileRun(alpha, grid, sigma=sigma, initial=initial, meta={
        "stepper": ts.get_parameters(),
        "nonlinear": nonlinear,
        "t_end": t_end
    })

    ret = {
        "code": 0,
        "message": "Reached t_end={0:g}".format(t_end),
        "num_iterations": 0
    }

    u = u_init
    t = 0.0
    step = 0
    for target in times:

        nsteps = max(int(np.ceil((target - t) / ts.dt - 1e-9)), 1)
        dt = (target - t) / nsteps

        for i in range(nsteps):

            umax = max_velocity(u)
            cfl = umax * dt / grid.spacing
            if cfl > ts.cfl_safety:
                ret = {
                    "code": -2,
                    "message": "CFL violation at t={0:g}: max|u| dt / h = {1:g} > {2:g}".format(t, cfl, ts.cfl_safety),
                    "num_iterations": step
                }
                raise SolverAbort(ret["message"], ret, run.residual_history)

            new = ts.step(u, dt, alpha, nonlinear)
            step += 1
            t = target if i == nsteps - 1 else t + dt

            if not np.all(np.isfinite(new.coeffs)):
                ret = {
                    "code": -1,
                    "message": "non-finite velocity at t={0:g}".format(t),
                    "num_iterations": step
                }
                raise SolverAbort(ret["message"], ret, run.residual_history)

            row = {
                "step": step,
                "time": t,
                "l2_update": relative_update(new, u),
                "div_residual": divergence_residual(new),
                "max_velocity": max_velocity(new)
            }
            run.residual_history.append(row)
            u = new

            if progress is not None and (step % log_every == 0 or i == nsteps - 1):
                progress.log_progress(step, **{k: v for k, v in row.items() if k != "step"})

        run.add_snapshot(target, u)
        sys.stdout.flush()

    ret["num_iterations"] = step
    run.meta["ret"] = ret
    return run
