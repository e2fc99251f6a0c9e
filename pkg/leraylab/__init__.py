__version__ = '1.0.0'

import datetime
import os
import numpy as np

import leraylab.io
import leraylab.sanity_check
import leraylab.monitor.progress as pr
from leraylab.spectral import make_grid, tensor_product
from leraylab.semigroup import mass_inside
from leraylab.littlewood_paley import build_dyadic_family
from leraylab.lab.decay import pointwise_selfsimilar_bound_check, derivative_scaling_check, forcing_hypothesis
from leraylab.lab.lemmas import weighted_sup
from leraylab.lab.report import VerificationReport, to_plain
from leraylab.solver import (
    SigmaSpec, ProfileRun, TimeStepper, SolverAbort, PicardIteration, evolve_fns, picard_profile_solve,
    make_initial_data, profile_extract, profile_residual, self_similarity_residual, dissipation,
    linear_block_estimate_probe
)


#self-similarity residual accepted between the snapshots at t=1/2 and t=1
SELF_SIMILARITY_TOL = 0.05


class LerayLab():
    """
    LerayLab computes self-similar solutions of the fractional Navier-Stokes system on a periodic box.

    From an angular profile sigma and a dissipation order alpha it builds the homogeneous
    initial data, computes the solution either by time marching or by Picard iteration on
    the Duhamel map of the profile system, and extracts the profile v = u(1) - exp(-Lambda^(2 alpha)) U0.
    """

    def __init__(self):

        self.alpha = None
        self.grid = None

        #echoed into every output, the solve itself draws no random numbers
        self.seed = None

        #initial data
        self.sigma = None
        self.window = (0.3, 0.4)
        self.initial = None

        #solver: "evolve" or "picard"
        self.mode = None
        self.alg = None

        #progress logger
        self.progress = None

        #results
        self.run = None
        self.history = []
        self.algret = None
        self.v = None
        self.P = None
        self.diagnostics = {}
        self.reports = []

        #written files
        self.snapshot_files = []
        self.out_run_file = None

    def __repr__(self):

        def walk_dict(d, depth=24, repr_str=""):
            for k, v in d.items():
                if isinstance(v, list):
                    for item in v:
                        if isinstance(item, list) or isinstance(item, dict):
                            repr_str += walk_dict(item, depth, "")
                        else:
                            repr_str += "{0:>{1}}: {2:>8}\n".format(k, depth, v)
                elif isinstance(v, dict):
                    repr_str += "\n{0:>{1}}\n".format(k, depth)
                    repr_str += walk_dict(v, depth, "")
                else:
                    repr_str += "{0:>{1}}: {2:>8}\n".format(k, depth, v)
            return repr_str

        return walk_dict(self.create_meta_data())

    def create_meta_data(self):

        meta = {}

        meta['version'] = __version__
        meta['method'] = 'leraylab'

        meta['workflow'] = []
        meta['workflow'].append({})
        meta['workflow'][0]['timestamp'] = str(datetime.datetime.now())
        meta['workflow'][0]['seed'] = self.seed

        if self.grid is not None:
            meta['workflow'][0]['grid'] = self.grid.get_parameters()

        if self.sigma is not None:
            meta['workflow'][0]['sigma'] = self.sigma.get_parameters()

        if self.initial is not None:
            meta['workflow'][0]['initial_data'] = {}
            meta['workflow'][0]['initial_data']['alpha'] = self.alpha
            meta['workflow'][0]['initial_data']['window'] = list(self.window)
            meta['workflow'][0]['initial_data']['divergence_defect'] = self.initial.divergence_defect

        meta['workflow'][0]['results'] = {}
        meta['workflow'][0]['results']['opt_code'] = 0 #default

        if self.alg is not None:

            meta['workflow'][0]['solver'] = {}
            meta['workflow'][0]['solver']['mode'] = self.mode
            meta['workflow'][0]['solver']['method'] = self.alg.__class__.__name__
            meta['workflow'][0]['solver'].update(self.alg.get_parameters())

            meta['workflow'][0]['progress'] = {}
            meta['workflow'][0]['progress']['plotfile'] = self.progress.plotfile if self.progress else None

        if self.algret is not None:
            meta['workflow'][0]['results']['opt_message'] = self.algret['message']
            meta['workflow'][0]['results']['opt_code'] = self.algret['code']
            meta['workflow'][0]['results']['num_iterations'] = self.algret['num_iterations']
            meta['workflow'][0]['results']['runtime'] = self.algret.get('runtime')

        if self.diagnostics:
            meta['workflow'][0]['diagnostics'] = dict(self.diagnostics)

        if self.snapshot_files:
            meta['workflow'][0]['results']['snapshot_files'] = list(self.snapshot_files)
        if self.out_run_file:
            meta['workflow'][0]['results']['out_run_file'] = self.out_run_file

        return to_plain(meta)

    def set_grid(self, dim=3, n=64, box_length=16 * np.pi):
        self.grid = make_grid(dim, n, box_length)

    def specify_sigma(self, kind="rotational_canonical", amplitude=0.1, table=None):
        self.sigma = SigmaSpec(kind, amplitude, table=table)

    def make_initial_data(self, alpha, window=(0.3, 0.4)):

        self.alpha = alpha
        self.window = tuple(window)
        self.initial = make_initial_data(self.sigma, alpha, self.grid, self.window)
        leraylab.sanity_check.check_mean_zero(self.initial.u0, what="u0")

        print("Initial data {0} with alpha={1} on {2}: pre-projection divergence {3:.3g}".format(
            self.sigma, alpha, self.grid, self.initial.divergence_defect))

    def initiate_logging(self, plot_file=None):
        # setup progress logging
        self.progress = pr.Progress()

        if plot_file is not None:

            plot_title = "alpha={0} A={1} n={2} L={3}<br>".format(
                self.alpha, self.sigma.amplitude, self.grid.n, np.round(self.grid.box_length, decimals=3))
            self.progress.set_plot_title(plot_title)

            if plot_file.split(".")[-1] != "html":
                plot_file += ".html"

            print("Plot with solver statistics will be written to {0}".format(plot_file))
            self.progress.set_plot_file(plot_file)

    def _finish(self, start, ret):
        self.algret = dict(ret)
        self.algret['runtime'] = (datetime.datetime.now() - start).total_seconds() / 60

        condition = "Finished" if self.algret['code'] >= 0 else "Exited"
        print("\n{0} with code {code} -- {message}\n".format(condition, **self.algret))

    def evolve(self, dt=2e-3, t_end=1.0, snapshot_times=None, scheme="integrating_factor_rk2"):
        """March u_t + P div(u (x) u) + (-Delta)^alpha u = 0 from the projected U0"""

        self.mode = "evolve"
        if self.progress is None:
            self.initiate_logging()
        self.alg = TimeStepper(dt, scheme)

        print("\nWill evolve {0} velocity components on {1} up to t={2:g}".format(
            self.grid.dim, self.grid, t_end))
        print("Solver: {0}".format(self.alg))

        start = datetime.datetime.now()
        try:
            self.run = evolve_fns(self.initial.U0_projected, self.alpha, t_end, self.alg,
                                  snapshot_times=snapshot_times, progress=self.progress,
                                  sigma=self.sigma, initial=self.initial)
            self.history = self.run.residual_history
            ret = self.run.meta["ret"]
        except SolverAbort as e:
            self.history = e.history
            ret = e.ret

        self._finish(start, ret)

    def picard(self, tol=1e-6, max_iter=50, damping=1.0, quad=None):
        """Fixed point of the Duhamel map of the profile system with f0 = -u0 (x) u0"""

        self.mode = "picard"
        if self.progress is None:
            self.initiate_logging()
        self.alg = PicardIteration(self.progress, maxit=max_iter, tol=tol, damping=damping)

        print("\nWill iterate the Duhamel map for the profile on {0}".format(self.grid))
        print("Solver: {0}".format(self.alg))

        start = datetime.datetime.now()
        try:
            self.v, self.P, self.history = picard_profile_solve(
                None, self.alpha, tol=tol, max_iter=max_iter, damping=damping, u0=self.initial.u0, quad=quad,
                progress=self.progress, grid=self.grid)
            ret = {
                "code": 0,
                "message": "Stopping condition (relative update < {0}) successfull.".format(tol),
                "num_iterations": len(self.history)
            }
        except SolverAbort as e:
            self.history = e.history
            ret = e.ret

        self._finish(start, ret)

        if ret["code"] == 0:
            u1 = self.v + self.initial.u0
            leraylab.sanity_check.check_window_mass(mass_inside(tensor_product(u1, u1)), what="u (x) u")
            self.run = ProfileRun(self.alpha, self.grid, sigma=self.sigma, initial=self.initial, meta={"ret": ret})
            self.run.add_snapshot(1.0, u1)
            self.run.residual_history = self.history
            self.run.profile = {"v": self.v, "P": self.P}

    def extract_profile(self):

        if self.run is None:
            raise ValueError("no solution to extract a profile from")

        if self.mode == "evolve":
            self.v, self.P = profile_extract(self.run)

        leraylab.sanity_check.check_finite(self.v.physical(), "profile v")
        return self.v, self.P

    def compute_diagnostics(self):
        """Profile-equation residual, energies, self-similarity and the pointwise and block bounds"""

        run = self.run
        residual = profile_residual(self.v, self.P, self.initial.u0, self.alpha)
        self.diagnostics['profile_residual'] = residual['relative']
        self.diagnostics['profile_residual_terms'] = residual['terms']

        self.diagnostics['energy'] = {"{0:g}".format(t): run.energy(t) for t in run.times()}
        self.diagnostics['dissipation'] = {
            "{0:g}".format(t): dissipation(run.snapshot(t), self.alpha) for t in run.times()}

        if run.has_snapshot(0.5) and run.has_snapshot(1.0):
            r = self_similarity_residual(run, 0.5, 1.0)
            self.diagnostics['self_similarity_residual'] = r
            self.reports.append(VerificationReport(
                "self_similarity", {"alpha": self.alpha, "t1": 0.5, "t2": 1.0}, [("t=0.5,1", r)],
                (0.0, SELF_SIMILARITY_TOL)))

        if len(run.times()) >= 3:
            self.reports.append(pointwise_selfsimilar_bound_check(run))
            self.reports.append(derivative_scaling_check(run))

        u0 = self.initial.u0
        self.diagnostics['profile_weighted_sup'] = weighted_sup(self.v, 4 * self.alpha - 1)
        self.diagnostics['forcing_hypothesis'] = forcing_hypothesis(-tensor_product(u0, u0), self.alpha)

        family = build_dyadic_family(self.grid)
        self.reports.append(linear_block_estimate_probe(
            self.v, self.P, None, list(range(family.q_min, family.q_max + 1)), alpha=self.alpha, family=family))

        for report in self.reports:
            print(report)

    def write_snapshots(self, out_dir):

        print("\nWriting snapshots to: ")
        if self.run is not None and self.mode == "evolve":
            for t in self.run.times():
                path = os.path.join(out_dir, "u_t{0:.4f}.lrlb".format(t))
                leraylab.io.write_snapshot(path, self.run.snapshot(t), self.alpha, t)
                self.snapshot_files.append(path)
                print("\t{0}".format(path))

        if self.v is not None:
            for name, field in (("profile_v", self.v), ("profile_P", self.P)):
                path = os.path.join(out_dir, name + ".lrlb")
                leraylab.io.write_snapshot(path, field, self.alpha, 1.0)
                self.snapshot_files.append(path)
                print("\t{0}".format(path))

    def write_history(self, path):
        print("Writing residual history to {0}".format(path))
        leraylab.io.write_history_csv(path, self.history, seed=self.seed)

    def write_run(self, out_run_file):

        if self.run is None:
            return

        self.out_run_file = out_run_file
        self.run.meta.update(self.create_meta_data())
        print("Writing run archive to {0}".format(out_run_file))
        leraylab.io.write_run(out_run_file, self.run)
