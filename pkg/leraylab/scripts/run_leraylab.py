#!/usr/bin/env python
import argparse
import os
import sys
import numpy as np

from leraylab import LerayLab
import leraylab.logo
import leraylab.io as io
import leraylab.plotting as plot
from leraylab.config import RunConfig, DEFAULTS, SUITES, SUITE_GRIDS
from leraylab.lab.decay import decay_fit, compare_decay_models, DECAY_MODELS
from leraylab.lab.lemmas import (
    verify_bernstein, verify_new_bernstein, verify_commutator_x, verify_weighted_commutator,
    verify_riesz_weight_equiv, verify_compactness
)
from leraylab.semigroup import kernel_annulus_decay_probe
from leraylab.solver.sigma import SIGMA_KINDS
from leraylab.solver.timestepping import SCHEMES
from leraylab.spectral import make_grid
from leraylab.spectral.grid import THREADS_ENV


EPILOG = """
leraylab computes and checks self-similar solutions of the fractional Navier-Stokes system on a periodic box.
'verify' runs numerical checks of the harmonic-analysis estimates behind the theory,
'solve' computes a self-similar solution and its profile, and 'decay' fits the spatial decay of stored fields.
Every parameter can also be given in a JSON file passed with --config; explicit flags win over the file.
"""

#exit codes
EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INVALID = 2

#leftover keys of the namespace that are not run parameters
NON_CONFIG_KEYS = ("command", "config_file", "num_threads", "logo")


def default_help(command, key, text):
    return "{0} [default: {1}]".format(text, DEFAULTS[command][key])


def parse_args(argv=None):

    parser = argparse.ArgumentParser(description="Self-similar solutions of the fractional Navier-Stokes system",
                                     epilog=EPILOG)
    subparsers = parser.add_subparsers(title="Commands", dest="command")
    subparsers.required = True

    #parent parser for common flags
    parent = argparse.ArgumentParser(add_help=False)
    grp_general = parent.add_argument_group("General Options")
    grp_general.add_argument("--config", dest="config_file", type=str, default=None,
                             help="JSON file with run parameters, flat or sectioned by command [default: %(default)s]")
    grp_general.add_argument("--num-threads", dest="num_threads", type=int, default=None,
                             help="Number of FFT threads, sets {0} [default: inherited or 1]".format(THREADS_ENV))
    grp_general.add_argument("--no-logo", dest="logo", default=True, action="store_false",
                             help="Disable showing the leraylab logo [default: %(default)s]")
    grp_general.add_argument("--out", dest="out", type=str, default=None,
                             help="Output directory [default: .]")
    grp_general.add_argument("--seed", dest="seed", type=int, default=None,
                             help="Seed for random test fields, echoed into every record [default: 42]")

    grp_grid = parent.add_argument_group("Grid")
    grp_grid.add_argument("--n", dest="n", type=int, default=None,
                          help="Grid points per axis [default: depends on the suite or mode]")
    grp_grid.add_argument("--box", dest="box", type=float, default=None,
                          help="Side length L of the periodic box [default: depends on the suite or mode]")

    #verify
    parser_verify = subparsers.add_parser("verify", parents=[parent],
                                          help="Run a numerical check of a harmonic-analysis estimate")
    grp_suite = parser_verify.add_argument_group("Suite")
    grp_suite.add_argument("--suite", dest="suite", choices=SUITES, default=None,
                           help=default_help("verify", "suite", "Check to run"))
    grp_suite.add_argument("--alpha", dest="alpha", type=float, default=None,
                           help="Dissipation order, required for new_bernstein and kernel_decay")
    grp_suite.add_argument("--p", dest="p", type=float, default=None,
                           help=default_help("verify", "p", "Integrability exponent (inf allowed)"))
    grp_suite.add_argument("--q", dest="q", type=int, nargs="+", default=None,
                           help="Block indices (or splitting indices N for compactness) [default: all resolved]")
    grp_suite.add_argument("--dim", dest="dim", type=int, default=None,
                           help="Spatial dimension; commutator_x runs in dim 1 or 2 only, dim 3 is not resolvable "
                                "at the grid sizes the identity needs [default: depends on the suite]")
    grp_suite.add_argument("--trials", dest="trials", type=int, default=None,
                           help=default_help("verify", "trials", "Number of seeded test fields"))
    grp_suite.add_argument("--s", dest="s", type=float, default=None,
                           help=default_help("verify", "s", "Order of Lambda^s in the weighted commutator"))
    grp_suite.add_argument("--beta", dest="beta", type=float, default=None,
                           help=default_help("verify", "beta", "Weight exponent of <y>^beta"))

    #solve
    parser_solve = subparsers.add_parser("solve", parents=[parent],
                                         help="Compute a self-similar solution and extract its profile")
    grp_data = parser_solve.add_argument_group("Initial Data")
    grp_data.add_argument("--alpha", dest="alpha", type=float, default=None,
                          help=default_help("solve", "alpha", "Dissipation order in [5/6, 1]"))
    grp_data.add_argument("--sigma", dest="sigma", choices=SIGMA_KINDS, default=None,
                          help=default_help("solve", "sigma", "Angular profile of U0"))
    grp_data.add_argument("--sigma-table", dest="sigma_table", type=str, default=None,
                          help="numpy .npy file with sigma samples of shape (3, ntheta, nphi)")
    grp_data.add_argument("--amp", dest="amp", type=float, default=None,
                          help=default_help("solve", "amp", "Amplitude A of sigma"))

    grp_solver = parser_solve.add_argument_group("Solver")
    grp_solver.add_argument("--mode", dest="mode", choices=["evolve", "picard"], default=None,
                            help=default_help("solve", "mode", "Time marching or Picard iteration"))
    grp_solver.add_argument("--dt", dest="dt", type=float, default=None,
                            help=default_help("solve", "dt", "Time step"))
    grp_solver.add_argument("--t-end", dest="t_end", type=float, default=None,
                            help=default_help("solve", "t_end", "Final time"))
    grp_solver.add_argument("--snapshots", dest="snapshots", type=float, nargs="+", default=None,
                            help=default_help("solve", "snapshots", "Snapshot times"))
    grp_solver.add_argument("--scheme", dest="scheme", choices=SCHEMES, default=None,
                            help=default_help("solve", "scheme", "Time stepping scheme"))
    grp_solver.add_argument("--tol", dest="tol", type=float, default=None,
                            help=default_help("solve", "tol", "Picard tolerance on the relative update"))
    grp_solver.add_argument("--max-iter", dest="max_iter", type=int, default=None,
                            help=default_help("solve", "max_iter", "Maximum Picard iterations"))
    grp_solver.add_argument("--damping", dest="damping", type=float, default=None,
                            help=default_help("solve", "damping", "Picard damping theta"))
    grp_solver.add_argument("--plot", dest="plot", action="store_true", default=None,
                            help="Write an interactive HTML plot of the residual history")

    #decay
    parser_decay = subparsers.add_parser("decay", parents=[parent],
                                         help="Fit the radial decay of fields stored in snapshot files")
    parser_decay.add_argument("inputs", nargs="*", default=None, help="Snapshot files")
    grp_fit = parser_decay.add_argument_group("Fit")
    grp_fit.add_argument("--alpha", dest="alpha", type=float, default=None,
                         help="Dissipation order for the expected exponent [default: from the snapshot header]")
    grp_fit.add_argument("--annulus", dest="annulus", type=float, nargs=2, default=None,
                         help=default_help("decay", "annulus", "Fit annulus in units of L"))
    grp_fit.add_argument("--model", dest="model", choices=DECAY_MODELS + ("compare",), default=None,
                         help=default_help("decay", "model", "Decay model"))
    grp_fit.add_argument("--n-bins", dest="n_bins", type=int, default=None,
                         help=default_help("decay", "n_bins", "Number of radial shells"))
    grp_fit.add_argument("--plot", dest="plot", action="store_true", default=None,
                         help="Write an interactive HTML plot of every fit")

    args = parser.parse_args(argv)

    #an empty positional list is not an override
    if args.command == "decay" and not args.inputs:
        args.inputs = None

    return args


def build_config(args):
    overrides = {k: v for k, v in vars(args).items() if k not in NON_CONFIG_KEYS}
    if overrides.get("annulus") is not None:
        overrides["annulus"] = list(overrides["annulus"])
    cfg = RunConfig.from_layers(args.command, args.config_file, overrides)
    cfg.validate()
    return cfg


def run_verify(cfg):
    """:return: list of VerificationReport"""

    suite = cfg["suite"]
    dim, n, box = cfg.grid_parameters()
    grid = make_grid(dim, n, box)
    q = cfg["q"]
    seed = cfg["seed"]
    trials = cfg["trials"]

    print("Running suite {0} on {1} (seed={2}, trials={3})".format(suite, grid, seed, trials))

    if suite == "bernstein":
        return [verify_bernstein(cfg["p"], q, trials, seed, grid)]
    if suite == "new_bernstein":
        return [verify_new_bernstein(cfg["alpha"], cfg["p"], q, trials, seed, grid)]
    if suite == "commutator_x":
        return [verify_commutator_x(trials, seed, dim=dim)]
    if suite == "weighted_commutator":
        return [verify_weighted_commutator(cfg["s"], cfg["beta"], trials, seed, grid)]
    if suite == "riesz_weight":
        return [verify_riesz_weight_equiv(cfg["beta"], trials, seed, grid)]
    if suite == "compactness":
        return [verify_compactness(q, cfg["p"], trials, seed, grid)]

    q_list = [2, 3, 4] if q is None else q
    return [kernel_annulus_decay_probe(qq, cfg["alpha"], p=cfg["p"], grid=grid, seed=seed) for qq in q_list]


def cmd_verify(cfg):

    out = cfg["out"]
    extra = ["seed={0}".format(cfg["seed"])]

    suite = cfg["suite"]
    if suite == "commutator_x" and (cfg["n"] is not None or cfg["box"] is not None):
        _, n, box = SUITE_GRIDS[suite]
        note = "commutator_x runs on its resolvable grid (n={0}, L={1:g}); --n/--box ignored".format(n, box)
        print("Note: " + note)
        extra.append(note)

    reports = run_verify(cfg)
    for report in reports:
        report.parameters.setdefault("seed", cfg["seed"])
        print(report)

    io.write_records(os.path.join(out, "verify_{0}.jsonl".format(suite)), reports)
    io.write_summary(os.path.join(out, "verify_{0}_summary.txt".format(suite)), reports,
                     title="leraylab verify {0}".format(suite), extra=extra)

    failed = [r.name for r in reports if not r.passed]
    if failed:
        print("\nFailed checks: {0}".format(", ".join(failed)))
        return EXIT_FAILED
    return EXIT_OK


def cmd_solve(cfg):

    out = cfg["out"]
    dim, n, box = cfg.grid_parameters()

    table = None
    if cfg["sigma"] == "user_table":
        try:
            table = np.load(cfg["sigma_table"])
        except (IOError, OSError, ValueError) as e:
            print("Error: cannot read sigma table {0}: {1}".format(cfg["sigma_table"], e))
            return EXIT_INVALID

    lab = LerayLab()
    lab.seed = cfg["seed"]
    lab.set_grid(dim, n, box)
    lab.specify_sigma(cfg["sigma"], cfg["amp"], table)
    lab.make_initial_data(cfg["alpha"])

    plot_file = os.path.join(out, "residual_history.html") if cfg["plot"] else None
    lab.initiate_logging(plot_file)

    if cfg["mode"] == "evolve":
        lab.evolve(cfg["dt"], cfg["t_end"], cfg["snapshots"], cfg["scheme"])
    else:
        lab.picard(cfg["tol"], cfg["max_iter"], cfg["damping"])

    lab.write_history(os.path.join(out, "residual_history.csv"))

    #the live plot only holds logged rows, replace it by the full history
    if plot_file is not None and lab.history:
        plot.plot_residual_history(lab.history, plot_file, title="Residual history ({0})".format(cfg["mode"]))

    record = {
        "name": "solve",
        "mode": cfg["mode"],
        "seed": cfg["seed"],
        "parameters": {k: cfg[k] for k in ("alpha", "sigma", "amp", "dt", "t_end", "tol", "max_iter", "damping")},
        "grid": lab.grid.get_parameters(),
        "ret": {k: lab.algret[k] for k in ("code", "message", "num_iterations")}
    }

    summary = os.path.join(out, "solve_summary.txt")
    extra = ["mode={0} seed={1}".format(cfg["mode"], cfg["seed"]),
             "solver: code {code} -- {message}".format(**lab.algret)]

    if lab.algret["code"] < 0 or lab.run is None:
        io.write_records(os.path.join(out, "solve.jsonl"), [record])
        io.write_summary(summary, [], title="leraylab solve", extra=extra)
        return EXIT_FAILED

    #time marching that stops before t=1 has no profile
    if lab.run.has_snapshot(1.0):
        lab.extract_profile()
        lab.compute_diagnostics()
        record["diagnostics"] = lab.diagnostics
    elif lab.mode == "evolve":
        extra.append("no snapshot at t=1, profile not extracted")

    lab.write_snapshots(out)
    lab.write_run(os.path.join(out, "run.msgpack"))

    io.write_records(os.path.join(out, "solve.jsonl"), [record] + lab.reports)
    io.write_summary(summary, lab.reports, title="leraylab solve", extra=extra)

    if lab.algret["code"] != 0:
        return EXIT_FAILED
    return EXIT_OK


def cmd_decay(cfg):

    out = cfg["out"]
    annulus = tuple(cfg["annulus"])
    models = DECAY_MODELS if cfg["model"] == "compare" else (cfg["model"],)

    snapshots = []
    for path in cfg["inputs"]:
        try:
            snapshots.append((path, io.read_snapshot(path)))
        except (IOError, OSError, ValueError) as e:
            print("Error: cannot read {0}: {1}".format(path, e))
            return EXIT_INVALID

    records = []
    for path, snap in snapshots:
        alpha = snap.alpha if cfg["alpha"] is None else cfg["alpha"]
        name = os.path.basename(path).split(".")[0]

        try:
            fits = {model: decay_fit(snap.field, annulus, model, cfg["n_bins"], alpha) for model in models}
        except ValueError as e:
            print("Error: {0}: {1}".format(path, e))
            return EXIT_INVALID

        for model, fit in sorted(fits.items()):
            print("{0}: {1}".format(path, fit))
            record = fit.to_dict()
            record.update({"name": "decay_fit", "file": os.path.basename(path), "time": snap.time, "seed": cfg["seed"]})
            records.append(record)

            if cfg["plot"]:
                plot.plot_decay_fit(fit, os.path.join(out, "decay_{0}_{1}.html".format(name, model)),
                                    title="Radial decay of {0} ({1})".format(name, model))

        if cfg["model"] == "compare":
            comparison = compare_decay_models(fits["pure_power"], fits["log_corrected"])
            comparison.update({"name": "decay_comparison", "file": os.path.basename(path), "seed": cfg["seed"]})
            print("{0}: {1}".format(path, comparison["classification"]))
            records.append(comparison)

        shells = fits[models[0]].shells
        io.write_shells_csv(os.path.join(out, "decay_{0}_shells.csv".format(name)), shells, seed=cfg["seed"])

    io.write_records(os.path.join(out, "decay.jsonl"), records)
    return EXIT_OK


COMMANDS = {
    "verify": cmd_verify,
    "solve": cmd_solve,
    "decay": cmd_decay
}


def main(argv=None):

    # read command line options
    opt = parse_args(argv)

    # print logo
    if opt.logo:
        leraylab.logo.logo()

    # set environment variable for number of FFT threads
    if opt.num_threads is not None:
        os.environ[THREADS_ENV] = str(opt.num_threads)
    print("Using {0} threads for FFTs.".format(os.environ.get(THREADS_ENV, "1")))

    try:
        cfg = build_config(opt)
    except ValueError as e:
        print("Error: {0}".format(e))
        sys.exit(EXIT_INVALID)

    print(cfg)

    out = cfg["out"]
    if not os.path.isdir(out):
        os.makedirs(out)

    try:
        exitcode = COMMANDS[cfg.command](cfg)
    except ValueError as e:
        print("Error: {0}".format(e))
        exitcode = EXIT_INVALID

    sys.exit(exitcode)


if __name__ == '__main__':
    main()
