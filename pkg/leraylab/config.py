import json
import numpy as np

from leraylab.lab.decay import DECAY_MODELS, MIN_SHELLS
from leraylab.solver.sigma import SIGMA_KINDS
from leraylab.solver.timestepping import SCHEMES


COMMANDS = ("verify", "solve", "decay")

SUITES = (
    "bernstein", "new_bernstein", "commutator_x", "weighted_commutator", "riesz_weight", "compactness",
    "kernel_decay"
)

#suites whose statement depends on the dissipation order
ALPHA_SUITES = ("new_bernstein", "kernel_decay")

#(dim, n, L) each suite runs on unless overridden
SUITE_GRIDS = {
    "bernstein": (2, 64, 2 * np.pi),
    "new_bernstein": (2, 128, 2 * np.pi),
    "commutator_x": (1, 1024, 32 * np.pi),
    "weighted_commutator": (2, 64, 16 * np.pi),
    "riesz_weight": (2, 64, 16 * np.pi),
    "compactness": (2, 64, 2 * np.pi),
    "kernel_decay": (2, 128, 2 * np.pi)
}

#(n, L) of the two solver modes in dim 3
MODE_GRIDS = {
    "evolve": (64, 16 * np.pi),
    "picard": (32, 8 * np.pi)
}

DEFAULTS = {
    "verify": {
        "suite": "bernstein",
        "alpha": None,
        "p": 2.0,
        "q": None,
        "dim": None,
        "n": None,
        "box": None,
        "trials": 5,
        "s": 0.5,
        "beta": 0.25,
        "seed": 42,
        "out": "."
    },
    "solve": {
        "mode": "evolve",
        "alpha": 1.0,
        "sigma": "rotational_canonical",
        "sigma_table": None,
        "amp": 0.1,
        "n": None,
        "box": None,
        "dt": 2e-3,
        "t_end": 1.0,
        "snapshots": [0.25, 0.5, 1.0],
        "scheme": "integrating_factor_rk2",
        "tol": 1e-6,
        "max_iter": 50,
        "damping": 1.0,
        "seed": 42,
        "plot": False,
        "out": "."
    },
    "decay": {
        "inputs": [],
        "alpha": None,
        "annulus": [0.1, 0.3],
        "model": "pure_power",
        "n_bins": 16,
        "seed": 42,
        "plot": False,
        "out": "."
    }
}


def _is_int(value):
    if isinstance(value, bool):
        return False
    if isinstance(value, float):
        return value.is_integer()
    return isinstance(value, (int, np.integer))


def _is_number(value):
    return isinstance(value, (int, float, np.integer, np.floating)) and not isinstance(value, bool)


class RunConfig(object):
    """
    Parameters of one leraylab command.

    Layers are merged in order: built-in defaults, a JSON file (flat, or sectioned by
    command name), explicit command line flags. Unknown keys are kept aside and
    reported by validate().
    """

    def __init__(self, command):

        if command not in COMMANDS:
            raise ValueError("command must be one of {0} (got {1})".format(COMMANDS, command))

        self.command = command
        self.values = dict(DEFAULTS[command])
        self.sources = {key: "default" for key in self.values}
        self.unknown = []
        self.config_file = None

    def __getitem__(self, key):
        return self.values[key]

    def get(self, key, default=None):
        return self.values.get(key, default)

    def update(self, values, source="cli"):
        for key, value in values.items():
            if key not in self.values:
                self.unknown.append("{0} (from {1})".format(key, source))
                continue
            self.values[key] = value
            self.sources[key] = source

    def load_file(self, path):
        """
        Merge a JSON key-value file; a section named after the command wins over flat keys

        :raises ValueError: when the file cannot be read or is not a JSON object
        """

        try:
            with open(path) as fh:
                data = json.load(fh)
        except (IOError, OSError) as e:
            raise ValueError("cannot read config file {0}: {1}".format(path, e))
        except ValueError as e:
            raise ValueError("config file {0} is not valid JSON: {1}".format(path, e))

        if not isinstance(data, dict):
            raise ValueError("config file {0} must hold a JSON object".format(path))

        self.config_file = path
        flat = {k: v for k, v in data.items() if k not in COMMANDS}
        self.update(flat, source=path)

        section = data.get(self.command)
        if section is not None:
            if not isinstance(section, dict):
                raise ValueError("section '{0}' of {1} must be a JSON object".format(self.command, path))
            self.update(section, source=path)

    @classmethod
    def from_layers(cls, command, config_file=None, overrides=None):
        cfg = cls(command)
        if config_file is not None:
            cfg.load_file(config_file)
        if overrides:
            cfg.update({k: v for k, v in overrides.items() if v is not None})
        return cfg

    def grid_parameters(self):
        """(dim, n, L) after filling unset values from the suite or mode defaults"""

        v = self.values
        if self.command == "verify":
            dim, n, box = SUITE_GRIDS.get(v["suite"], (2, 64, 2 * np.pi))
            dim = dim if v["dim"] is None else int(v["dim"])
        elif self.command == "solve":
            dim = 3
            n, box = MODE_GRIDS.get(v["mode"], MODE_GRIDS["evolve"])
        else:
            return None

        n = n if v["n"] is None else int(v["n"])
        box = box if v["box"] is None else float(v["box"])
        return dim, n, box

    def validate(self):
        """
        Check every parameter before any compute starts

        :raises ValueError: listing all problems found
        """

        errors = ["unknown parameter {0}".format(u) for u in self.unknown]
        v = self.values

        def need(condition, message):
            if not condition:
                errors.append(message)

        def positive(key):
            need(_is_number(v[key]) and np.isfinite(v[key]) and v[key] > 0,
                 "{0} must be a positive number (got {1})".format(key, v[key]))

        if v.get("seed") is not None:
            need(_is_int(v["seed"]) and v["seed"] >= 0, "seed must be a nonnegative integer (got {0})".format(v["seed"]))

        if self.command in ("verify", "solve"):
            if v["n"] is not None:
                need(_is_int(v["n"]) and v["n"] >= 4 and int(v["n"]) % 2 == 0,
                     "n must be an even integer >= 4 (got {0})".format(v["n"]))
            if v["box"] is not None:
                positive("box")

        if self.command == "verify":
            self._validate_verify(need, positive)
        elif self.command == "solve":
            self._validate_solve(need, positive)
        else:
            self._validate_decay(need)

        if errors:
            raise ValueError("invalid {0} configuration:\n  ".format(self.command) + "\n  ".join(errors))

    def _validate_verify(self, need, positive):
        v = self.values

        need(v["suite"] in SUITES, "suite must be one of {0} (got {1})".format(SUITES, v["suite"]))

        if v["suite"] in ALPHA_SUITES:
            need(v["alpha"] is not None, "--alpha is required for suite {0}".format(v["suite"]))
        if v["alpha"] is not None:
            need(_is_number(v["alpha"]) and 0 < v["alpha"] <= 1,
                 "alpha must lie in (0, 1] (got {0})".format(v["alpha"]))

        need(_is_number(v["p"]) and v["p"] >= 1, "p must be a number >= 1 (got {0})".format(v["p"]))
        if v["suite"] == "new_bernstein":
            need(_is_number(v["p"]) and v["p"] >= 2, "new_bernstein needs p >= 2 (got {0})".format(v["p"]))
        if v["suite"] == "kernel_decay":
            need(v["p"] in (2, np.inf), "kernel_decay supports p = 2 or inf (got {0})".format(v["p"]))

        if v["q"] is not None:
            q = v["q"] if isinstance(v["q"], list) else [v["q"]]
            need(len(q) > 0 and all(_is_int(qq) for qq in q), "q must be an integer or list of integers")

        if v["dim"] is not None:
            need(v["dim"] in (1, 2, 3), "dim must be 1, 2 or 3 (got {0})".format(v["dim"]))
            if v["suite"] == "commutator_x":
                need(v["dim"] in (1, 2), "commutator_x runs in dim 1 or 2 (got {0})".format(v["dim"]))

        need(_is_int(v["trials"]) and v["trials"] >= 1, "trials must be a positive integer (got {0})".format(v["trials"]))
        need(_is_number(v["s"]) and 0 < v["s"] < 1, "s must lie in (0, 1) (got {0})".format(v["s"]))
        need(_is_number(v["beta"]) and 0 <= v["beta"] <= 1, "beta must lie in [0, 1] (got {0})".format(v["beta"]))

    def _validate_solve(self, need, positive):
        v = self.values

        need(v["mode"] in MODE_GRIDS, "mode must be one of {0} (got {1})".format(sorted(MODE_GRIDS), v["mode"]))
        need(_is_number(v["alpha"]) and 5.0 / 6.0 <= v["alpha"] <= 1,
             "alpha must lie in [5/6, 1] (got {0})".format(v["alpha"]))
        need(v["sigma"] in SIGMA_KINDS, "sigma must be one of {0} (got {1})".format(SIGMA_KINDS, v["sigma"]))
        if v["sigma"] == "user_table":
            need(v["sigma_table"] is not None, "sigma user_table needs --sigma-table")
        need(_is_number(v["amp"]) and np.isfinite(v["amp"]) and v["amp"] >= 0,
             "amp must be a nonnegative number (got {0})".format(v["amp"]))

        for key in ("dt", "t_end", "tol"):
            positive(key)
        need(v["scheme"] in SCHEMES, "scheme must be one of {0} (got {1})".format(SCHEMES, v["scheme"]))
        need(_is_int(v["max_iter"]) and v["max_iter"] >= 1,
             "max_iter must be a positive integer (got {0})".format(v["max_iter"]))
        need(_is_number(v["damping"]) and 0 < v["damping"] <= 1,
             "damping must lie in (0, 1] (got {0})".format(v["damping"]))

        snapshots = v["snapshots"] or []
        if _is_number(v["t_end"]):
            need(all(_is_number(t) and 0 < t <= v["t_end"] for t in snapshots),
                 "snapshot times must lie in (0, t_end] (got {0})".format(snapshots))

    def _validate_decay(self, need):
        v = self.values

        need(len(v["inputs"]) > 0, "decay needs at least one snapshot file")
        need(v["model"] in DECAY_MODELS + ("compare",),
             "model must be one of {0} (got {1})".format(DECAY_MODELS + ("compare",), v["model"]))

        annulus = v["annulus"]
        ok = isinstance(annulus, (list, tuple)) and len(annulus) == 2 and all(_is_number(a) for a in annulus)
        need(ok, "annulus must be two numbers in units of L (got {0})".format(annulus))
        if ok:
            need(0 < annulus[0] < annulus[1], "empty annulus {0}".format(annulus))
            need(annulus[1] <= 0.35, "annulus outer radius must stay within 0.35 L (got {0})".format(annulus[1]))

        need(_is_int(v["n_bins"]) and v["n_bins"] >= MIN_SHELLS,
             "n_bins must be an integer >= {0} (got {1})".format(MIN_SHELLS, v["n_bins"]))
        if v["alpha"] is not None:
            need(_is_number(v["alpha"]) and 0 < v["alpha"] <= 1,
                 "alpha must lie in (0, 1] (got {0})".format(v["alpha"]))

    def get_parameters(self):
        parameters = {"command": self.command}
        parameters.update(self.values)
        if self.config_file is not None:
            parameters["config_file"] = self.config_file
        return parameters

    def __repr__(self):
        rep_str = "{0} configuration\n".format(self.command)
        for key in sorted(self.values):
            rep_str += "\t{0:>12}: {1} ({2})\n".format(key, self.values[key], self.sources[key])
        return rep_str
