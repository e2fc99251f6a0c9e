"""
End-to-end runs of the leraylab command line.
"""

import glob
import json
import os

import numpy as np
import pandas as pd
import pytest

import leraylab.io as lio
import leraylab.plotting as plotting
from leraylab.lab.decay import decay_fit
from leraylab.scripts.run_leraylab import main, parse_args, EXIT_OK, EXIT_FAILED, EXIT_INVALID
from leraylab.spectral import SpectralField, make_grid


def run(command, *argv):
    """exit code of one command line invocation"""
    with pytest.raises(SystemExit) as excinfo:
        main([command, "--no-logo"] + list(argv))
    return excinfo.value.code


def records(path):
    return lio.read_records(str(path))


class TestArguments:

    def test_command_required(self):
        with pytest.raises(SystemExit):
            parse_args([])

    def test_empty_decay_inputs_are_not_overrides(self):
        assert parse_args(["decay"]).inputs is None

    def test_choices(self):
        with pytest.raises(SystemExit):
            parse_args(["verify", "--suite", "nope"])

    def test_dim_help_names_commutator_limit(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            parse_args(["verify", "--help"])
        assert excinfo.value.code == 0
        assert "commutator_x runs in dim 1 or 2 only" in " ".join(capsys.readouterr().out.split())


class TestVerify:

    def test_new_bernstein(self, tmp_path):
        code = run("verify", "--suite", "new_bernstein", "--alpha", "0.8333", "--p", "2", "--trials", "2",
                   "--out", str(tmp_path))
        assert code == EXIT_OK

        (record,) = records(tmp_path / "verify_new_bernstein.jsonl")
        assert record["name"] == "new_bernstein"
        assert record["verdict"] == "pass"
        assert record["parameters"]["seed"] == 42

        with open(str(tmp_path / "verify_new_bernstein_summary.txt")) as fh:
            summary = fh.read()
        assert "new_bernstein" in summary and "seed=42" in summary

    def test_missing_alpha(self, tmp_path):
        code = run("verify", "--suite", "new_bernstein", "--out", str(tmp_path))
        assert code == EXIT_INVALID
        assert not os.path.exists(str(tmp_path / "verify_new_bernstein.jsonl"))

    def test_commutator_ignores_grid_flags(self, tmp_path):
        code = run("verify", "--suite", "commutator_x", "--n", "32", "--seed", "7", "--trials", "2",
                   "--out", str(tmp_path))
        assert code == EXIT_OK

        (record,) = records(tmp_path / "verify_commutator_x.jsonl")
        assert record["parameters"]["n"] == 1024
        assert record["parameters"]["seed"] == 7
        assert all(value <= 1e-9 for _, value in record["measured"])

        with open(str(tmp_path / "verify_commutator_x_summary.txt")) as fh:
            assert "--n/--box ignored" in fh.read()

    def test_config_file_under_flags(self, tmp_path):
        config = tmp_path / "run.json"
        config.write_text(json.dumps({"verify": {"suite": "bernstein", "trials": 2, "seed": 3, "p": 2.0}}))

        code = run("verify", "--config", str(config), "--seed", "5", "--out", str(tmp_path))
        assert code == EXIT_OK

        (record,) = records(tmp_path / "verify_bernstein.jsonl")
        assert record["parameters"]["seed"] == 5

    def test_unknown_config_key(self, tmp_path):
        config = tmp_path / "run.json"
        config.write_text(json.dumps({"trails": 2}))
        assert run("verify", "--config", str(config), "--out", str(tmp_path)) == EXIT_INVALID


class TestDecay:

    @pytest.fixture
    def power_snapshot(self, tmp_path):
        grid = make_grid(2, 64, 16 * np.pi)
        r = grid.radius()
        values = np.where(r > 0, np.where(r > 0, r, 1.0) ** (-7.0 / 3.0), 1.0)
        path = str(tmp_path / "power.lrlb")
        lio.write_snapshot(path, SpectralField.from_physical(grid, values), 5.0 / 6.0, 1.0)
        return path

    def test_pure_power_exponent(self, tmp_path, power_snapshot):
        code = run("decay", power_snapshot, "--out", str(tmp_path))
        assert code == EXIT_OK

        (record,) = records(tmp_path / "decay.jsonl")
        assert record["name"] == "decay_fit"
        assert record["file"] == "power.lrlb"
        assert abs(record["exponent"] - 7.0 / 3.0) < 0.05
        assert record["expected"] == pytest.approx(7.0 / 3.0)

        shells = pd.read_csv(str(tmp_path / "decay_power_shells.csv"))
        assert len(shells) == 16
        assert list(shells["seed"].unique()) == [42]

    def test_seed_echoed(self, tmp_path, power_snapshot):
        assert run("decay", power_snapshot, "--seed", "9", "--out", str(tmp_path)) == EXIT_OK

        assert records(tmp_path / "decay.jsonl")[0]["seed"] == 9
        assert list(pd.read_csv(str(tmp_path / "decay_power_shells.csv"))["seed"].unique()) == [9]

    def test_compare_models(self, tmp_path, power_snapshot):
        assert run("decay", power_snapshot, "--model", "compare", "--out", str(tmp_path)) == EXIT_OK

        names = [r["name"] for r in records(tmp_path / "decay.jsonl")]
        assert names.count("decay_fit") == 2
        assert names[-1] == "decay_comparison"

    def test_corrupt_file(self, tmp_path, power_snapshot):
        with open(power_snapshot, "rb") as fh:
            raw = fh.read()
        broken = str(tmp_path / "broken.lrlb")
        with open(broken, "wb") as fh:
            fh.write(raw[:-16])

        assert run("decay", broken, "--out", str(tmp_path)) == EXIT_INVALID
        assert not os.path.exists(str(tmp_path / "decay.jsonl"))

    def test_empty_annulus(self, tmp_path, power_snapshot):
        assert run("decay", power_snapshot, "--annulus", "0.3", "0.1", "--out", str(tmp_path)) == EXIT_INVALID

    def test_no_inputs(self, tmp_path):
        assert run("decay", "--out", str(tmp_path)) == EXIT_INVALID


class TestSolve:

    def test_short_evolve(self, tmp_path):
        code = run("solve", "--mode", "evolve", "--n", "16", "--box", "25.13", "--t-end", "0.1", "--dt", "0.01",
                   "--snapshots", "0.05", "0.1", "--out", str(tmp_path))
        assert code == EXIT_OK

        for name in ("residual_history.csv", "solve.jsonl", "solve_summary.txt", "run.msgpack"):
            assert os.path.exists(str(tmp_path / name))
        assert sorted(os.path.basename(p) for p in glob.glob(str(tmp_path / "u_t*.lrlb"))) == \
            ["u_t0.0500.lrlb", "u_t0.1000.lrlb"]
        assert not os.path.exists(str(tmp_path / "profile_v.lrlb"))

        record = records(tmp_path / "solve.jsonl")[0]
        assert record["ret"]["code"] == 0
        assert "diagnostics" not in record

        history = pd.read_csv(str(tmp_path / "residual_history.csv"))
        assert history["iter_or_step"].iloc[-1] == 10
        assert list(history["seed"].unique()) == [42]
        assert lio.parse_run(str(tmp_path / "run.msgpack"))["meta"]["workflow"][0]["seed"] == 42

        snapshot = lio.read_snapshot(str(tmp_path / "u_t0.1000.lrlb"))
        assert snapshot.time == 0.1
        assert snapshot.grid.n == 16

        with open(str(tmp_path / "solve_summary.txt")) as fh:
            assert "profile not extracted" in fh.read()

    def test_invalid_alpha(self, tmp_path):
        assert run("solve", "--alpha", "0.5", "--out", str(tmp_path)) == EXIT_INVALID

    def test_missing_sigma_table(self, tmp_path):
        code = run("solve", "--sigma", "user_table", "--sigma-table", str(tmp_path / "missing.npy"),
                   "--n", "16", "--out", str(tmp_path))
        assert code == EXIT_INVALID

    @pytest.mark.slow
    def test_evolve_defaults(self, tmp_path):
        assert run("solve", "--out", str(tmp_path)) == EXIT_OK

        solve = records(tmp_path / "solve.jsonl")
        assert solve[0]["diagnostics"]["self_similarity_residual"] <= 0.05

        (bound,) = [r for r in solve if r.get("name") == "pointwise_selfsimilar_bound"]
        assert bound["verdict"] == "pass"
        assert all(value <= 3.0 for _, value in bound["measured"])

        profile = lio.read_snapshot(str(tmp_path / "profile_v.lrlb"))
        fit = decay_fit(profile.field, alpha=1.0)
        assert abs(fit.exponent - 3.0) <= 0.25

    @pytest.mark.slow
    def test_picard_small_amplitude(self, tmp_path):
        assert run("solve", "--mode", "picard", "--amp", "0.1", "--out", str(tmp_path)) == EXIT_OK
        assert os.path.exists(str(tmp_path / "profile_P.lrlb"))

        updates = pd.read_csv(str(tmp_path / "residual_history.csv"))["update_norm"].values
        assert len(updates) >= 3
        assert (updates[-1] / updates[0]) ** (1.0 / (len(updates) - 1)) < 0.9

    @pytest.mark.slow
    def test_picard_matches_evolve(self, tmp_path):
        grid_flags = ["--n", "32", "--box", repr(8 * np.pi), "--amp", "0.1", "--alpha", "1.0"]
        picard, evolve = tmp_path / "picard", tmp_path / "evolve"
        assert run("solve", "--mode", "picard", "--out", str(picard), *grid_flags) == EXIT_OK
        assert run("solve", "--mode", "evolve", "--out", str(evolve), *grid_flags) == EXIT_OK

        v_picard = lio.read_snapshot(str(picard / "profile_v.lrlb")).field
        v_evolve = lio.read_snapshot(str(evolve / "profile_v.lrlb")).field
        mask = v_picard.grid.window_mask()

        gap = np.sqrt(np.sum((v_picard.physical() - v_evolve.physical()) ** 2, axis=0))[mask]
        size = np.sqrt(np.sum(v_picard.physical() ** 2, axis=0))[mask]
        assert np.linalg.norm(gap) <= 0.05 * np.linalg.norm(size)

    @pytest.mark.slow
    def test_picard_large_amplitude(self, tmp_path):
        assert run("solve", "--mode", "picard", "--amp", "50", "--out", str(tmp_path)) == EXIT_FAILED
        assert records(tmp_path / "solve.jsonl")[0]["ret"]["code"] < 0


class TestPlots:

    def test_decay_figure(self):
        grid = make_grid(2, 64, 16 * np.pi)
        r = grid.radius()
        values = np.where(r > 0, np.where(r > 0, r, 1.0) ** -3.0 * np.log(np.where(r > 1, r, 2.0)), 1.0)
        fit = decay_fit(values, model="log_corrected", grid=grid, alpha=1.0)

        figure = plotting.plot_decay_fit(fit)
        assert [trace.name for trace in figure["data"]][:2] == ["shell max", "shell mean"]
        assert len(figure["data"]) == 4

    def test_residual_history_figure(self):
        history = [{"step": i, "time": 0.1 * i, "l2_update": 10.0 ** -i, "max_velocity": 1.0} for i in range(1, 4)]
        figure = plotting.plot_residual_history(history)

        assert sorted(trace.name for trace in figure["data"]) == ["l2_update", "max_velocity"]
        assert list(figure["data"][0].x) == [1, 2, 3]

    def test_html_outputs(self, tmp_path):
        code = run("solve", "--n", "16", "--box", "25.13", "--t-end", "0.02", "--dt", "0.01", "--snapshots", "0.02",
                   "--plot", "--out", str(tmp_path))
        assert code == EXIT_OK
        assert os.path.exists(str(tmp_path / "residual_history.html"))
