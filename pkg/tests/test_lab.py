"""
Tests for the verification lab: reports, lemma checks and decay analysis.
"""

import numpy as np
import pytest

from leraylab.spectral import SpectralField, make_grid, random_field, leray_project, gaussian_bump
from leraylab.solver import ProfileRun
from leraylab.lab.report import VerificationReport, DecayFit, to_plain
from leraylab.lab.lemmas import (
    verify_bernstein, verify_new_bernstein, new_bernstein_ratio, new_bernstein_report, signed_power,
    verify_commutator_x, verify_weighted_commutator, verify_riesz_weight_equiv, riesz_weight_ratio,
    compactness_split, verify_compactness, weighted_sup, KAPPA_MAX
)
from leraylab.lab.decay import (
    decay_fit, compare_decay_models, resolve_annulus, radial_shells, pointwise_selfsimilar_bound_check,
    derivative_scaling_check, derivative_magnitude, forcing_hypothesis
)
from leraylab.littlewood_paley import build_dyadic_family

from conftest import tensor_bump


class TestReports:
    """Verdicts and plain serialisation."""

    def test_verdict(self):
        assert VerificationReport("x", {}, [("a", 1.0), ("b", 2.0)], (0.5, 2.0)).passed
        assert not VerificationReport("x", {}, [("a", 1.0), ("b", 2.5)], (0.5, 2.0)).passed
        assert VerificationReport("x", {}, [("a", np.nan)], (0.0, 1.0)).verdict == "fail"
        assert VerificationReport("x", {}, [], (0.0, 1.0)).verdict == "pass"

    def test_criteria_join_verdict(self):
        report = VerificationReport("x", {}, [("a", 1.0)], (0.5, 2.0), criteria={"stable": False})
        assert not report.passed
        assert report.to_dict()["criteria"] == {"stable": False}
        assert VerificationReport("x", {}, [("a", 1.0)], (0.5, 2.0), criteria={"stable": True}).passed

    def test_to_dict_is_plain(self):
        report = VerificationReport("x", {"q": np.arange(3), "p": np.float64(2.0)}, [("a", np.float32(1.0))],
                                    (0.0, np.inf), ["note"], {"flag": np.bool_(True)})
        record = report.to_dict()

        assert record["parameters"] == {"q": [0, 1, 2], "p": 2.0}
        assert record["bound"] == [0.0, "inf"]
        assert record["details"]["flag"] is True
        assert record["verdict"] == "pass"

    def test_to_plain(self):
        assert to_plain({1: (np.int64(2), np.nan)}) == {"1": [2, "nan"]}
        assert type(to_plain(np.float64(1.5))) is float

    def test_decay_fit_expected(self):
        fit = DecayFit(1.0, (0.1, 0.3), "pure_power", 2.9)
        assert fit.expected == 3.0
        assert DecayFit(None, (0.1, 0.3), "pure_power", 2.9).expected is None
        assert fit.to_dict()["log_coefficient"] is None


class TestBernstein:
    """Classical and fractional Bernstein checks."""

    def test_classical_bracket(self):
        report = verify_bernstein(p=2, trials=2)
        assert report.passed
        assert np.all(report.values() >= 0.75 - 1e-10)
        assert np.all(report.values() <= 8.0 / 3.0 + 1e-10)

    def test_classical_sup_norm(self):
        assert verify_bernstein(p=np.inf, trials=2).passed

    @pytest.mark.parametrize("alpha", [5.0 / 6.0, 1.0])
    def test_fractional_exact_bracket(self, alpha):
        report = verify_new_bernstein(alpha, p=2, trials=3)
        assert report.passed
        assert report.bound[1] == pytest.approx((8.0 / 3.0) ** alpha, abs=1e-9)

    def test_fractional_p4_spread(self):
        report = verify_new_bernstein(1.0, p=4, trials=3)
        assert report.passed
        assert report.details["spread"] <= 10.0
        assert "q_trend_slope" in report.details

    def test_q_trend_fails_sweep(self):
        steady = {q: [("trial=0", 1.0), ("trial=1", 1.1)] for q in range(1, 5)}
        drifting = {q: [("trial=0", np.exp(0.3 * q)), ("trial=1", 1.1 * np.exp(0.3 * q))] for q in range(1, 5)}

        assert new_bernstein_report(1.0, 4, steady).passed

        report = new_bernstein_report(1.0, 4, drifting)
        assert report.details["spread"] < 10.0
        assert report.details["q_trend_slope"] == pytest.approx(0.3)
        assert report.criteria == {"q_trend": False}
        assert not report.passed
        assert any("trends with q" in note for note in report.notes)

    def test_exact_bracket_ignores_q_trend(self):
        drifting = {q: [("trial=0", 1.0 + 0.2 * q)] for q in range(1, 4)}
        report = new_bernstein_report(1.0, 2, drifting)
        assert report.criteria == {}
        assert report.passed

    def test_zero_field_skipped(self):
        grid = make_grid(2, 64, 2 * np.pi)
        report = verify_new_bernstein(1.0, grid=grid, fields=[SpectralField.zeros(grid)])
        assert report.measured == []
        assert any("zero field" in note for note in report.notes)

    def test_ratio_at_one_block(self):
        grid = make_grid(2, 64, 2 * np.pi)
        family = build_dyadic_family(grid)
        f = random_field(grid, band=grid.n / 3.0)
        ratio = new_bernstein_ratio(f, 1.0, 2, 2, family)
        assert 0.75 <= ratio <= 8.0 / 3.0

    def test_signed_power(self):
        values = np.array([-4.0, 0.0, 9.0])
        assert np.allclose(signed_power(values, 0.5), [-2.0, 0.0, 3.0])

    def test_validation(self):
        with pytest.raises(ValueError, match="p >= 2"):
            verify_new_bernstein(1.0, p=1.5)


class TestCommutators:
    """Weighted commutator, Riesz weight equivalence and the x-commutator."""

    def test_commutator_x_identity(self):
        report = verify_commutator_x(trials=2, dim=1)
        assert report.passed
        assert report.parameters["n"] == 1024
        assert np.max(report.values()) <= 1e-9

    def test_weighted_commutator_regimes(self):
        below = verify_weighted_commutator(0.5, 0.25, trials=1)
        above = verify_weighted_commutator(0.5, 0.75, trials=1)

        assert below.passed and above.passed
        assert below.details["regime"] == "beta < s"
        assert above.details["regime"] == "beta >= s"

    def test_refinement_skips_empty_fields(self):
        grid = make_grid(2, 64, 16 * np.pi)
        report = verify_weighted_commutator(0.5, 0.75, trials=1, grid=grid, widths=[1e-6, 2 * np.pi], refine=True)

        assert len(report.measured) == 1
        assert "width=6.283" in report.measured[0][0]
        assert any("zero field skipped" in note for note in report.notes)
        assert np.isfinite(report.details["refinement_change"])
        assert "refinement" in report.criteria

    def test_weighted_commutator_validation(self):
        grid = make_grid(2, 32, 16 * np.pi)
        with pytest.raises(ValueError, match="must lie in"):
            verify_weighted_commutator(1.5, 0.25, grid=grid, fields=[gaussian_bump(grid, 2.0)])

    def test_riesz_weight(self):
        report = verify_riesz_weight_equiv(0.5, trials=2)
        assert report.passed
        assert len(report.measured) == 4

    def test_riesz_ratio_unweighted(self):
        grid = make_grid(2, 32, 2 * np.pi)
        f = random_field(grid, seed=3)
        assert riesz_weight_ratio(f, 0.0) == pytest.approx(1.0, rel=1e-12)


class TestCompactness:
    """High/low splitting of the nonlinear term."""

    def test_split_terms(self):
        grid = make_grid(2, 64, 2 * np.pi)
        u = random_field(grid, "vector", seed=1, solenoidal=True)
        v = random_field(grid, "vector", seed=2)
        split = compactness_split(u, v, 1)

        assert set(split) == {"lhs", "high_tail", "low_bulk", "v_high", "v_low", "kappa", "N", "p"}
        assert 0 < split["kappa"] < KAPPA_MAX

    def test_split_validation(self):
        grid = make_grid(2, 32, 2 * np.pi)
        u = random_field(grid, "vector", solenoidal=True)
        with pytest.raises(ValueError, match="9/2"):
            compactness_split(u, u, 0, p=5)
        with pytest.raises(ValueError, match="divergence-free"):
            compactness_split(random_field(grid, "vector"), u, 0)

    def test_sweep(self):
        report = verify_compactness(trials=1)
        assert report.passed
        assert not any("increases" in note for note in report.notes)


class TestWeightedSup:

    def test_unweighted_is_grid_max(self):
        grid = make_grid(2, 32, 16 * np.pi)
        f = gaussian_bump(grid, 2.0)
        assert weighted_sup(f, 0) == pytest.approx(1.0)

        with pytest.raises(ValueError, match="nonnegative"):
            weighted_sup(f, -1)


class TestDecayFit:
    """Radial decay fits of shell maxima."""

    @pytest.fixture
    def grid(self):
        return make_grid(2, 64, 16 * np.pi)

    def _radial(self, grid, profile):
        r = grid.radius()
        return np.where(r > 0, profile(np.where(r > 0, r, 1.0)), 1.0)

    def test_pure_power(self, grid):
        values = self._radial(grid, lambda r: r ** (-7.0 / 3.0))
        fit = decay_fit(values, grid=grid, alpha=5.0 / 6.0)

        assert fit.exponent == pytest.approx(7.0 / 3.0, abs=1e-10)
        assert fit.rms_residual < 1e-10
        assert fit.expected == pytest.approx(7.0 / 3.0)

    def test_log_corrected(self, grid):
        values = self._radial(grid, lambda r: r ** -3.0 * np.log(r))
        fit = decay_fit(values, model="log_corrected", grid=grid)

        assert fit.exponent == pytest.approx(3.0, abs=1e-8)
        assert fit.log_coefficient == pytest.approx(1.0, abs=1e-8)

    def test_spectral_field_input(self, grid):
        f = gaussian_bump(grid, 3.0)
        fit = decay_fit(f, annulus=(0.1, 0.2))
        assert fit.exponent > 0

    def test_shell_table(self, grid):
        r_lo, r_hi = resolve_annulus(grid)
        shells = radial_shells(self._radial(grid, lambda r: 1.0 / r), grid, (r_lo, r_hi), 8)

        assert list(shells.columns) == ["r", "r_argmax", "shell_max", "shell_mean", "count"]
        assert len(shells) == 8
        assert np.all(shells["shell_max"] >= shells["shell_mean"])

    def test_errors(self, grid):
        values = self._radial(grid, lambda r: r ** -2.0)
        with pytest.raises(ValueError, match="empty shells"):
            decay_fit(values, grid=grid, n_bins=4)
        with pytest.raises(ValueError, match="decay model"):
            decay_fit(values, grid=grid, model="exponential")
        with pytest.raises(ValueError, match="needs the grid"):
            decay_fit(values)

        small = make_grid(2, 64, 2 * np.pi)
        with pytest.raises(ValueError, match="r > 1"):
            decay_fit(self._radial(small, lambda r: r ** -2.0), model="log_corrected", grid=small)

    def test_annulus_checks(self, grid):
        assert resolve_annulus(grid) == pytest.approx((0.1 * grid.box_length, 0.3 * grid.box_length))
        with pytest.raises(ValueError, match="empty annulus"):
            resolve_annulus(grid, (0.3, 0.1))
        with pytest.raises(ValueError, match="0.35 L"):
            resolve_annulus(grid, (0.1, 0.4))
        with pytest.raises(ValueError, match="4 grid cells"):
            resolve_annulus(make_grid(2, 16, 16 * np.pi), (0.1, 0.3))

    def test_compare_models(self):
        def fits(rms_pure, rms_log, b):
            return (DecayFit(1.0, (0.1, 0.3), "pure_power", 3.0, None, rms_pure),
                    DecayFit(1.0, (0.1, 0.3), "log_corrected", 3.0, b, rms_log))

        assert compare_decay_models(*fits(0.3, 0.1, 1.0))["classification"] == "log_loss"
        assert compare_decay_models(*fits(0.3, 0.1, -1.0))["classification"] == "optimal"
        assert compare_decay_models(*fits(0.1, 0.09, 1.0))["classification"] == "optimal"
        assert compare_decay_models(*fits(0.0, 0.0, 1.0))["rms_ratio"] == 1.0
        assert compare_decay_models(*fits(0.2, 0.0, 1.0))["classification"] == "log_loss"


class TestSelfSimilarBounds:
    """t-uniformity of the pointwise bound constants."""

    @pytest.fixture
    def grid(self):
        return make_grid(2, 512, 512.0)

    def _ring(self, grid, t, amplitude=1.0, radius=36.0, width=6.0):
        #u(y, t) = t^(-1/2) W(y / sqrt(t)) with a rotational ring profile W
        z = [y / np.sqrt(t) * np.ones(grid.shape) for y in grid.coordinates]
        rho = np.sqrt(z[0] ** 2 + z[1] ** 2)
        safe = np.where(rho > 0, rho, 1.0)
        F = np.exp(-(rho - radius) ** 2 / (2 * width ** 2)) / (rho + 1.0)
        values = amplitude / np.sqrt(t) * np.stack([-F * z[1] / safe, F * z[0] / safe])
        return leray_project(SpectralField.from_physical(grid, values, rank="vector"))

    def _run(self, grid, amplitudes=(1.0, 1.0, 1.0)):
        run = ProfileRun(1.0, grid)
        for t, a in zip((0.25, 1.0, 4.0), amplitudes):
            run.add_snapshot(t, self._ring(grid, t, a))
        return run

    def test_self_similar_family_passes(self, grid):
        report = pointwise_selfsimilar_bound_check(self._run(grid))
        assert report.passed
        assert [name for name, _ in report.measured] == ["C"]
        assert report.values()[0] < 1.2

    def test_growing_family_fails(self, grid):
        report = pointwise_selfsimilar_bound_check(self._run(grid, (1.0, 1.0, 5.0)))
        assert not report.passed

    def test_needs_three_snapshots(self, grid2d):
        run = ProfileRun(1.0, grid2d)
        run.add_snapshot(1.0, random_field(grid2d, "vector", solenoidal=True))
        with pytest.raises(ValueError, match="at least 3 snapshots"):
            pointwise_selfsimilar_bound_check(run)

    def test_derivative_scaling_needs_initial_data(self, grid2d):
        with pytest.raises(ValueError, match="initial data"):
            derivative_scaling_check(ProfileRun(1.0, grid2d))

    def test_derivative_magnitude(self):
        grid = make_grid(1, 64, 2 * np.pi)
        f = SpectralField.from_physical(grid, np.sin(2 * grid.axis_points))
        assert np.max(derivative_magnitude(f, 0)) == pytest.approx(1.0, rel=1e-3)
        assert np.max(derivative_magnitude(f, 2)) == pytest.approx(4.0, rel=1e-3)


class TestForcingHypothesis:

    def test_quantities(self):
        grid = make_grid(2, 64, 16 * np.pi)
        result = forcing_hypothesis(tensor_bump(grid, 2.0), 1.0)

        assert result["weighted_holder"] > 0
        assert result["weighted_sup"] > 0
        assert result["gamma"] == 0.5

    def test_validation(self):
        grid = make_grid(2, 32, 16 * np.pi)
        with pytest.raises(ValueError, match="tensor field"):
            forcing_hypothesis(random_field(grid, "vector"), 1.0)
        with pytest.raises(ValueError, match="Hoelder exponent"):
            forcing_hypothesis(tensor_bump(grid, 2.0), 1.0, gamma=1.5)
