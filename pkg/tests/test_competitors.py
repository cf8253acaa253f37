import math

import numpy as np
import pytest

from mbl_otto import (CycleParams, HamiltonianParams, ParameterError,
                      StatisticsError, bandwidth_engine_estimate,
                      build_hamiltonian, compare_worst_case, enumerate_basis,
                      make_realizations, mean_gap, run_equal_disorder,
                      sample_trials, wilson_interval)


@pytest.fixture(scope="module")
def engine_samples():
    """Moderate-size standard vs equal-disorder work samples at L = 8."""
    L, n_real, per_real = 8, 40, 1500
    basis = enumerate_basis(L)
    std_reals = make_realizations(51, n_real, L)
    eq_reals = make_realizations(52, 2 * n_real, L, h_eth=20.0, h_mbl=20.0)
    energy_sets = []
    for dr in std_reals:
        ham = build_hamiltonian(basis, dr, HamiltonianParams(alpha=1.0))
        energy_sets.append(np.linalg.eigvalsh(ham))
    mg = mean_gap(energy_sets, window=1.0)
    params = CycleParams(wb=mg / 8, beta_c=math.inf, beta_h=0.0)
    std = np.concatenate([
        sample_trials(basis, dr, params, per_real, seed=51, realization_id=k)
        for k, dr in enumerate(std_reals)])
    eq = np.concatenate([
        run_equal_disorder(basis, (eq_reals[2 * k], eq_reals[2 * k + 1]),
                           params, per_real, seed=52, stream=k)
        for k in range(n_real)])
    return std, eq


class TestRunEqualDisorder:
    def test_identical_realizations_zero_work(self):
        basis = enumerate_basis(8)
        dr = make_realizations(7, 1, 8, h_eth=20.0, h_mbl=20.0)[0]
        params = CycleParams(wb=0.01)
        w = run_equal_disorder(basis, (dr, dr), params, 2000, seed=1)
        assert np.array_equal(w, np.zeros(2000))

    def test_mismatched_strengths_rejected(self):
        basis = enumerate_basis(6)
        a = make_realizations(1, 1, 6, h_eth=2.0, h_mbl=20.0)[0]
        b = make_realizations(2, 1, 6, h_eth=2.0, h_mbl=10.0)[0]
        with pytest.raises(ParameterError):
            run_equal_disorder(basis, (a, b), CycleParams(wb=0.01), 10, seed=0)

    def test_mean_work_comparable_to_standard(self, engine_samples):
        std, eq = engine_samples
        se = math.hypot(std.std(ddof=1) / math.sqrt(std.size),
                        eq.std(ddof=1) / math.sqrt(eq.size))
        assert abs(std.mean() - eq.mean()) < max(5 * se, 0.5 * abs(std.mean()))

    def test_equal_disorder_variance_larger(self, engine_samples):
        std, eq = engine_samples
        assert std.var(ddof=1) < eq.var(ddof=1)


class TestWilsonInterval:
    def test_zero_count_has_positive_upper(self):
        lo, hi = wilson_interval(0, 1000)
        assert lo == 0.0
        assert hi > 0.0

    def test_contains_proportion(self):
        lo, hi = wilson_interval(50, 1000)
        assert lo < 0.05 < hi

    def test_symmetric_limit(self):
        lo, hi = wilson_interval(500, 1000)
        assert lo == pytest.approx(1 - hi, abs=1e-12)


class TestCompareWorstCase:
    def test_all_nonnegative_samples(self):
        a = np.abs(np.random.default_rng(0).normal(size=20_000))
        b = np.abs(np.random.default_rng(1).normal(size=20_000)) * 2
        rep = compare_worst_case(a, b, n_bootstrap=100, seed=3)
        assert rep.p_worst["standard"]["estimate"] == 0.0
        assert rep.p_worst["standard"]["hi"] > 0.0

    def test_insufficient_samples(self):
        with pytest.raises(StatisticsError):
            compare_worst_case(np.ones(100), np.ones(100))

    def test_engine_ordering(self, engine_samples):
        std, eq = engine_samples
        rep = compare_worst_case(std, eq, n_bootstrap=200, seed=5)
        assert rep.ordered
        assert rep.variance["standard"] < rep.variance["equal_disorder"]
        assert rep.variance_ordered_confidence > 0.9

    def test_deterministic_bootstrap(self, engine_samples):
        std, eq = engine_samples
        a = compare_worst_case(std, eq, n_bootstrap=50, seed=9)
        b = compare_worst_case(std, eq, n_bootstrap=50, seed=9)
        assert a.variance_ordered_confidence == b.variance_ordered_confidence


class TestWorstCaseScaling:
    def test_standard_slope_steeper(self):
        # log-log slopes of p_worst vs wb: cubic-ish for the standard engine,
        # quadratic-ish for the equal-disorder one
        L, n_real, per_real = 8, 30, 20000
        basis = enumerate_basis(L)
        std_reals = make_realizations(61, n_real, L)
        eq_reals = make_realizations(62, 2 * n_real, L, h_eth=20.0, h_mbl=20.0)
        energy_sets = []
        for dr in std_reals:
            ham = build_hamiltonian(basis, dr, HamiltonianParams(alpha=1.0))
            energy_sets.append(np.linalg.eigvalsh(ham))
        mg = mean_gap(energy_sets, window=1.0)
        fracs = np.array([1 / 32, 1 / 16, 1 / 8, 1 / 4])
        p_std, p_eq = [], []
        for f in fracs:
            params = CycleParams(wb=f * mg)
            std = np.concatenate([
                sample_trials(basis, dr, params, per_real, seed=61,
                              realization_id=k)
                for k, dr in enumerate(std_reals)])
            eq = np.concatenate([
                run_equal_disorder(basis, (eq_reals[2 * k], eq_reals[2 * k + 1]),
                                   params, per_real, seed=62, stream=k)
                for k in range(n_real)])
            p_std.append(max(np.mean(std < 0), 1e-7))
            p_eq.append(max(np.mean(eq < 0), 1e-7))
        slope_std = np.polyfit(np.log(fracs), np.log(p_std), 1)[0]
        slope_eq = np.polyfit(np.log(fracs), np.log(p_eq), 1)[0]
        assert slope_std > slope_eq


class TestBandwidthEstimate:
    def test_worked_values(self):
        out = bandwidth_engine_estimate(100)
        assert out["w_tot"] == pytest.approx(-90.0, rel=1e-12)
        assert bandwidth_engine_estimate(1)["w_tot"] == pytest.approx(0.0)

    def test_negative_for_two_or_more_sites(self):
        for n in (2, 10, 1000, 10**6):
            assert bandwidth_engine_estimate(n)["w_tot"] < 0.0

    def test_monotone_decreasing(self):
        vals = [bandwidth_engine_estimate(n)["w_tot"] for n in (2, 5, 20, 100, 1000)]
        assert all(np.diff(vals) < 0)

    def test_ideal_no_hop_limit_breaks_even(self):
        out = bandwidth_engine_estimate(50, hop_fraction=0.0)
        assert out["w_tot"] == 0.0

    def test_validation(self):
        with pytest.raises(ParameterError):
            bandwidth_engine_estimate(0)
        with pytest.raises(ParameterError):
            bandwidth_engine_estimate(10, hop_fraction=1.5)
