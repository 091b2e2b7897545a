"""Data-generation and study-harness checks.

Distributional assertions use the two-arm scenario with alpha = -0.25,
lam = 1, beta = (1.3, 0.7), whose arm-wise cure fractions at q = 0.2 are
0.32 and 0.83 (the values the generator must reproduce empirically).
"""

import math

import numpy as np
import pytest

from quantcure.errors import ParameterDomainError, ScenarioError, StudyError
from quantcure.gompertz import susceptible_sf
from quantcure.mcmc import ChainConfig, adaptive_metropolis
from quantcure.model import PosteriorTarget
from quantcure.simulate import (
    PARAMETER_LABELS,
    ReplicateRecord,
    SimScenario,
    StudySummary,
    calibrate_tau,
    generate_dataset,
    run_study,
    summarize_replicates,
)


def scenario(**overrides):
    base = dict(alpha=-0.25, lam=1.0, beta=(1.3, 0.7), q=0.2, seed=0)
    base.update(overrides)
    return SimScenario(**base)


class TestSimScenario:
    def test_cure_fractions_match_reference(self):
        sc = scenario()
        assert sc.p0(0) == pytest.approx(0.32, abs=5e-3)
        assert sc.p0(1) == pytest.approx(0.83, abs=5e-3)

    def test_censoring_defaults_sit_above_cure_mass(self):
        sc = scenario()
        assert sc.pc0 == pytest.approx(sc.p0(0) + 0.10)
        assert sc.pc1 == pytest.approx(sc.p0(1) + 0.05)

    def test_truth_vector_order(self):
        sc = scenario()
        truth = sc.truth()
        assert truth[:4] == pytest.approx([1.3, 0.7, 1.0, -0.25])
        assert truth[4] == pytest.approx(sc.p0(0))
        assert truth[5] == pytest.approx(sc.p0(1))

    def test_rejects_invalid_parameters(self):
        with pytest.raises(ScenarioError):
            scenario(alpha=0.25)
        with pytest.raises(ScenarioError):
            scenario(lam=0.0)
        with pytest.raises(ScenarioError):
            scenario(q=1.0)
        with pytest.raises(ScenarioError):
            scenario(beta=(1.0,))

    def test_rejects_censoring_below_cure_mass(self):
        # pc1 = 0.5 sits below the x=1 cure fraction of 0.83
        with pytest.raises(ScenarioError, match="x=1"):
            scenario(pc1=0.5)
        with pytest.raises(ScenarioError):
            scenario(pc0=1.2)


class TestCalibrateTau:
    def test_reproduces_target_censoring(self):
        sc = scenario(pc0=0.45, n=100_000, seed=4)
        tau0 = calibrate_tau(sc, 0)
        data, latent = generate_dataset(sc, taus=(tau0, calibrate_tau(sc, 1)))
        censored = 1.0 - data.status[latent.x == 0].mean()
        assert censored == pytest.approx(0.45, abs=0.01)

    def test_is_deterministic(self):
        assert calibrate_tau(scenario(), 0) == calibrate_tau(scenario(), 0)

    def test_monotone_in_target(self):
        # barely above the cure mass -> huge horizon; heavy censoring ->
        # short horizon
        p00 = scenario().p0(0)
        tau_near = calibrate_tau(scenario(pc0=p00 + 0.002), 0)
        tau_mid = calibrate_tau(scenario(pc0=0.45), 0)
        tau_heavy = calibrate_tau(scenario(pc0=0.99), 0)
        assert tau_near > tau_mid > tau_heavy
        assert tau_near > 100.0


class TestGenerateDataset:
    def test_same_seed_gives_identical_dataset(self):
        sc = scenario(n=500, seed=9)
        taus = (calibrate_tau(sc, 0), calibrate_tau(sc, 1))
        a, la = generate_dataset(sc, taus=taus)
        b, lb = generate_dataset(sc, taus=taus)
        assert np.array_equal(a.times, b.times)
        assert np.array_equal(a.status, b.status)
        assert np.array_equal(la.x, lb.x)

    def test_latent_cross_checks(self):
        sc = scenario(n=4000, seed=2)
        data, latent = generate_dataset(sc)
        events = data.status == 1
        assert np.array_equal(data.times[events], latent.w[events])
        assert np.array_equal(data.times[~events], latent.c[~events])
        # cured subjects can never show an event
        assert not np.any(latent.cured & events)
        assert np.all(data.times > 0.0)

    def test_empirical_cure_and_censoring_rates(self):
        sc = scenario(n=20_000, seed=7)
        data, latent = generate_dataset(sc)
        for x in (0, 1):
            arm = latent.x == x
            n_arm = int(arm.sum())
            p0 = sc.p0(x)
            se = math.sqrt(p0 * (1.0 - p0) / n_arm)
            assert abs(latent.cured[arm].mean() - p0) < 3.0 * se
            censored = 1.0 - data.status[arm].mean()
            assert abs(censored - sc.pc(x)) < 0.02

    def test_susceptible_times_follow_inverse_cdf(self):
        sc = scenario(n=20_000, seed=11)
        _, latent = generate_dataset(sc)
        for x in (0, 1):
            keep = (latent.x == x) & ~latent.cured
            w = np.sort(latent.w[keep])
            n = w.size
            cdf = 1.0 - np.asarray(
                susceptible_sf(w, sc.lam, sc.alpha, sc.theta(x))
            )
            empirical = np.arange(1, n + 1) / n
            ks = np.max(
                np.maximum(np.abs(empirical - cdf), np.abs(empirical - 1.0 / n - cdf))
            )
            assert ks <= 2.0 / math.sqrt(n)

    def test_design_layout(self):
        data, _ = generate_dataset(scenario(n=200, seed=1))
        assert data.columns == ("intercept", "x1")
        assert set(np.unique(data.design[:, 1])) <= {0.0, 1.0}


def oracle_record(truth, half_width, offset=0.0):
    est = np.asarray(truth, dtype=float) + offset
    lo = est - half_width
    hi = est + half_width
    return ReplicateRecord(
        estimates=est,
        hpd=np.column_stack([lo, hi]),
        equal_tail=np.column_stack([lo, hi]),
    )


class TestSummarizeReplicates:
    def test_oracle_fit_has_zero_bias_and_full_coverage(self):
        truth = scenario().truth()
        records = [oracle_record(truth, 0.5) for _ in range(4)]
        s = summarize_replicates(records, truth, n=100, q=0.2, b_requested=4)
        assert np.allclose(s.bias, 0.0)
        assert np.allclose(s.mse, 0.0)
        assert np.all(s.coverage_hpd == 1.0)
        assert np.all(s.coverage_equal_tail == 1.0)

    def test_missed_intervals_lower_coverage(self):
        truth = scenario().truth()
        hit = oracle_record(truth, 0.5)
        # narrow intervals around a shifted estimate never cover
        miss = oracle_record(truth, 0.01, offset=0.2)
        s = summarize_replicates([hit, miss], truth, n=50, q=0.2, b_requested=2)
        assert np.all(s.coverage_hpd == 0.5)
        assert np.all(s.mse + 1e-12 >= s.bias**2)

    def test_empty_records_raise(self):
        with pytest.raises(StudyError):
            summarize_replicates([], scenario().truth(), n=10, q=0.2, b_requested=2)

    def test_summary_validates_fields(self):
        truth = scenario().truth()
        good = summarize_replicates(
            [oracle_record(truth, 0.5)], truth, n=10, q=0.2, b_requested=1
        )
        with pytest.raises(StudyError):
            StudySummary(
                n=good.n,
                q=good.q,
                b_requested=good.b_requested,
                b_used=good.b_used,
                n_failed=good.n_failed,
                parameters=good.parameters,
                truth=good.truth,
                mean_estimate=good.mean_estimate,
                bias=good.bias + 1.0,          # forces mse < bias**2
                mse=good.mse,
                coverage_hpd=good.coverage_hpd,
                coverage_equal_tail=good.coverage_equal_tail,
            )


class TestRunStudy:
    def test_two_replicate_smoke(self):
        chain = ChainConfig(iterations=3000, burn_in=1000, init=np.zeros(4), thin=10)
        out = run_study(scenario(seed=21, q=0.5), 2, [60], chain=chain)
        assert len(out) == 1
        s = out[0]
        assert s.parameters == PARAMETER_LABELS
        assert s.b_used == 2 and s.n_failed == 0
        assert np.all(np.isfinite(s.mean_estimate))
        assert np.all(np.isfinite(s.mse))
        assert set(np.unique(s.coverage_hpd)) <= {0.0, 0.5, 1.0}

    def test_rejects_single_replicate(self):
        with pytest.raises(StudyError):
            run_study(scenario(), 1, [50])

    def test_rejects_empty_sample_sizes(self):
        with pytest.raises(ScenarioError):
            run_study(scenario(), 2, [])


class TestSamplerOnScenario:
    def test_acceptance_rate_in_sanity_band(self):
        # one fit of the two-arm scenario at n=300: adaptation should
        # keep the walk neither frozen nor near-free
        sc = scenario(n=300, seed=33, q=0.5)
        data, _ = generate_dataset(sc)
        target = PosteriorTarget(data, q=0.5)
        config = ChainConfig(
            iterations=20_000, burn_in=10_000, init=target.initial_point(), thin=10, seed=5
        )
        sample = adaptive_metropolis(target, config)
        assert 0.05 < sample.acceptance_rate < 0.6
        assert not sample.diagnostics.stalled
