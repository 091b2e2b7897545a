"""Closed-form checks for the generalized Gompertz family.

Reference values marked "mpmath" were computed at 50 significant digits by
``tests/tools/make_reference_values.py``, which writes each formula out
directly in arbitrary precision and shares no code with the package.
"""

import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.optimize import brentq

from quantcure.errors import (
    HazardOverflowError,
    ParameterDomainError,
    PrecisionLossError,
)
from quantcure.gompertz import (
    DGGQuantileParams,
    GGParams,
    cure_mass,
    log1mexp,
    susceptible_quantile,
    theta_from_quantile,
)

# mpmath references (50-digit evaluation, truncated)
PDF_T1_TH2 = 0.3775560998633446834436
SF_T2_TH2 = 0.3715317059098559676671
HAZ_T07_TH05 = 1.029472192055627115811
QUANT_P025 = 0.59512656957517229007
CURE_TH2105 = 0.322346142239245931632
THETA_MU13_Q02 = 21.05222662447990175497
THETA_MU20_Q02 = 97.344848486703155238
SUSC_Q02_TH2105 = 3.669093467422868519784


class TestDensityAndSurvival:
    def test_density_at_origin_reduces_to_scale(self):
        # theta = 1 collapses the power factor, so f(0+) = lam
        assert GGParams(1.0, -0.25, 1.0).pdf(1e-12) == pytest.approx(1.0, abs=1e-9)
        assert GGParams(1.0, 0.0, 1.0).pdf(1e-12) == pytest.approx(1.0, abs=1e-9)

    def test_density_against_high_precision_value(self):
        assert GGParams(1.0, -0.25, 2.0).pdf(1.0) == pytest.approx(PDF_T1_TH2, rel=1e-14)

    def test_survival_against_high_precision_value(self):
        assert GGParams(1.0, -0.25, 2.0).sf(2.0) == pytest.approx(SF_T2_TH2, rel=1e-14)

    def test_survival_starts_at_one(self):
        for params in [GGParams(1.0, -0.25, 2.0), GGParams(0.5, 1.0, 3.0), GGParams(2.0, 0.0, 1.0)]:
            assert params.sf(0.0) == 1.0

    def test_survival_limit_is_cure_mass_for_gompertz(self):
        # theta = 1: limit of S is exp(lam/alpha)
        assert GGParams(1.0, -1.0, 1.0).sf(1e6) == pytest.approx(math.exp(-1.0), rel=1e-12)

    def test_survival_monotone_nonincreasing(self):
        t = np.linspace(0.0, 40.0, 400)
        for params in [GGParams(1.0, -0.25, 21.05), GGParams(1.2, 0.3, 0.7)]:
            s = params.sf(t)
            assert np.all(np.diff(s) <= 1e-15)

    def test_exponential_limit_small_alpha(self):
        # alpha -> 0 with theta = 1 approaches exp(-lam*t)
        t = np.linspace(0.1, 10.0, 50)
        s = GGParams(1.0, 1e-8, 1.0).sf(t)
        assert np.max(np.abs(s - np.exp(-t))) < 1e-6

    def test_mixture_identity(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            params = GGParams(
                lam=rng.uniform(0.2, 3.0),
                alpha=-rng.uniform(0.05, 2.0),
                theta=rng.uniform(0.2, 40.0),
            )
            p0 = params.cure_fraction().p0
            t = rng.uniform(0.0, 30.0, size=13)
            lhs = params.sf(t)
            rhs = p0 + (1.0 - p0) * params.susceptible_sf(t)
            assert np.max(np.abs(lhs - rhs)) < 1e-12

    def test_defective_mass_quadrature(self):
        # the density of a defective law integrates to the event mass 1 - p0
        rng = np.random.default_rng(11)
        for _ in range(10):
            params = GGParams(
                lam=rng.uniform(0.3, 2.0),
                alpha=-rng.uniform(0.1, 1.5),
                theta=rng.uniform(0.4, 25.0),
            )
            p0 = params.cure_fraction().p0
            horizon = 1.0
            while params.sf(horizon) - p0 >= 1e-9:
                horizon *= 2.0
            mass, _ = quad(params.pdf, 0.0, horizon, limit=300)
            assert mass == pytest.approx(1.0 - p0, abs=1e-6)

    def test_rejects_invalid_parameters(self):
        with pytest.raises(ParameterDomainError):
            GGParams(0.0, -0.25, 1.0)
        with pytest.raises(ParameterDomainError):
            GGParams(1.0, -0.25, -1.0)
        with pytest.raises(ParameterDomainError):
            GGParams(1.0, -0.25, 1.0).pdf(0.0)
        with pytest.raises(ParameterDomainError):
            GGParams(1.0, -0.25, 1.0).sf(-1.0)


class TestHazard:
    def test_origin_value_is_scale_for_gompertz(self):
        for alpha in (-0.5, 0.0, 0.7):
            assert GGParams(2.0, alpha, 1.0).hazard(1e-12) == pytest.approx(2.0, abs=1e-9)

    def test_constant_for_exponential_limit(self):
        assert GGParams(1.0, 1e-12, 1.0).hazard(5.0) == pytest.approx(1.0, rel=1e-9)
        assert GGParams(1.0, 0.0, 1.0).hazard(5.0) == pytest.approx(1.0, rel=1e-12)

    def test_against_high_precision_ratio(self):
        assert GGParams(1.0, -0.25, 0.5).hazard(0.7) == pytest.approx(HAZ_T07_TH05, rel=1e-13)

    def test_increasing_for_unit_shape_positive_alpha(self):
        t = np.linspace(0.05, 5.0, 60)
        h = GGParams(1.0, 0.6, 1.0).hazard(t)
        assert np.all(np.diff(h) > 0)

    def test_bathtub_for_small_shape_positive_alpha(self):
        t = np.linspace(0.01, 3.0, 300)
        h = GGParams(1.0, 0.8, 0.4).hazard(t)
        k = int(np.argmin(h))
        assert 0 < k < len(t) - 1
        assert np.all(np.diff(h[: k + 1]) < 0)
        assert np.all(np.diff(h[k:]) > 0)

    def test_underflowed_survival_reports_overflow(self):
        with pytest.raises(HazardOverflowError):
            GGParams(1.0, 1.0, 1.0).hazard(20.0)


class TestQuantile:
    def test_exponential_median(self):
        assert GGParams(1.0, 0.0, 1.0).quantile(0.5) == pytest.approx(math.log(2.0), rel=1e-14)

    def test_against_bisection_oracle(self):
        params = GGParams(1.0, 0.5, 2.0)
        t_star = brentq(lambda t: params.cdf(t) - 0.25, 1e-9, 50.0, xtol=1e-13)
        value = params.quantile(0.25)
        assert value == pytest.approx(t_star, abs=1e-10)
        assert value == pytest.approx(QUANT_P025, rel=1e-13)

    def test_round_trip_through_cdf(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            params = GGParams(rng.uniform(0.2, 2.0), rng.uniform(-1.0, 1.0), rng.uniform(0.3, 8.0))
            p = rng.uniform(0.01, 0.6)
            if params.alpha < 0:
                p = min(p, 0.9 * (1.0 - params.cure_fraction().p0))
            assert params.cdf(params.quantile(p)) == pytest.approx(p, abs=1e-10)

    def test_strictly_increasing_in_level(self):
        grid = np.linspace(0.01, 0.6, 40)
        values = GGParams(1.0, -0.25, 1.0).quantile(grid)
        assert np.all(np.diff(values) > 0)

    def test_defective_rejects_levels_beyond_event_mass(self):
        with pytest.raises(ParameterDomainError, match="maximum attainable"):
            GGParams(1.0, -0.25, 1.0).quantile(0.99)


class TestCureFraction:
    def test_unit_shape_closed_form(self):
        assert GGParams(1.0, -1.0, 1.0).cure_fraction().p0 == pytest.approx(math.exp(-1.0), rel=1e-14)
        assert GGParams(1.0, -0.25, 1.0).cure_fraction().p0 == pytest.approx(math.exp(-4.0), rel=1e-12)

    def test_against_high_precision_value(self):
        assert GGParams(1.0, -0.25, 21.05).cure_fraction().p0 == pytest.approx(CURE_TH2105, rel=1e-13)

    def test_equals_survival_limit(self):
        params = GGParams(0.8, -0.4, 3.0)
        assert params.cure_fraction().p0 == pytest.approx(params.sf(1e4), rel=1e-12)

    def test_requires_negative_alpha(self):
        with pytest.raises(ParameterDomainError):
            GGParams(1.0, 0.3, 1.0).cure_fraction()
        with pytest.raises(ParameterDomainError):
            GGParams(1.0, 0.0, 1.0).cure_fraction()


class TestSusceptiblePopulation:
    def test_survival_endpoints(self):
        params = GGParams(1.0, -0.25, 21.05)
        assert params.susceptible_sf(0.0) == 1.0
        assert params.susceptible_sf(1e5) == pytest.approx(0.0, abs=1e-12)

    def test_survival_value_from_quantile_construction(self):
        theta = theta_from_quantile(1.0, -0.25, math.exp(1.3), 0.2)
        assert GGParams(1.0, -0.25, theta).susceptible_sf(math.exp(1.3)) == pytest.approx(0.8, abs=1e-12)

    def test_quantile_against_high_precision_value(self):
        params = GGParams(1.0, -0.25, 21.05)
        assert params.susceptible_quantile(0.2) == pytest.approx(SUSC_Q02_TH2105, rel=1e-13)

    def test_quantile_against_bisection_oracle(self):
        params = GGParams(1.0, -0.25, 21.05)
        t_star = brentq(lambda t: params.susceptible_sf(t) - 0.8, 1e-9, 100.0, xtol=1e-12)
        assert params.susceptible_quantile(0.2) == pytest.approx(t_star, abs=1e-9)

    def test_quantile_survival_identity_randomized(self):
        rng = np.random.default_rng(19)
        for _ in range(200):
            lam = rng.uniform(0.1, 5.0)
            alpha = -rng.uniform(0.02, 3.0)
            theta = math.exp(rng.uniform(math.log(0.05), math.log(100.0)))
            q = rng.uniform(0.01, 0.99)
            params = GGParams(lam, alpha, theta)
            mu = params.susceptible_quantile(q)
            assert params.susceptible_sf(mu) == pytest.approx(1.0 - q, abs=1e-10)

    def test_quantile_identity_on_fixed_grid(self):
        params = GGParams(1.0, -0.25, 21.05)
        for q in np.arange(0.01, 1.0, 0.01):
            mu = params.susceptible_quantile(q)
            assert params.susceptible_sf(mu) == pytest.approx(1.0 - q, abs=1e-10)

    def test_quantile_vanishes_with_level(self):
        assert GGParams(1.0, -0.25, 2.0).susceptible_quantile(1e-12) < 1e-5

    def test_quantile_strictly_increasing(self):
        grid = np.linspace(0.01, 0.99, 99)
        values = GGParams(1.0, -0.5, 4.0).susceptible_quantile(grid)
        assert np.all(np.diff(values) > 0)


class TestShapeInversion:
    def test_against_high_precision_values(self):
        assert theta_from_quantile(1.0, -0.25, math.exp(1.3), 0.2) == pytest.approx(
            THETA_MU13_Q02, rel=1e-12
        )
        assert theta_from_quantile(1.0, -0.25, math.exp(2.0), 0.2) == pytest.approx(
            THETA_MU20_Q02, rel=1e-12
        )

    def test_round_trip_with_susceptible_quantile(self):
        rng = np.random.default_rng(23)
        for _ in range(200):
            lam = rng.uniform(0.1, 5.0)
            alpha = -rng.uniform(0.02, 3.0)
            theta = math.exp(rng.uniform(math.log(0.05), math.log(100.0)))
            q = rng.uniform(0.01, 0.99)
            mu = susceptible_quantile(q, lam, alpha, theta)
            assert theta_from_quantile(lam, alpha, mu, q) == pytest.approx(theta, rel=1e-8)

    def test_degenerate_plateau_raises_through_wrapper(self):
        # mu so deep into the plateau that both log terms coincide
        with pytest.raises(PrecisionLossError):
            DGGQuantileParams(1.0, -0.25, 500.0, 0.2).theta


class TestQuantileParameterization:
    def test_routes_through_shape_inversion(self):
        qp = DGGQuantileParams(1.0, -0.25, math.exp(1.3), 0.2)
        gg = GGParams(1.0, -0.25, qp.theta)
        t = np.array([0.3, 1.7, 6.2])
        np.testing.assert_array_equal(qp.pdf(t), gg.pdf(t))
        np.testing.assert_array_equal(qp.sf(t), gg.sf(t))
        assert qp.cure_fraction().p0 == gg.cure_fraction().p0

    def test_cure_fraction_reference_values(self):
        # posterior cure mass at the simulation-scenario parameter values
        cases = [
            (math.exp(1.3), 0.2, 0.32),
            (math.exp(2.0), 0.2, 0.83),
            (math.exp(1.3), 0.5, 0.15),
            (math.exp(2.0), 0.5, 0.54),
            (math.exp(1.3), 0.8, 0.05),
            (math.exp(2.0), 0.8, 0.22),
        ]
        for mu, q, expected in cases:
            p0 = DGGQuantileParams(1.0, -0.25, mu, q).cure_fraction().p0
            assert p0 == pytest.approx(expected, abs=0.005)

    def test_rejects_nonnegative_alpha(self):
        with pytest.raises(ParameterDomainError):
            DGGQuantileParams(1.0, 0.0, 1.0, 0.5)
        with pytest.raises(ParameterDomainError):
            DGGQuantileParams(1.0, -1e-12, 1.0, 0.5)


class TestStablePrimitives:
    def test_log1mexp_matches_naive_in_safe_range(self):
        x = np.linspace(-30.0, -1e-3, 500)
        naive = np.log(1.0 - np.exp(x))
        assert np.max(np.abs(log1mexp(x) - naive)) < 1e-12

    def test_log1mexp_tail_accuracy(self):
        # for very negative x the naive form loses all digits; the stable
        # branch keeps log(1 - e^x) ~ -e^x
        x = -40.0
        assert log1mexp(x) == pytest.approx(-math.exp(-40.0), rel=1e-12)

    def test_cure_mass_near_alpha_zero_is_small(self):
        # p0 -> 0 as alpha -> 0-; plain evaluation, no special casing
        assert cure_mass(1.0, -1e-6, 1.0) < 1e-300 or cure_mass(1.0, -1e-6, 1.0) == 0.0
