"""Synthetic right-censored data with a cure fraction, plus the Monte
Carlo study harness.

Generation follows the inverse-CDF scheme for a two-arm design: per
subject draw x ~ Bernoulli(0.5); with probability p0_x the subject is
cured (event time infinite), otherwise the susceptible time solves the
defective CDF at a uniform level below the attainable mass.  Censoring
times are U(0, tau_x) with tau_x calibrated by bisection so the expected
censoring proportion hits the scenario target pc_x.

The study harness fits every replicate independently (one adaptive
Metropolis chain each), records posterior means and both 95% interval
kinds for (beta0, beta1, lam, alpha, p0|x=0, p0|x=1), and aggregates
bias, MSE and coverage.  Replicate RNG streams are keyed by (seed, tag,
n, replicate) so results do not depend on execution order.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace

import numpy as np

from .errors import QuantcureError, ScenarioError, StudyError
from .fit import cure_fraction_draws
from .gompertz import ALPHA_DEFECTIVE_MAX, cure_mass, quantile, theta_from_quantile
from .mcmc import ChainConfig, adaptive_metropolis, equal_tail_interval, hpd_interval
from .model import PosteriorTarget, SurvivalDataset
from .parallel import parallel_map

__all__ = [
    "SimScenario",
    "LatentRecord",
    "ReplicateRecord",
    "StudySummary",
    "PARAMETER_LABELS",
    "calibrate_tau",
    "generate_dataset",
    "run_study",
    "summarize_replicates",
]

log = logging.getLogger(__name__)

PARAMETER_LABELS = ("beta0", "beta1", "lambda", "alpha", "p0_x0", "p0_x1")

# stream tags: data draws, calibration pool, chain seeds
_DATA_TAG, _TAU_TAG, _CHAIN_TAG = 1, 2, 3

_TINY_POS = np.nextafter(0.0, 1.0)

# interval level reported throughout the study
LEVEL = 0.95


def _derived_seed(*key):
    ss = np.random.SeedSequence(key)
    return int.from_bytes(ss.generate_state(2).tobytes(), "little")


@dataclass(frozen=True)
class SimScenario:
    """Two-arm generating mechanism in the quantile parameterization.

    ``pc0``/``pc1`` are the target censoring proportions per arm; when
    omitted they default to the arm's cure mass plus 0.10 (x=0) or 0.05
    (x=1), the smallest sensible excess over the always-censored cured
    subjects.
    """

    alpha: float
    lam: float
    beta: tuple
    q: float
    pc0: float | None = None
    pc1: float | None = None
    n: int = 100
    seed: int = 0

    def __post_init__(self):
        if not (np.isfinite(self.alpha) and self.alpha <= ALPHA_DEFECTIVE_MAX):
            raise ScenarioError(f"alpha must be < 0, got {self.alpha}")
        if not (np.isfinite(self.lam) and self.lam > 0.0):
            raise ScenarioError(f"lam must be > 0, got {self.lam}")
        beta = tuple(float(b) for b in self.beta)
        if len(beta) != 2 or not all(np.isfinite(beta)):
            raise ScenarioError("beta must be the finite pair (beta0, beta1)")
        object.__setattr__(self, "beta", beta)
        if not (0.0 < self.q < 1.0):
            raise ScenarioError(f"q must lie in (0, 1), got {self.q}")
        if self.n < 1:
            raise ScenarioError(f"n must be >= 1, got {self.n}")
        for x in (0, 1):
            theta = self.theta(x)
            if not (np.isfinite(theta) and theta > 0.0):
                raise ScenarioError(f"quantile inversion degenerates at x={x}")
            if not (0.0 < self.p0(x) < 1.0):
                raise ScenarioError(f"cure fraction at x={x} must lie in (0, 1)")
        pc0 = self.p0(0) + 0.10 if self.pc0 is None else float(self.pc0)
        pc1 = self.p0(1) + 0.05 if self.pc1 is None else float(self.pc1)
        object.__setattr__(self, "pc0", pc0)
        object.__setattr__(self, "pc1", pc1)
        for x in (0, 1):
            if not (self.p0(x) < self.pc(x) < 1.0):
                raise ScenarioError(
                    f"censoring target at x={x} must lie in (p0, 1), "
                    f"got {self.pc(x)} with p0 = {self.p0(x):.4f}"
                )

    def mu(self, x):
        """Susceptible q-th quantile in arm x."""
        return float(np.exp(self.beta[0] + self.beta[1] * x))

    def theta(self, x):
        return float(theta_from_quantile(self.lam, self.alpha, self.mu(x), self.q))

    def p0(self, x):
        return float(cure_mass(self.lam, self.alpha, self.theta(x)))

    def pc(self, x):
        return self.pc0 if x == 0 else self.pc1

    def truth(self):
        """(beta0, beta1, lam, alpha, p0|x=0, p0|x=1) in report order."""
        return np.array(
            [self.beta[0], self.beta[1], self.lam, self.alpha, self.p0(0), self.p0(1)]
        )


@dataclass(frozen=True)
class LatentRecord:
    """Generation internals kept for validation: arm, cure status, the
    latent event and censoring times, and the calibrated horizons."""

    x: np.ndarray
    cured: np.ndarray
    w: np.ndarray
    c: np.ndarray
    tau0: float
    tau1: float


def calibrate_tau(scenario, x, pool_size=200_000, rng=None):
    """Censoring horizon tau_x with expected censoring equal to pc_x.

    The expected proportion p0 + (1 - p0) E[min(w, tau)]/tau decreases
    strictly from 1 to p0 as tau grows, so bisection against a large
    pre-simulated pool of susceptible times converges monotonically.
    """
    p0 = scenario.p0(x)
    pc = scenario.pc(x)
    if not pc > p0:
        raise ScenarioError(f"pc at x={x} must exceed the cure mass {p0:.4f}")
    if rng is None:
        rng = np.random.default_rng(np.random.SeedSequence((scenario.seed, _TAU_TAG, x)))
    u1 = np.maximum(rng.random(pool_size) * (1.0 - p0), _TINY_POS)
    pool = np.asarray(quantile(u1, scenario.lam, scenario.alpha, scenario.theta(x)))

    def censored_fraction(tau):
        return p0 + (1.0 - p0) * float(np.mean(np.minimum(pool, tau))) / tau

    lo = hi = 1.0
    for _ in range(200):
        if censored_fraction(hi) <= pc:
            break
        hi *= 2.0
    else:
        raise ScenarioError(f"no censoring horizon below target {pc} at x={x}")
    for _ in range(200):
        if censored_fraction(lo) > pc:
            break
        lo /= 2.0
    else:
        raise ScenarioError(f"no censoring horizon above target {pc} at x={x}")
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if censored_fraction(mid) > pc:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def generate_dataset(scenario, rng=None, taus=None):
    """One synthetic dataset plus its latent record.

    Draw order per call: arms, cure uniforms, susceptible levels,
    censoring uniforms; a fixed rng therefore reproduces the dataset
    exactly.  ``taus`` skips recalibration when horizons are known.
    """
    if rng is None:
        rng = np.random.default_rng(scenario.seed)
    if taus is None:
        taus = (calibrate_tau(scenario, 0), calibrate_tau(scenario, 1))
    n = scenario.n
    x = rng.integers(0, 2, size=n)
    p0 = np.where(x == 0, scenario.p0(0), scenario.p0(1))
    theta = np.where(x == 0, scenario.theta(0), scenario.theta(1))
    tau = np.where(x == 0, taus[0], taus[1])

    u = rng.random(n)
    cured = u < p0
    u1 = np.maximum(rng.random(n) * (1.0 - p0), _TINY_POS)
    w = np.full(n, np.inf)
    w[~cured] = np.asarray(
        quantile(u1[~cured], scenario.lam, scenario.alpha, theta[~cured])
    )
    c = np.maximum(rng.random(n) * tau, _TINY_POS)

    times = np.minimum(w, c)
    status = (w <= c).astype(int)
    data = SurvivalDataset(
        times=times,
        status=status,
        design=np.column_stack([np.ones(n), x.astype(float)]),
        columns=("intercept", "x1"),
    )
    latent = LatentRecord(
        x=x, cured=cured, w=w, c=c, tau0=float(taus[0]), tau1=float(taus[1])
    )
    return data, latent


@dataclass(frozen=True)
class ReplicateRecord:
    """Per-replicate posterior means and 95% intervals, in
    PARAMETER_LABELS order."""

    estimates: np.ndarray
    hpd: np.ndarray
    equal_tail: np.ndarray


@dataclass(frozen=True)
class StudySummary:
    """Aggregated study results for one (n, q) cell."""

    n: int
    q: float
    b_requested: int
    b_used: int
    n_failed: int
    parameters: tuple
    truth: np.ndarray
    mean_estimate: np.ndarray
    bias: np.ndarray
    mse: np.ndarray
    coverage_hpd: np.ndarray
    coverage_equal_tail: np.ndarray

    def __post_init__(self):
        for cov in (self.coverage_hpd, self.coverage_equal_tail):
            if np.any((cov < 0.0) | (cov > 1.0)):
                raise StudyError("coverage outside [0, 1]")
        if np.any(self.mse + 1e-9 < self.bias**2):
            raise StudyError("MSE below squared bias")


def _study_chain_config(chain, init, seed):
    if chain is None:
        return ChainConfig(
            iterations=20_000, burn_in=10_000, init=init, thin=10, seed=seed
        )
    return replace(chain, init=init, seed=seed)


def _run_replicate(args):
    """One replicate: generate, fit, summarize; None marks a failure."""
    scenario, n, index, taus, chain = args
    rng = np.random.default_rng(
        np.random.SeedSequence((scenario.seed, _DATA_TAG, n, index))
    )
    try:
        data, _ = generate_dataset(replace(scenario, n=n), rng=rng, taus=taus)
        target = PosteriorTarget(data, q=scenario.q)
        config = _study_chain_config(
            chain, target.initial_point(), _derived_seed(scenario.seed, _CHAIN_TAG, n, index)
        )
        sample = adaptive_metropolis(target, config)
    except QuantcureError as exc:
        log.warning("replicate %d at n=%d failed: %s", index, n, exc)
        return None
    if sample.diagnostics.stalled:
        log.warning("replicate %d at n=%d stalled", index, n)
        return None
    cure0 = cure_fraction_draws(sample, (1.0, 0.0), scenario.q)
    cure1 = cure_fraction_draws(sample, (1.0, 1.0), scenario.q)
    tracked = np.column_stack([sample.draws, cure0, cure1])
    intervals = [
        (hpd_interval(tracked[:, j], LEVEL), equal_tail_interval(tracked[:, j], LEVEL))
        for j in range(tracked.shape[1])
    ]
    return ReplicateRecord(
        estimates=tracked.mean(axis=0),
        hpd=np.array([(h.lower, h.upper) for h, _ in intervals]),
        equal_tail=np.array([(e.lower, e.upper) for _, e in intervals]),
    )


def summarize_replicates(records, truth, n, q, b_requested, n_failed=0):
    """Reduce replicate records to bias, MSE and coverage per parameter."""
    if not records:
        raise StudyError("no successful replicates to summarize")
    truth = np.asarray(truth, dtype=float)
    estimates = np.array([r.estimates for r in records])
    inside_hpd = np.array(
        [(r.hpd[:, 0] <= truth) & (truth <= r.hpd[:, 1]) for r in records]
    )
    inside_eq = np.array(
        [(r.equal_tail[:, 0] <= truth) & (truth <= r.equal_tail[:, 1]) for r in records]
    )
    return StudySummary(
        n=int(n),
        q=float(q),
        b_requested=int(b_requested),
        b_used=len(records),
        n_failed=int(n_failed),
        parameters=PARAMETER_LABELS,
        truth=truth,
        mean_estimate=estimates.mean(axis=0),
        bias=estimates.mean(axis=0) - truth,
        mse=np.mean((estimates - truth) ** 2, axis=0),
        coverage_hpd=inside_hpd.mean(axis=0),
        coverage_equal_tail=inside_eq.mean(axis=0),
    )


def run_study(scenario, replicates, sample_sizes, chain=None, workers=None):
    """Monte Carlo study over the requested sample sizes.

    Returns one StudySummary per n, in the given order.  A replicate
    whose chain stalls (or whose data cannot be fit) is dropped; the
    study aborts when failures reach 5% of the replicates.
    """
    if replicates < 2:
        raise StudyError(f"need at least 2 replicates, got {replicates}")
    sample_sizes = tuple(int(v) for v in sample_sizes)
    if not sample_sizes or any(v < 2 for v in sample_sizes):
        raise ScenarioError("sample sizes must all be >= 2")
    taus = (calibrate_tau(scenario, 0), calibrate_tau(scenario, 1))
    truth = scenario.truth()
    summaries = []
    for n in sample_sizes:
        jobs = [(scenario, n, b, taus, chain) for b in range(replicates)]
        results = parallel_map(_run_replicate, jobs, workers=workers)
        records = [r for r in results if r is not None]
        n_failed = replicates - len(records)
        if n_failed > 0 and n_failed / replicates >= 0.05:
            raise StudyError(
                f"{n_failed} of {replicates} replicates failed at n={n}"
            )
        summaries.append(
            summarize_replicates(
                records, truth, n=n, q=scenario.q, b_requested=replicates, n_failed=n_failed
            )
        )
    return summaries
