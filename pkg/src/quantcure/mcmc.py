"""Adaptive random-walk Metropolis sampler and posterior summaries.

The sampler follows the Haario adaptation scheme: a spherical proposal
covariance (proposal_scale**2/d) I until ``adaptation_start`` iterations,
then the empirical covariance of the chain history scaled by 2.38**2/d
plus a small diagonal jitter.  Sampling happens directly in the
constrained space [beta..., lam, alpha]; out-of-support proposals carry
-inf target density and are rejected, so the chain never leaves the
support.  Summaries cover posterior means, HPD and equal-tail credible
intervals, Geyer initial-positive-sequence effective sample sizes and
split-chain scale reduction.

Everything here is target-agnostic: ``target`` is any callable mapping a
1-d state to a log density.  Model-specific transforms live in the fit
layer.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ChainConfigError, ParameterDomainError

__all__ = [
    "ChainConfig",
    "ChainDiagnostics",
    "PosteriorSample",
    "CredibleInterval",
    "IntervalKind",
    "adaptive_metropolis",
    "run_chains",
    "posterior_mean",
    "hpd_interval",
    "equal_tail_interval",
    "effective_sample_size",
    "split_rhat",
]

log = logging.getLogger(__name__)

_NEG_INF = float("-inf")

# iterations inspected for the stall warning
STALL_WINDOW = 1000

# split-chain scale reduction above this marks non-convergence
RHAT_FLAG = 1.1


@dataclass(frozen=True)
class ChainConfig:
    """Single-chain run settings.

    ``init`` is a packed state vector (for the survival model the layout
    [beta..., lam, alpha]); the retained sample size M = (iterations -
    burn_in) // thin must be at least 100.
    """

    iterations: int
    burn_in: int
    init: np.ndarray
    thin: int = 1
    seed: int = 0
    adaptation_start: int = 1000
    proposal_scale: float = 0.1
    jitter: float = 1e-10

    def __post_init__(self):
        init = np.atleast_1d(np.asarray(self.init, dtype=float)).copy()
        if init.ndim != 1 or not np.all(np.isfinite(init)):
            raise ChainConfigError("init must be a finite 1-d state vector")
        init.setflags(write=False)
        object.__setattr__(self, "init", init)
        if self.burn_in < 0 or self.iterations <= self.burn_in:
            raise ChainConfigError(
                f"need iterations > burn_in >= 0, got {self.iterations}, {self.burn_in}"
            )
        if self.thin < 1:
            raise ChainConfigError(f"thin must be >= 1, got {self.thin}")
        if self.n_draws < 100:
            raise ChainConfigError(
                f"(iterations - burn_in)//thin = {self.n_draws}, need at least 100 draws"
            )
        if self.adaptation_start < 1:
            raise ChainConfigError("adaptation_start must be >= 1")
        if not (np.isfinite(self.proposal_scale) and self.proposal_scale > 0.0):
            raise ChainConfigError("proposal_scale must be > 0")
        if not (np.isfinite(self.jitter) and self.jitter > 0.0):
            raise ChainConfigError("jitter must be > 0")

    @property
    def dim(self):
        return self.init.size

    @property
    def n_draws(self):
        return (self.iterations - self.burn_in) // self.thin


@dataclass(frozen=True)
class ChainDiagnostics:
    """Per-coordinate convergence summaries for a (pooled) sample."""

    ess: np.ndarray
    rhat: np.ndarray
    stalled: bool

    @property
    def rhat_flagged(self):
        if self.rhat is None:
            return False
        return bool(np.any(np.asarray(self.rhat) > RHAT_FLAG))


@dataclass(frozen=True)
class PosteriorSample:
    """Retained draws (M x d, chain-major when pooled) plus diagnostics."""

    draws: np.ndarray
    acceptance_rate: float
    diagnostics: ChainDiagnostics
    n_chains: int = 1

    @property
    def n_draws(self):
        return self.draws.shape[0]

    @property
    def dim(self):
        return self.draws.shape[1]


class IntervalKind(enum.Enum):
    HPD = "hpd"
    EQUAL_TAIL = "equal_tail"


@dataclass(frozen=True)
class CredibleInterval:
    lower: float
    upper: float
    level: float
    kind: IntervalKind

    def __post_init__(self):
        if not (0.0 < self.level < 1.0):
            raise ParameterDomainError(f"level must lie in (0, 1), got {self.level}")
        if not self.lower <= self.upper:
            raise ParameterDomainError("interval endpoints out of order")

    @property
    def width(self):
        return self.upper - self.lower


def _run_chain(target, config):
    """Raw Haario chain: returns (kept draws, acceptance rate, stalled)."""
    d = config.dim
    rng = np.random.default_rng(config.seed)
    current = np.array(config.init, dtype=float)
    current_lp = float(target(current))
    if not math.isfinite(current_lp):
        raise ChainConfigError(f"target is not finite at init ({current_lp})")

    # running mean / scatter over the full state history (Welford)
    count = 1
    mean = current.copy()
    m2 = np.zeros((d, d))

    spherical_sd = config.proposal_scale / math.sqrt(d)
    adapt_scale = 2.38**2 / d
    eye = np.eye(d)

    kept = np.empty((config.n_draws, d))
    k = 0
    accepted = 0
    early_accepted = 0
    stall_window = min(STALL_WINDOW, config.iterations)

    for i in range(1, config.iterations + 1):
        if i <= config.adaptation_start:
            proposal = current + spherical_sd * rng.standard_normal(d)
        else:
            cov = adapt_scale / (count - 1) * m2 + config.jitter * eye
            proposal = current + np.linalg.cholesky(cov) @ rng.standard_normal(d)
        proposal_lp = float(target(proposal))
        if math.isnan(proposal_lp):
            proposal_lp = _NEG_INF
        if math.log(rng.random()) < proposal_lp - current_lp:
            current = proposal
            current_lp = proposal_lp
            accepted += 1
            if i <= stall_window:
                early_accepted += 1
        count += 1
        delta = current - mean
        mean += delta / count
        m2 += np.outer(delta, current - mean)
        if i > config.burn_in and (i - config.burn_in) % config.thin == 0:
            kept[k] = current
            k += 1

    stalled = early_accepted == 0
    if stalled:
        log.warning("no accepted moves in the first %d iterations", stall_window)
    return kept, accepted / config.iterations, stalled


def _diagnose(chains, stalled):
    """ESS summed over chains, split-chain rhat, per coordinate."""
    d = chains[0].shape[1]
    ess = np.array(
        [sum(effective_sample_size(c[:, j]) for c in chains) for j in range(d)]
    )
    rhat = np.array([split_rhat([c[:, j] for c in chains]) for j in range(d)])
    diag = ChainDiagnostics(ess=ess, rhat=rhat, stalled=stalled)
    if diag.rhat_flagged:
        log.warning("split-chain scale reduction above %.2f: %s", RHAT_FLAG, rhat)
    return diag


def adaptive_metropolis(target, config):
    """Run one adaptive Metropolis chain; deterministic given config.seed.

    Raises ChainConfigError when the target is not finite at
    ``config.init``.  A chain with zero accepted moves in the first 1,000
    iterations is returned with ``diagnostics.stalled`` set.
    """
    kept, rate, stalled = _run_chain(target, config)
    return PosteriorSample(
        draws=kept,
        acceptance_rate=rate,
        diagnostics=_diagnose([kept], stalled),
        n_chains=1,
    )


def _spawned_config(config, index):
    """Deterministic per-chain seed and a jittered finite-target init."""
    ss = np.random.SeedSequence((config.seed, index))
    child_seed = int.from_bytes(ss.generate_state(2).tobytes(), "little")
    return child_seed, np.random.default_rng(ss.spawn(1)[0])


def run_chains(target, config, n_chains=1):
    """Pool ``n_chains`` adaptive Metropolis chains (chain-major order).

    Chain 0 reproduces ``adaptive_metropolis(target, config)`` exactly;
    the others use seeds and jittered starting points derived from
    (config.seed, chain index), retrying the jitter until the target is
    finite.  Convergence is reported through split-chain scale reduction
    computed across all chains.
    """
    if n_chains < 1:
        raise ChainConfigError(f"n_chains must be >= 1, got {n_chains}")
    if n_chains == 1:
        return adaptive_metropolis(target, config)

    chains = []
    rates = []
    any_stalled = False
    for k in range(n_chains):
        if k == 0:
            chain_config = config
        else:
            child_seed, jitter_rng = _spawned_config(config, k)
            init = None
            for _ in range(100):
                candidate = config.init + config.proposal_scale * jitter_rng.standard_normal(
                    config.dim
                )
                if math.isfinite(float(target(candidate))):
                    init = candidate
                    break
            if init is None:
                raise ChainConfigError(
                    f"no finite-target jittered start found for chain {k}"
                )
            chain_config = replace(config, seed=child_seed, init=init)
        kept, rate, stalled = _run_chain(target, chain_config)
        chains.append(kept)
        rates.append(rate)
        any_stalled = any_stalled or stalled

    return PosteriorSample(
        draws=np.vstack(chains),
        acceptance_rate=float(np.mean(rates)),
        diagnostics=_diagnose(chains, any_stalled),
        n_chains=n_chains,
    )


def posterior_mean(sample):
    """Coordinate-wise mean of the retained draws."""
    draws = sample.draws if isinstance(sample, PosteriorSample) else np.asarray(sample)
    return draws.mean(axis=0)


def _check_draws(draws, level, minimum):
    draws = np.asarray(draws, dtype=float).ravel()
    if draws.size < minimum:
        raise ParameterDomainError(f"need at least {minimum} draws, got {draws.size}")
    if not (0.0 < level < 1.0):
        raise ParameterDomainError(f"level must lie in (0, 1), got {level}")
    return draws


def hpd_interval(draws, level=0.95):
    """Shortest contiguous window containing ceil(level * M) sorted draws.

    Ties between equally short windows resolve to the smallest lower
    endpoint.
    """
    draws = _check_draws(draws, level, 20)
    m = draws.size
    need = min(m, math.ceil(level * m))
    s = np.sort(draws)
    widths = s[need - 1 :] - s[: m - need + 1]
    i = int(np.argmin(widths))
    return CredibleInterval(float(s[i]), float(s[i + need - 1]), level, IntervalKind.HPD)


def equal_tail_interval(draws, level=0.95):
    """Empirical quantiles at (1 - level)/2 and 1 - (1 - level)/2."""
    draws = _check_draws(draws, level, 20)
    tail = (1.0 - level) / 2.0
    lo, hi = np.quantile(draws, [tail, 1.0 - tail])
    return CredibleInterval(float(lo), float(hi), level, IntervalKind.EQUAL_TAIL)


def effective_sample_size(x):
    """Geyer initial-positive-sequence ESS for one scalar chain.

    Autocorrelations are paired (rho_2k + rho_2k+1) and summed until the
    first nonpositive pair.  A constant chain counts as one effective
    draw; the estimate is capped at the chain length.
    """
    x = np.asarray(x, dtype=float).ravel()
    m = x.size
    if m < 4:
        return float(m)
    centered = x - x.mean()
    nfft = 1 << (2 * m - 1).bit_length()
    f = np.fft.rfft(centered, n=nfft)
    acov = np.fft.irfft(f * np.conj(f))[:m].real / m
    if acov[0] <= 0.0:
        return 1.0
    rho = acov / acov[0]
    tau = 0.0
    for k in range(m // 2):
        pair = rho[2 * k] + rho[2 * k + 1]
        if pair <= 0.0:
            break
        tau += pair
    tau = 2.0 * tau - 1.0
    if tau <= 0.0:
        return float(m)
    return float(min(m, m / tau))


def split_rhat(chains):
    """Split-chain scale reduction over one or more equal-length chains.

    Each chain is halved (middle element dropped when odd), then the
    usual between/within variance ratio is evaluated across all halves.
    Degenerate all-constant input returns 1.0.
    """
    halves = []
    for c in chains:
        c = np.asarray(c, dtype=float).ravel()
        half = c.size // 2
        if half < 2:
            raise ParameterDomainError("each chain must hold at least 4 draws")
        halves.append(c[:half])
        halves.append(c[c.size - half :])
    a = np.array(halves)
    length = a.shape[1]
    means = a.mean(axis=1)
    within = float(np.mean(a.var(axis=1, ddof=1)))
    between = length * float(np.var(means, ddof=1))
    if within == 0.0:
        return 1.0 if between == 0.0 else math.inf
    var_plus = (length - 1) / length * within + between / length
    return math.sqrt(var_plus / within)
