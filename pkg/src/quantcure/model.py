"""Regression layer: links, censored-data likelihood, priors, posterior.

A log link ties each subject's covariate row to the susceptible q-th
quantile (``LinkMode.QUANTILE``, mu_i = exp(x_i' beta)) or, for the
comparison model without the quantile transformation, directly to the
shape (``LinkMode.THETA``, theta_i = exp(x_i' beta)).  The likelihood
sums log pdf over observed events and log survival over censored
subjects.  Priors are independent: beta_j ~ N(0, 100), lam ~ Gamma with
mean 1 and variance 100 (shape 0.01, rate 0.01) and alpha ~ N(-0.1, 100)
truncated to (-inf, 0), normalizing constant included.

Support violations (lam <= 0, alpha at or above the defective guard)
yield -inf rather than an exception so a Metropolis sampler rejects the
move; only structurally broken inputs raise.  NaN produced by numerical
breakdown is replaced by -inf and counted on ``nan_rejections``.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DataLoadError, ParameterDomainError
from .gompertz import ALPHA_DEFECTIVE_MAX, logpdf, logsf, theta_from_quantile

__all__ = [
    "SurvivalDataset",
    "ParameterVector",
    "PriorSpec",
    "LinkMode",
    "PosteriorTarget",
    "linear_predictor",
    "log_likelihood",
    "log_prior",
    "log_posterior",
    "nan_rejections",
]

log = logging.getLogger(__name__)

_NEG_INF = float("-inf")
_LOG_2PI = math.log(2.0 * math.pi)

# exp overflows float64 near 709.78; reject with margin
ETA_MAX = 700.0


class _RejectionCounter:
    """Counts evaluations where NaN was replaced by -inf."""

    __slots__ = ("count",)

    def __init__(self):
        self.count = 0

    def bump(self, n=1):
        self.count += int(n)
        log.debug("replaced %d NaN likelihood value(s) with -inf", n)

    def reset(self):
        self.count = 0


nan_rejections = _RejectionCounter()


class LinkMode(enum.Enum):
    """Scale targeted by the log link exp(x' beta)."""

    QUANTILE = "quantile"
    THETA = "theta"


def _readonly(a):
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class SurvivalDataset:
    """Right-censored sample with a full-rank design matrix.

    ``times`` holds t_i = min(T_i, C_i) > 0, ``status`` the event flags
    delta_i (1 = observed, 0 = censored) and ``design`` the n x (p+1)
    matrix whose first column is the intercept.  Arrays are normalized
    to float64/int64 and frozen; instances are safe to share across
    chains and worker processes.
    """

    times: np.ndarray
    status: np.ndarray
    design: np.ndarray
    columns: tuple = ()

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        status = np.asarray(self.status)
        design = np.atleast_2d(np.asarray(self.design, dtype=float))
        if times.ndim != 1 or times.size == 0:
            raise DataLoadError("times must be a non-empty 1-d array")
        if not np.all(np.isfinite(times)) or not np.all(times > 0.0):
            raise DataLoadError("all observed times must be finite and > 0")
        if status.shape != times.shape:
            raise DataLoadError("status must match times in length")
        if not np.all(np.isin(status, (0, 1))):
            raise DataLoadError("status flags must be 0 (censored) or 1 (event)")
        if design.shape[0] != times.size:
            raise DataLoadError("design must have one row per subject")
        if not np.all(np.isfinite(design)):
            raise DataLoadError("design matrix contains non-finite entries")
        if not np.all(design[:, 0] == 1.0):
            raise DataLoadError("first design column must be the intercept (all ones)")
        if np.linalg.matrix_rank(design) < design.shape[1]:
            raise DataLoadError("design matrix is rank deficient")
        columns = tuple(self.columns) or ("intercept",) + tuple(
            f"x{j}" for j in range(1, design.shape[1])
        )
        if len(columns) != design.shape[1]:
            raise DataLoadError("column names must match the design width")
        object.__setattr__(self, "times", _readonly(times))
        object.__setattr__(self, "status", _readonly(status.astype(np.int64)))
        object.__setattr__(self, "design", _readonly(design))
        object.__setattr__(self, "columns", columns)

    @property
    def n(self):
        return self.times.size

    @property
    def n_events(self):
        return int(np.sum(self.status))


@dataclass(frozen=True)
class ParameterVector:
    """Coefficients plus distribution scales at a fixed quantile level q.

    Construction checks structure only (shapes, finiteness, q in (0,1)).
    ``lam`` and ``alpha`` may sit outside their supports so proposal
    states remain representable; evaluations return -inf there.
    """

    beta: np.ndarray
    lam: float
    alpha: float
    q: float

    def __post_init__(self):
        beta = np.atleast_1d(np.asarray(self.beta, dtype=float))
        if beta.ndim != 1 or not np.all(np.isfinite(beta)):
            raise ParameterDomainError("beta must be a finite 1-d coefficient vector")
        if not (np.isfinite(self.lam) and np.isfinite(self.alpha)):
            raise ParameterDomainError("lam and alpha must be finite")
        if not (0.0 < self.q < 1.0):
            raise ParameterDomainError(f"q must lie in (0, 1), got {self.q}")
        object.__setattr__(self, "beta", _readonly(beta))
        object.__setattr__(self, "lam", float(self.lam))
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "q", float(self.q))

    @property
    def in_support(self):
        return self.lam > 0.0 and self.alpha <= ALPHA_DEFECTIVE_MAX

    def pack(self):
        """Sampler layout [beta_0 ... beta_p, lam, alpha]."""
        return np.concatenate([self.beta, (self.lam, self.alpha)])

    @classmethod
    def unpack(cls, vec, q):
        vec = np.asarray(vec, dtype=float)
        return cls(beta=vec[:-2], lam=float(vec[-2]), alpha=float(vec[-1]), q=q)


def _positive(value, name):
    if not (np.isfinite(value) and value > 0.0):
        raise ParameterDomainError(f"{name} must be finite and > 0, got {value}")
    return float(value)


@dataclass(frozen=True)
class PriorSpec:
    """Independent priors with the variance-100 defaults.

    alpha ~ N(alpha_mean, alpha_sd**2) truncated to (-inf, 0), lam ~
    Gamma(lambda_shape, rate=lambda_rate), beta_j iid N(0, beta_sd**2).
    """

    alpha_mean: float = -0.1
    alpha_sd: float = 10.0
    lambda_shape: float = 0.01
    lambda_rate: float = 0.01
    beta_sd: float = 10.0

    def __post_init__(self):
        _positive(self.alpha_sd, "alpha_sd")
        _positive(self.lambda_shape, "lambda_shape")
        _positive(self.lambda_rate, "lambda_rate")
        _positive(self.beta_sd, "beta_sd")
        if not np.isfinite(self.alpha_mean):
            raise ParameterDomainError("alpha_mean must be finite")

    @property
    def log_alpha_truncation(self):
        """log P(N(mean, sd**2) < 0), the truncation constant."""
        z = (0.0 - self.alpha_mean) / self.alpha_sd
        return math.log(0.5 * math.erfc(-z / math.sqrt(2.0)))


def linear_predictor(beta, x):
    """exp(x' beta) row by row; the link scale (mu or theta).

    ``x`` may be a single covariate row (returns a float) or a design
    matrix (returns an array).  Raises ParameterDomainError naming the
    first offending row when x' beta would overflow exp.
    """
    beta = np.atleast_1d(np.asarray(beta, dtype=float))
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    rows = np.atleast_2d(x)
    if rows.shape[1] != beta.size:
        raise ParameterDomainError(
            f"covariate row has {rows.shape[1]} entries, beta has {beta.size}"
        )
    eta = rows @ beta
    over = eta > ETA_MAX
    if np.any(over):
        i = int(np.argmax(over))
        raise ParameterDomainError(
            f"linear predictor overflows exp at row {i} (x'beta = {eta[i]:.6g})"
        )
    out = np.exp(eta)
    return float(out[0]) if single else out


def _split(vec):
    vec = np.asarray(vec, dtype=float)
    if vec.ndim != 1 or vec.size < 3:
        raise ParameterDomainError("parameter vector must be 1-d [beta..., lam, alpha]")
    return vec[:-2], float(vec[-2]), float(vec[-1])


def _log_likelihood_packed(vec, q, data, mode):
    beta, lam, alpha = _split(vec)
    if beta.size != data.design.shape[1]:
        raise ParameterDomainError(
            f"beta has {beta.size} entries, design has {data.design.shape[1]} columns"
        )
    if not np.all(np.isfinite(beta)) or not np.isfinite(lam) or not np.isfinite(alpha):
        return _NEG_INF
    if lam <= 0.0 or alpha > ALPHA_DEFECTIVE_MAX:
        return _NEG_INF
    eta = data.design @ beta
    if np.any(eta > ETA_MAX):
        return _NEG_INF
    scale = np.exp(eta)
    if mode is LinkMode.THETA:
        theta = scale
    else:
        theta = np.asarray(theta_from_quantile(lam, alpha, scale, q))
        bad = ~np.isfinite(theta)
        if np.any(bad):
            nan_rejections.bump(np.count_nonzero(bad))
            return _NEG_INF
    if np.any(theta <= 0.0):
        return _NEG_INF
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(
            data.status == 1,
            np.asarray(logpdf(data.times, lam, alpha, theta)),
            np.asarray(logsf(data.times, lam, alpha, theta)),
        )
    total = float(np.sum(terms))
    if math.isnan(total):
        nan_rejections.bump()
        return _NEG_INF
    return total


def _log_prior_packed(vec, priors):
    beta, lam, alpha = _split(vec)
    if not np.all(np.isfinite(beta)):
        return _NEG_INF
    if not (lam > 0.0 and alpha < 0.0 and np.isfinite(lam) and np.isfinite(alpha)):
        return _NEG_INF
    out = float(
        np.sum(-0.5 * (beta / priors.beta_sd) ** 2)
        - beta.size * (math.log(priors.beta_sd) + 0.5 * _LOG_2PI)
    )
    out += (
        priors.lambda_shape * math.log(priors.lambda_rate)
        - math.lgamma(priors.lambda_shape)
        + (priors.lambda_shape - 1.0) * math.log(lam)
        - priors.lambda_rate * lam
    )
    z = (alpha - priors.alpha_mean) / priors.alpha_sd
    out += (
        -0.5 * z * z
        - math.log(priors.alpha_sd)
        - 0.5 * _LOG_2PI
        - priors.log_alpha_truncation
    )
    return out


def log_likelihood(params, data, mode=LinkMode.QUANTILE):
    """Censored-data log-likelihood sum(delta*log f + (1-delta)*log S).

    Returns -inf (never raises) off the parameter support so that a
    Metropolis chain auto-rejects.
    """
    return _log_likelihood_packed(params.pack(), params.q, data, mode)


def log_prior(params, priors=PriorSpec()):
    """Joint log prior density; -inf outside the support."""
    return _log_prior_packed(params.pack(), priors)


def log_posterior(params, data, priors=PriorSpec(), mode=LinkMode.QUANTILE):
    """Unnormalized log posterior; an off-support prior short-circuits."""
    lp = log_prior(params, priors)
    if lp == _NEG_INF:
        return _NEG_INF
    return lp + log_likelihood(params, data, mode)


@dataclass(frozen=True)
class PosteriorTarget:
    """Picklable log-posterior callable over packed parameter vectors.

    Bundles a dataset with a quantile level, link mode and priors so a
    sampler (possibly in a worker process) can evaluate states shaped
    [beta_0 ... beta_p, lam, alpha].
    """

    data: SurvivalDataset
    q: float
    mode: LinkMode = LinkMode.QUANTILE
    priors: PriorSpec = field(default_factory=PriorSpec)

    def __post_init__(self):
        if not (0.0 < self.q < 1.0):
            raise ParameterDomainError(f"q must lie in (0, 1), got {self.q}")

    @property
    def dim(self):
        return self.data.design.shape[1] + 2

    @property
    def parameter_names(self):
        return tuple(f"beta{j}" for j in range(self.data.design.shape[1])) + ("lambda", "alpha")

    def initial_point(self):
        """Prior-center start: beta = 0, lam = 1, alpha = -0.1."""
        out = np.zeros(self.dim)
        out[-2] = 1.0
        out[-1] = -0.1
        return out

    def __call__(self, vec):
        lp = _log_prior_packed(vec, self.priors)
        if lp == _NEG_INF:
            return _NEG_INF
        return lp + _log_likelihood_packed(vec, self.q, self.data, self.mode)
