"""Generalized Gompertz distribution, its defective variant and the quantile
reparameterization.

The generalized Gompertz law with scale ``lam`` > 0, scale-like ``alpha`` and
shape ``theta`` > 0 has cumulative distribution

    F(t) = (1 - exp(-G(t)))**theta,          G(t) = (lam/alpha)*(exp(alpha*t) - 1),

where ``G`` is the cumulative hazard of the underlying Gompertz.  For
``alpha < 0`` the distribution is defective: ``G`` saturates at ``-lam/alpha``
and a mass ``p0 = 1 - (1 - exp(lam/alpha))**theta`` survives forever (the cure
fraction).  The susceptible sub-population then has the proper survival
function ``S1 = (S - p0)/(1 - p0)``, whose q-th quantile ``mu`` admits a
closed form, and conversely ``theta`` can be recovered from ``(lam, alpha,
mu, q)``.  That inversion is the single source of truth for the
quantile-parameterized family (`DGGQuantileParams`).

All evaluations run in log space with ``log1p``/``expm1`` primitives; shapes
produced by the quantile inversion routinely exceed 1e2, where direct powers
underflow.  Module-level functions broadcast over their arguments like numpy
ufuncs; the dataclasses wrap them with scalar validation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import HazardOverflowError, ParameterDomainError, PrecisionLossError

__all__ = [
    "GGParams",
    "DGGQuantileParams",
    "CureFraction",
    "log1mexp",
    "gompertz_cumhazard",
    "logpdf",
    "logsf",
    "logcdf",
    "quantile",
    "log_proper_mass",
    "cure_mass",
    "susceptible_sf",
    "susceptible_quantile",
    "theta_from_quantile",
]

_LN2 = math.log(2.0)

# strictly-negative guard for defective operations; the quantile inversion
# divides by alpha and degenerates long before alpha reaches zero
ALPHA_DEFECTIVE_MAX = -1e-10

# survival values below this are clamped to zero (hazard reports overflow)
SF_UNDERFLOW = 1e-300
_LOG_SF_UNDERFLOW = math.log(SF_UNDERFLOW)


def _maybe_scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def log1mexp(x):
    """log(1 - exp(x)) for x <= 0, switching branches at -log 2."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(x > -_LN2, np.log(-np.expm1(x)), np.log1p(-np.exp(x)))
    return _maybe_scalar(out)


def gompertz_cumhazard(t, lam, alpha):
    """Cumulative hazard (lam/alpha)*(exp(alpha*t) - 1) with its alpha -> 0 limit."""
    t = np.asarray(t, dtype=float)
    lam = np.asarray(lam, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(alpha == 0.0, lam * t, lam / alpha * np.expm1(alpha * t))
    return _maybe_scalar(out)


def logcdf(t, lam, alpha, theta):
    g = gompertz_cumhazard(t, lam, alpha)
    return _maybe_scalar(np.asarray(theta, dtype=float) * log1mexp(-np.asarray(g)))


def logsf(t, lam, alpha, theta):
    """log survival; exact 0 at t = 0 by construction of log1mexp."""
    return log1mexp(logcdf(t, lam, alpha, theta))


def logpdf(t, lam, alpha, theta):
    t = np.asarray(t, dtype=float)
    lam = np.asarray(lam, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    theta = np.asarray(theta, dtype=float)
    g = np.asarray(gompertz_cumhazard(t, lam, alpha))
    lg = np.asarray(log1mexp(-g))
    with np.errstate(invalid="ignore"):
        # the (theta-1) factor must vanish exactly at theta = 1 even when
        # lg = -inf (t -> 0), where 0 * inf would otherwise poison the sum
        tail = np.where(theta == 1.0, 0.0, (theta - 1.0) * lg)
    out = np.log(lam) + np.log(theta) + alpha * t - g + tail
    return _maybe_scalar(out)


def log_proper_mass(lam, alpha, theta):
    """log(1 - p0): log of the event mass of a defective law (alpha < 0)."""
    lam = np.asarray(lam, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    return _maybe_scalar(np.asarray(theta, dtype=float) * log1mexp(lam / alpha))


def cure_mass(lam, alpha, theta):
    """Cure fraction p0 = 1 - (1 - exp(lam/alpha))**theta for alpha < 0."""
    return _maybe_scalar(-np.expm1(np.asarray(log_proper_mass(lam, alpha, theta))))


def quantile(p, lam, alpha, theta):
    """Inverse CDF.  For alpha < 0 only p < 1 - p0 is attainable (NaN outside)."""
    p = np.asarray(p, dtype=float)
    lam = np.asarray(lam, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    theta = np.asarray(theta, dtype=float)
    inner = np.asarray(log1mexp(np.log(p) / theta))  # log(1 - p**(1/theta))
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(
            alpha == 0.0,
            -inner / lam,
            np.log1p(-(alpha / lam) * inner) / alpha,
        )
    return _maybe_scalar(out)


def susceptible_sf(t, lam, alpha, theta):
    """Proper survival of the susceptible sub-population, (S - p0)/(1 - p0)."""
    lg = np.asarray(log1mexp(-np.asarray(gompertz_cumhazard(t, lam, alpha))))
    ref = np.asarray(log1mexp(np.asarray(lam, dtype=float) / np.asarray(alpha, dtype=float)))
    return _maybe_scalar(-np.expm1(np.asarray(theta, dtype=float) * (lg - ref)))


def susceptible_quantile(q, lam, alpha, theta):
    """q-th quantile of the susceptible sub-population (alpha < 0)."""
    q = np.asarray(q, dtype=float)
    lam = np.asarray(lam, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    theta = np.asarray(theta, dtype=float)
    # log of q**(1/theta) * (1 - exp(lam/alpha)), then the e^{alpha*mu} form
    log_a = np.log(q) / theta + np.asarray(log1mexp(lam / alpha))
    inner = np.asarray(log1mexp(log_a))
    return _maybe_scalar(np.log1p(-(alpha / lam) * inner) / alpha)


def theta_from_quantile(lam, alpha, mu, q):
    """Shape implied by the susceptible q-th quantile mu (alpha < 0).

    Returns NaN where the two log terms in the denominator coincide
    numerically (mu far into the plateau of the defective CDF); the
    dataclass wrappers raise :class:`PrecisionLossError` there.
    """
    lam = np.asarray(lam, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    mu = np.asarray(mu, dtype=float)
    q = np.asarray(q, dtype=float)
    g_mu = np.asarray(gompertz_cumhazard(mu, lam, alpha))
    denom = np.asarray(log1mexp(lam / alpha)) - np.asarray(log1mexp(-g_mu))
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(denom > 0.0, -np.log(q) / np.where(denom > 0.0, denom, 1.0), np.nan)
    return _maybe_scalar(out)


def _require(cond, message):
    if not cond:
        raise ParameterDomainError(message)


@dataclass(frozen=True)
class CureFraction:
    """Long-term survivor mass in [0, 1]."""

    p0: float

    def __post_init__(self):
        _require(0.0 <= self.p0 <= 1.0, f"cure fraction must lie in [0, 1], got {self.p0}")


@dataclass(frozen=True)
class GGParams:
    """Generalized Gompertz parameters (lam > 0, theta > 0, any real alpha).

    ``alpha < 0`` makes the law defective; the susceptible-population
    methods require that and refuse ``alpha`` within ``1e-10`` of zero.
    """

    lam: float
    alpha: float
    theta: float

    def __post_init__(self):
        _require(np.isfinite(self.lam) and self.lam > 0.0, f"lam must be > 0, got {self.lam}")
        _require(np.isfinite(self.theta) and self.theta > 0.0, f"theta must be > 0, got {self.theta}")
        _require(np.isfinite(self.alpha), f"alpha must be finite, got {self.alpha}")

    @property
    def is_defective(self):
        return self.alpha < 0.0

    def _require_defective(self):
        _require(
            self.alpha <= ALPHA_DEFECTIVE_MAX,
            f"operation requires alpha < 0 (at most {ALPHA_DEFECTIVE_MAX}), got {self.alpha}",
        )

    def logpdf(self, t):
        _require(np.all(np.asarray(t) > 0), "density requires t > 0")
        return logpdf(t, self.lam, self.alpha, self.theta)

    def pdf(self, t):
        out = np.exp(self.logpdf(t))
        return _maybe_scalar(out)

    def logsf(self, t):
        _require(np.all(np.asarray(t) >= 0), "survival requires t >= 0")
        return logsf(t, self.lam, self.alpha, self.theta)

    def sf(self, t):
        """Survival function; values below 1e-300 clamp to exactly 0."""
        out = np.exp(self.logsf(t))
        out = np.where(np.asarray(out) < SF_UNDERFLOW, 0.0, out)
        return _maybe_scalar(out)

    def cdf(self, t):
        _require(np.all(np.asarray(t) >= 0), "CDF requires t >= 0")
        return _maybe_scalar(np.exp(logcdf(t, self.lam, self.alpha, self.theta)))

    def hazard(self, t):
        _require(np.all(np.asarray(t) > 0), "hazard requires t > 0")
        lsf = np.asarray(logsf(t, self.lam, self.alpha, self.theta))
        if np.any(lsf < _LOG_SF_UNDERFLOW):
            raise HazardOverflowError(
                "survival underflowed below 1e-300; hazard is not representable"
            )
        out = np.exp(np.asarray(logpdf(t, self.lam, self.alpha, self.theta)) - lsf)
        return _maybe_scalar(out)

    def quantile(self, p):
        p = np.asarray(p, dtype=float)
        _require(np.all((p > 0) & (p < 1)), "quantile requires p in (0, 1)")
        if self.alpha < 0:
            p_max = math.exp(log_proper_mass(self.lam, self.alpha, self.theta))
            if np.any(p >= p_max):
                raise ParameterDomainError(
                    f"quantile level exceeds the event mass of a defective law; "
                    f"the maximum attainable p is 1 - p0 = {p_max:.12g}"
                )
        return quantile(p, self.lam, self.alpha, self.theta)

    def cure_fraction(self):
        self._require_defective()
        return CureFraction(float(cure_mass(self.lam, self.alpha, self.theta)))

    def susceptible_sf(self, t):
        self._require_defective()
        _require(np.all(np.asarray(t) >= 0), "survival requires t >= 0")
        # degenerate all-cured law: even the log of the event mass is -inf
        if not np.isfinite(log1mexp(self.lam / self.alpha)):
            raise ParameterDomainError("all-cured law has no susceptible population")
        return susceptible_sf(t, self.lam, self.alpha, self.theta)

    def susceptible_quantile(self, q):
        self._require_defective()
        q = np.asarray(q, dtype=float)
        _require(np.all((q > 0) & (q < 1)), "quantile requires q in (0, 1)")
        return susceptible_quantile(q, self.lam, self.alpha, self.theta)


@dataclass(frozen=True)
class DGGQuantileParams:
    """Defective generalized Gompertz parameterized by a susceptible quantile.

    ``mu_q`` is the q-th quantile of the susceptible survival time for the
    fixed, known level ``q``; the implied shape is recovered through
    :func:`theta_from_quantile` and all evaluations route through it.
    """

    lam: float
    alpha: float
    mu_q: float
    q: float

    def __post_init__(self):
        _require(np.isfinite(self.lam) and self.lam > 0.0, f"lam must be > 0, got {self.lam}")
        _require(
            np.isfinite(self.alpha) and self.alpha <= ALPHA_DEFECTIVE_MAX,
            f"alpha must be < 0 (at most {ALPHA_DEFECTIVE_MAX}), got {self.alpha}",
        )
        _require(np.isfinite(self.mu_q) and self.mu_q > 0.0, f"mu_q must be > 0, got {self.mu_q}")
        _require(0.0 < self.q < 1.0, f"q must lie in (0, 1), got {self.q}")
        self.theta  # fail fast if the inversion degenerates

    @property
    def theta(self):
        """Implied shape; raises if the inversion is numerically degenerate."""
        th = theta_from_quantile(self.lam, self.alpha, self.mu_q, self.q)
        if not np.isfinite(th) or th <= 0.0:
            raise PrecisionLossError(
                f"shape inversion degenerated for mu_q={self.mu_q}: the quantile "
                "sits on the plateau of the defective CDF"
            )
        return float(th)

    def to_gg(self):
        return GGParams(self.lam, self.alpha, self.theta)

    def pdf(self, t):
        return self.to_gg().pdf(t)

    def logpdf(self, t):
        return self.to_gg().logpdf(t)

    def sf(self, t):
        return self.to_gg().sf(t)

    def logsf(self, t):
        return self.to_gg().logsf(t)

    def cure_fraction(self):
        return self.to_gg().cure_fraction()

    def susceptible_sf(self, t):
        return self.to_gg().susceptible_sf(t)

    def susceptible_quantile(self, q):
        return self.to_gg().susceptible_quantile(q)
