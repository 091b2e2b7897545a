"""Kaplan-Meier product-limit estimator for grouped diagnostics.

Ties at a time point count events before censorings: censored subjects
stay in the risk set at their own time and leave afterwards.  Curves
carry the origin point (t = 0, S = 1) so they plot and evaluate as right
continuous step functions.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import DataLoadError

__all__ = ["KMCurve", "kaplan_meier", "grouped_kaplan_meier"]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class KMCurve:
    """Survival steps at the distinct event times, origin included."""

    label: str
    times: np.ndarray
    survival: np.ndarray
    at_risk: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        survival = np.asarray(self.survival, dtype=float)
        at_risk = np.asarray(self.at_risk, dtype=np.int64)
        if not (times.shape == survival.shape == at_risk.shape) or times.ndim != 1:
            raise DataLoadError("curve arrays must share one dimension")
        if times.size == 0 or times[0] != 0.0 or survival[0] != 1.0:
            raise DataLoadError("curve must start at (t=0, S=1)")
        if np.any(np.diff(times) <= 0.0):
            raise DataLoadError("curve times must be strictly increasing")
        if np.any(np.diff(survival) > 0.0) or np.any((survival < 0.0) | (survival > 1.0)):
            raise DataLoadError("survival estimates must be nonincreasing within [0, 1]")
        for name, arr in (("times", times), ("survival", survival), ("at_risk", at_risk)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def evaluate(self, t):
        """Step-function value S(t); constant between event times."""
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.times, t, side="right") - 1
        out = self.survival[np.clip(idx, 0, self.survival.size - 1)]
        return float(out) if np.ndim(t) == 0 else out


def kaplan_meier(times, status, label="all"):
    """Product-limit curve for one sample of right-censored times."""
    times = np.asarray(times, dtype=float)
    status = np.asarray(status)
    if times.ndim != 1 or times.size == 0:
        raise DataLoadError("times must be a non-empty 1-d array")
    if not np.all(np.isfinite(times)) or not np.all(times > 0.0):
        raise DataLoadError("all observed times must be finite and > 0")
    if status.shape != times.shape or not np.all(np.isin(status, (0, 1))):
        raise DataLoadError("status flags must be 0 or 1, one per time")

    n = times.size
    event_times = np.unique(times[status == 1])
    sorted_times = np.sort(times)
    # risk set just before t: everyone with an observed time >= t, so
    # same-time censorings are still present when the events happen
    at_risk = n - np.searchsorted(sorted_times, event_times, side="left")
    deaths = np.array(
        [np.count_nonzero((times == t) & (status == 1)) for t in event_times]
    )
    survival = np.cumprod(1.0 - deaths / at_risk)

    return KMCurve(
        label=str(label),
        times=np.concatenate([[0.0], event_times]),
        survival=np.concatenate([[1.0], survival]),
        at_risk=np.concatenate([[n], at_risk]),
    )


def grouped_kaplan_meier(times, status, groups, levels=None):
    """One curve per group level, in sorted label order.

    ``levels`` may list labels explicitly; a level with no subjects is
    skipped with a warning rather than failing the run.
    """
    times = np.asarray(times, dtype=float)
    groups = np.asarray(groups)
    if groups.shape != times.shape:
        raise DataLoadError("group labels must match times in length")
    if levels is None:
        levels = sorted(str(v) for v in np.unique(groups))
    labels = groups.astype(str)
    curves = []
    for level in levels:
        mask = labels == str(level)
        if not np.any(mask):
            log.warning("group %r is empty, skipped", level)
            continue
        curves.append(kaplan_meier(times[mask], np.asarray(status)[mask], label=str(level)))
    return curves
