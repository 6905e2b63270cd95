"""Effective sample size under dependence, and decay-rate utilities.

For a dependence coefficient tau(k), the effective sample size is the largest
block count m whose per-block dependence tau(floor(n/m)) is dominated by the
statistical error floor max(B/m, sigma/sqrt(m)).  Under exponential decay this
scales like n / log n, with a closed-form lower bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class DecayFit:
    """Log-linear fit tau(k) ~= c0_hat * exp(-c1_hat * k)."""

    c0_hat: float
    c1_hat: float
    rmse: float
    n_points_used: int


@dataclass(frozen=True)
class MixingBound:
    """Exponential bound coefficient(k) <= C * exp(-c * k)."""

    C: float
    c: float
    kind: str = "tau"

    def __post_init__(self):
        if not self.C > 0 or not self.c > 0:
            raise ValueError("MixingBound requires C > 0 and c > 0")
        if self.kind not in ("tau", "beta"):
            raise ValueError(f"unknown bound kind {self.kind!r}")

    def at(self, k):
        return self.C * math.exp(-self.c * k)


def n_eff_search(tau_of, n, B_bound, sigma) -> int:
    """Largest m in 1..n with tau_of(n // m) <= max(B_bound/m, sigma/sqrt(m)),
    found by direct descending scan; 1 if no m qualifies."""
    if n < 1:
        raise ValueError("n must be >= 1")
    for m in range(n, 0, -1):
        err = max(B_bound / m, sigma / math.sqrt(m))
        if tau_of(n // m) <= err:
            return m
    return 1


def n_eff_lower_bound(c0, c1, B_bound, n) -> float:
    """Closed-form lower bound min((n/2) * c1 / max(1, log(c0*c1*n/B)), n)."""
    if c0 <= 0 or c1 <= 0 or B_bound <= 0:
        raise ValueError("c0, c1, B_bound must all be positive")
    if n < 1:
        raise ValueError("n must be >= 1")
    denom = max(1.0, math.log(c0 * c1 * n / B_bound))
    return min(0.5 * n * c1 / denom, float(n))


def tau_bound_from_beta(beta: MixingBound, diameter, k) -> float:
    """Dependence bound 2 * diameter * C * exp(-c * k) implied by an
    exponential total-variation mixing bound on a bounded state space."""
    if diameter <= 0:
        raise ValueError("diameter must be positive")
    if k < 1:
        raise ValueError("k must be >= 1")
    return 2.0 * diameter * beta.C * math.exp(-beta.c * k)


def _curve_arrays(curve):
    if hasattr(curve, "lags"):
        lags = np.asarray(curve.lags, dtype=np.float64)
        values = curve.mean if hasattr(curve, "mean") else curve.values
        return lags, np.asarray(values, dtype=np.float64)
    lags, values = curve
    return (np.asarray(lags, dtype=np.float64),
            np.asarray(values, dtype=np.float64))


def fit_exponential_decay(curve, require_positive_rate=True) -> DecayFit:
    """Fit tau(k) ~= c0 * exp(-c1 * k) by ordinary least squares on
    (k, log tau(k)) over the strictly positive entries.

    rmse is reported in log space, the space of the regression.  With
    require_positive_rate=False the fit is returned even when the rate is
    nonpositive, for use as a descriptive control.
    """
    lags, values = _curve_arrays(curve)
    if lags.shape != values.shape:
        raise ValueError("lags and values must have matching shapes")
    keep = values > 0
    n_used = int(np.count_nonzero(keep))
    if n_used < 2:
        raise ValueError("need at least 2 strictly positive curve values")
    k = lags[keep]
    log_v = np.log(values[keep])
    slope, intercept = np.polyfit(k, log_v, 1)
    residuals = log_v - (slope * k + intercept)
    rmse = float(np.sqrt(np.mean(residuals ** 2)))
    c1_hat = -float(slope)
    if require_positive_rate and c1_hat <= 0:
        raise ValueError("no exponential decay detected (fitted rate <= 0)")
    return DecayFit(c0_hat=float(np.exp(intercept)), c1_hat=c1_hat,
                    rmse=rmse, n_points_used=n_used)
