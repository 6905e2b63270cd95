"""Finite-history Wasserstein dependence estimator for ordered sequences.

For a sequence x_1..x_T, lag k, and history length m, form history vectors
Z_i = (x_i, .., x_{i+m-1}) and targets Y_i = x_{i+m-1+k}.  The observed score
is the largest W1 distance between the empirical law of the targets whose
histories neighbor Z_i (its r nearest neighbors, Euclidean) and the pooled
target law.  Subtracting a permutation baseline (same neighbor sets, targets
shuffled) and clipping at zero gives the per-lag estimate.

All W1 distances are exact transportation solves.  Because only the max over
query points is needed, each candidate carries a cheap lower bound (norm of
the mean difference) and upper bound (independent-coupling cost); candidates
whose upper bound cannot beat the running max are skipped, which changes
nothing about the result.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.spatial.distance import cdist
from sklearn.base import BaseEstimator

from . import _network_simplex as _ns
from .validation import as_observation_matrix, check_positive_int, check_nonnegative_int


@dataclass(frozen=True)
class ObservationSequence:
    """Ordered real-vector observations; order is the only structure used."""

    data: np.ndarray
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "data", as_observation_matrix(self.data, "data"))

    @property
    def length(self):
        return self.data.shape[0]

    @property
    def dim(self):
        return self.data.shape[1]


@dataclass(frozen=True)
class EstimatorConfig:
    history_length: int = 1
    n_neighbors: int = 20
    n_permutations: int = 1
    max_lag: int = 20
    leave_one_out: bool = True
    seed: int = 0

    def __post_init__(self):
        check_positive_int(self.history_length, "history_length")
        check_positive_int(self.n_neighbors, "n_neighbors")
        check_nonnegative_int(self.n_permutations, "n_permutations")
        check_positive_int(self.max_lag, "max_lag")


@dataclass(frozen=True)
class PairSet:
    """History vectors and future targets at a fixed lag."""

    Z: np.ndarray
    Y: np.ndarray
    lag: int
    history_length: int

    @property
    def n_pairs(self):
        return self.Z.shape[0]


@dataclass(frozen=True)
class TauCurve:
    lags: np.ndarray
    values: np.ndarray
    config: EstimatorConfig
    source_label: str = ""


@dataclass(frozen=True)
class AggregatedCurve:
    lags: np.ndarray
    mean: np.ndarray
    se: np.ndarray  # NaN when n_replicates == 1
    n_replicates: int


def build_pairs(x, history_length, lag) -> PairSet:
    """All (history, target) pairs at the given lag; empty when none fit."""
    rows = as_observation_matrix(x)
    m = check_positive_int(history_length, "history_length")
    k = check_positive_int(lag, "lag")
    T, d = rows.shape
    n = T - m - k + 1
    if n <= 0:
        return PairSet(np.empty((0, m * d)), np.empty((0, d)), k, m)
    Z = np.hstack([rows[j:j + n] for j in range(m)])
    Y = rows[m - 1 + k:m - 1 + k + n].copy()
    return PairSet(Z, Y, k, m)


def knn_indices(Z, i, n_neighbors, leave_one_out=True):
    """Indices of the nearest rows to row i, nearest first.

    Ties are broken by ascending row index.  With leave_one_out the query row
    itself is excluded.  Fewer than n_neighbors candidates returns them all.
    """
    Z = np.atleast_2d(np.asarray(Z, dtype=np.float64))
    if Z.ndim == 1:
        Z = Z.reshape(-1, 1)
    n = Z.shape[0]
    if n == 0:
        raise ValueError("Z must be nonempty")
    if not 0 <= i < n:
        raise ValueError(f"query index {i} out of range for {n} rows")
    r = check_positive_int(n_neighbors, "n_neighbors")
    d2 = ((Z - Z[i]) ** 2).sum(axis=1)
    order = np.argsort(d2, kind="stable")
    if leave_one_out:
        order = order[order != i]
    return order[:r].copy()


def _all_knn_indices(Z, n_neighbors, leave_one_out):
    """Neighbor index matrix for every row; assumes enough candidates exist."""
    n = Z.shape[0]
    d2 = cdist(Z, Z, metric="sqeuclidean")
    order = np.argsort(d2, axis=1, kind="stable")
    if not leave_one_out:
        return np.ascontiguousarray(order[:, :n_neighbors]).astype(np.int64)
    out = np.empty((n, n_neighbors), dtype=np.int64)
    rows = np.arange(n)
    for i in rows:
        oi = order[i]
        out[i] = oi[oi != i][:n_neighbors]
    return out


def per_local_w1(D, idx):
    """W1(uniform law on each idx row, global uniform law), one value per row."""
    values, statuses = _ns.w1_locals_vs_global(D, idx)
    if (statuses != _ns.STATUS_OK).any():  # pragma: no cover - defensive
        from .transport import _linprog_fallback
        n_atoms = D.shape[0]
        r = idx.shape[1]
        for s in np.nonzero(statuses != _ns.STATUS_OK)[0]:
            values[s] = _linprog_fallback(D[idx[s]], np.full(r, 1.0 / r),
                                          np.full(n_atoms, 1.0 / n_atoms))
    return values


def _observed_cutoff(T, history_length, n_neighbors, leave_one_out):
    """Smallest lag at which every neighbor set spans all candidates."""
    if leave_one_out:
        return T - history_length - n_neighbors
    return T - history_length + 1 - n_neighbors


def _mean_bounds(Y, D_row_mean, idx):
    g_mean = Y.mean(axis=0)
    local_means = Y[idx].mean(axis=1)
    lb = np.sqrt(((local_means - g_mean) ** 2).sum(axis=1))
    ub = D_row_mean[idx].mean(axis=1)
    return lb, ub


def _max_w1(D_row_mean, Y, D, idx):
    """Pruned exact max: visit in descending lower-bound order, skip entries
    whose upper bound cannot beat the running max.

    Bounds: W1 >= ||mean difference|| (1-Lipschitz linear functionals) and
    W1 <= independent-coupling cost, so every skip is exact.
    """
    lb, ub = _mean_bounds(Y, D_row_mean, idx)
    order = np.argsort(-lb, kind="stable").astype(np.int64)
    best, _, status = _ns.max_w1_locals_vs_global(D, idx, order, ub)
    if status != _ns.STATUS_OK:  # pragma: no cover - defensive
        return float(per_local_w1(D, idx).max())
    return float(best)


def tau_obs(x, lag, history_length=1, n_neighbors=20, leave_one_out=True):
    """Observed dependence score at one lag: max_i W1(local law_i, global law).

    Exactly zero once every neighbor set necessarily spans all available
    candidates (lag >= T-m-r with leave-one-out, T-m+1-r without), and for
    lags with no pairs at all.
    """
    rows = as_observation_matrix(x)
    k = check_positive_int(lag, "lag")
    m = check_positive_int(history_length, "history_length")
    r = check_positive_int(n_neighbors, "n_neighbors")
    T = rows.shape[0]
    if k >= _observed_cutoff(T, m, r, leave_one_out):
        return 0.0
    pairs = build_pairs(rows, m, k)
    if pairs.n_pairs <= 0:
        return 0.0
    idx = _all_knn_indices(pairs.Z, r, leave_one_out)
    D = cdist(pairs.Y, pairs.Y)
    return _max_w1(D.mean(axis=1), pairs.Y, D, idx)


def _permutation_rng(seed, lag, replicate):
    """Derived stream: reproducible per (master seed, lag, replicate)."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(lag, replicate)))


def tau_perm_baseline(x, lag, history_length=1, n_neighbors=20, n_permutations=1,
                      leave_one_out=True, seed=0):
    """Permutation baseline: same neighbor sets, targets shuffled.

    For each replicate b the targets are permuted (Y_j -> Y_{sigma_b(j)}),
    neighbor sets are reused unchanged, and the permuted global law equals
    the original as a multiset.  Returns the average over replicates of the
    max over query points.
    """
    rows = as_observation_matrix(x)
    k = check_positive_int(lag, "lag")
    m = check_positive_int(history_length, "history_length")
    r = check_positive_int(n_neighbors, "n_neighbors")
    B = check_positive_int(n_permutations, "n_permutations")
    T = rows.shape[0]
    if k >= _observed_cutoff(T, m, r, leave_one_out):
        return 0.0
    pairs = build_pairs(rows, m, k)
    if pairs.n_pairs <= 0:
        return 0.0
    n = pairs.n_pairs
    idx = _all_knn_indices(pairs.Z, r, leave_one_out)
    D = cdist(pairs.Y, pairs.Y)
    row_mean = D.mean(axis=1)
    acc = 0.0
    for b in range(1, B + 1):
        sigma = _permutation_rng(seed, k, b).permutation(n)
        acc += _max_w1(row_mean, pairs.Y, D, sigma[idx])
    return acc / B


def tau_hat(x, lag, config: EstimatorConfig = None, **overrides):
    """Bias-corrected estimate at one lag: max(observed - baseline, 0).

    With n_permutations=0 the uncentered observed score is returned.
    """
    cfg = _resolve_config(config, overrides)
    obs = tau_obs(x, lag, cfg.history_length, cfg.n_neighbors, cfg.leave_one_out)
    if cfg.n_permutations == 0:
        return obs
    base = tau_perm_baseline(x, lag, cfg.history_length, cfg.n_neighbors,
                             cfg.n_permutations, cfg.leave_one_out, cfg.seed)
    return max(obs - base, 0.0)


def _resolve_config(config, overrides):
    cfg = config if config is not None else EstimatorConfig()
    if overrides:
        cfg = replace(cfg, **overrides)
    return cfg


def tau_curve(x, config: EstimatorConfig = None, source_label=None, **overrides) -> TauCurve:
    """Estimates for every lag 1..max_lag."""
    cfg = _resolve_config(config, overrides)
    rows = as_observation_matrix(x)
    if source_label is None:
        source_label = getattr(x, "label", "") or ""
    lags = np.arange(1, cfg.max_lag + 1)
    values = np.array([tau_hat(rows, int(k), cfg) for k in lags])
    return TauCurve(lags=lags, values=values, config=cfg, source_label=source_label)


def aggregate_curves(curves) -> AggregatedCurve:
    """Per-lag mean and standard error over replicate curves.

    SE uses the sample standard deviation (denominator M-1) divided by
    sqrt(M); with a single curve the SE is reported missing (NaN).
    """
    curves = list(curves)
    if not curves:
        raise ValueError("need at least one curve")
    lags = curves[0].lags
    for c in curves[1:]:
        if not np.array_equal(c.lags, lags):
            raise ValueError("curves disagree on lags")
    stack = np.vstack([c.values for c in curves])
    M = stack.shape[0]
    mean = stack.mean(axis=0)
    if M == 1:
        se = np.full(lags.shape[0], np.nan)
    else:
        se = stack.std(axis=0, ddof=1) / np.sqrt(M)
    return AggregatedCurve(lags=lags.copy(), mean=mean, se=se, n_replicates=M)


class TauMixingEstimator(BaseEstimator):
    """Sequence dependence estimator with a scikit-learn style interface.

    fit(X) treats X of shape (T, d) as one ordered sequence and computes the
    per-lag dependence curve; results land in ``lags_`` and ``values_``.
    """

    def __init__(self, history_length=1, n_neighbors=20, n_permutations=1,
                 max_lag=20, leave_one_out=True, random_state=0):
        self.history_length = history_length
        self.n_neighbors = n_neighbors
        self.n_permutations = n_permutations
        self.max_lag = max_lag
        self.leave_one_out = leave_one_out
        self.random_state = random_state

    def _config(self):
        return EstimatorConfig(
            history_length=self.history_length,
            n_neighbors=self.n_neighbors,
            n_permutations=self.n_permutations,
            max_lag=self.max_lag,
            leave_one_out=self.leave_one_out,
            seed=self.random_state,
        )

    def fit(self, X, y=None):
        curve = tau_curve(X, self._config())
        self.curve_ = curve
        self.lags_ = curve.lags
        self.values_ = curve.values
        self.n_features_in_ = as_observation_matrix(X).shape[1]
        return self

    def fit_transform(self, X, y=None):
        return self.fit(X).values_
