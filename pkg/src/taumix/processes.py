"""Synthetic sequence generators with known dependence structure."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .estimator import ObservationSequence
from .validation import check_positive_int

_WEIGHT_SUM_TOL = 1e-12


def gen_iid(T, seed, kind="gaussian", dim=1) -> ObservationSequence:
    """i.i.d. draws; the estimator's null model."""
    T = check_positive_int(T, "T")
    dim = check_positive_int(dim, "dim")
    rng = np.random.default_rng(seed)
    if kind == "gaussian":
        rows = rng.standard_normal((T, dim))
    elif kind == "uniform":
        rows = rng.random((T, dim))
    else:
        raise ValueError(f"unknown iid kind {kind!r}")
    return ObservationSequence(rows, label=f"iid_{kind}")


def gen_ar1(rho, innovation_sd, T, seed) -> ObservationSequence:
    """x_{t+1} = rho x_t + eps_t with stationary initialization."""
    if not abs(rho) < 1:
        raise ValueError(f"|rho| must be < 1, got {rho}")
    if innovation_sd < 0:
        raise ValueError("innovation_sd must be >= 0")
    T = check_positive_int(T, "T")
    rng = np.random.default_rng(seed)
    x = np.empty(T)
    x[0] = rng.normal(0.0, innovation_sd / np.sqrt(1.0 - rho * rho)) if innovation_sd > 0 else 0.0
    eps = rng.normal(0.0, innovation_sd, size=T - 1) if T > 1 else np.empty(0)
    for t in range(1, T):
        x[t] = rho * x[t - 1] + eps[t - 1]
    return ObservationSequence(x, label=f"ar1_rho{rho}")


def gen_ma(coeffs, T, seed) -> ObservationSequence:
    """x_t = sum_j c_j eps_{t-j}; independent beyond lag q = len(coeffs)-1."""
    coeffs = np.asarray(coeffs, dtype=np.float64)
    if coeffs.ndim != 1 or coeffs.shape[0] == 0:
        raise ValueError("coeffs must be a nonempty 1-D list")
    T = check_positive_int(T, "T")
    q = coeffs.shape[0] - 1
    lead = 10 * q  # discard edge effects; any lead >= q is exactly stationary
    rng = np.random.default_rng(seed)
    eps = rng.standard_normal(T + lead)
    x = np.convolve(eps, coeffs)[lead:lead + T]
    return ObservationSequence(x, label=f"ma{q}")


def gen_markov_chain(P, T, seed, one_hot=False) -> ObservationSequence:
    """Finite chain from a uniform initial state; rows are state indices
    (d=1) or one-hot vectors (d=S)."""
    P = np.asarray(P, dtype=np.float64)
    if P.ndim != 2 or P.shape[0] != P.shape[1] or P.shape[0] < 1:
        raise ValueError("P must be a square matrix")
    if (P < 0).any() or (np.abs(P.sum(axis=1) - 1.0) > _WEIGHT_SUM_TOL).any():
        raise ValueError("P must be row-stochastic")
    T = check_positive_int(T, "T")
    S = P.shape[0]
    rng = np.random.default_rng(seed)
    states = np.empty(T, dtype=np.int64)
    states[0] = rng.integers(0, S)
    for t in range(1, T):
        states[t] = rng.choice(S, p=P[states[t - 1]])
    if one_hot:
        rows = np.zeros((T, S))
        rows[np.arange(T), states] = 1.0
    else:
        rows = states.astype(np.float64)
    return ObservationSequence(rows, label="markov_chain")


@dataclass(frozen=True)
class ProcessSpec:
    """Declarative description of a generator run, used by the CLI."""

    kind: str
    T: int
    seed: int = 0
    params: dict = field(default_factory=dict)

    KINDS = ("iid_gaussian", "iid_uniform", "ar1", "ma_q", "finite_markov")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown process kind {self.kind!r}; choose from {self.KINDS}")

    def generate(self) -> ObservationSequence:
        p = self.params
        if self.kind == "iid_gaussian":
            return gen_iid(self.T, self.seed, "gaussian", p.get("dim", 1))
        if self.kind == "iid_uniform":
            return gen_iid(self.T, self.seed, "uniform", p.get("dim", 1))
        if self.kind == "ar1":
            return gen_ar1(p.get("rho", 0.9), p.get("innovation_sd", 1.0), self.T, self.seed)
        if self.kind == "ma_q":
            return gen_ma(p.get("coeffs", (1.0, 1.0)), self.T, self.seed)
        return gen_markov_chain(p["P"], self.T, self.seed, p.get("one_hot", False))
