"""Exact 1-Wasserstein distance between finite discrete measures.

The ground metric is Euclidean.  Distances are computed by an exact network
simplex on the dense transportation graph; scipy's LP solver is kept as a
fallback for the (rare) case the pivot loop hits its iteration cap on
degenerate float weights.  ``w1_sorted_1d`` is an independent quantile-based
oracle for d=1 and is deliberately never called by the solver path.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from . import _network_simplex as _ns

# weights this small are dropped before solving; they carry no mass worth
# transporting and can degenerate the simplex basis
WEIGHT_FLOOR = 1e-15
_WEIGHT_SUM_TOL = 1e-12


@dataclass(frozen=True)
class DiscreteMeasure:
    """A finitely supported probability measure on R^d."""

    support: np.ndarray
    weights: np.ndarray = field(default=None)

    def __post_init__(self):
        support = np.asarray(self.support, dtype=np.float64)
        if support.ndim == 1:
            support = support.reshape(-1, 1)
        if support.ndim != 2 or support.shape[0] == 0:
            raise ValueError("support must be a nonempty set of points")
        if not np.isfinite(support).all():
            raise ValueError("support contains non-finite coordinates")
        if self.weights is None:
            weights = np.full(support.shape[0], 1.0 / support.shape[0])
        else:
            weights = np.asarray(self.weights, dtype=np.float64)
        if weights.shape != (support.shape[0],):
            raise ValueError("weights must match the number of support points")
        if (weights < 0).any():
            raise ValueError("weights must be nonnegative")
        if abs(weights.sum() - 1.0) > _WEIGHT_SUM_TOL:
            raise ValueError(f"weights must sum to 1, got {weights.sum()!r}")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "weights", weights)

    @property
    def dim(self):
        return self.support.shape[1]

    def trimmed(self):
        """Drop weights below WEIGHT_FLOOR and renormalize."""
        keep = self.weights > WEIGHT_FLOOR
        if keep.all():
            return self
        if not keep.any():
            raise ValueError("all weights are degenerate")
        w = self.weights[keep]
        return DiscreteMeasure(self.support[keep], w / w.sum())


def _linprog_fallback(cost, wa, wb):
    from scipy.optimize import linprog
    from scipy.sparse import lil_matrix

    m, n = cost.shape
    A = lil_matrix((m + n, m * n))
    for i in range(m):
        A[i, i * n:(i + 1) * n] = 1.0
    for j in range(n):
        A[m + j, j::n] = 1.0
    rhs = np.concatenate([wa, wb])
    # one marginal constraint is redundant; dropping it keeps the system full rank
    res = linprog(cost.ravel(), A_eq=A.tocsr()[:-1], b_eq=rhs[:-1],
                  bounds=(0, None), method="highs")
    if res.status != 0:
        raise RuntimeError(f"transport LP failed: {res.message}")
    return float(res.fun)


def w1_discrete(a: DiscreteMeasure, b: DiscreteMeasure) -> float:
    """Exact W1 between two discrete measures with Euclidean ground cost."""
    if not isinstance(a, DiscreteMeasure):
        a = DiscreteMeasure(a)
    if not isinstance(b, DiscreteMeasure):
        b = DiscreteMeasure(b)
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    a = a.trimmed()
    b = b.trimmed()
    cost = cdist(a.support, b.support)
    value, status = _ns.solve_transport(cost.ravel(), a.weights, b.weights)
    if status != _ns.STATUS_OK:
        value = _linprog_fallback(cost, a.weights, b.weights)
    return max(float(value), 0.0)


def w1_uniform(points_a, points_b) -> float:
    """W1 between uniform empirical measures on two point lists.

    Equal to w1_discrete with weights 1/|a| and 1/|b|; supplies are scaled to
    integers so all simplex flows are exact.
    """
    pa = np.asarray(points_a, dtype=np.float64)
    pb = np.asarray(points_b, dtype=np.float64)
    if pa.ndim == 1:
        pa = pa.reshape(-1, 1)
    if pb.ndim == 1:
        pb = pb.reshape(-1, 1)
    if pa.shape[0] == 0 or pb.shape[0] == 0:
        raise ValueError("point lists must be nonempty")
    if pa.shape[1] != pb.shape[1]:
        raise ValueError(f"dimension mismatch: {pa.shape[1]} vs {pb.shape[1]}")
    na, nb = pa.shape[0], pb.shape[0]
    cost = cdist(pa, pb)
    supply = np.full(na, float(nb))
    demand = np.full(nb, float(na))
    value, status = _ns.solve_transport(cost.ravel(), supply, demand)
    if status != _ns.STATUS_OK:
        return max(_linprog_fallback(cost, supply / supply.sum() * 1.0,
                                     demand / demand.sum() * 1.0), 0.0)
    return max(float(value) / (na * nb), 0.0)


def w1_sorted_1d(xs, ys) -> float:
    """Quantile-function oracle for W1 on the real line.

    Integrates |F_x^{-1}(u) - F_y^{-1}(u)| over u in (0,1) by merging the
    breakpoints i/n and j/m on the common integer grid of n*m units, so
    breakpoint coincidences are decided exactly.
    """
    xs = np.sort(np.asarray(xs, dtype=np.float64).ravel())
    ys = np.sort(np.asarray(ys, dtype=np.float64).ravel())
    n, m = xs.shape[0], ys.shape[0]
    if n == 0 or m == 0:
        raise ValueError("inputs must be nonempty")
    total = 0.0
    ix = iy = 0
    cur = 0  # position on the grid of n*m mass units
    end = n * m
    while cur < end:
        a_next = (ix + 1) * m
        b_next = (iy + 1) * n
        nxt = a_next if a_next < b_next else b_next
        total += (nxt - cur) * abs(xs[ix] - ys[iy])
        cur = nxt
        if a_next == nxt:
            ix += 1
        if b_next == nxt:
            iy += 1
    return total / end
