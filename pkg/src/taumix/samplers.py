"""Replay-buffer index samplers and their order-preservation guarantees.

Samplers return batches of 0-based buffer indices.  A batch whose indices are
strictly increasing integers automatically satisfies u_{j+l} - u_j >= l, so
lag l inside the batch spans at least l steps of the underlying trajectory;
that is the property the guaranteed samplers certify and the uniform
with-replacement sampler deliberately lacks.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .validation import as_rng, check_positive_int, check_nonnegative_int


class InfeasibleConfigError(ValueError):
    """A sampler configuration cannot fit inside the buffer."""


@dataclass(frozen=True)
class IndexBatch:
    indices: np.ndarray
    sampler_kind: str
    params: dict = field(default_factory=dict)
    order_guaranteed: bool = False

    def __post_init__(self):
        object.__setattr__(self, "indices",
                           np.asarray(self.indices, dtype=np.int64))

    def __len__(self):
        return self.indices.shape[0]


@dataclass(frozen=True)
class BlockPlan:
    """Layout of a contiguous-block draw: q full blocks of length b separated
    by gaps of length a, plus a remainder block of length rem."""

    b: int
    a: int
    t0: int
    q: int
    rem: int
    n: int


@dataclass(frozen=True)
class OrderReport:
    ok: bool
    min_gap_ratio: float


class ReplayBuffer:
    """Bounded FIFO of transitions; index i is the i-th oldest surviving row,
    so the live contents are always a contiguous slice of the trajectory."""

    def __init__(self, capacity, env_kind=None):
        self.capacity = check_positive_int(capacity, "capacity")
        self.env_kind = env_kind
        self._storage = [None] * self.capacity
        self.insertion_counter = 0

    @property
    def size(self):
        return min(self.insertion_counter, self.capacity)

    def append(self, row):
        self._storage[self.insertion_counter % self.capacity] = row
        self.insertion_counter += 1

    def __len__(self):
        return self.size

    def __getitem__(self, i):
        size = self.size
        if not 0 <= i < size:
            raise IndexError(f"buffer index {i} out of range for size {size}")
        oldest = self.insertion_counter - size
        return self._storage[(oldest + i) % self.capacity]


def sample_uniform_with_replacement(buffer_size, batch_size, rng) -> IndexBatch:
    """n i.i.d. uniform index draws, sorted; duplicates may remain, so no
    order-preservation guarantee is claimed."""
    M = check_positive_int(buffer_size, "buffer_size")
    n = check_positive_int(batch_size, "batch_size")
    rng = as_rng(rng)
    idx = np.sort(rng.integers(0, M, size=n))
    return IndexBatch(idx, "uniform_with_replacement",
                      {"buffer_size": M, "batch_size": n}, order_guaranteed=False)


def sample_uniform_without_replacement_sorted(buffer_size, batch_size, rng) -> IndexBatch:
    M = check_positive_int(buffer_size, "buffer_size")
    n = check_positive_int(batch_size, "batch_size")
    if n > M:
        raise ValueError(f"cannot draw {n} distinct indices from a buffer of {M}")
    rng = as_rng(rng)
    idx = np.sort(rng.choice(M, size=n, replace=False))
    return IndexBatch(idx, "without_replacement_sorted",
                      {"buffer_size": M, "batch_size": n}, order_guaranteed=True)


def _check_block_shape(n, b, a):
    n = check_positive_int(n, "n")
    b = check_positive_int(b, "b")
    a = check_nonnegative_int(a, "a")
    if b > n:
        raise ValueError(f"block length b={b} exceeds batch size n={n}")
    if b >= 2 and a > b - 2:
        raise ValueError(f"gap a={a} must satisfy a <= b-2 = {b - 2}")
    return n, b, a


def plan_blocks(buffer_size, n, b, a, t0) -> BlockPlan:
    """Validate and lay out a contiguous-block draw starting at index t0.

    Feasibility is checked before the gap constraint so an oversized plan
    always reports the violated size inequality."""
    M = check_positive_int(buffer_size, "buffer_size")
    n = check_positive_int(n, "n")
    b = check_positive_int(b, "b")
    a = check_nonnegative_int(a, "a")
    t0 = check_nonnegative_int(t0, "t0")
    if b > n:
        raise ValueError(f"block length b={b} exceeds batch size n={n}")
    q, rem = divmod(n, b)
    if rem == 0:
        footprint = (q - 1) * (a + b) + b
    else:
        footprint = q * (a + b) + rem
    if t0 + footprint > M:
        raise InfeasibleConfigError(
            f"block plan needs indices up to t0+footprint = {t0 + footprint} "
            f"> buffer size {M} (n={n}, b={b}, a={a}, t0={t0})")
    if b >= 2 and a > b - 2:
        raise ValueError(f"gap a={a} must satisfy a <= b-2 = {b - 2}")
    return BlockPlan(b=b, a=a, t0=t0, q=q, rem=rem, n=n)


def sample_contiguous_blocks(plan: BlockPlan) -> IndexBatch:
    """Materialize a feasible plan: gaps are 1 inside blocks, a+1 across."""
    pieces = []
    for i in range(plan.q):
        s = plan.t0 + i * (plan.a + plan.b)
        pieces.append(np.arange(s, s + plan.b))
    if plan.rem:
        s = plan.t0 + plan.q * (plan.a + plan.b)
        pieces.append(np.arange(s, s + plan.rem))
    idx = np.concatenate(pieces)
    return IndexBatch(idx, "contiguous_blocks",
                      {"b": plan.b, "a": plan.a, "t0": plan.t0},
                      order_guaranteed=True)


def sample_contiguous_blocks_wraparound(buffer_size, n, b, a, t0) -> IndexBatch:
    """Contiguous blocks with indices taken modulo the buffer size, then
    reordered ascending.  Errors out if wrapping revisits an index."""
    M = check_positive_int(buffer_size, "buffer_size")
    n, b, a = _check_block_shape(n, b, a)
    t0 = check_nonnegative_int(t0, "t0")
    if n > M:
        raise ValueError(f"cannot place {n} distinct indices in a buffer of {M}")
    q, rem = divmod(n, b)
    raw = []
    for i in range(q):
        s = t0 + i * (a + b)
        raw.extend((s + j) % M for j in range(b))
    if rem:
        s = t0 + q * (a + b)
        raw.extend((s + j) % M for j in range(rem))
    if len(set(raw)) != len(raw):
        raise InfeasibleConfigError(
            f"wraparound revisits a buffer index (M={M}, n={n}, b={b}, a={a}, t0={t0})")
    idx = np.sort(np.asarray(raw, dtype=np.int64))
    return IndexBatch(idx, "contiguous_blocks_wraparound",
                      {"b": b, "a": a, "t0": t0},
                      order_guaranteed=True)


def verify_order_preserving(batch) -> OrderReport:
    """Check strict increase, no duplicates, and u_{j+l} - u_j >= l for all
    j, l; min_gap_ratio is the smallest consecutive gap (NaN if < 2 indices)."""
    idx = batch.indices if isinstance(batch, IndexBatch) else np.asarray(batch, dtype=np.int64)
    n = idx.shape[0]
    if n < 2:
        return OrderReport(ok=True, min_gap_ratio=float("nan"))
    diffs = np.diff(idx)
    ok = bool((diffs > 0).all()) and len(np.unique(idx)) == n
    if ok:
        # implied by integer strict increase, but the claim is cheap to check outright
        for l in range(1, n):
            if (idx[l:] - idx[:-l] < l).any():
                ok = False
                break
    return OrderReport(ok=ok, min_gap_ratio=float(diffs.min()))


def gather_minibatch(buffer: ReplayBuffer, batch: IndexBatch):
    """Materialize the sampled rows in batch order.

    Returns (encoded, transitions): the encoded state-action matrix the
    dependence estimator consumes, and the raw transitions for the learner.
    """
    from .envs import encode_state_action
    from .estimator import ObservationSequence

    size = buffer.size
    transitions = []
    for i in batch.indices:
        i = int(i)
        if not 0 <= i < size:
            raise IndexError(f"batch index {i} out of range for buffer size {size}")
        transitions.append(buffer[i])
    if buffer.env_kind is None:
        raise ValueError("buffer has no env_kind; cannot encode state-action rows")
    rows = np.vstack([encode_state_action(buffer.env_kind, tr.s, tr.a)
                      for tr in transitions])
    seq = ObservationSequence(rows, label=f"{buffer.env_kind}-minibatch")
    return seq, transitions
