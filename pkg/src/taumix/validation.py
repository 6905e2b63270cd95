"""Input validation helpers shared across the public API."""

from __future__ import annotations

import numbers

import numpy as np


def as_observation_matrix(x, name="x"):
    """Coerce a sequence of observations to a (T, d) float64 matrix.

    Accepts a 1-D array (treated as d=1), a 2-D array, or anything with a
    ``data`` attribute holding one of those (an ObservationSequence).
    """
    if hasattr(x, "data") and not isinstance(x, np.ndarray):
        x = x.data
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 1-D or 2-D, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"{name} must be nonempty, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError(f"{name} contains non-finite values")
    return np.ascontiguousarray(arr)


def check_positive_int(value, name, minimum=1):
    if not isinstance(value, numbers.Integral):
        raise TypeError(f"{name} must be an integer, got {type(value).__name__}")
    value = int(value)
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return value


def check_nonnegative_int(value, name):
    return check_positive_int(value, name, minimum=0)


def as_rng(seed_or_rng):
    """Accept an int seed, a SeedSequence, a Generator, or None."""
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return np.random.default_rng(seed_or_rng)
