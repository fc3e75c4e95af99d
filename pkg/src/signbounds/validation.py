"""Input validation helpers shared by the estimators and the functional API."""

from __future__ import annotations

import numpy as np

__all__ = ["SizeError", "check_pvalues", "check_alpha", "check_index_set"]

# Exhaustive lattice/orthant enumeration is refused above this size.
MAX_EXHAUSTIVE = 25


class SizeError(ValueError):
    """An exhaustive (exponential) path was requested beyond the size cap."""


def check_pvalues(p, name: str = "p") -> np.ndarray:
    """Coerce to a 1-d float array of valid probabilities."""
    arr = np.asarray(p, dtype=float)
    if arr.ndim != 1:
        arr = arr.reshape(-1)
    if arr.size and (np.isnan(arr).any() or arr.min() < 0.0 or arr.max() > 1.0):
        raise ValueError(f"{name} must lie in [0, 1]")
    return arr


def check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha!r}")
    return alpha


def check_index_set(subset, n: int) -> tuple[int, ...]:
    """Normalize an index set to a sorted tuple of distinct ints in range."""
    idx = sorted({int(i) for i in subset})
    if idx and (idx[0] < 0 or idx[-1] >= n):
        raise IndexError(f"index set {idx} out of range for n={n}")
    return tuple(idx)
