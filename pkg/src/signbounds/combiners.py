"""Monotone, symmetric p-value combining functions.

Each combiner maps a multiset of valid p-values to one valid p-value for
their intersection hypothesis.  All of them are monotone (coordinatewise
larger inputs never decrease the output) and symmetric, which is what the
polynomial shortcuts elsewhere in the package rely on.  Combining the
empty multiset yields 1: an empty intersection is never rejected.
"""

from __future__ import annotations

import math

import numpy as np

from .special import chi_square_sf

__all__ = ["COMBINER_NAMES", "combine"]

COMBINER_NAMES = ("fisher", "simes", "msimes", "sidak", "bonferroni")


def combine(values, kind: str) -> float:
    """Combined p-value of a multiset of p-values under the named combiner.

    Parameters
    ----------
    values : iterable of float
        p-values in [0, 1]; may be empty.
    kind : str
        One of ``fisher``, ``simes``, ``msimes``, ``sidak``, ``bonferroni``.
    """
    kind = _check_kind(kind)
    v = np.asarray(list(values), dtype=float)
    if v.size == 0:
        return 1.0
    if np.isnan(v).any() or v.min() < 0.0 or v.max() > 1.0:
        raise ValueError("p-values to combine must lie in [0, 1]")
    d = v.size
    if kind == "fisher":
        if v.min() == 0.0:
            return 0.0
        stat = -2.0 * float(np.log(v).sum())
        return chi_square_sf(stat, 2 * d)
    if kind == "sidak":
        return min(1.0, 1.0 - (1.0 - float(v.min())) ** d)
    if kind == "bonferroni":
        return min(1.0, d * float(v.min()))
    # Simes-type: min over ranks of multiplier * x_(i) / i.
    v_sorted = np.sort(v)
    ranks = np.arange(1, d + 1, dtype=float)
    if kind == "msimes" and d > 2:
        mult = 2.0 * (int((v > 0.5).sum()) + 1)
    else:
        mult = float(d)
    return min(1.0, float(np.min(mult * v_sorted / ranks)))


def _check_kind(kind: str) -> str:
    name = str(kind).lower()
    if name not in COMBINER_NAMES:
        raise ValueError(f"unknown combiner {kind!r}; expected one of {COMBINER_NAMES}")
    return name
