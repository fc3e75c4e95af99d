"""Vectorized evaluation of combined p-values over prefixes of sorted groups.

The polynomial shortcuts in this package all reduce to the same primitive:
evaluate ``combine(x[:i] + y[:j])`` for two descending-sorted value groups
and every pair ``(i, j)`` at once.  Monotonicity and symmetry of the
combiners make these prefix unions the worst-case (largest) combinations
among all index sets with the given per-group counts.

For Fisher the grid follows from prefix log-sums.  For the Simes-type
combiners each cell needs order statistics of the merged union; the
per-diagonal scheme below gets the full grid in O((s+t)^2) time by
splitting every element's merged rank into a part that depends only on
the cell's total size and a part that depends only on its own group.
"""

from __future__ import annotations

import numpy as np

from .special import chi_square_sf

__all__ = ["prefix_grid", "prefix_combine"]

_chi2_sf_u = np.frompyfunc(chi_square_sf, 2, 1)


def prefix_grid(x, y, kind: str) -> np.ndarray:
    """Matrix G with G[i, j] = combine(x[:i] union y[:j], kind).

    ``x`` and ``y`` must be sorted in descending order; either may be
    empty.  G has shape (len(x)+1, len(y)+1) and G[0, 0] = 1 (empty
    combination).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    s, t = x.size, y.size
    if np.any(x[:-1] < x[1:]) or np.any(y[:-1] < y[1:]):
        raise ValueError("prefix_grid expects descending-sorted inputs")
    if kind == "fisher":
        return _fisher_grid(x, y)
    if kind in ("bonferroni", "sidak"):
        return _min_based_grid(x, y, kind)
    if kind in ("simes", "msimes"):
        return _simes_grid(x, y, kind)
    raise ValueError(f"unknown combiner {kind!r}")


def prefix_combine(z, kind: str) -> np.ndarray:
    """Vector P with P[d] = combine(z[:d], kind) for descending-sorted z."""
    return prefix_grid(z, np.empty(0), kind)[:, 0]


def _fisher_grid(x, y):
    with np.errstate(divide="ignore"):
        px = np.concatenate([[0.0], np.cumsum(np.log(x))])
        py = np.concatenate([[0.0], np.cumsum(np.log(y))])
    stat = -2.0 * (px[:, None] + py[None, :])
    d = np.arange(x.size + 1)[:, None] + np.arange(y.size + 1)[None, :]
    out = np.ones(stat.shape)
    nz = d > 0
    out[nz] = _chi2_sf_u(stat[nz], 2 * d[nz]).astype(float)
    return out


def _min_based_grid(x, y, kind):
    s, t = x.size, y.size
    minx = np.concatenate([[np.inf], x])
    miny = np.concatenate([[np.inf], y])
    m = np.minimum(minx[:, None], miny[None, :])
    d = np.arange(s + 1)[:, None] + np.arange(t + 1)[None, :]
    out = np.empty((s + 1, t + 1))
    nz = d > 0
    if kind == "bonferroni":
        out[nz] = np.minimum(d[nz] * m[nz], 1.0)
    else:
        out[nz] = 1.0 - (1.0 - m[nz]) ** d[nz]
    out[0, 0] = 1.0
    return np.clip(out, 0.0, 1.0)


def _simes_grid(x, y, kind):
    """Simes / modified-Simes over all prefix unions.

    For an x-element at in-group position a, its ascending rank inside the
    union of cell (i, j) is (i - a) + max(0, j - G[a]) with G[a] the number
    of y-values exceeding it.  The two branches of the max are handled
    separately: when j <= G[a] the term x[a]/(i - a) depends on i only
    (suffix minima over a, precomputed per column); otherwise the term is
    x[a]/(D - r[a]) with D = i + j and r[a] the element's rank in the full
    merge, constant along each anti-diagonal (prefix minima per diagonal).
    """
    s, t = x.size, y.size
    # Strict/weak tie-break so merged ranks r form a permutation.
    gx = t - np.searchsorted(y[::-1], x, side="right")  # count of y > x[a]
    hy = s - np.searchsorted(x[::-1], y, side="left")   # count of x >= y[b]
    rx = np.arange(s) + gx
    ry = np.arange(t) + hy
    astar = np.searchsorted(gx, np.arange(t + 1), side="right")
    bstar = np.searchsorted(hy, np.arange(s + 1), side="right")

    suf_x = _suffix_min_ratio(x)  # suf_x[a0, i] = min_{a0<=a<i} x[a]/(i-a)
    suf_y = _suffix_min_ratio(y)

    core = np.full((s + 1, t + 1), np.inf)
    for dtot in range(1, s + t + 1):
        i = np.arange(max(0, dtot - t), min(s, dtot) + 1)
        j = dtot - i
        # Prefix minima of the merged-rank terms, valid where r < dtot.
        px = _prefix_min_terms(x, rx, dtot)
        py = _prefix_min_terms(y, ry, dtot)
        qx = np.minimum(i, astar[j])
        qy = np.minimum(j, bstar[i])
        ax = np.where(qx > 0, px[np.maximum(qx - 1, 0)], np.inf) if s else np.inf
        ay = np.where(qy > 0, py[np.maximum(qy - 1, 0)], np.inf) if t else np.inf
        bx = suf_x[astar[j], i]
        by = suf_y[bstar[i], j]
        core[i, j] = np.minimum(np.minimum(ax, bx), np.minimum(ay, by))

    d = np.arange(s + 1)[:, None] + np.arange(t + 1)[None, :]
    if kind == "msimes":
        cgx = np.concatenate([[0], np.cumsum(x > 0.5)])
        cgy = np.concatenate([[0], np.cumsum(y > 0.5)])
        mult = 2.0 * (cgx[:, None] + cgy[None, :] + 1)
        mult = np.where(d > 2, mult, d)
    else:
        mult = d
    with np.errstate(invalid="ignore"):
        out = np.clip(mult * core, 0.0, 1.0)
    out[0, 0] = 1.0
    return out


def _suffix_min_ratio(x):
    """M[a0, i] = min over a in [a0, i) of x[a]/(i-a); +inf on empty ranges."""
    s = x.size
    out = np.full((s + 1, s + 1), np.inf)
    if s == 0:
        return out
    a = np.arange(s)[:, None]
    i = np.arange(s + 1)[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        w = np.where(a < i, x[:, None] / (i - a), np.inf)
    out[:s] = np.minimum.accumulate(w[::-1], axis=0)[::-1]
    return out


def _prefix_min_terms(x, rank, dtot):
    den = dtot - rank
    terms = np.where(den >= 1, x / np.maximum(den, 1), np.inf)
    if terms.size == 0:
        return terms
    return np.minimum.accumulate(terms)
