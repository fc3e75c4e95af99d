"""Closed testing over a family of p-values: local tests, adjusted p-values,
and simultaneous lower bounds on the number of false hypotheses in a subset.

Two routes are provided for the bound: an exhaustive walk over the full
subset lattice (exact by definition, capped at 25 hypotheses) and a
polynomial shortcut valid for every monotone, symmetric combiner.  The two
must agree everywhere; the test suite enforces this on random instances.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .combiners import combine
from .prefixes import prefix_combine, prefix_grid
from .validation import MAX_EXHAUSTIVE, SizeError, check_alpha, check_index_set, check_pvalues

__all__ = [
    "HypothesisFamily",
    "local_test_pvalue",
    "closure_adjusted_pvalue",
    "closure_adjusted_pvalues_shortcut",
    "lower_bound_bruteforce",
    "lower_bound_shortcut",
    "max_over_supersets",
]


@dataclass(frozen=True)
class HypothesisFamily:
    """A family of base hypotheses with one p-value each.

    ``labels`` defaults to the indices; it only matters for reporting.
    """

    pvalues: np.ndarray
    combiner: str = "fisher"
    alpha: float = 0.05
    labels: tuple = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "pvalues", check_pvalues(self.pvalues))
        check_alpha(self.alpha)
        if self.labels is None:
            object.__setattr__(self, "labels", tuple(range(self.m)))
        elif len(set(self.labels)) != self.m:
            raise ValueError("labels must be distinct and match pvalues in length")

    @property
    def m(self) -> int:
        return self.pvalues.size


def local_test_pvalue(subset, family: HypothesisFamily) -> float:
    """Combined p-value of the intersection hypothesis over ``subset``."""
    idx = check_index_set(subset, family.m)
    return combine(family.pvalues[list(idx)], family.combiner)


def closure_adjusted_pvalue(i: int, family: HypothesisFamily) -> float:
    """Closed-testing adjusted p-value of hypothesis ``i``: the maximum
    local p-value over all intersections containing it (exhaustive path).
    """
    m = family.m
    if not 0 <= i < m:
        raise IndexError(f"index {i} out of range for m={m}")
    if m > MAX_EXHAUSTIVE:
        raise SizeError(f"exhaustive closure over m={m} > {MAX_EXHAUSTIVE} hypotheses refused")
    p = family.pvalues
    rest = [j for j in range(m) if j != i]
    best = 0.0
    for mask in range(1 << len(rest)):
        values = [p[i]] + [p[rest[b]] for b in range(len(rest)) if mask >> b & 1]
        best = max(best, combine(values, family.combiner))
        if best >= 1.0:
            break
    return best


def closure_adjusted_pvalues_shortcut(family: HypothesisFamily) -> np.ndarray:
    """All m closure-adjusted p-values in O(m^2).

    By monotonicity and symmetry, the maximizing superset of {i} of any
    given size consists of the largest remaining p-values; it is either a
    plain prefix of the descending sort (when it absorbs p_i) or such a
    prefix with p_i appended.
    """
    p = family.pvalues
    m = family.m
    if m == 0:
        return np.empty(0)
    order = np.argsort(-p, kind="stable")
    z = p[order]
    pref = prefix_combine(z, family.combiner)  # pref[d] = combine of d largest
    # Extensions that absorb the element at sorted position r are plain
    # prefixes z[:d] with d >= r + 2 (z[r] itself sits inside them).
    sufmax = np.concatenate([np.maximum.accumulate(pref[::-1])[::-1], [-np.inf]])
    absorb = sufmax[np.minimum(np.arange(m) + 2, m + 1)]
    adj_sorted = np.maximum(np.max(_insert_grid(z, family.combiner), axis=1), absorb)
    out = np.empty(m)
    out[order] = adj_sorted
    return out


def _insert_grid(z, kind):
    """F[r, c] = combine({z[r]} union z[:c]) for c <= r, else -inf.

    All of z[:c] is >= z[r], so z[r] has ascending rank 1 and z[j] has
    ascending rank c + 1 - j in the union.
    """
    m = z.size
    r = np.arange(m)[:, None]
    c = np.arange(m)[None, :]
    valid = c <= r
    d = c + 1.0
    zr = z[:, None]
    if kind == "fisher":
        from .special import chi_square_sf

        with np.errstate(divide="ignore"):
            lz = np.log(z)
            pref = np.concatenate([[0.0], np.cumsum(lz)])
        stat = np.broadcast_to(-2.0 * (lz[:, None] + pref[None, :m]), (m, m))
        sf = np.frompyfunc(chi_square_sf, 2, 1)
        out = np.full((m, m), -np.inf)
        rr, cc = np.nonzero(valid)
        out[rr, cc] = sf(stat[rr, cc], 2 * (cc + 1)).astype(float)
        return out
    if kind == "bonferroni":
        out = np.minimum(d * zr, 1.0)
    elif kind == "sidak":
        out = 1.0 - (1.0 - zr) ** d
    else:
        j = np.arange(m)[:, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            w = np.where(j < c, z[:, None] / (c + 1 - j), np.inf)
        q = np.min(w, axis=0) if m else np.empty(0)  # q[c] = min_{j<c} z[j]/(c+1-j)
        core = np.minimum(zr, q[None, :])
        if kind == "msimes":
            cgz = np.cumsum(z > 0.5) - (z > 0.5)  # strict counts within z[:c]
            cnt = (zr > 0.5) + cgz[None, :]
            mult = np.where(d > 2, 2.0 * (cnt + 1), d)
        else:
            mult = d
        out = np.minimum(mult * core, 1.0)
    return np.where(valid, out, -np.inf)


def max_over_supersets(subset, family: HypothesisFamily) -> float:
    """max over K containing ``subset`` of the local p-value of K.

    The maximizing extension of any size adds the largest remaining
    p-values, so only |rest| + 1 candidates need evaluation.
    """
    idx = list(check_index_set(subset, family.m))
    p = family.pvalues
    rest = np.sort(p[[j for j in range(family.m) if j not in set(idx)]])[::-1]
    base = p[idx]
    best = 0.0
    for c in range(rest.size + 1):
        best = max(best, combine(np.concatenate([base, rest[:c]]), family.combiner))
        if best >= 1.0:
            break
    return best


def lower_bound_bruteforce(subset, family: HypothesisFamily, alpha: float | None = None) -> int:
    """Exact lower bound on the number of false hypotheses in ``subset``
    by full enumeration of the closed-testing lattice (m <= 25)."""
    m = family.m
    if m > MAX_EXHAUSTIVE:
        raise SizeError(f"exhaustive lattice with m={m} > {MAX_EXHAUSTIVE} hypotheses refused")
    idx = check_index_set(subset, m)
    if not idx:
        return 0
    alpha = check_alpha(alpha if alpha is not None else family.alpha)
    p = family.pvalues
    n_sets = 1 << m
    nonrej = np.zeros(n_sets, dtype=bool)
    members = [np.flatnonzero([mask >> b & 1 for b in range(m)]) for mask in range(n_sets)]
    for mask in range(n_sets):
        nonrej[mask] = combine(p[members[mask]], family.combiner) > alpha
    # nonrej_up[J] = any non-rejected superset of J  =>  closure keeps J.
    nonrej_up = nonrej.copy()
    all_masks = np.arange(n_sets)
    for b in range(m):
        lacks = (all_masks >> b & 1) == 0
        nonrej_up[lacks] |= nonrej_up[all_masks[lacks] | (1 << b)]
    imask = sum(1 << i for i in idx)
    best = 0
    sub = imask
    while True:
        if nonrej_up[sub]:
            best = max(best, bin(sub).count("1"))
        if sub == 0:
            break
        sub = (sub - 1) & imask
    return len(idx) - best


def lower_bound_shortcut(subset, family: HypothesisFamily, alpha: float | None = None) -> int:
    """Same value as :func:`lower_bound_bruteforce` in polynomial time.

    The bound equals |I| minus the largest i for which some superset built
    from the i largest p-values inside I plus any number of the largest
    p-values outside I stays non-rejected.
    """
    m = family.m
    idx = check_index_set(subset, m)
    if not idx:
        return 0
    alpha = check_alpha(alpha if alpha is not None else family.alpha)
    p = family.pvalues
    inside = np.sort(p[list(idx)])[::-1]
    outside = np.sort(p[[j for j in range(m) if j not in set(idx)]])[::-1]
    grid = prefix_grid(inside, outside, family.combiner)
    return _bound_from_grid(grid, alpha)


def _bound_from_grid(grid: np.ndarray, alpha: float) -> int:
    """|I| - max{i : some row-i cell exceeds alpha}; row 0 always qualifies."""
    size = grid.shape[0] - 1
    keep = np.flatnonzero((grid > alpha).any(axis=1))
    return size - int(keep.max())
