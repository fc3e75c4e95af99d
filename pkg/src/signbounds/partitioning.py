"""Partitioning of parameter space into sign orthants with adaptive local
tests: confidence sets for the number of positive parameters in any index
set, lower bounds on positives and non-positives, adjusted base p-values,
partial-conjunction bounds, and the unconditional single-step variants.

Exactly one orthant hypothesis is true, so each is tested at level alpha
without multiplicity adjustment.  The adaptive test of an orthant combines
only the conditional p-values whose selected direction contradicts it; the
orthant matching the realized selection combines nothing and gets p-value
1, so it is never rejected and every confidence set is non-empty.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .base import ParamsMixin
from .closed_testing import HypothesisFamily, closure_adjusted_pvalues_shortcut
from .combiners import combine
from .directional import SignSplit, sign_split
from .prefixes import prefix_grid
from .validation import MAX_EXHAUSTIVE, SizeError, check_alpha, check_index_set, check_pvalues

__all__ = [
    "ConfidenceSet",
    "PCBounds",
    "adaptive_orthant_pvalue",
    "partition_confidence_set_bruteforce",
    "ap_bounds_shortcut",
    "ap_adjusted_base_pvalues",
    "alpha_tilde",
    "unconditional_partition_bounds",
    "pc_pvalue",
    "adaptive_pc_bounds",
    "generalized_qi_test",
    "AdaptivePartition",
]


@dataclass(frozen=True)
class ConfidenceSet:
    """Confidence set for the number of positive parameters in a subset.

    ``n_plus_set`` collects every retained count v; the reported interval
    is its hull: ``ell_plus_tilde`` = min, and ``ell_minus_tilde`` =
    |I| - max bounds the non-positives.  The set itself may have holes.
    """

    subset: tuple
    n_plus_set: tuple
    ell_plus_tilde: int
    ell_minus_tilde: int
    f_values: tuple = field(default=())

    @property
    def n_plus_upper(self) -> int:
        return len(self.subset) - self.ell_minus_tilde


@dataclass(frozen=True)
class PCBounds:
    """Sequential partial-conjunction bounds: l_plus <= n+ and
    l_minus <= (number of non-positives), with the per-step p-values."""

    l_plus: int
    l_minus: int
    pc_pvalues_plus: tuple
    pc_pvalues_minus: tuple


def adaptive_orthant_pvalue(k_set, split: SignSplit, combiner: str) -> float:
    """p-value of the orthant claiming exactly ``k_set`` positive:
    combines 2p over (complement of K) on the minus side with 2q over K on
    the plus side; empty combination gives 1."""
    k = set(check_index_set(k_set, split.n))
    values = [split.cond[i] for i in split.s_minus if i not in k]
    values += [split.cond[i] for i in split.s_plus if i in k]
    return combine(values, combiner)


def partition_confidence_set_bruteforce(subset, split: SignSplit, combiner: str,
                                        alpha: float) -> ConfidenceSet:
    """Exact confidence set by enumerating all 2^n orthants (n <= 25)."""
    alpha = check_alpha(alpha)
    n = split.n
    if n > MAX_EXHAUSTIVE:
        raise SizeError(f"orthant enumeration refused for n={n} > {MAX_EXHAUSTIVE}")
    idx = check_index_set(subset, n)
    iset = set(idx)
    f_values = np.zeros(len(idx) + 1)
    for mask in range(1 << n):
        k = [i for i in range(n) if mask >> i & 1]
        v = len(iset.intersection(k))
        f_values[v] = max(f_values[v], adaptive_orthant_pvalue(k, split, combiner))
    return _confidence_set_from_f(idx, f_values, alpha)


def _confidence_set_from_f(idx: tuple, f_values: np.ndarray, alpha: float) -> ConfidenceSet:
    retained = tuple(int(v) for v in np.flatnonzero(f_values > alpha))
    if not retained:
        raise AssertionError("confidence set cannot be empty: realized orthant is never rejected")
    return ConfidenceSet(
        subset=idx,
        n_plus_set=retained,
        ell_plus_tilde=min(retained),
        ell_minus_tilde=len(idx) - max(retained),
        f_values=tuple(float(f) for f in f_values),
    )


def _split_groups(subset, split: SignSplit):
    """Descending-sorted conditional values of the four selection/subset cells."""
    iset = set(subset)
    a = np.sort([split.cond[i] for i in split.s_minus if i in iset])[::-1]
    b = np.sort([split.cond[i] for i in split.s_minus if i not in iset])[::-1]
    c = np.sort([split.cond[i] for i in split.s_plus if i in iset])[::-1]
    d = np.sort([split.cond[i] for i in split.s_plus if i not in iset])[::-1]
    return a, b, c, d


def ap_bounds_shortcut(subset, split: SignSplit, combiner: str, alpha: float) -> ConfidenceSet:
    """Polynomial-time confidence set, identical to the brute force.

    For each hypothesized count v the worst-case (largest) orthant
    p-value combines the largest conditional values of the four groups
    (minus/plus side crossed with inside/outside the subset), with group
    sizes running over the admissible ranges.  O(|I|^2 max(1,|I^c|^2))
    combine evaluations; when the subset is everything this collapses to
    a single prefix grid.
    """
    alpha = check_alpha(alpha)
    idx = check_index_set(subset, split.n)
    a, b, c, d = _split_groups(idx, split)
    if b.size == 0 and d.size == 0:
        f_values = _f_values_full(a, c, combiner)
    else:
        f_values = _f_values_general(a, b, c, d, len(idx), split.n - len(idx), combiner)
    return _confidence_set_from_f(idx, f_values, alpha)


def _f_values_full(a: np.ndarray, c: np.ndarray, combiner: str) -> np.ndarray:
    """f_v over the (minus-inside, plus-inside) prefix grid; v = |a| - i + j."""
    grid = prefix_grid(a, c, combiner)
    ii, jj = np.meshgrid(np.arange(a.size + 1), np.arange(c.size + 1), indexing="ij")
    v = a.size - ii + jj
    f_values = np.zeros(a.size + c.size + 1)
    np.maximum.at(f_values, v.ravel(), grid.ravel())
    return f_values


def _f_values_general(a, b, c, d, size_i, size_ic, combiner):
    sa, sb, sc, sd = a.size, b.size, c.size, d.size
    f_values = np.zeros(size_i + 1)
    for v in range(size_i + 1):
        best = 0.0
        for u in range(size_ic + 1):
            for k in range(max(0, v - sa), min(v, sc) + 1):
                na = sa - (v - k)
                for j in range(max(0, u - sb), min(u, sd) + 1):
                    nb = sb - (u - j)
                    values = np.concatenate([a[:na], b[:nb], c[:k], d[:j]])
                    best = max(best, combine(values, combiner))
                    if best >= 1.0:
                        break
                if best >= 1.0:
                    break
            if best >= 1.0:
                break
        f_values[v] = best
    return f_values


def ap_adjusted_base_pvalues(split: SignSplit, combiner: str) -> tuple[np.ndarray, np.ndarray]:
    """Adjusted p-values (p_bar, q_bar) for the per-index sign claims.

    p_bar[i] is the largest p-value over orthants excluding i (evidence
    for theta_i > 0), q_bar[i] over orthants including i (evidence for
    theta_i <= 0); each equals the singleton f_0/f_1 of the shortcut.
    """
    n = split.n
    p_bar = np.empty(n)
    q_bar = np.empty(n)
    for i in range(n):
        cs = ap_bounds_shortcut([i], split, combiner, alpha=0.5)
        p_bar[i], q_bar[i] = cs.f_values[0], cs.f_values[1]
    return p_bar, q_bar


def alpha_tilde(alpha: float, n: int) -> float:
    """Inflated level alpha/(1 - 2^-n) giving the unconditional guarantee."""
    alpha = check_alpha(alpha)
    if n < 1:
        raise ValueError("n must be >= 1")
    return min(1.0, alpha / (1.0 - 2.0 ** (-n)))


def unconditional_partition_bounds(p, combiner: str, alpha: float) -> tuple[tuple, tuple]:
    """Single-step sign declarations from unconditional partitioning.

    Index i is declared positive when p_i is at most the per-combiner
    threshold and non-positive when q_i = 1 - p_i is; thresholds are
    1-(1-alpha)^(1/n) for the Sidak combiner (independence) and alpha/n
    for Bonferroni (any dependence).
    """
    p = check_pvalues(p)
    alpha = check_alpha(alpha)
    n = p.size
    kind = str(combiner).lower()
    if kind == "sidak":
        threshold = 1.0 - (1.0 - alpha) ** (1.0 / n)
    elif kind == "bonferroni":
        threshold = alpha / n
    else:
        raise ValueError("unconditional partitioning supports 'sidak' or 'bonferroni'")
    declare_plus = tuple(int(i) for i in np.flatnonzero(p <= threshold))
    declare_nonpos = tuple(int(i) for i in np.flatnonzero(1.0 - p <= threshold))
    return declare_plus, declare_nonpos


def pc_pvalue(r: int, side: str, split: SignSplit, combiner: str) -> float:
    """Conditional partial-conjunction p-value for "at least r" claims.

    Combines the side's conditional p-values after dropping its r - 1
    smallest; 1 when fewer than r indices were selected on that side.
    """
    if not 1 <= r <= split.n:
        raise ValueError(f"r must be in 1..{split.n}, got {r}")
    if side not in ("plus", "minus"):
        raise ValueError("side must be 'plus' or 'minus'")
    values = np.sort(split.side_values(minus=(side == "plus")))
    # Claims about positives draw on the minus selection side and vice versa.
    if r > values.size:
        return 1.0
    return combine(values[r - 1:], combiner)


def adaptive_pc_bounds(split: SignSplit, combiner: str, alpha: float) -> PCBounds:
    """Sequential partial-conjunction testing on both selection sides.

    Steps up r on the positive claims until the first non-rejection, then
    on the non-positive claims; the two counts bound n+ and the number of
    non-positives with the conditional guarantee.
    """
    alpha = check_alpha(alpha)
    pvals_plus, l_plus = [], 0
    for r in range(1, len(split.s_minus) + 1):
        pv = pc_pvalue(r, "plus", split, combiner)
        pvals_plus.append(pv)
        if pv > alpha:
            break
        l_plus += 1
    if l_plus == split.n:
        return PCBounds(split.n, 0, tuple(pvals_plus), ())
    pvals_minus, l_minus = [], 0
    for r in range(1, len(split.s_plus) + 1):
        pv = pc_pvalue(r, "minus", split, combiner)
        pvals_minus.append(pv)
        if pv > alpha:
            break
        l_minus += 1
    return PCBounds(l_plus, l_minus, tuple(pvals_plus), tuple(pvals_minus))


def generalized_qi_test(a: int, b: int, split: SignSplit, combiner: str, alpha: float) -> bool:
    """Level-alpha test of the generalized qualitative-interaction null
    that n+ < a or n+ > b; (a, b) = (1, n-1) recovers the global two-sided
    selective test."""
    if not 1 <= a < b <= split.n - 1:
        raise ValueError(f"need 1 <= a < b <= n-1, got a={a}, b={b}, n={split.n}")
    pc = adaptive_pc_bounds(split, combiner, alpha)
    return pc.l_plus >= a and split.n - pc.l_minus <= b


class AdaptivePartition(ParamsMixin):
    """Estimator-style front end for partitioning with adaptive local tests.

    Parameters
    ----------
    combiner : str
        Combining function name.
    alpha : float
        Error level of the simultaneous guarantee.
    level : str
        "alpha" runs the local tests at ``alpha`` (conditional-on-selection
        guarantee); "alpha-tilde" inflates to alpha/(1-2^-n), valid for the
        unconditional guarantee only.

    ``fit(p)`` populates the global confidence set and bounds
    (``n_plus_set_``, ``ell_plus_``, ``ell_minus_``), the adjusted base
    p-values ``p_bar_``/``q_bar_`` and the discovery index sets
    ``d_plus_``/``d_minus_``; ``confidence_set(I)`` answers subset queries
    and ``pc_bounds()`` runs the sequential partial-conjunction variant.
    """

    def __init__(self, combiner: str = "fisher", alpha: float = 0.05, level: str = "alpha"):
        self.combiner = combiner
        self.alpha = alpha
        self.level = level

    def _working_level(self, n: int) -> float:
        if self.level == "alpha":
            return check_alpha(self.alpha)
        if self.level == "alpha-tilde":
            return alpha_tilde(self.alpha, n)
        raise ValueError("level must be 'alpha' or 'alpha-tilde'")

    def fit(self, p, y=None):
        p = check_pvalues(p)
        n = p.size
        self.n_features_in_ = n
        self.split_ = sign_split(p)
        self.level_used_ = self._working_level(n)
        cs = ap_bounds_shortcut(range(n), self.split_, self.combiner, self.level_used_)
        self.f_values_ = cs.f_values
        self.n_plus_set_ = cs.n_plus_set
        self.ell_plus_ = cs.ell_plus_tilde
        self.ell_minus_ = cs.ell_minus_tilde
        self.p_bar_, self.q_bar_ = ap_adjusted_base_pvalues(self.split_, self.combiner)
        self.d_plus_ = tuple(int(i) for i in np.flatnonzero(self.p_bar_ <= self.level_used_))
        self.d_minus_ = tuple(int(i) for i in np.flatnonzero(self.q_bar_ <= self.level_used_))
        return self

    def confidence_set(self, subset) -> ConfidenceSet:
        self._check_fitted()
        return ap_bounds_shortcut(subset, self.split_, self.combiner, self.level_used_)

    def pc_bounds(self) -> PCBounds:
        self._check_fitted()
        return adaptive_pc_bounds(self.split_, self.combiner, self.level_used_)

    def _check_fitted(self):
        if not hasattr(self, "split_"):
            raise RuntimeError("this estimator has not been fitted; call fit(p) first")
