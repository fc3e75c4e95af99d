"""Directional closed testing: data-driven selection of one direction per
parameter, selection-adjusted conditional p-values, and simultaneous lower
bounds on the number of positive and negative parameters in any subset.

The selection step puts index i on the "minus" side (test theta_i <= 0)
when p_i <= tau_i and on the "plus" side (test theta_i >= 0 / > 0)
otherwise, and inflates the surviving one-sided p-value by the selection
probability: 2*p_i resp. 2*q_i at the default threshold 1/2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import ParamsMixin
from .closed_testing import (
    HypothesisFamily,
    closure_adjusted_pvalues_shortcut,
    local_test_pvalue,
    lower_bound_bruteforce,
    lower_bound_shortcut,
)
from .combiners import combine
from .validation import MAX_EXHAUSTIVE, SizeError, check_alpha, check_index_set, check_pvalues

__all__ = [
    "SignSplit",
    "DirectionalBounds",
    "sign_split",
    "dct_bounds",
    "qi_closed_testing",
    "DirectionalClosedTesting",
    "QIClosedTesting",
]


@dataclass(frozen=True)
class SignSplit:
    """Selection state: which one-sided hypothesis is tested per index and
    the conditional (selection-inflated) p-values."""

    n: int
    s_minus: tuple
    s_plus: tuple
    cond: np.ndarray
    sign_vector: np.ndarray

    def side_values(self, minus: bool) -> np.ndarray:
        idx = self.s_minus if minus else self.s_plus
        return self.cond[list(idx)]


def sign_split(p, thresholds=None) -> SignSplit:
    """Split indices at the selection threshold and inflate p-values.

    ``thresholds`` may be a scalar or per-index array in [0, 1]; the
    default 1/2 doubles the selected one-sided p-value.  A threshold of 1
    (resp. 0) pins the index to the minus (plus) side with its p-value
    taken undoubled, for directions fixed a priori.  The boundary
    p_i == tau_i belongs to the minus side.
    """
    p = check_pvalues(p)
    n = p.size
    if thresholds is None:
        tau = np.full(n, 0.5)
    else:
        tau = np.broadcast_to(np.asarray(thresholds, dtype=float), (n,)).copy()
        if np.any((tau < 0) | (tau > 1)):
            raise ValueError("thresholds must lie in [0, 1]")
    minus = (p <= tau) & (tau > 0)
    cond = np.empty(n)
    with np.errstate(divide="ignore", invalid="ignore"):
        cond[minus] = np.where(tau[minus] > 0, p[minus] / tau[minus], 1.0)
        cond[~minus] = np.where(tau[~minus] < 1, (1.0 - p[~minus]) / (1.0 - tau[~minus]), 1.0)
    cond = np.clip(cond, 0.0, 1.0)
    sign = np.where(minus, -1, 1)
    return SignSplit(
        n=n,
        s_minus=tuple(int(i) for i in np.flatnonzero(minus)),
        s_plus=tuple(int(i) for i in np.flatnonzero(~minus)),
        cond=cond,
        sign_vector=sign,
    )


@dataclass(frozen=True)
class DirectionalBounds:
    """Per-subset lower bounds and sign discoveries.

    ``ell_plus[I]`` bounds the number of positive parameters in I from
    below, ``ell_minus[I]`` the number of negative ones; ``adjusted[i]``
    is the closed-testing adjusted p-value of the hypothesis selected for
    index i, so discoveries at any level a <= alpha are {adjusted <= a}.
    """

    ell_plus: dict
    ell_minus: dict
    d_plus: tuple
    d_minus: tuple
    adjusted: np.ndarray


def _conditional_family(split: SignSplit, combiner: str, alpha: float) -> HypothesisFamily:
    return HypothesisFamily(split.cond, combiner, alpha)


def dct_bounds(queries, split: SignSplit, combiner: str, alpha: float,
               exhaustive: bool = False) -> DirectionalBounds:
    """Directional closed testing bounds over the queried index sets.

    For each queried I the bound on positives is the closed-testing lower
    bound over I intersected with the minus side (and symmetrically for
    negatives), computed on the conditional p-values of all n selected
    hypotheses.
    """
    alpha = check_alpha(alpha)
    fam = _conditional_family(split, combiner, alpha)
    lower = lower_bound_bruteforce if exhaustive else lower_bound_shortcut
    sminus, splus = set(split.s_minus), set(split.s_plus)
    ell_plus, ell_minus = {}, {}
    for q in queries:
        idx = check_index_set(q, split.n)
        ell_plus[idx] = lower([i for i in idx if i in sminus], fam, alpha)
        ell_minus[idx] = lower([i for i in idx if i in splus], fam, alpha)
    adjusted = closure_adjusted_pvalues_shortcut(fam)
    d_plus = tuple(i for i in split.s_minus if adjusted[i] <= alpha)
    d_minus = tuple(i for i in split.s_plus if adjusted[i] <= alpha)
    return DirectionalBounds(ell_plus, ell_minus, d_plus, d_minus, adjusted)


def qi_closed_testing(split: SignSplit, combiner: str, alpha: float,
                      queries=None) -> tuple[DirectionalBounds, float]:
    """Closed testing gated by the qualitative-interaction global test.

    Local tests behave as in plain directional closed testing, except
    that every intersection containing a full selection side is tested
    with the two-sided global statistic max(f over minus side, f over
    plus side).  When that global p-value exceeds alpha no intersection
    can be rejected.  Exhaustive enumeration (n <= 25); the modified
    tests are not symmetric across hypotheses, so the polynomial
    shortcut does not apply.
    """
    alpha = check_alpha(alpha)
    n = split.n
    if n > MAX_EXHAUSTIVE:
        raise SizeError(f"qualitative-interaction closed testing refused for n={n} > {MAX_EXHAUSTIVE}")
    cond = split.cond
    sminus, splus = set(split.s_minus), set(split.s_plus)
    qi_pvalue = max(
        combine(split.side_values(minus=True), combiner),
        combine(split.side_values(minus=False), combiner),
    )

    def local(members: tuple) -> float:
        mem = set(members)
        if mem >= sminus or mem >= splus:
            return qi_pvalue
        return combine(cond[list(members)], combiner)

    masks = range(1 << n)
    members_of = [tuple(i for i in range(n) if mask >> i & 1) for mask in masks]
    nonrej = np.array([local(mem) > alpha for mem in members_of])
    nonrej_up = nonrej.copy()
    all_masks = np.arange(1 << n)
    for b in range(n):
        lacks = (all_masks >> b & 1) == 0
        nonrej_up[lacks] |= nonrej_up[all_masks[lacks] | (1 << b)]

    adjusted = np.zeros(n)
    for i in range(n):
        adjusted[i] = max(local(mem) for mask, mem in zip(masks, members_of) if mask >> i & 1)

    def lower(idx: tuple) -> int:
        imask = sum(1 << i for i in idx)
        best, sub = 0, imask
        while True:
            if nonrej_up[sub]:
                best = max(best, bin(sub).count("1"))
            if sub == 0:
                break
            sub = (sub - 1) & imask
        return len(idx) - best

    if queries is None:
        queries = [tuple(range(n))]
    ell_plus, ell_minus = {}, {}
    for q in queries:
        idx = check_index_set(q, n)
        ell_plus[idx] = lower(tuple(i for i in idx if i in sminus))
        ell_minus[idx] = lower(tuple(i for i in idx if i in splus))
    d_plus = tuple(i for i in split.s_minus if adjusted[i] <= alpha)
    d_minus = tuple(i for i in split.s_plus if adjusted[i] <= alpha)
    return DirectionalBounds(ell_plus, ell_minus, d_plus, d_minus, adjusted), qi_pvalue


class DirectionalClosedTesting(ParamsMixin):
    """Estimator-style front end for directional closed testing.

    Parameters
    ----------
    combiner : str
        Combining function name ("fisher", "simes", "msimes", "sidak",
        "bonferroni").
    alpha : float
        Simultaneous error level of the conditional guarantee.
    thresholds : float, array-like or None
        Per-index selection thresholds; None means 1/2 everywhere.

    After ``fit(p)`` the instance exposes ``split_``, ``adjusted_pvalues_``,
    ``d_plus_``/``d_minus_`` (indices with a sign conclusion), and the
    global bounds ``ell_plus_``/``ell_minus_``; ``lower_bounds(I)`` answers
    subset queries against the fitted family.
    """

    def __init__(self, combiner: str = "fisher", alpha: float = 0.05, thresholds=None):
        self.combiner = combiner
        self.alpha = alpha
        self.thresholds = thresholds

    def fit(self, p, y=None):
        p = check_pvalues(p)
        self.n_features_in_ = p.size
        self.split_ = sign_split(p, self.thresholds)
        res = dct_bounds([range(p.size)], self.split_, self.combiner, self.alpha)
        self.adjusted_pvalues_ = res.adjusted
        self.d_plus_ = res.d_plus
        self.d_minus_ = res.d_minus
        full = tuple(range(p.size))
        self.ell_plus_ = res.ell_plus[full]
        self.ell_minus_ = res.ell_minus[full]
        return self

    def lower_bounds(self, subset) -> tuple[int, int]:
        self._check_fitted()
        res = dct_bounds([subset], self.split_, self.combiner, self.alpha)
        (key,) = res.ell_plus.keys()
        return res.ell_plus[key], res.ell_minus[key]

    def _check_fitted(self):
        if not hasattr(self, "split_"):
            raise RuntimeError("this estimator has not been fitted; call fit(p) first")


class QIClosedTesting(ParamsMixin):
    """Estimator for the qualitative-interaction-gated procedure.

    Fitting sets ``qi_pvalue_`` (the global two-sided selective test),
    per-index ``adjusted_pvalues_``, discovery sets and the global
    bounds.  With no qualitative interaction detected at ``alpha`` the
    procedure rejects nothing and all bounds are zero.
    """

    def __init__(self, combiner: str = "fisher", alpha: float = 0.05):
        self.combiner = combiner
        self.alpha = alpha

    def fit(self, p, y=None):
        p = check_pvalues(p)
        self.n_features_in_ = p.size
        self.split_ = sign_split(p)
        res, qi = qi_closed_testing(self.split_, self.combiner, self.alpha)
        self.qi_pvalue_ = qi
        self.adjusted_pvalues_ = res.adjusted
        self.d_plus_ = res.d_plus
        self.d_minus_ = res.d_minus
        full = tuple(range(p.size))
        self.ell_plus_ = res.ell_plus[full]
        self.ell_minus_ = res.ell_minus[full]
        return self
