"""Stepwise directional baselines: a generic step-down/step-up engine over
the n smallest one-sided p-values, instantiated with the classical
critical-value families for FWER and FDR control."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import ParamsMixin
from .validation import check_alpha, check_pvalues

__all__ = ["StepwiseSpec", "StepwiseResult", "build_spec", "run_stepwise", "StepwiseProcedure"]

PROCEDURE_NAMES = ("holm", "gr-fwer", "bh", "gr-fdr")

# name -> (mode, nonpositive-semantics flag)
_MODES = {
    "holm": ("step_down", False),
    "gr-fwer": ("step_down", True),
    "bh": ("step_up", False),
    "gr-fdr": ("step_up", True),
}


@dataclass(frozen=True)
class StepwiseSpec:
    """Critical values alpha_1 <= ... <= alpha_n plus the stepping mode.

    ``nonpositive`` records the declaration semantics: True means the
    negative-direction declarations read "theta <= 0" rather than
    "theta < 0".
    """

    mode: str
    critical_values: tuple
    name: str
    nonpositive: bool


@dataclass(frozen=True)
class StepwiseResult:
    declare_positive: tuple
    declare_negative: tuple
    nonpositive: bool
    n_rejections: int


def build_spec(name: str, n: int, alpha: float) -> StepwiseSpec:
    """Critical values for the named procedure.

    holm     step-down  alpha / {2(n - i + 1)}   positive/negative, FWER
    gr-fwer  step-down  alpha / (n - i + 1 + alpha)  positive/non-positive, FWER
    bh       step-up    i * alpha / (2n)         positive/negative, FDR
    gr-fdr   step-up    i * alpha / n            positive/non-positive, FDR
    """
    name = str(name).lower()
    if name not in _MODES:
        raise ValueError(f"unknown procedure {name!r}; expected one of {PROCEDURE_NAMES}")
    if n < 1:
        raise ValueError("n must be >= 1")
    alpha = check_alpha(alpha)
    i = np.arange(1, n + 1, dtype=float)
    if name == "holm":
        crit = alpha / (2.0 * (n - i + 1.0))
    elif name == "gr-fwer":
        crit = alpha / (n - i + 1.0 + alpha)
    elif name == "bh":
        crit = i * alpha / (2.0 * n)
    else:
        crit = i * alpha / n
    mode, nonpos = _MODES[name]
    return StepwiseSpec(mode, tuple(crit), name, nonpos)


def run_stepwise(p, spec: StepwiseSpec) -> StepwiseResult:
    """Directional decisions from the two-sided stepwise rule.

    x_i = min(p_i, q_i) are ordered; the number of rejections R follows
    the spec's mode (0 when no order statistic clears its critical
    value), and each of the R smallest x gets the direction its side won:
    positive when x_i came from p_i, with p_i = 1/2 resolving positive.
    """
    p = check_pvalues(p)
    n = p.size
    if len(spec.critical_values) != n:
        raise ValueError(f"spec is for n={len(spec.critical_values)}, got {n} p-values")
    q = 1.0 - p
    x = np.minimum(p, q)
    order = np.argsort(x, kind="stable")
    crit = np.asarray(spec.critical_values)
    below = x[order] <= crit
    if spec.mode == "step_down":
        r = int(np.argmin(below)) if not below.all() else n
    else:
        hits = np.flatnonzero(below)
        r = int(hits[-1]) + 1 if hits.size else 0
    rejected = order[:r]
    positive = tuple(int(i) for i in rejected if p[i] <= 0.5)
    negative = tuple(int(i) for i in rejected if p[i] > 0.5)
    return StepwiseResult(positive, negative, spec.nonpositive, r)


class StepwiseProcedure(ParamsMixin):
    """Estimator-style wrapper: fit(p) stores the directional decisions of
    the named stepwise procedure at level alpha."""

    def __init__(self, name: str = "gr-fwer", alpha: float = 0.05):
        self.name = name
        self.alpha = alpha

    def fit(self, p, y=None):
        p = check_pvalues(p)
        self.n_features_in_ = p.size
        self.spec_ = build_spec(self.name, p.size, self.alpha)
        res = run_stepwise(p, self.spec_)
        self.d_plus_ = res.declare_positive
        self.d_minus_ = res.declare_negative
        self.n_rejections_ = res.n_rejections
        self.nonpositive_ = res.nonpositive
        return self
