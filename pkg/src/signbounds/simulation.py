"""Monte-Carlo harness: Gaussian one-sided p-values with a configurable
mean vector, per-method bounds/discoveries/coverage, and aggregated
summaries with Monte-Carlo standard errors.

Replications use counter-based Philox substreams keyed by (seed,
replication index), so serial and parallel execution produce bit-identical
draws.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .baselines import build_spec, run_stepwise
from .closed_testing import (
    HypothesisFamily,
    _bound_from_grid,
    closure_adjusted_pvalues_shortcut,
    max_over_supersets,
)
from .combiners import combine
from .directional import sign_split
from .partitioning import adaptive_orthant_pvalue, alpha_tilde
from .prefixes import prefix_grid
from .validation import check_alpha, check_pvalues

__all__ = ["SimConfig", "MethodStats", "SimSummary", "generate_replication",
           "evaluate_replication", "run_simulation", "PRESETS", "preset_configs"]

METHOD_NAMES = ("dct", "ap", "pc", "gr-fwer", "gr-fdr", "holm", "bh")
_STEPWISE = ("gr-fwer", "gr-fdr", "holm", "bh")


@dataclass(frozen=True)
class SimConfig:
    """One data-generating mechanism plus the methods to evaluate.

    ``theta`` overrides the (n_plus, n_minus, snr) construction with an
    explicit mean vector.  ``level`` selects the operating level of the
    partitioning-based methods: "alpha" for the conditional guarantee or
    "alpha-tilde" for the inflated unconditional-only level.
    """

    n: int
    n_plus: int = 0
    n_minus: int = 0
    snr: float = 0.0
    alpha: float = 0.05
    combiner: str = "fisher"
    methods: tuple = ("dct", "ap")
    B: int = 2000
    seed: int = 0
    level: str = "alpha"
    theta: tuple | None = None

    def __post_init__(self):
        check_alpha(self.alpha)
        if self.theta is not None:
            if len(self.theta) != self.n:
                raise ValueError("theta must have length n")
        else:
            if self.n_plus < 0 or self.n_minus < 0 or self.n_plus + self.n_minus > self.n:
                raise ValueError("need n_plus + n_minus <= n")
        if self.snr < 0:
            raise ValueError("snr must be >= 0")
        if self.B < 1:
            raise ValueError("B must be >= 1")
        unknown = set(self.methods) - set(METHOD_NAMES)
        if unknown:
            raise ValueError(f"unknown methods {sorted(unknown)}; expected from {METHOD_NAMES}")

    def theta_vector(self) -> np.ndarray:
        if self.theta is not None:
            return np.asarray(self.theta, dtype=float)
        out = np.zeros(self.n)
        out[: self.n_plus] = self.snr
        out[self.n_plus: self.n_plus + self.n_minus] = -self.snr
        return out

    def working_level(self) -> float:
        if self.level == "alpha":
            return self.alpha
        if self.level == "alpha-tilde":
            return alpha_tilde(self.alpha, self.n)
        raise ValueError("level must be 'alpha' or 'alpha-tilde'")


def generate_replication(config: SimConfig, rep_index: int) -> np.ndarray:
    """One-sided p-values for replication ``rep_index``; bit-reproducible."""
    bitgen = np.random.Philox(key=config.seed, counter=[0, 0, int(rep_index), 0])
    rng = np.random.Generator(bitgen)
    z = config.theta_vector() + rng.standard_normal(config.n)
    p = np.array([0.5 * math.erfc(zi / math.sqrt(2.0)) for zi in z])
    return np.clip(p, 0.0, 1.0)


@dataclass
class _MethodRecord:
    ell_plus: int
    ell_minus: int
    n_discoveries: int
    covered: bool
    discovery_covered: bool | None = None

    @property
    def bound_sum(self) -> int:
        return self.ell_plus + self.ell_minus

    @property
    def nontrivial(self) -> bool:
        return self.ell_plus >= 1 or self.ell_minus >= 1


def evaluate_replication(p, config: SimConfig, theta=None) -> dict:
    """Per-method bounds, discovery counts and coverage events for one
    p-value vector.  ``theta`` defaults to the config's mean vector and is
    only used for the coverage events."""
    p = check_pvalues(p)
    theta = config.theta_vector() if theta is None else np.asarray(theta, dtype=float)
    n = p.size
    alpha = config.alpha
    level = config.working_level()
    out: dict = {}

    needs_split = any(m in config.methods for m in ("dct", "ap", "pc"))
    if needs_split:
        split = sign_split(p)
        s_minus = np.array(split.s_minus, dtype=int)
        s_plus = np.array(split.s_plus, dtype=int)
        x = np.sort(split.cond[s_minus])[::-1] if s_minus.size else np.empty(0)
        y = np.sort(split.cond[s_plus])[::-1] if s_plus.size else np.empty(0)
        true_pos = theta > 0

    if "dct" in config.methods or "ap" in config.methods:
        grid = prefix_grid(x, y, config.combiner)
        fam = HypothesisFamily(split.cond, config.combiner, alpha)
        adjusted = closure_adjusted_pvalues_shortcut(fam)

    if "dct" in config.methods:
        ell_p = _bound_from_grid(grid, alpha)
        ell_m = _bound_from_grid(grid.T, alpha)
        n_disc = int((adjusted <= alpha).sum())
        # Simultaneous validity of all subset bounds holds exactly when the
        # intersections of true selected nulls survive closure, per side.
        j_minus = [i for i in split.s_minus if theta[i] <= 0]
        j_plus = [i for i in split.s_plus if theta[i] >= 0]
        covered = (max_over_supersets(j_minus, fam) > alpha
                   and max_over_supersets(j_plus, fam) > alpha)
        out["dct"] = _MethodRecord(ell_p, ell_m, n_disc, covered)

    if "ap" in config.methods:
        f_vals = _f_values_from_grid(grid)
        retained = np.flatnonzero(f_vals > level)
        ell_p = int(retained.min())
        ell_m = n - int(retained.max())
        n_disc = int((adjusted <= level).sum())
        k_true = np.flatnonzero(true_pos)
        covered = adaptive_orthant_pvalue(k_true, split, config.combiner) > level
        out["ap"] = _MethodRecord(ell_p, ell_m, n_disc, covered)

    if "pc" in config.methods:
        l_plus = _sequential_count(np.sort(split.cond[s_minus])[::-1], config.combiner, level)
        l_minus = 0
        if l_plus < n:
            l_minus = _sequential_count(np.sort(split.cond[s_plus])[::-1], config.combiner, level)
        n_pos = int(true_pos.sum())
        covered = l_plus <= n_pos and l_minus <= n - n_pos
        out["pc"] = _MethodRecord(l_plus, l_minus, 0, covered)

    for name in config.methods:
        if name not in _STEPWISE:
            continue
        res = run_stepwise(p, build_spec(name, n, alpha))
        dp, dm = np.array(res.declare_positive, int), np.array(res.declare_negative, int)
        n_pos_all = int((theta > 0).sum())
        n_other_all = int((theta <= 0).sum()) if res.nonpositive else int((theta < 0).sum())
        covered = len(dp) <= n_pos_all and len(dm) <= n_other_all
        r_set = np.concatenate([dp, dm]).astype(int)
        pos_in_r = int((theta[r_set] > 0).sum())
        other_in_r = int((theta[r_set] <= 0).sum()) if res.nonpositive else int((theta[r_set] < 0).sum())
        disc_cov = len(dp) <= pos_in_r and len(dm) <= other_in_r
        out[name] = _MethodRecord(len(dp), len(dm), len(dp) + len(dm), covered, disc_cov)
    return out


def _f_values_from_grid(grid) -> np.ndarray:
    s = grid.shape[0] - 1
    t = grid.shape[1] - 1
    ii, jj = np.meshgrid(np.arange(s + 1), np.arange(t + 1), indexing="ij")
    f_vals = np.zeros(s + t + 1)
    np.maximum.at(f_vals, (s - ii + jj).ravel(), grid.ravel())
    return f_vals


def _sequential_count(side_desc: np.ndarray, combiner: str, level: float) -> int:
    count = 0
    for r in range(1, side_desc.size + 1):
        if combine(side_desc[: side_desc.size - r + 1], combiner) > level:
            break
        count += 1
    return count


@dataclass
class MethodStats:
    mean_bound_sum: float
    se_bound_sum: float
    mean_discoveries: float
    se_discoveries: float
    coverage: float
    se_coverage: float
    nontrivial_prob: float | None = None
    se_nontrivial: float | None = None
    discovery_coverage: float | None = None
    se_discovery_coverage: float | None = None


@dataclass
class SimSummary:
    config: dict
    methods: dict
    elapsed_seconds: float

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "methods": {k: asdict(v) for k, v in self.methods.items()},
            "elapsed_seconds": self.elapsed_seconds,
        }

    def csv_rows(self, snr=None) -> list:
        """(snr, method, metric, value, mc_se) rows ready for plotting."""
        rows = []
        snr = self.config["snr"] if snr is None else snr
        for name, st in self.methods.items():
            label = _method_label(name, self.config["combiner"])
            rows.append((snr, label, "bound_sum", st.mean_bound_sum, st.se_bound_sum))
            rows.append((snr, label, "discoveries", st.mean_discoveries, st.se_discoveries))
            rows.append((snr, label, "coverage", st.coverage, st.se_coverage))
            if st.nontrivial_prob is not None:
                rows.append((snr, label, "nontrivial_prob", st.nontrivial_prob, st.se_nontrivial))
            if st.discovery_coverage is not None:
                rows.append((snr, label, "discovery_coverage",
                             st.discovery_coverage, st.se_discovery_coverage))
        return rows


def _method_label(name: str, combiner: str) -> str:
    return f"{name}-{combiner}" if name in ("dct", "ap", "pc") else name


def run_simulation(config: SimConfig) -> SimSummary:
    """Run all replications and aggregate means, frequencies and MC SEs."""
    start = time.perf_counter()
    theta = config.theta_vector()
    sums: dict = {m: dict(bound=[], disc=[], cov=[], nontriv=[], disc_cov=[]) for m in config.methods}
    for rep in range(config.B):
        p = generate_replication(config, rep)
        records = evaluate_replication(p, config, theta)
        for name, rec in records.items():
            acc = sums[name]
            acc["bound"].append(rec.bound_sum)
            acc["disc"].append(rec.n_discoveries)
            acc["cov"].append(rec.covered)
            acc["nontriv"].append(rec.nontrivial)
            if rec.discovery_covered is not None:
                acc["disc_cov"].append(rec.discovery_covered)
    stats = {}
    b = config.B
    for name, acc in sums.items():
        bound = np.asarray(acc["bound"], dtype=float)
        disc = np.asarray(acc["disc"], dtype=float)
        cov = np.asarray(acc["cov"], dtype=float)
        st = MethodStats(
            mean_bound_sum=float(bound.mean()),
            se_bound_sum=float(bound.std(ddof=1) / math.sqrt(b)) if b > 1 else float("nan"),
            mean_discoveries=float(disc.mean()),
            se_discoveries=float(disc.std(ddof=1) / math.sqrt(b)) if b > 1 else float("nan"),
            coverage=float(cov.mean()),
            se_coverage=_prop_se(cov.mean(), b),
        )
        if config.n == 2:
            nt = np.asarray(acc["nontriv"], dtype=float)
            st.nontrivial_prob = float(nt.mean())
            st.se_nontrivial = _prop_se(nt.mean(), b)
        if acc["disc_cov"]:
            dc = np.asarray(acc["disc_cov"], dtype=float)
            st.discovery_coverage = float(dc.mean())
            st.se_discovery_coverage = _prop_se(dc.mean(), b)
        stats[name] = st
    return SimSummary(config=asdict(config), methods=stats,
                      elapsed_seconds=time.perf_counter() - start)


def _prop_se(phat: float, b: int) -> float:
    return math.sqrt(max(phat * (1.0 - phat), 0.0) / b)


PRESETS = ("fig4-row1", "fig5")


def preset_configs(name: str, B: int | None = None, seed: int = 0) -> list:
    """Configs for the packaged simulation designs.

    fig4-row1: n = 50 with 15 positive and 15 negative parameters on a
    31-point signal grid, Fisher and modified-Simes bounds versus the
    stepwise baselines.  fig5: the n = 2 design on a coarse grid of mean
    pairs plus the (0, 0) and (2, -1.5) reference points, Simes combiner,
    partitioning run at the inflated level.
    """
    if name == "fig4-row1":
        b = 2000 if B is None else B
        configs = []
        for snr in np.round(np.arange(0.0, 3.01, 0.1), 10):
            for comb in ("fisher", "msimes"):
                methods = ("dct", "ap") if comb == "fisher" else ("dct", "ap", "gr-fwer", "gr-fdr")
                configs.append(SimConfig(n=50, n_plus=15, n_minus=15, snr=float(snr),
                                         alpha=0.05, combiner=comb, methods=methods,
                                         B=b, seed=seed))
        return configs
    if name == "fig5":
        b = 100000 if B is None else B
        thetas = [(0.0, 0.0), (2.0, -1.5)]
        thetas += [(t1, float(t2)) for t1 in (0.0, 2.0) for t2 in np.arange(-3.0, 3.01, 0.75)]
        seen, configs = set(), []
        for th in thetas:
            th = tuple(float(np.round(v, 10)) for v in th)
            if th in seen:
                continue
            seen.add(th)
            configs.append(SimConfig(n=2, alpha=0.05, combiner="simes",
                                     methods=("dct", "ap"), B=b, seed=seed,
                                     level="alpha-tilde", theta=th))
        return configs
    raise ValueError(f"unknown preset {name!r}; expected one of {PRESETS}")
