import itertools
import math

import numpy as np
import pytest

from signbounds.closed_testing import HypothesisFamily, lower_bound_shortcut
from signbounds.combiners import combine
from signbounds.directional import sign_split
from signbounds.partitioning import (
    AdaptivePartition,
    adaptive_orthant_pvalue,
    adaptive_pc_bounds,
    alpha_tilde,
    ap_adjusted_base_pvalues,
    ap_bounds_shortcut,
    generalized_qi_test,
    partition_confidence_set_bruteforce,
    pc_pvalue,
    unconditional_partition_bounds,
)
from signbounds.simulation import SimConfig, evaluate_replication, generate_replication
from signbounds.validation import SizeError

from conftest import GAIL_ORTHANTS

FULL4 = (0, 1, 2, 3)


def test_orthant_pvalues_worked_example(gail_split):
    for k_set, want in GAIL_ORTHANTS.items():
        got = adaptive_orthant_pvalue(k_set, gail_split, "simes")
        assert abs(got - want) < 5e-4, (k_set, got, want)


def test_bruteforce_confidence_set_worked_example(gail_split):
    cs = partition_confidence_set_bruteforce(FULL4, gail_split, "simes", 0.05)
    assert cs.n_plus_set == (1, 2, 3)
    assert cs.ell_plus_tilde == 1 and cs.ell_minus_tilde == 1
    assert cs.n_plus_upper == 3


def test_single_weak_signal_keeps_trivial_bounds():
    split = sign_split([0.9])
    cs = partition_confidence_set_bruteforce((0,), split, "simes", 0.05)
    assert cs.n_plus_set == (0, 1)
    assert cs.ell_plus_tilde == 0 and cs.ell_minus_tilde == 0


def test_nonconvex_confidence_set_with_fisher():
    # at the inflated level 4*0.3/3 = 0.4 both single-flip orthants are
    # rejected while the all-nonpositive and all-positive ones survive
    split = sign_split([0.19, 0.19])
    level = alpha_tilde(0.3, 2)
    assert level == pytest.approx(0.4)
    cs = partition_confidence_set_bruteforce((0, 1), split, "fisher", level)
    assert cs.n_plus_set == (0, 2)
    assert cs.ell_plus_tilde == 0 and cs.ell_minus_tilde == 0


def test_shortcut_equals_bruteforce_random_instances():
    rng = np.random.default_rng(41)
    for trial in range(200):
        n = int(rng.integers(1, 10))
        p = np.where(rng.random(n) < 0.3,
                     rng.choice([0.0, 0.01, 0.5, 0.95, 1.0], n),
                     rng.uniform(size=n))
        split = sign_split(p)
        kind = ("fisher", "simes", "msimes", "sidak", "bonferroni")[trial % 5]
        subset = tuple(i for i in range(n) if rng.random() < 0.6)
        for alpha in (0.01, 0.05, 0.2):
            fast = ap_bounds_shortcut(subset, split, kind, alpha)
            slow = partition_confidence_set_bruteforce(subset, split, kind, alpha)
            assert fast.n_plus_set == slow.n_plus_set
            assert np.allclose(fast.f_values, slow.f_values, atol=1e-12)


def test_empty_subset_query(gail_split):
    cs = ap_bounds_shortcut((), gail_split, "simes", 0.05)
    assert cs.n_plus_set == (0,)
    assert cs.ell_plus_tilde == 0 and cs.ell_minus_tilde == 0


def test_first_crossing_scan_matches_hull_extraction():
    rng = np.random.default_rng(42)
    for _ in range(100):
        n = int(rng.integers(1, 9))
        split = sign_split(rng.uniform(size=n))
        subset = tuple(i for i in range(n) if rng.random() < 0.7)
        cs = ap_bounds_shortcut(subset, split, "fisher", 0.1)
        f = np.array(cs.f_values)
        v_star = len(set(subset) & set(split.s_minus))
        scan_up = next(v for v in range(v_star + 1) if f[v] > 0.1)
        scan_down = next(v for v in range(len(subset), v_star - 1, -1) if f[v] > 0.1)
        assert cs.ell_plus_tilde == scan_up
        assert cs.ell_minus_tilde == len(subset) - scan_down
        assert v_star in cs.n_plus_set


def test_adjusted_base_pvalues_worked_example(gail_split):
    p_bar, q_bar = ap_adjusted_base_pvalues(gail_split, "simes")
    assert q_bar[3] == pytest.approx(0.0271, abs=5e-4)
    others = np.concatenate([p_bar, q_bar[:3]])
    assert (others > 0.05).all()


def test_adjusted_base_pvalues_single_parameter():
    split = sign_split([0.02])
    p_bar, q_bar = ap_adjusted_base_pvalues(split, "fisher")
    assert p_bar[0] == pytest.approx(split.cond[0])
    assert q_bar[0] == 1.0


def test_adjusted_base_pvalues_against_orthant_enumeration():
    rng = np.random.default_rng(43)
    n = 8
    for kind in ("fisher", "simes", "msimes"):
        p = rng.uniform(size=n)
        split = sign_split(p)
        p_bar, q_bar = ap_adjusted_base_pvalues(split, kind)
        for i in range(n):
            with_i, without_i = [], []
            for k_set in itertools.chain.from_iterable(
                    itertools.combinations(range(n), r) for r in range(n + 1)):
                val = adaptive_orthant_pvalue(k_set, split, kind)
                (with_i if i in k_set else without_i).append(val)
            assert p_bar[i] == pytest.approx(max(without_i), abs=1e-12)
            assert q_bar[i] == pytest.approx(max(with_i), abs=1e-12)


def test_alpha_tilde_values():
    assert alpha_tilde(0.05, 2) == pytest.approx(0.05 / 0.75)
    assert alpha_tilde(0.2, 1) == pytest.approx(0.4)
    assert alpha_tilde(0.05, 200) == pytest.approx(0.05, abs=1e-12)
    with pytest.raises(ValueError):
        alpha_tilde(0.05, 0)


def test_unconditional_thresholds():
    plus, nonpos = unconditional_partition_bounds([0.10, 0.95], "sidak", 0.2)
    threshold = 1.0 - 0.8 ** 0.5
    assert threshold == pytest.approx(0.1056, abs=5e-5)
    assert plus == (0,) and nonpos == (1,)
    plus, nonpos = unconditional_partition_bounds([0.012, 0.5, 0.99, 0.3], "bonferroni", 0.05)
    assert plus == (0,) and nonpos == (2,)  # threshold alpha/n = 0.0125
    plus, _ = unconditional_partition_bounds([0.04], "sidak", 0.05)
    assert plus == (0,)  # n = 1 reduces to the raw level
    with pytest.raises(ValueError):
        unconditional_partition_bounds([0.5], "fisher", 0.05)


def test_pc_pvalues_worked_example(gail_split):
    assert pc_pvalue(1, "minus", gail_split, "simes") == pytest.approx(0.0203, abs=5e-4)
    assert pc_pvalue(1, "plus", gail_split, "simes") == pytest.approx(0.0403, abs=5e-4)
    assert pc_pvalue(2, "plus", gail_split, "simes") == 1.0  # beyond the side's size
    with pytest.raises(ValueError):
        pc_pvalue(0, "plus", gail_split, "simes")
    with pytest.raises(ValueError):
        pc_pvalue(5, "plus", gail_split, "simes")


def test_pc_pvalue_equals_subset_enumeration_for_simes():
    # for Simes, appending a value below the running minimum never raises the
    # combined value, so dropping exactly r-1 smallest attains the subset max
    rng = np.random.default_rng(44)
    for _ in range(40):
        n = int(rng.integers(2, 8))
        split = sign_split(rng.uniform(size=n))
        r = int(rng.integers(1, n + 1))
        want = max(
            combine([split.cond[i] for i in subset if i in split.s_minus], "simes")
            for subset in itertools.combinations(range(n), n - r + 1)
        )
        assert pc_pvalue(r, "plus", split, "simes") == pytest.approx(want, abs=1e-12)


def test_adaptive_pc_bounds_worked_example(gail_split):
    pc = adaptive_pc_bounds(gail_split, "simes", 0.05)
    assert (pc.l_plus, pc.l_minus) == (1, 1)
    assert pc.pc_pvalues_plus == pytest.approx([0.0403], abs=5e-4)
    assert pc.pc_pvalues_minus == pytest.approx([0.0203, 0.2039], abs=5e-4)


def test_adaptive_pc_all_center_values():
    split = sign_split([0.5, 0.5, 0.5])
    pc = adaptive_pc_bounds(split, "fisher", 0.2)
    assert (pc.l_plus, pc.l_minus) == (0, 0)


def test_pc_dominates_partition_bounds():
    rng = np.random.default_rng(45)
    for trial in range(300):
        n = int(rng.integers(1, 11))
        split = sign_split(rng.uniform(size=n) ** 2)
        kind = ("fisher", "simes", "msimes")[trial % 3]
        alpha = float(rng.choice([0.01, 0.05, 0.2]))
        cs = ap_bounds_shortcut(range(n), split, kind, alpha)
        pc = adaptive_pc_bounds(split, kind, alpha)
        assert pc.l_plus >= cs.ell_plus_tilde
        assert pc.l_minus >= cs.ell_minus_tilde


def test_generalized_qi_worked_example(gail_split):
    assert generalized_qi_test(1, 3, gail_split, "simes", 0.05)
    assert not generalized_qi_test(1, 3, gail_split, "simes", 0.03)
    with pytest.raises(ValueError):
        generalized_qi_test(3, 2, gail_split, "simes", 0.05)


def test_generalized_qi_one_sided_never_rejects():
    split = sign_split([0.01, 0.02, 0.03])  # S+ empty
    assert not generalized_qi_test(1, 2, split, "simes", 0.2)


def test_realized_orthant_always_retained():
    rng = np.random.default_rng(46)
    for _ in range(120):
        n = int(rng.integers(1, 10))
        split = sign_split(rng.uniform(size=n))
        subset = tuple(i for i in range(n) if rng.random() < 0.5)
        cs = ap_bounds_shortcut(subset, split, "msimes", 0.2)
        assert len(set(subset) & set(split.s_minus)) in cs.n_plus_set


def test_bound_shrinks_when_pvalue_drops_regression():
    # adaptive selection makes the region non-monotone: moving p1 from the
    # plus side into the minus side loses the n+ >= 1 conclusion
    level = alpha_tilde(0.2, 2)
    informative = ap_bounds_shortcut((0, 1), sign_split([0.6, 0.1]), "simes", level)
    assert informative.ell_plus_tilde == 1
    weaker = ap_bounds_shortcut((0, 1), sign_split([0.3, 0.1]), "simes", level)
    assert weaker.ell_plus_tilde == 0
    assert weaker.n_plus_set == (0, 1, 2)


def test_partition_dominates_directional_bounds():
    rng = np.random.default_rng(47)
    for trial in range(200):
        n = int(rng.integers(1, 10))
        split = sign_split(rng.uniform(size=n) ** 2)
        kind = ("fisher", "simes", "msimes")[trial % 3]
        alpha = float(rng.choice([0.01, 0.05, 0.2]))
        fam = HypothesisFamily(split.cond, kind, alpha)
        sminus, splus = set(split.s_minus), set(split.s_plus)
        subset = tuple(i for i in range(n) if rng.random() < 0.6)
        cs = ap_bounds_shortcut(subset, split, kind, alpha)
        ell_plus = lower_bound_shortcut([i for i in subset if i in sminus], fam, alpha)
        ell_minus = lower_bound_shortcut([i for i in subset if i in splus], fam, alpha)
        assert cs.ell_plus_tilde >= ell_plus
        assert cs.ell_minus_tilde >= ell_minus
        if set(subset) <= sminus:
            assert cs.ell_plus_tilde == ell_plus and cs.ell_minus_tilde == ell_minus == 0
        if set(subset) <= splus:
            assert cs.ell_minus_tilde == ell_minus and cs.ell_plus_tilde == ell_plus == 0


def test_unconditional_coverage_at_inflated_level():
    # bounds computed at alpha/(1-2^-n) still cover unconditionally
    b, alpha = 20000, 0.05
    cfg = SimConfig(n=5, n_plus=2, n_minus=1, snr=1.5, alpha=alpha, combiner="fisher",
                    methods=("ap",), B=b, seed=55, level="alpha-tilde")
    theta = cfg.theta_vector()
    covered = 0
    for rep in range(b):
        p = generate_replication(cfg, rep)
        covered += evaluate_replication(p, cfg, theta)["ap"].covered
    rate = covered / b
    assert rate >= 1 - alpha - 3 * math.sqrt(alpha * (1 - alpha) / b)


def test_estimator_api(gail_p):
    ap = AdaptivePartition(combiner="simes", alpha=0.05)
    assert ap.get_params()["level"] == "alpha"
    ap.fit(gail_p)
    assert ap.n_plus_set_ == (1, 2, 3)
    assert ap.ell_plus_ == 1 and ap.ell_minus_ == 1
    assert ap.d_minus_ == (3,) and ap.d_plus_ == ()
    cs = ap.confidence_set([1, 3])
    assert cs.subset == (1, 3)
    pc = ap.pc_bounds()
    assert (pc.l_plus, pc.l_minus) == (1, 1)
    tilde = AdaptivePartition(combiner="simes", alpha=0.05, level="alpha-tilde").fit(gail_p)
    assert tilde.level_used_ == pytest.approx(alpha_tilde(0.05, 4))
    with pytest.raises(RuntimeError):
        AdaptivePartition().confidence_set([0])


def test_size_cap_on_bruteforce(gail_split):
    split = sign_split(np.full(26, 0.4))
    with pytest.raises(SizeError):
        partition_confidence_set_bruteforce(range(26), split, "simes", 0.05)
