"""Simultaneous confidence bounds and discoveries for the signs of n
independent parameters, from one one-sided p-value per parameter.

The two main estimators are :class:`DirectionalClosedTesting` (lower
bounds on the number of positive and of negative parameters, with sign
discoveries) and :class:`AdaptivePartition` (tighter bounds on positives
versus non-positives via orthant partitioning).  Stepwise FWER/FDR
baselines, a qualitative-interaction procedure, partial-conjunction
bounds and a Monte-Carlo harness round out the toolkit; everything is
driven by exchangeable monotone p-value combiners (Fisher, Simes,
modified Simes, Sidak, Bonferroni).
"""

from .baselines import StepwiseProcedure, StepwiseResult, StepwiseSpec, build_spec, run_stepwise
from .closed_testing import (
    HypothesisFamily,
    closure_adjusted_pvalue,
    closure_adjusted_pvalues_shortcut,
    local_test_pvalue,
    lower_bound_bruteforce,
    lower_bound_shortcut,
)
from .combiners import COMBINER_NAMES, combine
from .directional import (
    DirectionalClosedTesting,
    QIClosedTesting,
    SignSplit,
    dct_bounds,
    qi_closed_testing,
    sign_split,
)
from .partitioning import (
    AdaptivePartition,
    ConfidenceSet,
    PCBounds,
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
from .reports import InputData, Report, arcsine_z, read_input_csv
from .simulation import SimConfig, SimSummary, generate_replication, run_simulation
from .special import chi_square_sf, std_normal_cdf
from .validation import SizeError

__version__ = "0.1.0"

__all__ = [
    "AdaptivePartition",
    "COMBINER_NAMES",
    "ConfidenceSet",
    "DirectionalClosedTesting",
    "HypothesisFamily",
    "InputData",
    "PCBounds",
    "QIClosedTesting",
    "Report",
    "SignSplit",
    "SimConfig",
    "SimSummary",
    "SizeError",
    "StepwiseProcedure",
    "StepwiseResult",
    "StepwiseSpec",
    "adaptive_orthant_pvalue",
    "adaptive_pc_bounds",
    "alpha_tilde",
    "ap_adjusted_base_pvalues",
    "ap_bounds_shortcut",
    "arcsine_z",
    "build_spec",
    "chi_square_sf",
    "closure_adjusted_pvalue",
    "closure_adjusted_pvalues_shortcut",
    "combine",
    "dct_bounds",
    "generalized_qi_test",
    "generate_replication",
    "local_test_pvalue",
    "lower_bound_bruteforce",
    "lower_bound_shortcut",
    "partition_confidence_set_bruteforce",
    "pc_pvalue",
    "qi_closed_testing",
    "read_input_csv",
    "run_simulation",
    "run_stepwise",
    "sign_split",
    "std_normal_cdf",
    "unconditional_partition_bounds",
]
