"""Simultaneous testing of hypotheses and their alternatives with
three-way decisions: significantly true, significantly false, or uncertain."""

from .closure import (
    ClosedTester,
    IntersectionHypothesis,
    LocalTestRule,
    closed_test,
    counterexample_procedure,
    counterexample_vs_bonferroni,
    enumerate_intersections,
    local_test,
    nested_closure_critical_values,
    verify_theorem_equivalence,
)
from .exceptions import *  # noqa: F401,F403
from .family import (
    Decision,
    DecisionVector,
    FeasibilityOracle,
    FREE_COMBINATION,
    HypothesisFamily,
    PartitionSets,
    PValuePair,
    TruthAssignment,
    is_free_combination,
    ordered_threshold_oracle,
    partition_from_decisions,
)
from .models import (
    GaussianMeansModel,
    NestedNormalModel,
    correlation_edge_pvalues,
    correlation_edge_test,
    gaussian_means_pvalues,
    nested_family,
    nested_pvalues,
    simulate_sample_means,
)
from .normal import std_normal_cdf, std_normal_quantile, upper_critical_value
from .procedures import (
    Calibration,
    CalibrationKind,
    ThreeWayThresholds,
    bauer_bonferroni,
    calibrate,
    fwer_violation,
    single_step,
)
from .risk import (
    LossSpec,
    ProcedureSpec,
    RiskReport,
    decomposition_check,
    loss,
    monte_carlo_risk,
)

__version__ = "0.1.0"
