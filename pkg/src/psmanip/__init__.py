"""Manipulating the probabilistic serial (PS) rule.

Exact PS outcomes, downward-lexicographic and two-agent expected-utility
best responses, a brute-force oracle, the exactly-twice 3SAT reduction for
expected-utility best responses and a random-profile experiment harness.
All numbers are :class:`fractions.Fraction`.
"""

from .core import (
    AssignmentProblem,
    Comparison,
    FractionalAssignment,
    InstanceError,
    UtilityFunction,
    as_manipulator,
    as_rational,
    dl_compare,
    eu_compare,
    eu_value,
    format_rational,
    sd_compare,
)
from .dlbr import (
    PartialResponse,
    dl_best_response,
    dl_rounds,
    insert_candidate,
    sd_best_response,
    stingy_order,
)
from .experiments import ExperimentConfig, ExperimentReport, random_profile, run_experiment
from .hardness import (
    Formula3SAT,
    ReductionInstance,
    ReductionParams,
    evaluate_assignment,
    prescribed_report,
    reduce_3sat,
    target_utility,
    timing_audit,
    verify_reduction,
)
from .io import Instance, load_instance, dump_instance
from .oracle import Criterion, OracleCapError, brute_force_best_response, is_manipulable
from .ps import EatingTrace, est, ps, ps1
from .seqalloc import (
    DiscreteAssignment,
    HalfHouseMap,
    SAInstance,
    eu_best_response_2,
    half_house_reduction,
    sa_best_response_2,
    sequential_allocation,
    target_sets,
)

__version__ = "0.1.0"

__all__ = [
    "AssignmentProblem",
    "Comparison",
    "Criterion",
    "DiscreteAssignment",
    "EatingTrace",
    "ExperimentConfig",
    "ExperimentReport",
    "Formula3SAT",
    "FractionalAssignment",
    "HalfHouseMap",
    "Instance",
    "InstanceError",
    "OracleCapError",
    "PartialResponse",
    "ReductionInstance",
    "ReductionParams",
    "SAInstance",
    "UtilityFunction",
    "as_manipulator",
    "as_rational",
    "brute_force_best_response",
    "dl_best_response",
    "dl_compare",
    "dl_rounds",
    "dump_instance",
    "est",
    "eu_best_response_2",
    "eu_compare",
    "eu_value",
    "evaluate_assignment",
    "format_rational",
    "half_house_reduction",
    "insert_candidate",
    "is_manipulable",
    "load_instance",
    "prescribed_report",
    "ps",
    "ps1",
    "random_profile",
    "reduce_3sat",
    "run_experiment",
    "sa_best_response_2",
    "sd_best_response",
    "sd_compare",
    "sequential_allocation",
    "stingy_order",
    "target_sets",
    "target_utility",
    "timing_audit",
    "verify_reduction",
]
