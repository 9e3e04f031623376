"""Consistent (low-recourse) submodular maximization under a cardinality constraint.

Subsets of an ``n``-element ground set are integer bitmasks; element ``i``
is bit ``i``.  Submodules:

* :mod:`~consist_submod.functions`: set-function types and validators
* :mod:`~consist_submod.algorithms`: offline and streaming algorithms
* :mod:`~consist_submod.robust_lp`: hedging LP over future scenarios
* :mod:`~consist_submod.hardness`: hard-instance generators
* :mod:`~consist_submod.harness`: oracles, traces and audits
"""
from .algorithms import (
                         CheckPoint,
                         GreedyMaximizer,
                         GreedyRecompute,
                         GreedyWithCertificate,
                         LocalSearch,
                         SingleSwap,
                         StaticFill,
                         greedy,
                         greedy_with_certificate,
                         local_search,
)
from .exceptions import (
                         AuditError,
                         CapacityError,
                         ConsistSubmodError,
                         ContractViolation,
                         DomainError,
                         LPError,
)
from .functions import (
                         CoverageFunction,
                         GroundSet,
                         LiftedFunction,
                         SetFunction,
                         TableFunction,
                         validate_monotone_submodular,
)
from .harness import (
                         AuditReport,
                         StreamTrace,
                         addition_robustness_audit,
                         approximation_audit,
                         brute_force_opt,
                         consistency_audit,
                         run_stream,
)
from .robust_lp import (
                         MinMaxSampling,
                         ScenarioFamily,
                         SolutionDistribution,
                         build_and_solve_primal,
                         correlation_gap_check,
                         fit_submodular_extension,
)

__version__ = "0.1.0"

__all__ = [
    "AuditError", "AuditReport", "CapacityError", "CheckPoint", "ConsistSubmodError",
    "ContractViolation", "CoverageFunction", "DomainError", "GreedyMaximizer", "GreedyRecompute",
    "GreedyWithCertificate", "GroundSet", "LPError", "LiftedFunction", "LocalSearch",
    "MinMaxSampling", "ScenarioFamily", "SetFunction", "SingleSwap", "SolutionDistribution",
    "StaticFill", "StreamTrace", "TableFunction", "addition_robustness_audit",
    "approximation_audit", "brute_force_opt", "build_and_solve_primal", "consistency_audit",
    "correlation_gap_check", "fit_submodular_extension", "greedy", "greedy_with_certificate",
    "local_search", "run_stream", "validate_monotone_submodular",
]
