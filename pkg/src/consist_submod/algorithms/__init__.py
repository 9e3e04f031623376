"""Offline and streaming maximization algorithms."""
from .certificate import (
                         CertificateResult,
                         GreedyWithCertificate,
                         augment,
                         greedy_with_certificate,
)
from .checkpoint import (
                         BlockPlan,
                         CheckPoint,
                         CheckPointState,
                         any_swap,
                         block_plan,
                         check_point_init,
                         check_point_insert,
                         snap_epsilon,
                         swap_toward,
)
from .greedy import (
                         GreedyMaximizer,
                         GreedyResult,
                         classic_greedy_bound,
                         greedy,
                         refined_greedy_bound,
                         residual_mu,
)
from .local_search import LocalSearch, is_stable, local_search, local_search_with_stats
from .streaming import GreedyRecompute, SingleSwap, StaticFill
from .subroutines import REGISTRY, resolve_subroutine

__all__ = [
    "BlockPlan", "CertificateResult", "CheckPoint", "CheckPointState", "GreedyMaximizer",
    "GreedyRecompute", "GreedyResult", "GreedyWithCertificate", "LocalSearch", "REGISTRY",
    "SingleSwap", "StaticFill", "any_swap", "augment", "block_plan", "check_point_init", "check_point_insert",
    "classic_greedy_bound", "greedy", "greedy_with_certificate", "is_stable", "local_search",
    "local_search_with_stats", "refined_greedy_bound", "residual_mu", "resolve_subroutine",
    "snap_epsilon", "swap_toward",
]
