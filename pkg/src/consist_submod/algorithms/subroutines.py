"""Registry of addition-robust subroutines usable inside Check-Point.

A subroutine is called as ``sub(f, pool_mask, kappa, rng)`` and returns a set
of at most ``kappa`` elements of ``pool_mask``.
"""
from functools import partial

from ..exceptions import DomainError
from ..functions import CoverageFunction, bits
from .certificate import greedy_with_certificate
from .local_search import _local_search_mask

MAX_MINMAX_UNIVERSE = 12


def _size(pool_mask, kappa):
    return min(kappa, pool_mask.bit_count())


def local_search_subroutine(f, pool_mask, kappa, rng=None, eps=0.1):
    return _local_search_mask(f, pool_mask, _size(pool_mask, kappa), eps)[0]


def certificate_subroutine(f, pool_mask, kappa, rng=None, eta=0.1, gamma=0.84):
    size = _size(pool_mask, kappa)
    if size == 0:
        return frozenset()
    return greedy_with_certificate(f, pool_mask, size, eta, gamma, rng).sample


def brute_opt_subroutine(f, pool_mask, kappa, rng=None):
    """Exact best ``kappa``-set of the pool, memoized on the oracle."""
    from ..harness import brute_force_opt

    memo = f.__dict__.setdefault("_brute_opt_memo", {})
    key = (pool_mask, kappa)
    if key not in memo:
        memo[key] = brute_force_opt(f, pool_mask, kappa)[0]
    return memo[key]


def minmax_subroutine(f, pool_mask, kappa, rng=None, scenarios=None, candidate_policy="auto",
                      benchmark="strong"):
    """Hedge against future coverage sets; needs a :class:`CoverageFunction`.

    Without explicit ``scenarios`` every subset of the universe is a future
    (universe size at most 12).
    """
    from ..robust_lp import build_and_solve_primal, enumerate_coverage_scenarios

    if not isinstance(f, CoverageFunction):
        raise DomainError("the minmax subroutine is defined for coverage functions")
    if scenarios is None and f.universe_size > MAX_MINMAX_UNIVERSE:
        raise DomainError(f"universe size {f.universe_size} > {MAX_MINMAX_UNIVERSE}; "
                          "pass explicit scenarios")
    if kappa == 0 or not pool_mask:
        return frozenset()
    fam = enumerate_coverage_scenarios(f, bits(pool_mask), scenarios)
    _, dist = build_and_solve_primal(fam, kappa, candidate_policy, benchmark, validate=False)
    return dist.sample(rng)


REGISTRY = {
    "local_search": local_search_subroutine,
    "certificate": certificate_subroutine,
    "brute_opt": brute_opt_subroutine,
    "minmax": minmax_subroutine,
}


def resolve_subroutine(choice, epsilon=None, params=None):
    """Callable for a registered name (with ``params`` bound) or a user callable."""
    params = dict(params or {})
    if callable(choice):
        return partial(choice, **params) if params else choice
    if choice not in REGISTRY:
        raise DomainError(f"unknown subroutine {choice!r}; choose from {sorted(REGISTRY)}")
    if choice == "local_search" and "eps" not in params and epsilon is not None:
        params["eps"] = float(epsilon)
    return partial(REGISTRY[choice], **params)
