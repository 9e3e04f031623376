"""The classic greedy algorithm and the residual-marginal quantity behind its refined bound."""
import math
from dataclasses import dataclass

from sklearn.base import BaseEstimator

from .._validation import TOL, check_int
from ..exceptions import ContractViolation, DomainError
from ..functions import mask_to_set
from ._pool import best_marginal, pool_mask


@dataclass(frozen=True)
class GreedyResult:
    solution: frozenset
    order: tuple
    gains: tuple
    k: int
    value: float
    mu: float = None

    @property
    def mask(self):
        m = 0
        for x in self.order:
            m |= 1 << x
        return m


def _greedy_mask(f, candidates, k):
    current = 0
    order, gains = [], []
    for _ in range(min(k, candidates.bit_count())):
        x, gain = best_marginal(f, current, candidates & ~current)
        current |= 1 << x
        order.append(x)
        gains.append(gain)
    return current, order, gains


def greedy(f, ground=None, k=1):
    """Repeatedly add the element of largest marginal gain (ties to the lowest index).

    ``ground`` restricts the candidate pool (an iterable of indices or a mask);
    the returned solution has ``min(k, |pool|)`` elements.
    """
    k = check_int(k, "k", low=0)
    cand = pool_mask(f, ground)
    mask, order, gains = _greedy_mask(f, cand, k)
    return GreedyResult(mask_to_set(mask), tuple(order), tuple(gains), k, f.value(mask))


def residual_mu(f, ground, result, opt_value):
    """``k * max_{e outside S} f(e|S) / OPT``: the largest normalized residual marginal.

    Zero when the solution exhausts the pool.  Values within ``TOL`` of the
    unit interval are clamped; anything further above 1 means the oracle is
    not submodular and raises :class:`ContractViolation`.
    """
    if opt_value <= 0:
        raise DomainError(f"opt_value must be positive, got {opt_value}")
    cand = pool_mask(f, ground)
    S = result.mask
    rest = cand & ~S
    if not rest:
        return 0.0
    _, gain = best_marginal(f, S, rest)
    mu = result.k * float(gain) / float(opt_value)
    if mu > 1 + TOL:
        raise ContractViolation(f"residual marginal ratio {mu} > 1: oracle is not submodular")
    if mu < -TOL:
        raise ContractViolation(f"negative residual marginal ratio {mu}: oracle is not monotone")
    return min(max(mu, 0.0), 1.0)


def refined_greedy_bound(mu):
    """``1 + mu ln mu`` with the convention ``0 ln 0 = 0``."""
    if mu < 0 or mu > 1:
        raise DomainError(f"mu must lie in [0, 1], got {mu}")
    return 1.0 if mu == 0 else 1.0 + mu * math.log(mu)


def classic_greedy_bound(k):
    return 1.0 - (1.0 - 1.0 / k) ** k


class GreedyMaximizer(BaseEstimator):
    """Estimator wrapper around :func:`greedy`.

    After ``fit(f, ground)`` exposes ``solution_``, ``order_``, ``gains_`` and
    ``value_``; passing ``opt_value`` also fills ``mu_``.
    """

    def __init__(self, k=1):
        self.k = k

    def fit(self, f, ground=None, opt_value=None):
        res = greedy(f, ground, self.k)
        self.result_ = res
        self.solution_ = res.solution
        self.order_ = list(res.order)
        self.gains_ = list(res.gains)
        self.value_ = res.value
        self.mu_ = residual_mu(f, ground, res, opt_value) if opt_value is not None else None
        return self

    def predict(self, f=None):
        return sorted(self.solution_)
