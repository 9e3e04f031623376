"""Local search that keeps swapping until no outside element beats ``(1+eps) f(S)/kappa``."""
from sklearn.base import BaseEstimator

from .._validation import check_int, check_real
from ..exceptions import DomainError
from ..functions import bits, mask_to_set
from ._pool import best_marginal, pool_mask
from .greedy import _greedy_mask


def _local_search_mask(f, cand, kappa, eps, max_swaps=None):
    S, _, _ = _greedy_mask(f, cand, kappa)
    swaps = 0
    if kappa == 0:
        return S, swaps
    while True:
        value = f.value(S)
        if value <= 0:
            # every marginal is zero; no swap can make progress
            return S, swaps
        threshold = (1 + eps) * value / kappa
        x, gain = best_marginal(f, S, cand & ~S)
        if x is None or gain < threshold:
            return S, swaps
        y = min(bits(S), key=lambda e: (value - f.value(S & ~(1 << e)), e))
        nxt = (S & ~(1 << y)) | (1 << x)
        if f.value(nxt) <= value:
            # only reachable for non-submodular oracles
            return S, swaps
        S = nxt
        swaps += 1
        if max_swaps is not None and swaps >= max_swaps:
            return S, swaps


def local_search(f, ground=None, kappa=1, eps=0.1, max_swaps=None):
    """Greedy start followed by improving swaps; returns a ``(1+eps)``-stable set of size ``kappa``.

    Each accepted swap adds the outside element of largest marginal gain and
    drops the element of ``S`` whose removal loses least (ties to the lowest
    index).  Termination follows from the value growing by a factor of at
    least ``1 + eps/kappa`` per swap.
    """
    return local_search_with_stats(f, ground, kappa, eps, max_swaps)[0]


def local_search_with_stats(f, ground=None, kappa=1, eps=0.1, max_swaps=None):
    kappa = check_int(kappa, "kappa", low=0)
    eps = check_real(eps, "eps", low=0, low_open=True)
    cand = pool_mask(f, ground)
    if kappa > cand.bit_count():
        raise DomainError(f"kappa={kappa} exceeds the pool size {cand.bit_count()}")
    S, swaps = _local_search_mask(f, cand, kappa, eps, max_swaps)
    return mask_to_set(S), swaps


def is_stable(f, S, ground=None, kappa=None, eps=0.1):
    """True iff every outside element has ``f(x|S) < (1+eps) f(S)/kappa``."""
    from ..functions import as_mask

    S = as_mask(S, f.n)
    kappa = S.bit_count() if kappa is None else kappa
    cand = pool_mask(f, ground) & ~S
    if not cand:
        return True
    _, gain = best_marginal(f, S, cand)
    return gain < (1 + eps) * f.value(S) / kappa


class LocalSearch(BaseEstimator):
    """Estimator wrapper; ``fit`` sets ``solution_`` and ``n_swaps_``."""

    def __init__(self, kappa=1, eps=0.1, max_swaps=None):
        self.kappa = kappa
        self.eps = eps
        self.max_swaps = max_swaps

    def fit(self, f, ground=None):
        self.solution_, self.n_swaps_ = local_search_with_stats(
            f, ground, self.kappa, self.eps, self.max_swaps)
        self.value_ = f(self.solution_)
        return self

    def predict(self, f=None):
        return sorted(self.solution_)
