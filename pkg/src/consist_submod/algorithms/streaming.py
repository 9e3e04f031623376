"""Baseline streaming algorithms used as comparison points."""
from sklearn.base import BaseEstimator

from .._validation import check_int
from ..exceptions import DomainError
from ..functions import mask_to_set
from .greedy import _greedy_mask


class _Streaming(BaseEstimator):
    def _arrive(self, x, f):
        if not hasattr(self, "arrived_"):
            self.arrived_ = 0
            self.mask_ = 0
        x = int(x)
        if not 0 <= x < f.n:
            raise DomainError(f"element {x} outside the ground set")
        if self.arrived_ >> x & 1:
            raise DomainError(f"element {x} arrived twice")
        self.arrived_ |= 1 << x
        return x

    def fit(self, stream, f):
        for attr in ("arrived_", "mask_"):
            self.__dict__.pop(attr, None)
        for x in stream:
            self.partial_fit(x, f)
        return self

    @property
    def solution_(self):
        return mask_to_set(getattr(self, "mask_", 0))

    def predict(self, f=None):
        return sorted(self.solution_)


class StaticFill(_Streaming):
    """Keep the first ``k`` arrivals and never change afterwards (1-consistent)."""

    def __init__(self, k=1):
        self.k = k

    def partial_fit(self, x, f):
        x = self._arrive(x, f)
        if self.mask_.bit_count() < check_int(self.k, "k", low=1):
            self.mask_ |= 1 << x
        return self


class GreedyRecompute(_Streaming):
    """Rerun greedy from scratch on every prefix; unbounded recourse."""

    def __init__(self, k=1):
        self.k = k

    def partial_fit(self, x, f):
        self._arrive(x, f)
        k = check_int(self.k, "k", low=1)
        self.mask_ = _greedy_mask(f, self.arrived_, min(k, self.arrived_.bit_count()))[0]
        return self



class SingleSwap(_Streaming):
    """Fill to ``k``, then swap in an arrival only if one exchange improves the value.

    At most one element enters per step, so the algorithm is 1-consistent.
    """

    def __init__(self, k=1):
        self.k = k

    def partial_fit(self, x, f):
        x = self._arrive(x, f)
        k = check_int(self.k, "k", low=1)
        cur = self.mask_
        if cur.bit_count() < k:
            self.mask_ = cur | 1 << x
            return self
        best, best_val = cur, f.value(cur)
        for y in range(f.n):
            if cur >> y & 1:
                cand = (cur & ~(1 << y)) | 1 << x
                val = f.value(cand)
                if val > best_val:
                    best, best_val = cand, val
        self.mask_ = best
        return self
