"""Ground sets, set-function oracles and exhaustive structural validators.

Subsets of an ``n``-element ground set are handled internally as integer
bitmasks (bit ``i`` set iff element ``i`` is in the set).  Every public entry
point also accepts any iterable of element indices.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from numbers import Integral

import numpy as np

from ._validation import TOL, check_int
from .exceptions import CapacityError, DomainError

MAX_TABLE_N = 24
MAX_VALIDATE_N = 20


# --------------------------------------------------------------------------- masks

def as_mask(S, n=None):
    """Bitmask for ``S`` (an int mask or an iterable of indices), range-checked against ``n``."""
    if isinstance(S, Integral) and not isinstance(S, bool):
        mask = int(S)
        if mask < 0 or (n is not None and mask >> n):
            raise DomainError(f"mask {mask} out of range for ground set of size {n}")
        return mask
    mask = 0
    for x in S:
        if isinstance(x, bool) or not isinstance(x, Integral):
            raise DomainError(f"element {x!r} is not an index")
        x = int(x)
        if x < 0 or (n is not None and x >= n):
            raise DomainError(f"element {x} out of range for ground set of size {n}")
        mask |= 1 << x
    return mask


def bits(mask):
    """Indices of the set bits of ``mask`` in increasing order."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def mask_to_set(mask):
    return frozenset(bits(mask))


def popcount(mask):
    return mask.bit_count()


def subsets_upto(pool_mask, k):
    """All submasks of ``pool_mask`` with at most ``k`` bits, by size then lexicographically."""
    elems = bits(pool_mask)
    out = []
    for size in range(min(k, len(elems)) + 1):
        for combo in combinations(elems, size):
            m = 0
            for x in combo:
                m |= 1 << x
            out.append(m)
    return out


def submasks(mask):
    """Every submask of ``mask`` (including 0 and ``mask``)."""
    sub = mask
    out = []
    while True:
        out.append(sub)
        if sub == 0:
            return out
        sub = (sub - 1) & mask


@dataclass(frozen=True)
class GroundSet:
    """Dense index set ``0..n-1`` with optional labels."""

    n: int
    labels: tuple = None

    def __post_init__(self):
        check_int(self.n, "n", low=1)
        if self.labels is not None:
            labels = tuple(str(x) for x in self.labels)
            if len(labels) != self.n or len(set(labels)) != self.n:
                raise DomainError("labels must be unique and match n")
            object.__setattr__(self, "labels", labels)

    def __len__(self):
        return self.n

    def __iter__(self):
        return iter(range(self.n))

    @property
    def full_mask(self):
        return (1 << self.n) - 1

    def label(self, i):
        return self.labels[i] if self.labels else str(i)


# ------------------------------------------------------------------------- oracles

class SetFunction:
    """Value oracle over the ground set ``0..n-1``.

    Subclasses implement :meth:`value` on bitmasks.  Oracles are immutable
    after construction; the only internal state is a memo of evaluated values.
    """

    n = 0
    exact = False

    def value(self, mask):
        raise NotImplementedError

    @property
    def ground(self):
        return GroundSet(self.n)

    def __call__(self, S):
        return self.value(as_mask(S, self.n))

    def marginal(self, x, S):
        return marginal(self, x, S)

    def table(self):
        """Float table of all ``2**n`` values (cached)."""
        if self.n > MAX_TABLE_N:
            raise CapacityError(f"cannot tabulate {self.n} elements (max {MAX_TABLE_N})")
        return self._table

    @cached_property
    def _table(self):
        return np.fromiter((float(self.value(m)) for m in range(1 << self.n)),
                           dtype=np.float64, count=1 << self.n)


class TableFunction(SetFunction):
    """Explicit table of ``f(S)`` for every subset of a small ground set.

    ``values[mask]`` is ``f`` of the set encoded by ``mask``.  With
    ``exact=True`` the values are kept as :class:`fractions.Fraction`.
    """

    def __init__(self, values, exact=False):
        size = len(values)
        n = size.bit_length() - 1
        if size < 2 or size != 1 << n:
            raise DomainError(f"table length must be 2**n with n >= 1, got {size}")
        if n > MAX_TABLE_N:
            raise CapacityError(f"table over {n} elements exceeds n <= {MAX_TABLE_N}")
        self.n = n
        self.exact = bool(exact)
        if self.exact:
            vals = [v if isinstance(v, Fraction) else Fraction(v) for v in values]
            if min(vals) < 0:
                raise DomainError("table values must be non-negative")
            self.values = tuple(vals)
        else:
            arr = np.asarray(values, dtype=np.float64).copy()
            if not np.all(np.isfinite(arr)) or arr.min() < 0:
                raise DomainError("table values must be finite and non-negative")
            arr.setflags(write=False)
            self.values = arr

    @classmethod
    def from_callable(cls, n, fn, exact=False):
        """Tabulate ``fn(frozenset) -> value`` over all subsets of ``range(n)``."""
        check_int(n, "n", low=1, high=MAX_TABLE_N)
        return cls([fn(mask_to_set(m)) for m in range(1 << n)], exact=exact)

    @classmethod
    def from_function(cls, f, exact=None):
        exact = f.exact if exact is None else exact
        return cls([f.value(m) for m in range(1 << f.n)], exact=exact)

    def value(self, mask):
        v = self.values[mask]
        return v if self.exact else float(v)

    def table(self):
        if self.exact:
            return super().table()
        return self.values

    def __repr__(self):
        return f"TableFunction(n={self.n}, exact={self.exact})"


class CoverageFunction(SetFunction):
    """``f(S) = |union of the universe subsets chosen by S|``."""

    def __init__(self, universe_size, sets):
        self.universe_size = check_int(universe_size, "universe_size", low=0)
        self.set_masks = tuple(as_mask(s, self.universe_size) for s in sets)
        if not self.set_masks:
            raise DomainError("a coverage instance needs at least one set")
        self.n = len(self.set_masks)

    @property
    def sets(self):
        return [sorted(bits(m)) for m in self.set_masks]

    def cover(self, mask):
        """Universe mask covered by the element set ``mask``."""
        out = 0
        sm = self.set_masks
        while mask:
            low = mask & -mask
            out |= sm[low.bit_length() - 1]
            mask ^= low
        return out

    def value(self, mask):
        return self.cover(mask).bit_count()

    @cached_property
    def _table(self):
        cover = np.zeros(1 << self.n, dtype=np.uint64)
        if self.universe_size > 64:
            return super()._table
        for i, s in enumerate(self.set_masks):
            half = 1 << i
            cover[half:2 * half] = cover[:half] | np.uint64(s)
        return np.bitwise_count(cover).astype(np.float64)

    def __repr__(self):
        return f"CoverageFunction(universe_size={self.universe_size}, n={self.n})"


class LiftedFunction(SetFunction):
    """Multilinear lift of a base table over ``m`` group elements plus one element ``r``.

    The lifted ground set has ``m*k + 1`` elements: group ``i`` (0-based) is
    ``i*k .. i*k+k-1`` and ``r`` is index ``m*k``.  The value of a set is the
    base function's multilinear extension at the per-group occupancy
    fractions ``|S & A_i| / k`` and the indicator of ``r``.
    """

    def __init__(self, base, k):
        if not isinstance(base, TableFunction):
            base = TableFunction.from_function(base)
        if base.n < 2:
            raise DomainError("base must have at least one group element and r")
        self.base = base
        self.k = check_int(k, "k", low=1)
        self.m = base.n - 1
        self.n = self.m * self.k + 1
        self.exact = base.exact
        self.r = self.m * self.k
        self._group_masks = tuple(((1 << self.k) - 1) << (i * self.k) for i in range(self.m))
        self._memo = {}

    @property
    def groups(self):
        return [bits(g) for g in self._group_masks] + [[self.r]]

    def occupancy(self, mask):
        counts = tuple((mask & g).bit_count() for g in self._group_masks)
        return counts, (mask >> self.r) & 1

    def value(self, mask):
        key = self.occupancy(mask)
        cached = self._memo.get(key)
        if cached is None:
            counts, has_r = key
            if self.exact:
                y = [Fraction(c, self.k) for c in counts] + [Fraction(has_r)]
            else:
                y = [c / self.k for c in counts] + [float(has_r)]
            cached = multilinear_eval(self.base, y)
            self._memo[key] = cached
        return cached

    def __repr__(self):
        return f"LiftedFunction(m={self.m}, k={self.k})"


# ---------------------------------------------------------------------- operations

def evaluate(f, S):
    """``f(S)``; raises :class:`DomainError` for indices outside the ground set."""
    return f.value(as_mask(S, f.n))


def marginal(f, x, S):
    """``f(S + x) - f(S)``; zero when ``x`` is already in ``S``."""
    x = check_int(x, "x", low=0, high=f.n - 1)
    mask = as_mask(S, f.n)
    if mask >> x & 1:
        return 0 * f.value(mask)
    return f.value(mask | (1 << x)) - f.value(mask)


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of the exhaustive check; witnesses are ``(S, T, x)`` triples."""

    monotone: bool
    submodular: bool
    monotone_witness: tuple = None
    submodular_witness: tuple = None

    @property
    def ok(self):
        return self.monotone and self.submodular


def _first_violation_float(table, n, tol):
    idx = np.arange(1 << n, dtype=np.int64)
    mono = None
    for x in range(n):
        bit = 1 << x
        base = idx[(idx & bit) == 0]
        gains = table[base | bit] - table[base]
        bad = np.flatnonzero(gains < -tol)
        if bad.size:
            T = int(base[bad[0]])
            if mono is None or (T, x) < (mono[1], mono[2]):
                mono = (T, T, x)
    sub = None
    for y in range(n):
        ybit = 1 << y
        for x in range(n):
            if x == y:
                continue
            xbit = 1 << x
            S = idx[(idx & (xbit | ybit)) == 0]
            lhs = table[S | xbit] - table[S]
            rhs = table[S | xbit | ybit] - table[S | ybit]
            bad = np.flatnonzero(lhs < rhs - tol)
            if bad.size:
                cand = (int(S[bad[0]]), y, x)
                if sub is None or cand < sub:
                    sub = cand
    if sub is not None:
        S, y, x = sub
        sub = (S, S | (1 << y), x)
    return mono, sub


def _first_violation_exact(f, n):
    vals = [f.value(m) for m in range(1 << n)]
    mono = sub = None
    for T in range(1 << n):
        for x in range(n):
            if not T >> x & 1 and vals[T | 1 << x] < vals[T]:
                mono = (T, T, x)
                break
        if mono:
            break
    for S in range(1 << n):
        for y in range(n):
            if S >> y & 1:
                continue
            for x in range(n):
                if x == y or S >> x & 1:
                    continue
                xb, yb = 1 << x, 1 << y
                if vals[S | xb] - vals[S] < vals[S | xb | yb] - vals[S | yb]:
                    sub = (S, S | yb, x)
                    break
            if sub:
                break
        if sub:
            break
    return mono, sub


def validate_monotone_submodular(f, ground=None, tol=TOL):
    """Exhaustively check monotonicity and submodularity of ``f``.

    Submodularity is checked through the equivalent local condition
    ``f(x|S) >= f(x|S+y)``; a failing triple is reported as ``(S, T, x)`` with
    ``S`` and ``T`` as frozensets.  Exact oracles are compared without
    tolerance.
    """
    n = f.n if ground is None else len(ground)
    if n > MAX_VALIDATE_N:
        raise CapacityError(f"exhaustive validation limited to n <= {MAX_VALIDATE_N}, got {n}",
                            suggestion="validate a restriction to fewer elements")
    if f.exact:
        mono, sub = _first_violation_exact(f, n)
    else:
        mono, sub = _first_violation_float(np.asarray(f.table(), dtype=np.float64), n, tol)

    def fmt(w):
        return None if w is None else (mask_to_set(w[0]), mask_to_set(w[1]), w[2])

    return ValidationReport(mono is None, sub is None, fmt(mono), fmt(sub))


def multilinear_eval(g, y):
    """Exact multilinear extension of the table ``g`` at the probability vector ``y``."""
    n = g.n
    if len(y) != n:
        raise DomainError(f"expected a vector of length {n}, got {len(y)}")
    for v in y:
        if v < 0 or v > 1:
            raise DomainError(f"probabilities must lie in [0, 1], got {v}")
    if getattr(g, "exact", False) or any(isinstance(v, Fraction) for v in y):
        probs = [Fraction(1)]
        for v in y:
            v = Fraction(v)
            probs = [p * (1 - v) for p in probs] + [p * v for p in probs]
        return sum((p * g.value(m) for m, p in enumerate(probs) if p), Fraction(0))
    probs = np.ones(1)
    for v in y:
        probs = np.concatenate((probs * (1.0 - v), probs * v))
    return float(probs @ np.asarray(g.table(), dtype=np.float64))


def lift_eval(L, S):
    """Value of the lifted function ``L`` at ``S``."""
    return L.value(as_mask(S, L.n))


def concave_modular_table(weights, concave="sqrt", caps=None):
    """Table of ``sum_j phi(sum_{x in S} w[j, x])`` for a non-negative weight matrix.

    ``concave`` picks ``phi``: ``"sqrt"``, ``"log1p"`` or ``"min"`` (with ``caps``).
    """
    w = np.atleast_2d(np.asarray(weights, dtype=np.float64))
    if w.min() < 0:
        raise DomainError("weights must be non-negative")
    n = w.shape[1]
    if n > MAX_TABLE_N:
        raise CapacityError(f"table over {n} elements exceeds n <= {MAX_TABLE_N}")
    sums = np.zeros((w.shape[0], 1 << n))
    for i in range(n):
        half = 1 << i
        sums[:, half:2 * half] = sums[:, :half] + w[:, i:i + 1]
    if concave == "sqrt":
        vals = np.sqrt(sums)
    elif concave == "log1p":
        vals = np.log1p(sums)
    elif concave == "min":
        cap = np.asarray(caps if caps is not None else np.ones(w.shape[0]), dtype=np.float64)
        vals = np.minimum(sums, cap[:, None])
    else:
        raise DomainError(f"unknown concave function {concave!r}")
    return TableFunction(vals.sum(axis=0))
