"""Hard-instance generators and adversarial ratio measurement.

Indices: in the ``g_i`` tables element ``j`` (0-based) is ``a_{j+1}`` and
element ``m`` is ``r``; function indices ``i`` are 0-based as well.
"""
import copy
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np

from ._validation import check_int
from .exceptions import AuditError, CapacityError, ContractViolation, DomainError
from .functions import (
    CoverageFunction,
    LiftedFunction,
    SetFunction,
    TableFunction,
    as_mask,
    bits,
    multilinear_eval,
    validate_monotone_submodular,
)
from .lp import solve_lp
from .rng import make_rng

MAX_GI_M = 12
MAX_VALIDATED_LIFT = 13
MAX_EXACT_I = 64
MAX_ALIGNMENT_SCENARIOS = 20000


# ------------------------------------------------------------------ g_i family

def gi_value(i, mask, m):
    """``g_i`` on a mask over ``{a_0..a_{m-1}, r}`` as an exact fraction."""
    has_r = mask >> m & 1
    a = mask & ((1 << m) - 1)
    count = a.bit_count()
    if has_r and a >> i & 1:
        return Fraction(2)
    if count >= 3:
        return Fraction(2)
    if not has_r:
        return (Fraction(0), Fraction(1), Fraction(5, 3))[count]
    return (Fraction(1), Fraction(4, 3), Fraction(5, 3))[count]


@dataclass(frozen=True)
class GiFamily:
    m: int
    tables: tuple

    @property
    def r(self):
        return self.m

    def __getitem__(self, i):
        return self.tables[i]

    def __len__(self):
        return self.m

    def expected_pair_value(self, j):
        """``E_i[g_i({a_j, r})]`` with ``i`` uniform."""
        mask = 1 << j | 1 << self.m
        return sum(g.value(mask) for g in self.tables) / self.m


def build_gi_family(m, exact=True, validate=False):
    """Tables of ``g_1..g_m`` over ``m + 1`` elements."""
    m = check_int(m, "m", low=1)
    if m > MAX_GI_M:
        raise CapacityError(f"m={m} gives 2**{m + 1} rows; the cap is m <= {MAX_GI_M}")
    size = 1 << (m + 1)
    tables = tuple(TableFunction([gi_value(i, s, m) for s in range(size)], exact=exact)
                   for i in range(m))
    fam = GiFamily(m, tables)
    if validate:
        for i, g in enumerate(tables):
            rep = validate_monotone_submodular(g)
            if not rep.ok:
                raise ContractViolation(f"g_{i} failed validation: {rep}")
    return fam


# ------------------------------------------------------------- lifted instance

class GuardedFunction(SetFunction):
    """Oracle that refuses queries containing a not-yet-revealed element."""

    def __init__(self, inner, hidden):
        self.inner = inner
        self.n = inner.n
        self.exact = inner.exact
        self.hidden = int(hidden)

    def value(self, mask):
        if mask >> self.hidden & 1:
            raise ContractViolation(f"element {self.hidden} queried before its arrival")
        return self.inner.value(mask)


@dataclass
class LiftedHardInstance:
    m: int
    k: int
    functions: list
    stream: list

    @property
    def r(self):
        return self.m * self.k

    @property
    def n(self):
        return self.m * self.k + 1

    def common(self):
        """The restriction shared by every ``f_i``; queries involving ``r`` fail."""
        return GuardedFunction(self.functions[0], self.r)

    def opt(self, i, k=None):
        """``(value, occupancy)`` of the best ``k``-set for ``f_i``.

        The lifted value depends only on per-group counts and ``g_i`` is
        symmetric in the groups other than ``i``, so it suffices to enumerate
        the count of group ``i`` together with a non-increasing count vector
        for the rest.
        """
        k = self.k if k is None else k
        key = (i, k)
        memo = self.__dict__.setdefault("_opt_memo", {})
        if key in memo:
            return memo[key]
        f = self.functions[i]
        best = None
        for has_r in (0, 1):
            budget = k - has_r
            if budget < 0:
                continue
            for own in range(min(self.k, budget) + 1):
                for rest in _partitions(self.m - 1, budget - own, self.k):
                    counts = list(rest[:i]) + [own] + list(rest[i:])
                    y = [Fraction(c, self.k) for c in counts] + [Fraction(has_r)]
                    if not f.exact:
                        y = [float(t) for t in y]
                    v = multilinear_eval(f.base, y)
                    if best is None or v > best[0]:
                        best = (v, (tuple(counts), has_r))
        memo[key] = best
        return best


def _partitions(parts, total, cap, hi=None):
    """Non-increasing vectors of ``parts`` ints in ``[0, cap]`` summing to at most ``total``."""
    hi = cap if hi is None else hi
    if parts == 0:
        yield ()
        return
    for c in range(min(hi, total), -1, -1):
        for rest in _partitions(parts - 1, total - c, cap, c):
            yield (c,) + rest


def build_lifted_hard_instance(m, k, exact=True, validate=None):
    """``f_i`` = lift of ``g_i`` with ``k`` copies per ``a_j``; stream is ``A_1..A_m`` then ``r``.

    ``validate`` defaults to exhaustive validation when ``m*k + 1 <= 13``.
    """
    m = check_int(m, "m", low=1)
    k = check_int(k, "k", low=1)
    fam = build_gi_family(m, exact=exact)
    funcs = [LiftedFunction(g, k) for g in fam.tables]
    n = m * k + 1
    if validate is None:
        validate = n <= MAX_VALIDATED_LIFT
    if validate:
        if n > MAX_VALIDATED_LIFT:
            raise CapacityError(f"exhaustive validation needs m*k+1 <= {MAX_VALIDATED_LIFT}",
                                suggestion="pass validate=False")
        for i, f in enumerate(funcs):
            rep = validate_monotone_submodular(TableFunction.from_function(f, exact=False))
            if not rep.ok:
                raise ContractViolation(f"f_{i} failed validation: {rep}")
    return LiftedHardInstance(m, k, funcs, list(range(m * k)) + [m * k])


# ----------------------------------------------------------- alignment instance

@dataclass
class AlignmentInstance:
    """Universe of ``N`` items, current elements are the ``N`` singletons, futures are ``kappa``-sets."""

    N: int
    kappa: int
    function: CoverageFunction = field(init=False)

    def __post_init__(self):
        check_int(self.kappa, "kappa", low=1)
        check_int(self.N, "N", low=self.kappa)
        self.function = CoverageFunction(self.N, [[u] for u in range(self.N)])

    @property
    def v_now(self):
        return list(range(self.N))

    def aligned_future(self, A):
        """The future set covering exactly the items of ``A`` (padded to ``kappa`` by lowest index)."""
        a = as_mask(A, self.N)
        if a.bit_count() > self.kappa:
            raise DomainError("A has more than kappa singletons")
        pad = [u for u in range(self.N) if not a >> u & 1][:self.kappa - a.bit_count()]
        for u in pad:
            a |= 1 << u
        return sorted(bits(a))

    def with_future(self, R):
        """Coverage function on the singletons plus the future set ``R`` (index ``N``)."""
        return CoverageFunction(self.N, [[u] for u in range(self.N)] + [sorted(R)])

    def opt_after(self, R=None):
        """Best ``kappa``-set once a ``kappa``-element future has arrived."""
        return 2 * self.kappa - 1

    def expected_overlap(self):
        return Fraction(self.kappa * self.kappa, self.N)

    def futures(self):
        return combinations(range(self.N), self.kappa)

    def scenario_family(self, exact=True, include_empty=True):
        from .robust_lp import enumerate_coverage_scenarios

        count = math.comb(self.N, self.kappa)
        if count > MAX_ALIGNMENT_SCENARIOS:
            raise CapacityError(f"{count} futures exceed {MAX_ALIGNMENT_SCENARIOS}",
                                suggestion="use alignment_orbit_alpha")
        subs = ([()] if include_empty else []) + list(self.futures())
        return enumerate_coverage_scenarios(self.function, self.v_now, subs, exact=exact)


def build_alignment_instance(N, kappa):
    return AlignmentInstance(N, kappa)


def alignment_orbit_alpha(kappa, N=None, benchmark="weak", exact=True, include_empty=True):
    """Hedging-LP optimum for the alignment instance, reduced by symmetry.

    The LP is invariant under permutations of the universe, so some optimum
    spreads ``lam_s`` uniformly over the ``s``-sets of singletons.  A uniform
    ``s``-set meets a fixed ``kappa``-future in ``s*kappa/N`` items on average,
    which leaves one constraint for the ``kappa``-futures and one for the
    empty future.
    """
    kappa = check_int(kappa, "kappa", low=1)
    N = 2 * kappa if N is None else check_int(N, "N", low=kappa)
    num = (lambda v: Fraction(v)) if exact else float
    if benchmark == "weak":
        opt_r, opt_empty = 2 * kappa - 1, kappa
    elif benchmark == "strong":
        opt_r, opt_empty = 2 * kappa, kappa
    else:
        raise DomainError(f"unknown benchmark {benchmark!r}")
    sizes = range(kappa + 1)
    rows = [[-num(Fraction(kappa) + s - Fraction(s * kappa, N)) / opt_r for s in sizes] + [num(1)]]
    rhs = [num(0)]
    if include_empty:
        rows.append([-num(Fraction(s, opt_empty)) for s in sizes] + [num(1)])
        rhs.append(num(0))
    rows.append([num(1)] * len(sizes) + [num(0)])
    rhs.append(num(1))
    res = solve_lp([num(0)] * len(sizes) + [num(1)], rows, rhs, exact=exact)
    return Fraction(res.objective) if exact else float(res.objective)


def alignment_ceiling(kappa, epsilon):
    """Upper bound ``(3k + 2 eps k) / (2 (2k - 1))`` for uniform singletons plus ``eps k`` extras."""
    return (3 * kappa + 2 * epsilon * kappa) / (2 * (2 * kappa - 1))


# ---------------------------------------------------------------- measurement

@dataclass
class AdversarialResult:
    mean_ratio: float
    ci: tuple
    trials: int
    exact_over_i: bool
    expected_value: float
    expected_opt: float
    per_trial: list = field(default_factory=list)


def _run_prefix(alg, f, stream, budget):
    prev = 0
    for t, x in enumerate(stream, start=1):
        alg.partial_fit(x, f)
        cur = as_mask(alg.solution_, f.n)
        added = (cur & ~prev).bit_count()
        if budget is not None and added > budget:
            raise AuditError(f"{added} additions exceed the swap budget {budget}", step=t)
        prev = cur
    return prev


def _lifted_trial(algorithm, inst, budget, seed, indices):
    from sklearn.base import clone

    alg = clone(algorithm)
    if seed is not None and "seed" in alg.get_params():
        alg.set_params(seed=seed)
    prefix = inst.stream[:-1]
    prev = _run_prefix(alg, inst.common(), prefix, budget)
    vals = []
    for i in indices:
        branch = copy.deepcopy(alg)
        f_i = inst.functions[i]
        branch.partial_fit(inst.r, f_i)
        cur = as_mask(branch.solution_, f_i.n)
        added = (cur & ~prev).bit_count()
        if budget is not None and added > budget:
            raise AuditError(f"{added} additions exceed the swap budget {budget}",
                             step=len(inst.stream))
        vals.append(float(f_i.value(cur)))
    return vals


def measure_adversarial_ratio(algorithm, instance, swap_budget=None, trials=1, seed=None,
                              z=1.96):
    """Empirical ``E[f_i(ALG)] / E[f_i(OPT)]`` on a hard instance.

    For a :class:`LiftedHardInstance`, ``algorithm`` is a streaming estimator.
    It sees the common restriction until ``r`` arrives; the run is then
    branched over every ``i`` (exact expectation) when ``m <= 64``, otherwise
    ``i`` is drawn per trial.  Any step adding more than ``swap_budget``
    elements raises :class:`AuditError`.

    For an :class:`AlignmentInstance`, ``algorithm`` is a solution
    distribution over singletons (or an object with ``distribution_``); the
    ratio is the worst future's exact ``E[f(A + R)]`` against ``2 kappa - 1``,
    after a best response of ``swap_budget`` extra singletons.
    """
    if isinstance(instance, AlignmentInstance):
        return _alignment_ratio(algorithm, instance, swap_budget or 0)
    if not isinstance(instance, LiftedHardInstance):
        raise DomainError("instance must be a LiftedHardInstance or an AlignmentInstance")
    trials = check_int(trials, "trials", low=1)
    m = instance.m
    exact_i = m <= MAX_EXACT_I
    opts = [float(instance.opt(i)[0]) for i in range(m)]
    rng = make_rng(seed, "adversary")
    per_trial = []
    for t in range(trials):
        trial_seed = int(make_rng(seed, f"trial/{t}").integers(2**63))
        indices = list(range(m)) if exact_i else [int(rng.integers(m))]
        vals = _lifted_trial(algorithm, instance, swap_budget, trial_seed, indices)
        per_trial.append((float(np.mean(vals)), float(np.mean([opts[i] for i in indices]))))
    num = np.array([v for v, _ in per_trial])
    den = np.array([o for _, o in per_trial])
    mean_opt = float(den.mean())
    ratio = float(num.mean() / mean_opt)
    if trials > 1:
        half = z * float(num.std(ddof=1)) / math.sqrt(trials) / mean_opt
    else:
        half = 0.0
    return AdversarialResult(ratio, (ratio - half, ratio + half), trials, exact_i,
                             float(num.mean()), mean_opt, [v / o for v, o in per_trial])


def _alignment_ratio(algorithm, inst, budget):
    dist = getattr(algorithm, "distribution_", algorithm)
    atoms = [(as_mask(s, inst.N), float(p)) for s, p in getattr(dist, "atoms", dist)]
    residual = max(0.0, 1 - sum(p for _, p in atoms))
    atoms.append((0, residual))
    for a, _ in atoms:
        if a.bit_count() > inst.kappa:
            raise DomainError("atoms must hold at most kappa singletons")
    count = math.comb(inst.N, inst.kappa)
    if count > MAX_ALIGNMENT_SCENARIOS:
        raise CapacityError(f"{count} futures exceed {MAX_ALIGNMENT_SCENARIOS}")
    opt = inst.opt_after()
    worst = None
    for R in inst.futures():
        r = as_mask(R, inst.N)
        e = 0.0
        for a, p in atoms:
            covered = (a | r).bit_count()
            e += p * min(inst.N, covered + min(budget, inst.N - covered))
        ratio = e / opt
        if worst is None or ratio < worst[0]:
            worst = (ratio, e)
    return AdversarialResult(worst[0], (worst[0], worst[0]), 1, True, worst[1], float(opt))


__all__ = [
    "AdversarialResult", "AlignmentInstance", "GiFamily", "GuardedFunction",
    "LiftedHardInstance", "alignment_ceiling", "alignment_orbit_alpha",
    "build_alignment_instance", "build_gi_family", "build_lifted_hard_instance", "gi_value",
    "measure_adversarial_ratio",
]
