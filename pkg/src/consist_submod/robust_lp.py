"""Scenario families, the hedging LP behind MinMaxSampling, extension fitting and correlation gaps.

A scenario family fixes the current elements ``V_now`` and a list of virtual
future elements ``r``.  Each scenario is described by the table
``S -> f^(S + r)`` over subsets ``S`` of ``V_now``; all scenarios share the
base table ``S -> f(S)``.  Subsets of ``V_now`` use *local* bitmasks (bit
``i`` is ``v_now[i]``); distributions handed back to callers use the global
element ids.
"""
import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from sklearn.base import BaseEstimator

from ._validation import TOL, check_int
from .exceptions import CapacityError, DomainError, LPError
from .functions import (
    CoverageFunction,
    TableFunction,
    as_mask,
    bits,
    subsets_upto,
    validate_monotone_submodular,
)
from .lp import solve_lp
from .rng import make_rng

MAX_SCENARIO_UNIVERSE = 16
MAX_ALL_CANDIDATES = 16
MAX_FIT_N = 8
AUDIT_TOL = 1e-7


def _num(v, exact):
    if exact:
        return v if isinstance(v, Fraction) else Fraction(v)
    return float(v)


def _mask_key(mask, n):
    return format(mask, f"0{n}b") if n else "0"


def _parse_values(values, n, exact):
    """Table from a ``{bitmask-string: number}`` map or a plain list."""
    if isinstance(values, dict):
        out = [None] * (1 << n)
        for key, v in values.items():
            m = int(key, 2)
            if m >> n:
                raise DomainError(f"mask {key!r} outside {n} elements")
            out[m] = Fraction(v) if exact else float(Fraction(v) if isinstance(v, str) else v)
        if any(v is None for v in out):
            raise DomainError("value table is incomplete")
        return out
    if len(values) != 1 << n:
        raise DomainError(f"expected {1 << n} values, got {len(values)}")
    return [_num(v, exact) for v in values]


def _dump_value(v):
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else int(v)
    return float(v)


class ScenarioFamily:
    """Current elements plus a finite set of single-element futures.

    Parameters
    ----------
    v_now : sequence of int
        Global ids of the current elements.
    base : sequence
        ``base[S] = f(S)`` for every local mask ``S``.
    tables : list of sequences
        ``tables[j][S] = f^(S + r_j)``.
    exact : bool
        Keep values as fractions.
    coverage : dict, optional
        ``{"universe_size", "sets", "scenario_sets"}`` when the family comes
        from a coverage instance; used only for serialization.
    """

    def __init__(self, v_now, base, tables, exact=False, coverage=None, names=None):
        self.v_now = tuple(int(x) for x in v_now)
        if len(set(self.v_now)) != len(self.v_now):
            raise DomainError("v_now has duplicate elements")
        self.n_now = len(self.v_now)
        if self.n_now > MAX_ALL_CANDIDATES + 4:
            raise CapacityError(f"|v_now| = {self.n_now} is too large for explicit tables")
        self.exact = bool(exact)
        self.base = _parse_values(base, self.n_now, self.exact)
        self.tables = [_parse_values(t, self.n_now, self.exact) for t in tables]
        if not self.tables:
            raise DomainError("a scenario family needs at least one scenario")
        for j, t in enumerate(self.tables):
            if min(t) < 0:
                raise DomainError(f"scenario {j} has negative values")
        self.coverage = coverage
        self.names = list(names) if names is not None else None

    def __len__(self):
        return len(self.tables)

    @property
    def size(self):
        return len(self.tables)

    @property
    def base_array(self):
        return np.asarray(self.base, dtype=np.float64)

    @property
    def table_array(self):
        return np.asarray(self.tables, dtype=np.float64)

    # ----------------------------------------------------------- conversions

    def local_mask(self, S):
        """Local mask of a set given in global ids."""
        index = {x: i for i, x in enumerate(self.v_now)}
        m = 0
        for x in (bits(S) if isinstance(S, int) else S):
            if x not in index:
                raise DomainError(f"element {x} is not in v_now")
            m |= 1 << index[x]
        return m

    def global_set(self, local):
        return frozenset(self.v_now[i] for i in bits(local))

    def scenario_function(self, j):
        """Table function on ``V_now + r_j`` (``r_j`` is the last element)."""
        return TableFunction(list(self.base) + list(self.tables[j]), exact=self.exact)

    def value(self, j, local):
        return self.tables[j][local]

    # ---------------------------------------------------------------- optima

    def opt_values(self, kappa, benchmark="strong"):
        """``OPT(r_j)`` per scenario.

        ``"strong"``: best ``f^(V' + r)`` over ``|V'| <= kappa``, so ``r`` is
        free.  ``"weak"``: best ``kappa``-set inside ``V_now + r``, so ``r``
        takes one of the ``kappa`` slots.
        """
        kappa = check_int(kappa, "kappa", low=0)
        full = (1 << self.n_now) - 1
        big = subsets_upto(full, kappa)
        if benchmark == "strong":
            return [max(t[m] for m in big) for t in self.tables]
        if benchmark != "weak":
            raise DomainError(f"benchmark must be 'strong' or 'weak', got {benchmark!r}")
        now_best = max(self.base[m] for m in big)
        small = subsets_upto(full, kappa - 1) if kappa else []
        return [max([now_best] + [t[m] for m in small]) for t in self.tables]

    def optima(self, kappa):
        """Per-scenario argmax local masks of the strong benchmark (lexicographic ties)."""
        full = (1 << self.n_now) - 1
        big = subsets_upto(full, kappa)
        out = []
        for t in self.tables:
            best = max(t[m] for m in big)
            cands = [m for m in big if t[m] >= best - (0 if self.exact else TOL)]
            out.append(min(cands, key=lambda m: tuple(bits(m))))
        return out

    def validate(self):
        """Raise :class:`DomainError` unless every scenario is monotone submodular on ``V_now + r``."""
        for j in range(self.size):
            rep = validate_monotone_submodular(self.scenario_function(j))
            if not rep.ok:
                raise DomainError(f"scenario {j} is not monotone submodular: "
                                  f"{rep.monotone_witness or rep.submodular_witness}")
        return self

    # ------------------------------------------------------------ persistence

    def to_dict(self):
        n = self.n_now
        out = {"v_now": list(self.v_now)}
        if self.coverage is not None:
            out["universe_size"] = self.coverage["universe_size"]
            out["sets"] = self.coverage["sets"]
            out["scenarios"] = [{"kind": "coverage_set", "set": list(s)}
                                for s in self.coverage["scenario_sets"]]
        else:
            out["base"] = {_mask_key(m, n): _dump_value(v) for m, v in enumerate(self.base)}
            out["scenarios"] = [{"kind": "table",
                                 "values": {_mask_key(m, n): _dump_value(v) for m, v in enumerate(t)}}
                                for t in self.tables]
        out["exact"] = self.exact
        return out

    def to_json(self):
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_dict(cls, data, exact=None):
        exact = data.get("exact", False) if exact is None else exact
        v_now = data["v_now"]
        kinds = {s["kind"] for s in data["scenarios"]}
        if kinds == {"coverage_set"}:
            cov = CoverageFunction(data["universe_size"], data["sets"])
            return enumerate_coverage_scenarios(
                cov, v_now, [s["set"] for s in data["scenarios"]], exact=exact)
        if kinds != {"table"}:
            raise DomainError(f"unsupported scenario kinds {sorted(kinds)}")
        return cls(v_now, data["base"], [s["values"] for s in data["scenarios"]], exact=exact)

    @classmethod
    def from_json(cls, text, exact=None):
        return cls.from_dict(json.loads(text), exact)


def enumerate_coverage_scenarios(cov, v_now=None, subsets=None, exact=False):
    """One scenario per future universe subset ``r`` with ``f^(S + r) = |cover(S) | r|``.

    Without ``subsets`` every subset of the universe becomes a scenario
    (universe size at most 16).
    """
    v_now = list(range(cov.n)) if v_now is None else [int(x) for x in v_now]
    N = cov.universe_size
    if subsets is None:
        if N > MAX_SCENARIO_UNIVERSE:
            raise CapacityError(f"2**{N} scenarios exceed the cap of 2**{MAX_SCENARIO_UNIVERSE}",
                                suggestion="pass an explicit list of future subsets")
        scen_masks = list(range(1 << N))
    else:
        scen_masks = [as_mask(s, N) for s in subsets]
    n = len(v_now)
    local_cover = [cov.set_masks[x] for x in v_now]
    cover = [0] * (1 << n)
    for i, s in enumerate(local_cover):
        half = 1 << i
        for m in range(half):
            cover[half + m] = cover[m] | s
    base = [c.bit_count() for c in cover]
    tables = [[(c | r).bit_count() for c in cover] for r in scen_masks]
    info = {"universe_size": N, "sets": cov.sets,
            "scenario_sets": [sorted(bits(r)) for r in scen_masks]}
    return ScenarioFamily(v_now, base, tables, exact=exact, coverage=info)


# --------------------------------------------------------------- the primal LP

@dataclass
class SolutionDistribution:
    """Finite distribution over solutions; leftover mass is on the empty set."""

    atoms: list
    guarantee: object = None

    def __post_init__(self):
        total = 0
        for s, p in self.atoms:
            if p < -AUDIT_TOL:
                raise DomainError("negative atom probability")
            total += p
        if total > 1 + AUDIT_TOL:
            raise DomainError(f"atom probabilities sum to {float(total)} > 1")

    @property
    def residual(self):
        return max(0, 1 - sum(p for _, p in self.atoms))

    def sample(self, rng=None):
        rng = make_rng(rng)
        u = rng.random()
        acc = 0.0
        for s, p in self.atoms:
            acc += float(p)
            if u < acc:
                return frozenset(s)
        return frozenset()

    def expectation(self, fn):
        """``E[fn(A)]`` with ``fn`` applied to frozensets."""
        return sum(p * fn(frozenset(s)) for s, p in self.atoms) + self.residual * fn(frozenset())

    def to_dict(self):
        return {"alpha": None if self.guarantee is None else float(self.guarantee),
                "atoms": [{"set": sorted(s), "p": float(p)} for s, p in self.atoms]}

    def to_json(self):
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_dict(cls, data):
        return cls([(frozenset(a["set"]), a["p"]) for a in data["atoms"]], data.get("alpha"))

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


@dataclass
class LPSolution:
    alpha: object
    lam: dict  # local candidate mask -> probability
    candidates: list
    opt_values: list
    scenarios_used: list
    exact: bool
    benchmark: str
    pivots: int = 0
    slack: list = field(default_factory=list)


def _candidates(family, kappa, policy):
    full = (1 << family.n_now) - 1
    if policy == "auto":
        policy = "all" if family.n_now <= MAX_ALL_CANDIDATES else "optima"
    if policy == "all":
        if family.n_now > MAX_ALL_CANDIDATES:
            raise CapacityError(f"all-subsets candidates need |v_now| <= {MAX_ALL_CANDIDATES}",
                                suggestion="use candidate_policy='optima'")
        return subsets_upto(full, kappa)
    if policy == "optima":
        from .algorithms.greedy import _greedy_mask

        cands = set(family.optima(kappa))
        for j in range(family.size):
            f_j = family.scenario_function(j)
            cands.add(_greedy_mask(f_j, full, min(kappa, family.n_now))[0])
        base_f = TableFunction(family.base, exact=family.exact)
        cands.add(_greedy_mask(base_f, full, min(kappa, family.n_now))[0])
        return sorted(cands, key=lambda m: (m.bit_count(), tuple(bits(m))))
    raise DomainError(f"unknown candidate_policy {policy!r}")


def build_and_solve_primal(family, kappa, candidate_policy="auto", benchmark="strong",
                           exact=None, validate=True):
    """Solve ``max alpha`` s.t. ``sum_A lam_A f^(A + r) >= alpha OPT(r)`` for every scenario.

    Returns ``(LPSolution, SolutionDistribution)``.  Scenarios with
    ``OPT(r) = 0`` are dropped since any distribution satisfies them.  Every
    scenario constraint is re-checked on the returned point; a failure raises
    :class:`LPError`.
    """
    kappa = check_int(kappa, "kappa", low=0)
    exact = family.exact if exact is None else bool(exact)
    if validate:
        family.validate()
    opts = family.opt_values(kappa, benchmark)
    used = [j for j, o in enumerate(opts) if o > 0]
    cands = _candidates(family, kappa, candidate_policy)
    if not used:
        lam = {cands[-1]: 1} if cands else {}
        sol = LPSolution(Fraction(1) if exact else 1.0, lam, cands, opts, used, exact, benchmark)
        return sol, _distribution(family, sol)
    nc = len(cands)
    # columns: lam_0 .. lam_{nc-1}, alpha; each scenario row is divided by OPT(r)
    rows, rhs = [], []
    for j in used:
        o = _num(opts[j], exact)
        t = family.tables[j]
        rows.append([-_num(t[m], exact) / o for m in cands] + [_num(1, exact)])
        rhs.append(_num(0, exact))
    rows.append([_num(1, exact)] * nc + [_num(0, exact)])
    rhs.append(_num(1, exact))
    c = [_num(0, exact)] * nc + [_num(1, exact)]
    res = solve_lp(c, rows, rhs, exact=exact)
    if not res.ok:
        raise LPError(f"primal LP returned status {res.status!r}; the model is always feasible")
    x = res.x
    if exact:
        x = [Fraction(v) for v in x]
        alpha = Fraction(res.objective)
    else:
        x = [max(0.0, float(v)) for v in x]
        alpha = float(res.objective)
    lam = {cands[i]: x[i] for i in range(nc) if x[i] > (0 if exact else 1e-12)}
    sol = LPSolution(alpha, lam, cands, opts, used, exact, benchmark, res.pivots)
    _audit(family, sol)
    return sol, _distribution(family, sol)


def _audit(family, sol):
    tol = 0 if sol.exact else AUDIT_TOL
    total = sum(sol.lam.values())
    if total > 1 + tol or any(p < -tol for p in sol.lam.values()):
        raise LPError("LP solution is not a sub-probability vector")
    slack = []
    for j in sol.scenarios_used:
        t = family.tables[j]
        got = sum(p * _num(t[m], sol.exact) for m, p in sol.lam.items())
        need = sol.alpha * _num(sol.opt_values[j], sol.exact)
        if got < need - tol * max(1, abs(need)):
            raise LPError(f"post-solve audit failed on scenario {j}: {got} < {need}")
        slack.append(got - need)
    sol.slack = slack


def _distribution(family, sol):
    atoms = [(family.global_set(m), p) for m, p in sorted(sol.lam.items())]
    return SolutionDistribution(atoms, sol.alpha)


def strong_robustness_ratio(family, dist, kappa):
    """``min_r E[f^(A + r)] / OPT(r)`` under the strong benchmark, exact over atoms."""
    opts = family.opt_values(kappa, "strong")
    worst = None
    for j, o in enumerate(opts):
        if o <= 0:
            continue
        t = family.tables[j]
        e = sum(p * t[family.local_mask(s)] for s, p in dist.atoms) + dist.residual * t[0]
        r = e / o
        worst = r if worst is None or r < worst else worst
    return worst


def min_max_sampling(family, kappa, rng=None, **lp_kwargs):
    """Draw one solution from the LP-optimal hedging distribution."""
    _, dist = build_and_solve_primal(family, kappa, **lp_kwargs)
    return dist.sample(rng)


class MinMaxSampling(BaseEstimator):
    """Estimator wrapper: ``fit(family)`` solves the LP, ``predict`` samples a set."""

    def __init__(self, kappa=1, candidate_policy="auto", benchmark="strong", exact=False,
                 validate=True, seed=None):
        self.kappa = kappa
        self.candidate_policy = candidate_policy
        self.benchmark = benchmark
        self.exact = exact
        self.validate = validate
        self.seed = seed

    def fit(self, family):
        self.lp_, self.distribution_ = build_and_solve_primal(
            family, self.kappa, self.candidate_policy, self.benchmark, self.exact, self.validate)
        self.alpha_ = self.lp_.alpha
        return self

    def predict(self, rng=None):
        return sorted(self.distribution_.sample(make_rng(self.seed if rng is None else rng,
                                                         "minmax")))


# ------------------------------------------------------------ correlation gap

def correlation_gap_check(pairs, family):
    """``E_{i,j}[f^(A_i + r_j)] / E_i[f^(A_i + r_i)]`` over all ``m**2`` pairs.

    ``pairs`` holds ``(A_i, j_i)``: a set of global ids inside ``v_now`` and a
    scenario index.
    """
    if not pairs:
        raise DomainError("need at least one pair")
    loc = [(family.local_mask(a), int(j)) for a, j in pairs]
    m = len(loc)
    for _, j in loc:
        if not 0 <= j < family.size:
            raise DomainError(f"scenario index {j} out of range")
    diag = sum(family.tables[j][a] for a, j in loc)
    if diag <= 0:
        raise DomainError("diagonal expectation is zero")
    cross = sum(family.tables[j][a] for a, _ in loc for _, j in loc)
    if family.exact:
        return Fraction(cross) / (m * diag)
    return float(cross) / (m * float(diag))


def per_scenario_optima_pairs(family, kappa):
    """Pairs ``(OPT set of r_j, j)`` for the correlation-gap dual argument."""
    return [(family.global_set(a), j) for j, a in enumerate(family.optima(kappa))]


# --------------------------------------------------------- extension fitting

@dataclass
class FitResult:
    values: list  # f^(S + r) per local mask S
    error: object
    base: list

    def as_table(self, exact=False):
        return TableFunction(list(self.base) + list(self.values), exact=exact)


def fit_submodular_extension(v, f, exact=False):
    """Closest (in max-norm) monotone submodular extension of ``f`` by one element ``r``.

    ``v[S]`` is the target for ``f^(S + r)``.  The fitted values keep ``f``
    on subsets without ``r``; the returned error is the LP optimum of
    ``max_S |f^(S + r) - v[S]|``.
    """
    n = f.n
    if n > MAX_FIT_N:
        raise CapacityError(f"extension fitting limited to {MAX_FIT_N} current elements",
                            suggestion="restrict v_now")
    size = 1 << n
    tgt = _parse_values(v, n, exact) if isinstance(v, dict) else [_num(x, exact) for x in v]
    if len(tgt) != size:
        raise DomainError(f"target needs {size} entries, got {len(tgt)}")
    base = [_num(f.value(m), exact) for m in range(size)]
    one, zero = _num(1, exact), _num(0, exact)
    E = size  # column of the error variable
    rows, rhs = [], []

    def row(entries, b):
        r = [zero] * (size + 1)
        for col, coef in entries:
            r[col] += coef
        rows.append(r)
        rhs.append(b)

    for S in range(size):
        row([(S, one), (E, -one)], tgt[S])
        row([(S, -one), (E, -one)], -tgt[S])
        row([(S, -one)], -base[S])
        for x in range(n):
            if S >> x & 1:
                continue
            Sx = S | 1 << x
            row([(S, one), (Sx, -one)], zero)
            row([(Sx, one), (S, -one)], base[Sx] - base[S])
            for y in range(x + 1, n):
                if S >> y & 1:
                    continue
                Sy, Sxy = S | 1 << y, S | 1 << x | 1 << y
                row([(Sxy, one), (Sx, -one), (Sy, -one), (S, one)], zero)
    c = [zero] * size + [-one]
    res = solve_lp(c, rows, rhs, exact=exact)
    if not res.ok:
        raise LPError(f"fitting LP returned status {res.status!r}")
    if exact:
        vals = [Fraction(x) for x in res.x[:size]]
        err = Fraction(res.x[E])
    else:
        vals = [float(x) for x in res.x[:size]]
        err = float(res.x[E])
    return FitResult(vals, err, base)


def fit_is_structural(fit, tol=AUDIT_TOL):
    """True iff the fitted table (``f`` plus ``r``) is monotone and submodular within ``tol``."""
    rep = validate_monotone_submodular(fit.as_table(), tol=tol)
    return rep.ok



__all__ = [
    "ScenarioFamily", "SolutionDistribution", "LPSolution", "FitResult",
    "enumerate_coverage_scenarios", "build_and_solve_primal", "min_max_sampling",
    "MinMaxSampling", "correlation_gap_check", "per_scenario_optima_pairs",
    "fit_submodular_extension", "fit_is_structural", "strong_robustness_ratio",
]
