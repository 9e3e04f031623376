"""Brute-force oracles, stream runner and audits (consistency, robustness, approximation)."""
import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from itertools import combinations

import numpy as np
from sklearn.base import clone

from ._validation import TOL, check_int
from .exceptions import AuditError, CapacityError, DomainError
from .functions import as_mask, bits, mask_to_set, submasks, subsets_upto

MAX_BRUTE_FORCE = 10**7
MAX_SUBSAMPLES = 10**6
TABLE_LIMIT = 20


def _count_upto(n, k):
    return sum(math.comb(n, i) for i in range(min(n, k) + 1))


def _values(f, masks):
    if f.n <= TABLE_LIMIT and not f.exact:
        return np.asarray(f.table())[np.asarray(masks, dtype=np.int64)]
    return [f.value(m) for m in masks]


def _argbest(masks, vals, exact):
    """Largest value; ties (within TOL for floats) go to the lexicographically smallest set."""
    if not exact:
        vals = np.asarray(vals, dtype=np.float64)
        best = vals.max()
        ties = np.flatnonzero(vals >= best - TOL)
        winner = min((int(masks[i]) for i in ties), key=lambda m: tuple(bits(m)))
        return winner, float(vals[np.flatnonzero(np.asarray(masks) == winner)[0]])
    best = max(vals)
    winner = min((m for m, v in zip(masks, vals) if v == best), key=lambda m: tuple(bits(m)))
    return winner, best


def brute_force_opt(f, pool=None, k=1):
    """Exact maximum of ``f`` over subsets of ``pool`` with at most ``k`` elements."""
    k = check_int(k, "k", low=0)
    pm = (1 << f.n) - 1 if pool is None else as_mask(pool, f.n)
    count = _count_upto(pm.bit_count(), k)
    if count > MAX_BRUTE_FORCE:
        raise CapacityError(f"{count} candidate sets exceed {MAX_BRUTE_FORCE}",
                            suggestion="reduce the pool or k")
    masks = subsets_upto(pm, k)
    mask, value = _argbest(masks, _values(f, masks), f.exact)
    return mask_to_set(mask), value


def opt_value(f, pool_mask, k):
    return brute_force_opt(f, pool_mask, k)[1]


# ------------------------------------------------------------------- reports

@dataclass
class AuditReport:
    kind: str
    passed: bool
    worst_case: dict
    samples: int
    seed: int = None
    details: dict = field(default_factory=dict)

    @property
    def exit_code(self):
        return 0 if self.passed else 1

    def to_json(self):
        return json.dumps(_jsonable(asdict(self)), indent=2, sort_keys=True)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [_jsonable(v) for v in items]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if hasattr(obj, "numerator") and hasattr(obj, "denominator") and not isinstance(obj, int):
        return float(obj)
    return obj


# ---------------------------------------------------------------- robustness

@dataclass
class RobustnessQuery:
    """A solution distribution to audit against future additions.

    ``distribution`` is a list of ``(set, probability)`` pairs or a
    :class:`~consist_submod.robust_lp.SolutionDistribution`; leftover mass
    sits on the empty set.  ``mode`` is ``"weak"`` (benchmark: best
    ``kappa``-set inside ``v_now + R``) or ``"strong"`` (benchmark: best
    ``kappa``-subset of ``v_now`` joined with all of ``R``).
    """

    distribution: object
    v_now: object
    v_future: object
    kappa: int
    mode: str = "weak"
    futures: list = None


def _atoms(distribution, n):
    atoms = getattr(distribution, "atoms", distribution)
    out = [(as_mask(s, n), p) for s, p in atoms]
    return out


def addition_robustness_audit(query, f, alpha=None):
    """Measure ``min_R E[f(A + R)] / benchmark(R)`` exactly over the distribution's atoms.

    All ``R`` subsets of ``v_future`` are enumerated unless ``query.futures``
    lists them explicitly.  Futures whose benchmark is zero are skipped.
    ``alpha`` (optional) turns the measurement into a pass/fail check.
    """
    if query.mode not in ("weak", "strong"):
        raise DomainError(f"mode must be 'weak' or 'strong', got {query.mode!r}")
    now = as_mask(query.v_now, f.n)
    fut = as_mask(query.v_future, f.n)
    if now & fut:
        raise DomainError("v_now and v_future must be disjoint")
    kappa = check_int(query.kappa, "kappa", low=0)
    atoms = _atoms(query.distribution, f.n)
    for a, p in atoms:
        if a & ~now:
            raise DomainError("distribution atoms must lie inside v_now")
        if p < -TOL:
            raise DomainError("negative atom probability")
    total = sum(p for _, p in atoms)
    if total > 1 + 1e-7:
        raise DomainError(f"atom probabilities sum to {total} > 1")
    residual = max(0.0, 1 - total) if not f.exact else 1 - total
    if query.futures is not None:
        futures = [as_mask(r, f.n) for r in query.futures]
        for r in futures:
            if r & ~fut:
                raise DomainError("explicit futures must lie inside v_future")
    else:
        if fut.bit_count() > 20:
            raise CapacityError("exhaustive future enumeration limited to |v_future| <= 20",
                                suggestion="pass an explicit list of futures")
        futures = sorted(submasks(fut))
    now_sets = subsets_upto(now, kappa)
    worst = None
    evaluated = 0
    for r in futures:
        expected = sum(p * f.value(a | r) for a, p in atoms) + residual * f.value(r)
        if query.mode == "weak":
            bench = opt_value(f, now | r, kappa)
        else:
            bench = max(_values(f, [s | r for s in now_sets]))
        if bench <= 0:
            continue
        evaluated += 1
        ratio = expected / bench
        if worst is None or ratio < worst[1]:
            worst = (sorted(bits(r)), ratio, float(expected), float(bench))
    if worst is None:
        raise DomainError("every future has benchmark 0: degenerate instance")
    measured = worst[1]
    passed = True if alpha is None else measured >= alpha - TOL
    return AuditReport(
        kind="robustness",
        passed=passed,
        worst_case={"location": worst[0], "value": float(measured),
                    "bound": None if alpha is None else float(alpha)},
        samples=evaluated,
        details={"alpha_measured": measured, "expected": worst[2], "benchmark": worst[3],
                 "mode": query.mode},
    )


def exact_expectation_over_subsamples(A_plus, kappa, f, R=()):
    """Average of ``f(A + R)`` over every ``kappa``-subset ``A`` of ``A_plus``."""
    members = bits(as_mask(A_plus, f.n))
    r = as_mask(R, f.n)
    kappa = check_int(kappa, "kappa", low=0, high=len(members))
    count = math.comb(len(members), kappa)
    if count > MAX_SUBSAMPLES:
        raise CapacityError(f"{count} subsamples exceed {MAX_SUBSAMPLES}")
    masks = []
    for combo in combinations(members, kappa):
        m = r
        for x in combo:
            m |= 1 << x
        masks.append(m)
    vals = _values(f, masks)
    return sum(vals) / count if f.exact else float(np.mean(vals))


# ------------------------------------------------------------------ streaming

@dataclass(frozen=True)
class StepRecord:
    t: int
    element: int
    alg: frozenset
    n_t: int
    sym_diff: int
    alg_value: float
    opt_value: float = None

    @property
    def ratio(self):
        if self.opt_value is None:
            return None
        if self.opt_value <= 0:
            return 1.0
        return self.alg_value / self.opt_value


TRACE_COLUMNS = ("t", "element", "n_t", "alg_value", "opt_value", "ratio", "sym_diff", "alg")


@dataclass
class StreamTrace:
    steps: list
    seed: int = None
    k: int = None

    def __len__(self):
        return len(self.steps)

    @property
    def recourse(self):
        return [s.n_t for s in self.steps]

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(TRACE_COLUMNS)
        for s in self.steps:
            ratio = s.ratio
            w.writerow([s.t, s.element, s.n_t, repr(float(s.alg_value)),
                        "" if s.opt_value is None else repr(float(s.opt_value)),
                        "" if ratio is None else repr(float(ratio)), s.sym_diff,
                        " ".join(str(x) for x in sorted(s.alg))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text):
        rows = list(csv.DictReader(io.StringIO(text)))
        missing = {"t", "element", "n_t", "alg_value"} - set(rows[0] if rows else TRACE_COLUMNS)
        if missing:
            raise DomainError(f"trace CSV lacks columns {sorted(missing)}")
        steps = []
        for row in rows:
            alg = frozenset(int(x) for x in (row.get("alg") or "").split())
            opt = row.get("opt_value")
            steps.append(StepRecord(
                t=int(row["t"]), element=int(row["element"]), alg=alg, n_t=int(row["n_t"]),
                sym_diff=int(row.get("sym_diff") or row["n_t"]),
                alg_value=float(row["alg_value"]),
                opt_value=float(opt) if opt not in (None, "") else None))
        return cls(steps)

    def to_json(self):
        return json.dumps({
            "seed": self.seed, "k": self.k,
            "steps": [{"t": s.t, "element": s.element, "alg": sorted(s.alg), "n_t": s.n_t,
                       "sym_diff": s.sym_diff, "alg_value": float(s.alg_value),
                       "opt_value": None if s.opt_value is None else float(s.opt_value),
                       "ratio": None if s.ratio is None else float(s.ratio)}
                      for s in self.steps]}, indent=1)

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        steps = [StepRecord(d["t"], d["element"], frozenset(d["alg"]), d["n_t"], d["sym_diff"],
                            d["alg_value"], d.get("opt_value")) for d in data["steps"]]
        return cls(steps, data.get("seed"), data.get("k"))


def stream_opt_values(f, stream, k):
    """``f(OPT_t)`` for every prefix of ``stream``."""
    out, arrived = [], 0
    for x in stream:
        arrived |= 1 << int(x)
        out.append(opt_value(f, arrived, k))
    return out


def _with_seed(alg, seed):
    alg = clone(alg)
    if seed is not None and "seed" in alg.get_params():
        alg.set_params(seed=seed)
    return alg


def run_stream(alg, f, stream, seed=None, k=None, opt_values=None, compute_opt=False):
    """Feed ``stream`` to a fresh clone of ``alg`` and record every step.

    ``alg`` follows the streaming estimator protocol (``partial_fit(x, f)``
    and ``solution_``).  ``opt_values`` may carry precomputed ``f(OPT_t)``;
    ``compute_opt`` computes them by brute force.  Raises
    :class:`AuditError` if a solution leaves the arrived set or exceeds ``k``.
    """
    k = k if k is not None else alg.get_params().get("k")
    alg = _with_seed(alg, seed)
    if opt_values is None and compute_opt:
        opt_values = stream_opt_values(f, stream, k)
    steps, prev, arrived = [], 0, 0
    for t, x in enumerate(stream, start=1):
        alg.partial_fit(x, f)
        arrived |= 1 << int(x)
        cur = as_mask(alg.solution_, f.n)
        if cur & ~arrived:
            raise AuditError("solution contains elements that have not arrived", step=t)
        if k is not None and cur.bit_count() > k:
            raise AuditError(f"solution has {cur.bit_count()} > k={k} elements", step=t)
        steps.append(StepRecord(
            t=t, element=int(x), alg=mask_to_set(cur), n_t=(cur & ~prev).bit_count(),
            sym_diff=(cur ^ prev).bit_count(), alg_value=f.value(cur),
            opt_value=None if opt_values is None else opt_values[t - 1]))
        prev = cur
    return StreamTrace(steps, seed, k)


def consistency_audit(trace, C, metric="additions"):
    """Pass iff every step's recourse is at most ``C`` (additions by default)."""
    if metric not in ("additions", "sym_diff"):
        raise DomainError(f"unknown metric {metric!r}")
    values = [s.n_t if metric == "additions" else s.sym_diff for s in trace.steps]
    worst_t, worst = max(enumerate(values, start=1), key=lambda p: (p[1], -p[0]), default=(None, 0))
    failing = next((t for t, v in enumerate(values, start=1) if v > C), None)
    return AuditReport(
        kind="consistency",
        passed=failing is None,
        worst_case={"location": failing if failing is not None else worst_t,
                    "value": worst if failing is None else values[failing - 1], "bound": C},
        samples=len(values),
        seed=trace.seed,
        details={"metric": metric,
                 "max_additions": max((s.n_t for s in trace.steps), default=0),
                 "max_sym_diff": max((s.sym_diff for s in trace.steps), default=0)},
    )


def approximation_audit(traces, alpha, z=1.96, tol=TOL):
    """Per-step check of ``mean f(ALG_t) >= alpha * OPT_t`` using a normal-approximation CI.

    Passes iff the lower confidence bound clears ``alpha * OPT_t - tol`` at
    every step.  Steps with ``OPT_t = 0`` are skipped.
    """
    if not traces:
        raise DomainError("no traces to audit")
    first = traces[0]
    for tr in traces[1:]:
        if len(tr) != len(first) or any(a.element != b.element or a.opt_value != b.opt_value
                                        for a, b in zip(tr.steps, first.steps)):
            raise DomainError("traces must share the instance, stream and OPT values")
    if any(s.opt_value is None for s in first.steps):
        raise DomainError("traces need exact OPT values")
    vals = np.array([[s.alg_value for s in tr.steps] for tr in traces], dtype=np.float64)
    opts = np.array([s.opt_value for s in first.steps], dtype=np.float64)
    mean = vals.mean(axis=0)
    se = vals.std(axis=0, ddof=1) / math.sqrt(len(traces)) if len(traces) > 1 else np.zeros_like(mean)
    lower = mean - z * se
    live = opts > 0
    ratios = np.where(live, lower / np.where(live, opts, 1), 1.0)
    slack = np.where(live, lower - (alpha * opts - tol), 0.0)
    worst = int(np.argmin(ratios))
    failing = np.flatnonzero(slack < 0)
    return AuditReport(
        kind="approximation",
        passed=failing.size == 0,
        worst_case={"location": int(failing[0]) + 1 if failing.size else worst + 1,
                    "value": float(ratios[failing[0]] if failing.size else ratios[worst]),
                    "bound": float(alpha)},
        samples=len(traces),
        details={"mean_ratio_min": float(np.min(np.where(live, mean / np.where(live, opts, 1), 1.0))),
                 "lower_ratio_per_step": [float(v) for v in ratios], "z": z},
    )
