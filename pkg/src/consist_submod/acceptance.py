"""Property suites that exercise every lemma-level inequality at desk scale.

Each suite draws its own fixtures from a seed, checks the inequalities
exhaustively against brute-force oracles and returns a :class:`SuiteResult`.
The acceptance criteria are thin wrappers that fix trial counts and
tolerances.
"""
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, pairwise

import numpy as np

from .algorithms import (
    CheckPoint,
    GreedyRecompute,
    SingleSwap,
    StaticFill,
    block_plan,
    classic_greedy_bound,
    greedy,
    greedy_with_certificate,
    local_search_with_stats,
    refined_greedy_bound,
    residual_mu,
)
from .algorithms.local_search import is_stable
from .exceptions import AuditError, DomainError
from .fixtures import (
    random_concave_modular,
    random_coverage,
    random_coverage_family,
    random_general_family,
    random_monotone_submodular,
    random_near_modular,
    random_pairs,
    random_split,
)
from .functions import TableFunction, bits, subsets_upto, validate_monotone_submodular
from .hardness import (
    alignment_orbit_alpha,
    build_alignment_instance,
    build_gi_family,
    build_lifted_hard_instance,
    measure_adversarial_ratio,
)
from .harness import (
    approximation_audit,
    consistency_audit,
    run_stream,
    stream_opt_values,
)
from .rng import make_rng
from .robust_lp import (
    build_and_solve_primal,
    correlation_gap_check,
    enumerate_coverage_scenarios,
    fit_is_structural,
    fit_submodular_extension,
    per_scenario_optima_pairs,
)

TOL = 1e-9


@dataclass
class SuiteResult:
    name: str
    passed: bool
    trials: int
    violations: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        shown = ", ".join(f"{k}={_fmt(v)}" for k, v in self.stats.items())
        return f"[{status}] {self.name}: trials={self.trials} violations={len(self.violations)} {shown}"


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


class _Oracle:
    """Float table of a small function plus cached ``<= k`` mask lists for pooled optima."""

    def __init__(self, f):
        self.f = f
        self.n = f.n
        self.t = np.asarray(f.table(), dtype=np.float64)
        self._small = {}

    def small(self, k):
        if k not in self._small:
            self._small[k] = np.asarray(subsets_upto((1 << self.n) - 1, k), dtype=np.int64)
        return self._small[k]

    def opt(self, pool, k):
        m = self.small(k)
        return float(self.t[m[(m & ~pool) == 0]].max())

    def __call__(self, mask):
        return float(self.t[mask])


def _rng_for(seed, name):
    return make_rng(seed, name)


# -------------------------------------------------------------- refined greedy

def suite_refined_greedy(trials=500, seed=None, max_n=12, max_k=4):
    """Greedy value against ``1 + mu ln mu`` and ``1 - (1-1/k)^k`` times the exact optimum."""
    start = time.perf_counter()
    rng = _rng_for(seed, "refined-greedy")
    viol, slack_min, mus = [], math.inf, []
    for t in range(trials):
        k = int(rng.integers(1, max_k + 1))
        n = int(rng.integers(k + 1, max_n + 1))
        f = random_coverage(rng, n) if t % 2 == 0 else random_concave_modular(rng, n)
        o = _Oracle(f)
        opt = o.opt((1 << n) - 1, k)
        if opt <= 0:
            continue
        res = greedy(f, None, k)
        mu = residual_mu(f, None, res, opt)
        mus.append(mu)
        refined = refined_greedy_bound(mu) * opt
        classic = classic_greedy_bound(k) * opt
        slack_min = min(slack_min, res.value - refined)
        if res.value < refined - TOL:
            viol.append({"trial": t, "kind": "refined", "value": res.value, "bound": refined})
        if res.value < classic - TOL:
            viol.append({"trial": t, "kind": "classic", "value": res.value, "bound": classic})
    probe = refined_greedy_bound(1 / math.e)
    probe_err = abs(probe - (1 - 1 / math.e))
    if probe_err > 1e-12:
        viol.append({"kind": "probe", "value": probe})
    return SuiteResult("refined-greedy", not viol, trials, viol,
                       {"min_slack": slack_min, "probe_error": probe_err,
                        "mu_range": f"[{min(mus):.3f}, {max(mus):.3f}]"},
                       time.perf_counter() - start)


# ---------------------------------------------------------------- local search

def suite_local_search(trials=200, seed=None, eps=0.1, max_now=8, max_future=6, max_kappa=4):
    """Stability plus ``f(S*) <= (2 + eps) f(S + R)`` for every ``R`` and every ``S*``."""
    start = time.perf_counter()
    rng = _rng_for(seed, "local-search")
    viol, worst = [], 0.0
    for t in range(trials):
        n_now = int(rng.integers(2, max_now + 1))
        n_fut = int(rng.integers(0, max_future + 1))
        kappa = int(rng.integers(1, min(max_kappa, n_now) + 1))
        n = n_now + n_fut
        f = random_monotone_submodular(rng, n)
        now, fut = random_split(rng, n, n_now, n_fut)
        o = _Oracle(f)
        S_set, _ = local_search_with_stats(f, now, kappa, eps)
        S = sum(1 << x for x in S_set)
        if not is_stable(f, S, now, kappa, eps):
            viol.append({"trial": t, "kind": "stability"})
        for R in _submasks(fut):
            best = o.opt(now | R, kappa)
            have = o(S | R)
            if best > (2 + eps) * have + TOL:
                viol.append({"trial": t, "kind": "robustness", "R": bits(R), "opt": best,
                             "value": have})
            if best > 0:
                worst = max(worst, best / have if have > 0 else math.inf)
    return SuiteResult("local-search", not viol, trials, viol,
                       {"max_opt_over_value": worst, "bound": 2 + eps},
                       time.perf_counter() - start)


def _submasks(mask):
    sub, out = mask, []
    while True:
        out.append(sub)
        if sub == 0:
            return out
        sub = (sub - 1) & mask


# ----------------------------------------------------------- certificate lemmas

def certificate_checks(f, now, fut, kappa, res, oracle=None):
    """All per-run inequalities for one certificate result; returns ``(violations, min_ratio)``.

    Covers the lower bounds on ``A + R``, the certificate upper bound on
    ``OPT'``, the two upper bounds on ``OPT'`` and the end-to-end ratio.
    Every inequality is asserted on every run, including runs where an
    element still clears the threshold when the budget runs out.
    """
    o = oracle or _Oracle(f)
    eta, gamma = res.eta, res.gamma
    S = sum(1 << x for x in res.seed_solution)
    members = sorted(res.augmented)
    ep = res.eta_prime
    fS = o(S)
    opt_now = o.opt(now, kappa)
    mu = residual_mu(f, now, greedy(f, now, kappa), opt_now) if opt_now > 0 else 0.0
    subs = []
    for combo in combinations(members, kappa):
        subs.append(sum(1 << x for x in combo))
    subs = np.asarray(subs, dtype=np.int64)
    A_plus = sum(1 << x for x in members)
    cert_factor = (1 + eta) * (1 + gamma / (1 + gamma * eta))
    viol, min_ratio = [], math.inf
    if fS < refined_greedy_bound(mu) * opt_now - TOL:
        viol.append({"kind": "upper-opt(i)", "fS": fS, "opt_now": opt_now, "mu": mu})
    for R in _submasks(fut):
        E = float(o.t[subs | R].mean())
        fAR = o(A_plus | R)
        fR = o(R)
        opt2 = o.opt(now | R, kappa)
        scale = max(1.0, opt2)
        checks = {
            "lower(i)": (1 + gamma * ep) * fS <= fAR + TOL * scale,
            "lower(ii)": fAR <= (1 + ep) * E + TOL * scale,
            "lower(iii)": fAR / (1 + ep) + ep * fR / (1 + ep) <= E + TOL * scale,
            "upper-opt(ii)": opt2 <= opt_now + fR + TOL * scale,
            "upper-opt(iii)": opt2 <= fAR + mu * opt_now + TOL * scale,
            "certificate": opt2 <= cert_factor * E + TOL * scale,
        }
        for name, ok in checks.items():
            if not ok:
                viol.append({"kind": name, "R": bits(R), "E": E, "opt": opt2})
        if opt2 > 0:
            min_ratio = min(min_ratio, E / opt2)
    return viol, min_ratio


def suite_certificate(trials=200, seed=None, eta=0.1, gamma=0.84, max_now=10, max_future=6,
                      max_kappa=5, min_kappa=1, target=0.51, name="certificate", near_modular=False):
    """End-to-end ratio ``min_R E[f(A + R)] / f(OPT')`` plus every per-run lemma inequality."""
    start = time.perf_counter()
    rng = _rng_for(seed, name)
    viol, worst, hits, augmented = [], math.inf, 0, 0
    for t in range(trials):
        n_now = int(rng.integers(max(2, min_kappa), max_now + 1))
        n_fut = int(rng.integers(0, max_future + 1))
        kappa = int(rng.integers(min_kappa, min(max_kappa, n_now) + 1))
        n = n_now + n_fut
        if near_modular and t % 2 == 0:
            f = random_near_modular(rng, n, noise=float(rng.uniform(0.05, 0.5)),
                                    spread=float(rng.uniform(0.05, 0.3)))
        else:
            f = random_monotone_submodular(rng, n)
        now, fut = random_split(rng, n, n_now, n_fut)
        res = greedy_with_certificate(f, now, kappa, eta, gamma, rng)
        hits += res.certificate_hit
        augmented += bool(res.augmentation_order)
        v, ratio = certificate_checks(f, now, fut, kappa, res)
        for item in v:
            item["trial"] = t
        viol.extend(v)
        worst = min(worst, ratio)
        if target is not None and ratio < target - TOL:
            viol.append({"trial": t, "kind": "ratio", "ratio": ratio})
    return SuiteResult(name, not viol, trials, viol,
                       {"min_ratio": worst, "target": target, "certificate_runs": hits,
                        "augmented_runs": augmented},
                       time.perf_counter() - start)


# ------------------------------------------------------------- correlation gaps

def suite_correlation_gap(trials=1000, seed=None, max_m=6, max_now=6, solve_lp=True):
    """Correlation gap and LP value against 2/3 (general) and 3/4 (coverage)."""
    start = time.perf_counter()
    rng = _rng_for(seed, "correlation-gap")
    viol = []
    worst = {"coverage": math.inf, "general": math.inf}
    worst_lp = {"coverage": math.inf, "general": math.inf}
    for t in range(trials):
        m = int(rng.integers(1, max_m + 1))
        n_now = int(rng.integers(1, max_now + 1))
        kappa = int(rng.integers(1, n_now + 1))
        kind = "coverage" if t % 2 == 0 else "general"
        fam = (random_coverage_family(rng, n_now, m) if kind == "coverage"
               else random_general_family(rng, n_now, m))
        fam.validate()
        bound = 0.75 if kind == "coverage" else 2 / 3
        for label, pairs in (("optima", per_scenario_optima_pairs(fam, kappa)),
                             ("random", random_pairs(rng, fam, kappa))):
            try:
                gap = correlation_gap_check(pairs, fam)
            except DomainError:  # zero diagonal: nothing to compare
                continue
            worst[kind] = min(worst[kind], gap)
            if gap < bound - TOL:
                viol.append({"trial": t, "kind": f"gap-{label}", "family": kind, "gap": gap})
        if solve_lp:
            sol, _ = build_and_solve_primal(fam, kappa, "all", "strong", exact=False,
                                            validate=False)
            worst_lp[kind] = min(worst_lp[kind], sol.alpha)
            if sol.alpha < bound - TOL:
                viol.append({"trial": t, "kind": "lp", "family": kind, "alpha": sol.alpha})
            gap_opt = correlation_gap_check(per_scenario_optima_pairs(fam, kappa), fam) \
                if any(o > 0 for o in fam.opt_values(kappa)) else None
            if gap_opt is not None and sol.alpha < min(gap_opt, 1.0) - 1e-7 and m == 1:
                viol.append({"trial": t, "kind": "lp-vs-gap", "alpha": sol.alpha})
    return SuiteResult("correlation-gap", not viol, trials, viol,
                       {"min_gap_coverage": worst["coverage"], "min_gap_general": worst["general"],
                        "min_lp_coverage": worst_lp["coverage"],
                        "min_lp_general": worst_lp["general"]},
                       time.perf_counter() - start)


# ----------------------------------------------------------- perfect alignment

def suite_alignment(seed=None):
    """Exact hedging-LP values on the alignment instance for kappa in {2, 4, 8}, N = 2 kappa."""
    start = time.perf_counter()
    viol, alphas = [], {}
    for kappa in (2, 4):
        inst = build_alignment_instance(2 * kappa, kappa)
        sol, _ = build_and_solve_primal(inst.scenario_family(exact=True), kappa, "all", "weak",
                                        exact=True, validate=False)
        alphas[kappa] = sol.alpha
        orbit = alignment_orbit_alpha(kappa)
        if orbit != sol.alpha:
            viol.append({"kind": "orbit-mismatch", "kappa": kappa, "full": str(sol.alpha),
                         "orbit": str(orbit)})
    alphas[8] = alignment_orbit_alpha(8)
    if alphas[2] != 1:
        viol.append({"kind": "kappa2", "alpha": str(alphas[2])})
    if alphas[4] != Fraction(6, 7):
        viol.append({"kind": "kappa4", "alpha": str(alphas[4])})
    seq = [alphas[k] for k in (2, 4, 8)]
    if any(b > a for a, b in pairwise(seq)) or min(seq) < Fraction(3, 4):
        viol.append({"kind": "sequence", "alphas": [str(a) for a in seq]})
    for kappa in (2, 4, 8):
        ceiling = Fraction(3 * kappa, 2 * (2 * kappa - 1))  # epsilon = 0
        if alphas[kappa] > ceiling:
            viol.append({"kind": "ceiling", "kappa": kappa})
    return SuiteResult("alignment", not viol, 3, viol,
                       {f"alpha_{k}": str(v) for k, v in alphas.items()},
                       time.perf_counter() - start)


# -------------------------------------------------------------------- hardness

LIFTED_VALIDATION_SHAPES = [(m, k) for m in range(2, 7) for k in range(1, 7) if m * k + 1 <= 13]


def suite_hardness(seed=None, trials=3, adversarial=True):
    """Validator passes on every g_i and lifted f_i, the exact pair expectation, and the lifted bound."""
    start = time.perf_counter()
    viol, stats = [], {}
    for m in range(2, 7):
        fam = build_gi_family(m, exact=True)
        for i, g in enumerate(fam.tables):
            if not validate_monotone_submodular(g).ok:
                viol.append({"kind": "g-validator", "m": m, "i": i})
        for j in range(m):
            if fam.expected_pair_value(j) != Fraction(4, 3) + Fraction(2, 3 * m):
                viol.append({"kind": "pair-expectation", "m": m, "j": j})
        low = range(1 << m)
        for s in low:
            if len({g.value(s) for g in fam.tables}) != 1:
                viol.append({"kind": "restriction", "m": m, "S": s})
                break
    for m, k in LIFTED_VALIDATION_SHAPES:
        inst = build_lifted_hard_instance(m, k, exact=False, validate=False)
        for i, f in enumerate(inst.functions):
            if not validate_monotone_submodular(TableFunction.from_function(f)).ok:
                viol.append({"kind": "lifted-validator", "m": m, "k": k, "i": i})
    stats["lifted_shapes"] = len(LIFTED_VALIDATION_SHAPES)
    if adversarial:
        m = k = 8
        eps = Fraction(1, 8)
        bound = (Fraction(4, 3) + 2 * (Fraction(1, m) + eps)) / (2 * Fraction(k - 1, k))
        stats["bound"] = float(bound)
        inst = build_lifted_hard_instance(m, k, exact=False, validate=False)
        budget = int(eps * k)
        algs = {"static": StaticFill(k=k), "single-swap": SingleSwap(k=k),
                "checkpoint-local-search": CheckPoint(epsilon=float(eps), k=k,
                                                      subroutine="local_search"),
                "checkpoint-certificate": CheckPoint(epsilon=float(eps), k=k,
                                                     subroutine="certificate"),
                "greedy-recompute": GreedyRecompute(k=k)}
        best = 0.0
        for label, alg in algs.items():
            try:
                res = measure_adversarial_ratio(alg, inst, swap_budget=budget, trials=trials,
                                                seed=seed)
            except AuditError as exc:
                stats[label] = f"budget violated at step {exc.step}"
                continue
            stats[label] = res.mean_ratio
            best = max(best, res.ci[1])
            if res.mean_ratio > bound + TOL:
                viol.append({"kind": "adversarial", "alg": label, "ratio": res.mean_ratio})
        stats["best_ratio"] = best
    return SuiteResult("hardness", not viol, len(algs) if adversarial else 0, viol, stats,
                       time.perf_counter() - start)


# ------------------------------------------------------------------ Check-Point

def suite_checkpoint_consistency(seeds=50, seed=None, max_len=64):
    """Per-step additions never exceed ``1/eps**2 + 1`` for eps in {1/2, 1/4} and k <= 8."""
    start = time.perf_counter()
    rng = _rng_for(seed, "checkpoint-consistency")
    configs = [(0.5, k) for k in (2, 4, 6, 8)] + [(0.25, k) for k in (4, 8)]
    viol, worst = [], 0
    subs = ("local_search", "certificate", "brute_opt")
    runs = 0
    for eps, k in configs:
        plan = block_plan(eps, k)
        for s in range(seeds):
            n = int(rng.integers(k, max_len + 1))
            f = random_coverage(rng, n, universe=int(rng.integers(n // 2 + 2, n + 8)))
            stream = [int(x) for x in rng.permutation(n)]
            sub = subs[s % len(subs)]
            if sub == "brute_opt" and n > 24:
                sub = "local_search"
            trace = run_stream(CheckPoint(epsilon=eps, k=k, subroutine=sub), f, stream,
                               seed=int(rng.integers(2**31)))
            rep = consistency_audit(trace, plan.consistency_bound)
            runs += 1
            worst = max(worst, rep.details["max_additions"])
            if not rep.passed:
                viol.append({"eps": eps, "k": k, "seed": s, "worst": rep.worst_case})
    return SuiteResult("checkpoint-consistency", not viol, runs, viol,
                       {"max_additions": worst}, time.perf_counter() - start)


def checkpoint_approximation(seeds=1000, seed=None, epsilon=0.25, k=8, n=16, margin=0.02):
    """Lower 95% CI of the per-step mean ratio with the exact subroutine against ``(1-2 eps)^2``."""
    rng = _rng_for(seed, "checkpoint-approximation")
    f = random_coverage(rng, n, universe=12, density=0.25)
    stream = [int(x) for x in rng.permutation(n)]
    opts = stream_opt_values(f, stream, k)
    alg = CheckPoint(epsilon=epsilon, k=k, subroutine="brute_opt")
    traces = [run_stream(alg, f, stream, seed=s, opt_values=opts) for s in range(seeds)]
    target = (1 - 2 * epsilon) ** 2 - margin
    return approximation_audit(traces, target), traces


def suite_checkpoint_approximation(seeds=1000, seed=None, epsilon=0.25, k=8, n=16):
    start = time.perf_counter()
    rep, _ = checkpoint_approximation(seeds, seed, epsilon, k, n)
    viol = [] if rep.passed else [rep.worst_case]
    lower = min(rep.details["lower_ratio_per_step"])
    return SuiteResult("checkpoint-approximation", rep.passed, seeds, viol,
                       {"min_lower_ci": lower, "target": rep.worst_case["bound"]},
                       time.perf_counter() - start)


# -------------------------------------------------------------- extension fitting

def suite_fit_extension(trials=30, seed=None, max_now=5):
    """Realizable targets fit with zero error, fits are structural, the adversarial target is hard."""
    start = time.perf_counter()
    rng = _rng_for(seed, "fit-extension")
    viol, max_real = [], 0.0
    for t in range(trials):
        n = int(rng.integers(1, max_now + 1))
        cov = random_coverage(rng, n)
        fut = [int(u) for u in np.flatnonzero(rng.random(cov.universe_size) < 0.4)]
        fam = enumerate_coverage_scenarios(cov, None, [fut])
        base = TableFunction(fam.base)
        for label, target in (("coverage", fam.tables[0]), ("dummy", fam.base)):
            fit = fit_submodular_extension(target, base)
            max_real = max(max_real, fit.error)
            if fit.error > TOL:
                viol.append({"trial": t, "kind": f"realizable-{label}", "error": fit.error})
            if not fit_is_structural(fit):
                viol.append({"trial": t, "kind": f"structure-{label}"})
        noisy = rng.random(1 << n) * 2 * max(fam.base)
        fit = fit_submodular_extension(noisy, base)
        if not fit_is_structural(fit):
            viol.append({"trial": t, "kind": "structure-random"})
    adv = adversarial_fit()
    if adv.error < 2.5 - 1e-9:
        viol.append({"kind": "adversarial", "error": adv.error})
    if not fit_is_structural(adv):
        viol.append({"kind": "structure-adversarial"})
    return SuiteResult("fit-extension", not viol, trials, viol,
                       {"max_realizable_error": max_real, "adversarial_error": adv.error},
                       time.perf_counter() - start)


def adversarial_fit(exact=False):
    """Target 10 on the empty set and 0 on the full set, with ``f(V_now) = 5``."""
    base = TableFunction([0, 2, 3, 5])
    target = [10, 2, 3, 0]
    return fit_submodular_extension(target, base, exact=exact)


# ------------------------------------------------------------------ registry

SUITES = {
    "refined-greedy": suite_refined_greedy,
    "local-search": suite_local_search,
    "certificate": suite_certificate,
    "correlation-gap": suite_correlation_gap,
    "alignment": suite_alignment,
    "hardness": suite_hardness,
    "checkpoint-consistency": suite_checkpoint_consistency,
    "checkpoint-approximation": suite_checkpoint_approximation,
    "fit-extension": suite_fit_extension,
}


def _criterion_3(seed):
    main = suite_certificate(200, seed)
    extra = suite_certificate(100, seed, eta=0.5, max_now=10, min_kappa=4, target=None,
                              name="certificate-augmenting", near_modular=True)
    merged = SuiteResult("certificate", main.passed and extra.passed, main.trials + extra.trials,
                         main.violations + extra.violations,
                         {**main.stats, "augmenting_runs": extra.stats["augmented_runs"]},
                         main.seconds + extra.seconds)
    return merged


def _criterion_7(seed):
    cons = suite_checkpoint_consistency(50, seed)
    approx = suite_checkpoint_approximation(1000, seed)
    return SuiteResult("checkpoint", cons.passed and approx.passed, cons.trials + approx.trials,
                       cons.violations + approx.violations, {**cons.stats, **approx.stats},
                       cons.seconds + approx.seconds)


CRITERIA = {
    1: ("refined greedy bound", lambda seed: suite_refined_greedy(500, seed)),
    2: ("local-search robustness", lambda seed: suite_local_search(200, seed)),
    3: ("greedy-with-certificate at desk scale", _criterion_3),
    4: ("correlation gaps and LP value", lambda seed: suite_correlation_gap(1000, seed)),
    5: ("perfect-alignment exact values", lambda seed: suite_alignment(seed)),
    6: ("hardness family sanity", lambda seed: suite_hardness(seed)),
    7: ("check-point contracts", _criterion_7),
    8: ("extension-fitting LP", lambda seed: suite_fit_extension(30, seed)),
}


def run_criterion(number, seed=None):
    title, fn = CRITERIA[number]
    res = fn(seed)
    res.name = f"criterion {number} ({title})"
    return res


def run_all(seed=None, numbers=None):
    return [run_criterion(k, seed) for k in (numbers or sorted(CRITERIA))]


__all__ = ["CRITERIA", "SUITES", "SuiteResult", "certificate_checks", "run_all",
           "run_criterion", "adversarial_fit"]
