import json
from itertools import combinations

import pytest
from hypothesis import given
from hypothesis import strategies as st
from sklearn.base import BaseEstimator
from strategies import seeds

from consist_submod.algorithms import (
    CheckPoint,
    GreedyRecompute,
    StaticFill,
    local_search,
)
from consist_submod.exceptions import AuditError, DomainError
from consist_submod.fixtures import random_coverage, random_split
from consist_submod.functions import CoverageFunction, TableFunction
from consist_submod.hardness import build_alignment_instance, build_gi_family
from consist_submod.harness import (
    RobustnessQuery,
    StepRecord,
    StreamTrace,
    addition_robustness_audit,
    approximation_audit,
    brute_force_opt,
    consistency_audit,
    run_stream,
    stream_opt_values,
)
from consist_submod.rng import make_rng


def modular(weights):
    return TableFunction.from_callable(len(weights), lambda s: sum(weights[i] for i in s))


def test_brute_force_examples():
    assert brute_force_opt(modular([3, 2, 1]), None, 2) == (frozenset({0, 1}), 5)
    assert brute_force_opt(CoverageFunction(4, [[0, 1], [1, 2], [3]]), None, 2)[1] == 3
    assert brute_force_opt(build_gi_family(3).tables[0], None, 2) == (frozenset({0, 3}), 2)


def test_robustness_point_mass():
    f = modular([3, 2, 1])
    q = RobustnessQuery([({0, 1}, 1.0)], [0, 1, 2], [], 2)
    rep = addition_robustness_audit(q, f, alpha=1)
    assert rep.passed
    assert rep.details["alpha_measured"] == pytest.approx(1)


def test_robustness_alignment_uniform():
    inst = build_alignment_instance(8, 4)
    futures = list(combinations(range(8), 4))
    cov = CoverageFunction(8, [[u] for u in range(8)] + [list(R) for R in futures])
    sets = list(combinations(range(8), 4))
    dist = [(set(s), 1 / len(sets)) for s in sets]
    fut = list(range(8, 8 + len(futures)))
    q = RobustnessQuery(dist, inst.v_now, fut, 4, "weak", [[x] for x in fut])
    rep = addition_robustness_audit(q, cov)
    assert rep.details["alpha_measured"] == pytest.approx(6 / 7)


@given(seeds)
def test_robustness_of_local_search(seed):
    rng = make_rng(seed)
    n = int(rng.integers(3, 9))
    f = random_coverage(rng, n)
    n_now = int(rng.integers(2, n + 1))
    now, fut = random_split(rng, n, n_now, n - n_now)
    kappa = min(2, n_now)
    S = local_search(f, now, kappa, 0.1)
    rep = addition_robustness_audit(RobustnessQuery([(S, 1)], now, fut, kappa), f,
                                    alpha=1 / 2.1)
    assert rep.passed


def test_robustness_input_checks():
    f = modular([1, 1, 1])
    with pytest.raises(DomainError):
        addition_robustness_audit(RobustnessQuery([({2}, 1)], [0, 1], [2], 1), f)
    with pytest.raises(DomainError):
        addition_robustness_audit(RobustnessQuery([({0}, 1)], [0, 1], [1], 1), f)
    with pytest.raises(DomainError):
        addition_robustness_audit(RobustnessQuery([({0}, 1)], [0], [1], 1, "medium"), f)


class SwapAll(BaseEstimator):
    """Deliberately broken: alternates between the oldest and newest k arrivals."""

    def __init__(self, k=2):
        self.k = k

    def partial_fit(self, x, f):
        self.seen_ = getattr(self, "seen_", []) + [x]
        pick = self.seen_[-self.k:] if len(self.seen_) % 2 == 0 else self.seen_[:self.k]
        self.solution_ = frozenset(pick)
        return self


class LeaksFuture(BaseEstimator):
    def __init__(self, k=1):
        self.k = k

    def partial_fit(self, x, f):
        self.solution_ = frozenset({f.n - 1})
        return self


def test_consistency_static_and_broken():
    f = CoverageFunction(6, [[u] for u in range(6)])
    assert consistency_audit(run_stream(StaticFill(k=3), f, range(6)), 1).passed
    rep = consistency_audit(run_stream(SwapAll(k=2), f, range(6)), 1)
    assert not rep.passed
    assert rep.worst_case["location"] == 4
    assert rep.exit_code == 1
    assert json.loads(rep.to_json())["passed"] is False


def test_run_stream_catches_unarrived():
    f = CoverageFunction(3, [[0], [1], [2]])
    with pytest.raises(AuditError) as err:
        run_stream(LeaksFuture(k=1), f, [0, 1, 2])
    assert err.value.step == 1


def test_checkpoint_golden_consistency():
    f = CoverageFunction(10, [[0, 1], [1, 2], [3], [4, 5, 6], [6, 7], [0, 8], [9], [2, 3, 4]])
    tr = run_stream(CheckPoint(epsilon=0.5, k=4), f, range(8), seed=1)
    assert consistency_audit(tr, 5).passed


def _opt_trace(f, stream, k):
    opts = stream_opt_values(f, stream, k)
    steps = [StepRecord(t, x, frozenset(), 0, 0, o, o)
             for t, (x, o) in enumerate(zip(stream, opts), start=1)]
    return StreamTrace(steps)


def test_approximation_exact_trace():
    f = random_coverage(make_rng(0), 6)
    tr = _opt_trace(f, list(range(6)), 2)
    assert approximation_audit([tr], 1).passed


def test_approximation_checkpoint_and_greedy():
    rng = make_rng(3)
    f = random_coverage(rng, 10, universe=10)
    stream = [int(x) for x in rng.permutation(10)]
    opts = stream_opt_values(f, stream, 4)
    cp = [run_stream(CheckPoint(epsilon=0.5, k=4, subroutine="brute_opt"), f, stream, seed=s,
                     opt_values=opts) for s in range(30)]
    assert approximation_audit(cp, (1 - 2 * 0.5) ** 2).passed
    gr = [run_stream(GreedyRecompute(k=4), f, stream, opt_values=opts)]
    assert approximation_audit(gr, 1 - 1 / 2.718281828).passed


@given(seeds, st.floats(0, 1), st.floats(0, 1))
def test_approximation_monotone_in_alpha(seed, a, b):
    rng = make_rng(seed)
    f = random_coverage(rng, 7)
    stream = [int(x) for x in rng.permutation(7)]
    opts = stream_opt_values(f, stream, 3)
    traces = [run_stream(StaticFill(k=3), f, stream, opt_values=opts)]
    lo, hi = sorted((a, b))
    if approximation_audit(traces, hi).passed:
        assert approximation_audit(traces, lo).passed


def test_approximation_rejects_mismatch():
    f = random_coverage(make_rng(0), 5)
    a = _opt_trace(f, [0, 1, 2, 3, 4], 2)
    b = _opt_trace(f, [1, 0, 2, 3, 4], 2)
    with pytest.raises(DomainError):
        approximation_audit([a, b], 0.5)
    with pytest.raises(DomainError):
        approximation_audit([], 0.5)


def test_trace_roundtrips():
    f = random_coverage(make_rng(1), 8)
    tr = run_stream(CheckPoint(epsilon=0.5, k=2), f, range(8), seed=2, compute_opt=True)
    back = StreamTrace.from_csv(tr.to_csv())
    assert back.to_csv() == tr.to_csv()
    back = StreamTrace.from_json(tr.to_json())
    assert [s.alg for s in back.steps] == [s.alg for s in tr.steps]
    with pytest.raises(DomainError):
        StreamTrace.from_csv("a,b\n1,2\n")


def test_zero_opt_ratio_is_one():
    assert StepRecord(1, 0, frozenset(), 0, 0, 0.0, 0.0).ratio == 1
