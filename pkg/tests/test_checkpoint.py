from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st
from strategies import seeds

from consist_submod.algorithms import (
    CheckPoint,
    GreedyRecompute,
    SingleSwap,
    StaticFill,
    any_swap,
    block_plan,
    check_point_init,
    check_point_insert,
    snap_epsilon,
    swap_toward,
)
from consist_submod.algorithms.subroutines import brute_opt_subroutine
from consist_submod.exceptions import ContractViolation, DomainError
from consist_submod.fixtures import random_coverage
from consist_submod.functions import CoverageFunction
from consist_submod.harness import consistency_audit, run_stream
from consist_submod.rng import make_rng

GOLDEN = Path(__file__).parent / "golden"


def test_any_swap_examples():
    assert any_swap({1, 2, 3}, {1, 2, 3}, 1) == {1, 2, 3}
    assert any_swap({1, 2, 3}, {1, 4, 5}, 1) == {1, 3, 4}
    assert any_swap({1, 2}, {3, 4}, 5) == {3, 4}
    with pytest.raises(DomainError):
        any_swap({1}, {2, 3}, 1)


@given(st.integers(0, 255), st.integers(0, 255), st.integers(0, 4))
def test_swap_toward_moves_at_most_ell(a, b, ell):
    out = swap_toward(a, b, ell)
    assert (out & ~a).bit_count() <= ell
    assert (a & ~out).bit_count() <= ell
    # repeated swaps reach the target
    cur = a
    for _ in range(9):
        cur = swap_toward(cur, b, max(ell, 1))
    assert cur == b


def test_block_plan_values():
    p = block_plan(Fraction(1, 4), 8)
    assert (p.delta, p.kappa, p.swap_size, p.n_subblocks) == (2, 4, 16, 2)
    assert p.consistency_bound == 17
    assert block_plan(0.5, 4).kappa == 0
    with pytest.raises(DomainError):
        block_plan(0.3, 8)
    with pytest.raises(DomainError):
        block_plan(0.25, 6)
    assert snap_epsilon(0.3, 8) == Fraction(1, 4)


def _stream_case(seed, eps, k):
    rng = make_rng(seed)
    n = int(rng.integers(k, 30))
    f = random_coverage(rng, n)
    return f, [int(x) for x in rng.permutation(n)]


@given(seeds, st.sampled_from([(0.5, 2), (0.5, 4), (0.5, 8), (0.25, 4), (0.25, 8)]),
       st.sampled_from(["local_search", "certificate", "brute_opt"]))
def test_consistency_bound(seed, config, sub):
    eps, k = config
    f, stream = _stream_case(seed, eps, k)
    trace = run_stream(CheckPoint(epsilon=eps, k=k, subroutine=sub), f, stream, seed=seed)
    assert consistency_audit(trace, 1 / eps**2 + 1).passed
    assert all(len(s.alg) <= k for s in trace.steps)


@given(seeds)
def test_transition_completes_within_block(seed):
    f, stream = _stream_case(seed, 0.25, 8)
    state = check_point_init(0.25, 8, brute_opt_subroutine, seed)
    plan = state.plan
    for t, x in enumerate(stream, start=1):
        check_point_insert(state, x, f)
        if t > plan.delta:
            pos = (t - 1 - plan.delta) % plan.delta
            _, hi = plan.subblock(state.subblock_j)
            if pos >= hi - 1:
                assert state.s_old == state.s_new


def test_golden_traces():
    f = CoverageFunction(10, [[0, 1], [1, 2], [3], [4, 5, 6], [6, 7], [0, 8], [9], [2, 3, 4]])
    tr = run_stream(CheckPoint(epsilon=0.5, k=4, subroutine="brute_opt"), f,
                    [3, 0, 7, 1, 5, 2, 6, 4], seed=11, compute_opt=True)
    assert tr.to_csv() == (GOLDEN / "checkpoint_eps_half_k4.csv").read_text()
    assert max(tr.recourse) <= 5
    f2 = CoverageFunction(12, [[0, 1, 2], [2, 3], [4], [5, 6], [6, 7, 8], [9], [10, 11], [0, 5],
                               [1, 9], [3, 4, 10], [7], [8, 11]])
    tr = run_stream(CheckPoint(epsilon=0.25, k=8, subroutine="local_search"), f2,
                    list(range(12)), seed=5, compute_opt=True)
    assert tr.to_csv() == (GOLDEN / "checkpoint_eps_quarter_k8.csv").read_text()


def test_same_seed_same_trace():
    f, stream = _stream_case(3, 0.25, 8)
    a = run_stream(CheckPoint(epsilon=0.25, k=8, subroutine="certificate"), f, stream, seed=9)
    b = run_stream(CheckPoint(epsilon=0.25, k=8, subroutine="certificate"), f, stream, seed=9)
    assert a.to_csv() == b.to_csv()


def test_subroutine_contract_enforced():
    f = CoverageFunction(3, [[0], [1], [2], [0, 1, 2], [1]])

    def cheat(f, pool, kappa, rng):
        return {4}  # not yet arrived

    alg = CheckPoint(epsilon=0.5, k=2, subroutine=cheat)
    with pytest.raises(ContractViolation):
        alg.fit([0, 1, 2], f)

    def greedy_too_big(f, pool, kappa, rng):
        return {0, 1}

    alg = CheckPoint(epsilon=0.25, k=4, subroutine=greedy_too_big)
    with pytest.raises(ContractViolation):
        alg.fit([0, 1, 2, 3], f)


def test_duplicate_arrival_rejected():
    f = CoverageFunction(3, [[0], [1]])
    alg = CheckPoint(epsilon=0.5, k=2)
    alg.partial_fit(0, f)
    with pytest.raises(DomainError):
        alg.partial_fit(0, f)


def test_baselines():
    f = CoverageFunction(4, [[0], [1], [2, 3], [0, 1, 2, 3]])
    static = StaticFill(k=2).fit([0, 1, 2, 3], f)
    assert static.predict() == [0, 1]
    trace = run_stream(StaticFill(k=2), f, [0, 1, 2, 3])
    assert set(trace.recourse) <= {0, 1}
    assert consistency_audit(trace, 1).passed
    assert GreedyRecompute(k=2).fit([0, 1, 2, 3], f).predict() == [0, 3]
    swap = run_stream(SingleSwap(k=2), f, [0, 1, 2, 3])
    assert max(swap.recourse) <= 1
    assert swap.steps[-1].alg_value == 4
