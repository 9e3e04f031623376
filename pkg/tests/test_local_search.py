from hypothesis import given
from strategies import seeds, submodular

from consist_submod.algorithms import (
    LocalSearch,
    greedy,
    is_stable,
    local_search_with_stats,
)
from consist_submod.fixtures import random_split
from consist_submod.functions import TableFunction, submasks
from consist_submod.hardness import build_alignment_instance
from consist_submod.harness import opt_value
from consist_submod.rng import make_rng


def test_greedy_already_stable_means_zero_swaps():
    f = TableFunction.from_callable(4, lambda s: sum((5, 4, 1, 1)[i] for i in s))
    sol, swaps = local_search_with_stats(f, None, 2, 0.1)
    assert swaps == 0
    assert sol == greedy(f, k=2).solution


def test_alignment_singletons_are_stable():
    inst = build_alignment_instance(8, 4)
    sol, _ = local_search_with_stats(inst.function, None, 4, 0.1)
    assert len(sol) == 4
    assert is_stable(inst.function, sum(1 << x for x in sol), None, 4, 0.1)


@given(submodular(min_n=3, max_n=9), seeds)
def test_robust_to_any_future(f, seed):
    rng = make_rng(seed)
    n_now = int(rng.integers(2, f.n + 1))
    now, fut = random_split(rng, f.n, n_now, f.n - n_now)
    kappa = min(3, n_now)
    eps = 0.1
    sol, _ = local_search_with_stats(f, now, kappa, eps)
    S = sum(1 << x for x in sol)
    assert is_stable(f, S, now, kappa, eps)
    for R in submasks(fut):
        assert opt_value(f, now | R, kappa) <= (2 + eps) * f.value(S | R) + 1e-9


def test_estimator_interface():
    f = TableFunction.from_callable(3, lambda s: len(s))
    est = LocalSearch(kappa=2).fit(f)
    assert len(est.predict()) == 2
