import math
from fractions import Fraction

import pytest
from hypothesis import given
from strategies import submodular

from consist_submod.algorithms import (
    GreedyMaximizer,
    classic_greedy_bound,
    greedy,
    refined_greedy_bound,
    residual_mu,
)
from consist_submod.exceptions import DomainError
from consist_submod.functions import CoverageFunction, TableFunction
from consist_submod.hardness import build_gi_family
from consist_submod.harness import brute_force_opt


def modular(weights):
    n = len(weights)
    return TableFunction.from_callable(n, lambda s: sum(weights[i] for i in s))


def test_coverage_tie_goes_to_lower_index():
    f = CoverageFunction(4, [[0, 1], [1, 2], [3]])
    res = greedy(f, k=2)
    assert res.solution == {0, 1}
    assert res.value == 3
    assert res.order == (0, 1)
    assert brute_force_opt(f, None, 2)[1] == 3


def test_modular_top_two():
    res = greedy(modular([3, 2, 1]), k=2)
    assert res.solution == {0, 1}
    assert res.value == 5


def test_gi_first_pick_then_r():
    g1 = build_gi_family(3).tables[0]
    res = greedy(g1, k=2)
    assert res.order == (0, 3)
    assert res.value == 2
    assert brute_force_opt(g1, None, 2)[1] == 2


def test_mu_extremes():
    ones = modular([1] * 5)
    res = greedy(ones, k=2)
    assert residual_mu(ones, None, res, 2) == pytest.approx(1)
    sat = TableFunction.from_callable(5, lambda s: min(len(s), 2))
    res = greedy(sat, k=2)
    assert residual_mu(sat, None, res, 2) == 0


def test_refined_bound_probe():
    assert refined_greedy_bound(1 / math.e) == pytest.approx(1 - 1 / math.e, abs=1e-12)
    assert refined_greedy_bound(0) == 1
    assert refined_greedy_bound(1) == 1
    with pytest.raises(DomainError):
        refined_greedy_bound(1.5)


@given(submodular(min_n=2, max_n=9))
def test_refined_bound_holds(f):
    k = min(3, f.n - 1)
    opt = brute_force_opt(f, None, k)[1]
    if opt <= 0:
        return
    res = greedy(f, k=k)
    mu = residual_mu(f, None, res, opt)
    assert res.value >= refined_greedy_bound(mu) * opt - 1e-9
    assert res.value >= classic_greedy_bound(k) * opt - 1e-9


def test_exact_tables_stay_exact():
    g1 = build_gi_family(3).tables[0]
    assert isinstance(greedy(g1, k=3).value, Fraction)


def test_pool_restriction():
    res = greedy(modular([3, 2, 1]), ground=[1, 2], k=1)
    assert res.solution == {1}


def test_estimator_interface():
    est = GreedyMaximizer(k=2).fit(modular([3, 2, 1]))
    assert est.predict() == [0, 1]
    assert est.get_params() == {"k": 2}
