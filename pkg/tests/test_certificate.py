from itertools import combinations

import pytest
from hypothesis import given
from strategies import seeds, submodular

from consist_submod.acceptance import certificate_checks
from consist_submod.algorithms import (
    GreedyWithCertificate,
    augment,
    greedy_with_certificate,
)
from consist_submod.exceptions import DomainError
from consist_submod.fixtures import random_near_modular, random_split
from consist_submod.functions import TableFunction
from consist_submod.harness import exact_expectation_over_subsamples
from consist_submod.rng import make_rng


def modular(weights):
    return TableFunction.from_callable(len(weights), lambda s: sum(weights[i] for i in s))


def test_dominant_element_hits_certificate():
    f = modular([10, 1, 1, 1, 1])
    res = greedy_with_certificate(f, None, 2, 0.5, 0.84, 0)
    assert res.eta_prime == 0
    assert res.augmented == res.seed_solution
    assert res.certificate_hit


def test_flat_modular_uses_budget():
    f = modular([1] * 10)
    res = greedy_with_certificate(f, None, 4, 0.5, 0.84, 0)
    assert len(res.augmentation_order) == 2
    assert res.eta_prime == 0.5
    assert not res.certificate_hit
    assert len(res.sample) == 4 and res.sample <= res.augmented


def test_desk_scale_budget_is_zero():
    f = modular([1] * 10)
    res = greedy_with_certificate(f, None, 5, 0.1, 0.84, 0)
    assert res.budget == 0
    assert res.augmented == res.seed_solution


@given(submodular(min_n=2, max_n=9), seeds)
def test_realized_size(f, seed):
    kappa = min(3, f.n)
    res = greedy_with_certificate(f, None, kappa, 0.5, 0.84, seed)
    assert len(res.augmented) == round((1 + res.eta_prime) * kappa)
    assert res.eta_prime <= 0.5 + 1e-12


@given(seeds)
def test_lemma_inequalities_on_augmenting_runs(seed):
    rng = make_rng(seed)
    n_now = int(rng.integers(5, 9))
    n_fut = int(rng.integers(0, 4))
    n = n_now + n_fut
    f = random_near_modular(rng, n, noise=0.2, spread=0.2)
    now, fut = random_split(rng, n, n_now, n_fut)
    res = greedy_with_certificate(f, now, 4, 0.5, 0.84, rng)
    viol, ratio = certificate_checks(f, now, fut, 4, res)
    assert not viol
    assert ratio >= 0.51


def test_expectation_edge_cases():
    f = modular([1, 2, 3, 4])
    A = [0, 1, 2, 3]
    assert exact_expectation_over_subsamples(A, 4, f) == f(A)
    assert exact_expectation_over_subsamples(A, 2, f) == pytest.approx(2 / 4 * f(A))
    brute = sum(f(set(c) | {3}) for c in combinations([0, 1, 2], 2)) / 3
    assert exact_expectation_over_subsamples([0, 1, 2], 2, f, [3]) == pytest.approx(brute)


def test_parameter_domains():
    f = modular([1, 1, 1])
    with pytest.raises(DomainError):
        greedy_with_certificate(f, None, 2, 0.7, 0.84)
    with pytest.raises(DomainError):
        greedy_with_certificate(f, None, 2, 0.1, 0)
    with pytest.raises(DomainError):
        greedy_with_certificate(f, None, 5, 0.1, 0.84)


def test_augment_threshold_and_budget():
    f = modular([4, 4, 1])
    # budget floor(0.5 * 1) = 0 but element 1 clears 0.84 * 4, so no certificate
    A, added, hit = augment(f, 0b111, 0b001, 1, 0.5, 0.84)
    assert (A, added, hit) == (0b001, [], False)
    # with room for one addition, element 1 enters and element 2 falls short
    A, added, hit = augment(f, 0b111, 0b001, 2, 0.5, 0.84)
    assert (A, added, hit) == (0b011, [1], True)


def test_estimator_interface():
    est = GreedyWithCertificate(kappa=2, eta=0.5, seed=3).fit(modular([1] * 6))
    assert len(est.predict()) == 2
    assert est.result_.kappa == 2
