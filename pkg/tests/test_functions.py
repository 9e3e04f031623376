from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from strategies import coverage, submodular

from consist_submod.exceptions import CapacityError, DomainError
from consist_submod.functions import (
    CoverageFunction,
    LiftedFunction,
    TableFunction,
    as_mask,
    bits,
    marginal,
    multilinear_eval,
    submasks,
    subsets_upto,
    validate_monotone_submodular,
)
from consist_submod.hardness import build_gi_family

# a_1, a_2, a_3 are indices 0, 1, 2 and r is index 3 when m = 3.
A1, A2, A3, R3 = 0, 1, 2, 3


@pytest.fixture
def g1():
    return build_gi_family(3).tables[0]


def test_coverage_value():
    f = CoverageFunction(3, [[0, 1], [1, 2]])
    assert f([0, 1]) == 3
    assert f.marginal(1, [0]) == 1


def test_gi_spot_values(g1):
    assert g1([A2, R3]) == Fraction(4, 3)
    assert g1([A1, A2, A3]) == 2
    assert g1.marginal(R3, [A1]) == 1
    assert g1.marginal(A2, [A1, R3]) == 0


def test_validator_accepts_gi(g1):
    rep = validate_monotone_submodular(g1)
    assert rep.monotone and rep.submodular


def test_validator_rejects_square():
    f = TableFunction.from_callable(3, lambda s: len(s) ** 2)
    rep = validate_monotone_submodular(f)
    assert rep.monotone
    assert not rep.submodular
    S, T, x = rep.submodular_witness
    assert S <= T and x not in T
    assert f.marginal(x, S) < f.marginal(x, T)


def test_validator_rejects_decreasing():
    f = TableFunction([2, 1])
    assert not validate_monotone_submodular(f).monotone


@given(coverage())
def test_coverage_always_valid(f):
    assert validate_monotone_submodular(f).ok


@given(submodular(max_n=7))
def test_fixtures_are_valid(f):
    assert validate_monotone_submodular(f).ok


def test_multilinear_examples():
    g1 = build_gi_family(3).tables[0]
    assert multilinear_eval(g1, [1, 0, 0, 1]) == 2
    assert multilinear_eval(g1, [0, 0, 0, 0]) == 0
    g1m2 = build_gi_family(2).tables[0]
    assert multilinear_eval(g1m2, [Fraction(1, 2), 0, 1]) == Fraction(3, 2)


@given(submodular(max_n=6), st.data())
def test_multilinear_matches_table_at_vertices(f, data):
    mask = data.draw(st.integers(0, (1 << f.n) - 1))
    y = [(mask >> i) & 1 for i in range(f.n)]
    assert multilinear_eval(f, y) == pytest.approx(f.value(mask))


def test_multilinear_rejects_bad_vector(g1):
    with pytest.raises(DomainError):
        multilinear_eval(g1, [0.5, 0.5])
    with pytest.raises(DomainError):
        multilinear_eval(g1, [2, 0, 0, 0])


def test_lifted_values():
    g = build_gi_family(2)
    f1 = LiftedFunction(g.tables[0], 2)  # A_1 = {0, 1}, A_2 = {2, 3}, r = 4
    assert f1([0, 1]) == 1
    assert f1([0, 1, 4]) == 2
    assert f1([0, 4]) == Fraction(3, 2)
    assert f1([2, 4]) == Fraction(7, 6)


def test_lifted_agrees_on_r_free_sets():
    fam = build_gi_family(3)
    lifts = [LiftedFunction(g, 2) for g in fam.tables]
    for mask in range(1 << 6):
        assert len({f.value(mask) for f in lifts}) == 1


def test_table_rejects_bad_input():
    with pytest.raises(DomainError):
        TableFunction([0, 1, 2])
    with pytest.raises(DomainError):
        TableFunction([0, -1])
    with pytest.raises(DomainError):
        TableFunction([0, float("nan")])


def test_mask_helpers():
    assert as_mask([0, 2]) == 5
    assert bits(5) == [0, 2]
    assert sorted(submasks(5)) == [0, 1, 4, 5]
    assert sorted(subsets_upto(7, 1)) == [0, 1, 2, 4]
    with pytest.raises(DomainError):
        as_mask([3], 3)
    with pytest.raises(DomainError):
        as_mask([True])


def test_evaluate_out_of_range():
    f = CoverageFunction(2, [[0], [1]])
    with pytest.raises(DomainError):
        f([5])
    with pytest.raises(DomainError):
        marginal(f, 7, [])


def test_validator_capacity():
    f = CoverageFunction(2, [[0]] * 30)
    with pytest.raises(CapacityError):
        validate_monotone_submodular(f)


def test_coverage_table_matches_values():
    f = CoverageFunction(5, [[0, 1], [1, 2], [3], [4, 0]])
    assert np.array_equal(f.table(), [f.value(m) for m in range(16)])
