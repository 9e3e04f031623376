from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from consist_submod.lp import linprog_exact, solve_lp

small = st.integers(-4, 6)


def test_textbook_optimum():
    # max 3x + 2y s.t. x + y <= 4, x + 3y <= 6
    res = linprog_exact([3, 2], [[1, 1], [1, 3]], [4, 6])
    assert res.ok
    assert res.objective == 12
    assert [Fraction(v) for v in res.x] == [4, 0]


def test_equality_and_fraction():
    # max x + y s.t. 2x + 3y = 1 gives x = 1/2
    res = linprog_exact([1, 1], A_eq=[[2, 3]], b_eq=[1])
    assert res.objective == Fraction(1, 2)


def test_infeasible_and_unbounded():
    assert linprog_exact([1], A_eq=[[1]], b_eq=[-1]).status == "infeasible"
    assert linprog_exact([1, 0], [[-1, 1]], [1]).status == "unbounded"
    assert solve_lp([1], A_eq=[[1]], b_eq=[-1]).status == "infeasible"
    assert solve_lp([1, 0], [[-1, 1]], [1]).status == "unbounded"


def test_negative_rhs_needs_phase_one():
    # max -x s.t. -x <= -2 (x >= 2)
    res = linprog_exact([-1], [[-1]], [-2])
    assert res.objective == -2


def test_degenerate_cycling_example():
    # Beale's example cycles under the textbook rule; Bland's rule terminates.
    c = [Fraction(3, 4), -150, Fraction(1, 50), -6]
    A = [[Fraction(1, 4), -60, Fraction(-1, 25), 9],
         [Fraction(1, 2), -90, Fraction(-1, 50), 3],
         [0, 0, 1, 0]]
    res = linprog_exact(c, A, [0, 0, 1])
    assert res.objective == Fraction(1, 20)


@given(st.integers(1, 4), st.integers(1, 4), st.data())
def test_exact_matches_highs(n_vars, n_rows, data):
    c = data.draw(st.lists(small, min_size=n_vars, max_size=n_vars))
    A = [data.draw(st.lists(small, min_size=n_vars, max_size=n_vars)) for _ in range(n_rows)]
    b = data.draw(st.lists(st.integers(0, 8), min_size=n_rows, max_size=n_rows))
    # a box keeps the problem bounded
    A = A + np.eye(n_vars, dtype=int).tolist()
    b = b + [5] * n_vars
    ex = linprog_exact(c, A, b)
    fl = solve_lp(c, A, b)
    assert ex.status == fl.status == "optimal"
    assert float(ex.objective) == pytest.approx(fl.objective, abs=1e-7)
    x = [Fraction(v) for v in ex.x]
    assert all(v >= 0 for v in x)
    for row, rhs in zip(A, b):
        assert sum(a * v for a, v in zip(row, x)) <= rhs
