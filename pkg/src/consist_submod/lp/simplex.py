"""Dense two-phase tableau simplex in exact rational arithmetic with Bland's rule.

Solves ``max c.x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0``.  Built for
the tiny models of this package (a few hundred columns), where exactness
matters more than speed.
"""
from dataclasses import dataclass
from fractions import Fraction

from ..exceptions import LPError

try:
    from gmpy2 import mpq as _rational
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    _rational = Fraction


def to_rational(value):
    if isinstance(value, Fraction):
        return _rational(value.numerator, value.denominator)
    if isinstance(value, float):
        return _rational(Fraction(value))
    return _rational(value)


@dataclass
class LPResult:
    status: str  # "optimal", "infeasible" or "unbounded"
    x: list = None
    objective: object = None
    pivots: int = 0

    @property
    def ok(self):
        return self.status == "optimal"


def _pivot(T, r, col):
    prow = T[r]
    p = prow[col]
    if p != 1:
        prow = [v / p for v in prow]
        T[r] = prow
    for i, row in enumerate(T):
        if i == r:
            continue
        factor = row[col]
        if factor:
            T[i] = [a - factor * b if b else a for a, b in zip(row, prow)]


def _run(T, obj, basis, allowed, limit):
    """Maximize the objective row ``obj`` (reduced costs are stored negated)."""
    pivots = 0
    width = len(obj) - 1
    while True:
        col = next((j for j in range(width) if allowed[j] and obj[j] < 0), None)
        if col is None:
            return "optimal", pivots
        best = None
        for i, row in enumerate(T):
            a = row[col]
            if a > 0:
                ratio = row[-1] / a
                key = (ratio, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            return "unbounded", pivots
        r = best[1]
        T.append(obj)
        _pivot(T, r, col)
        obj[:] = T.pop()
        basis[r] = col
        pivots += 1
        if pivots > limit:
            raise LPError(f"simplex exceeded {limit} pivots")


def linprog_exact(c, A_ub=(), b_ub=(), A_eq=(), b_eq=(), max_pivots=100_000):
    """Exact optimum of a small LP; returns :class:`LPResult` with rational ``x``."""
    c = [to_rational(v) for v in c]
    n = len(c)
    rows = []  # (coefficients, rhs, kind)
    for a, b in zip(A_ub, b_ub):
        rows.append(([to_rational(v) for v in a], to_rational(b), "ub"))
    for a, b in zip(A_eq, b_eq):
        rows.append(([to_rational(v) for v in a], to_rational(b), "eq"))
    for a, _, _ in rows:
        if len(a) != n:
            raise LPError("constraint width does not match the objective")
    n_slack = sum(1 for _, _, kind in rows if kind == "ub")
    # columns: x (n) | slacks (n_slack) | artificials (<= m)
    zero, one = _rational(0), _rational(1)
    T, basis, art_rows = [], [], []
    slack_col = n
    n_art = sum(1 for a, b, kind in rows if kind == "eq" or b < 0)
    art_col = n + n_slack
    width = n + n_slack + n_art
    for a, b, kind in rows:
        row = a + [zero] * (n_slack + n_art) + [b]
        if kind == "ub":
            row[slack_col] = one
            own_slack = slack_col
            slack_col += 1
        else:
            own_slack = None
        if b < 0:
            row = [-v for v in row]
        if kind == "ub" and b >= 0:
            basis.append(own_slack)
        else:
            row[art_col] = one
            basis.append(art_col)
            art_rows.append(len(T))
            art_col += 1
        T.append(row)
    allowed = [True] * width
    pivots = 0
    if art_rows:
        # phase 1: maximize -sum(artificials)
        obj = [zero] * (width + 1)
        for j in range(n + n_slack, width):
            obj[j] = one
        for i in art_rows:
            obj = [o - v for o, v in zip(obj, T[i])]
        status, p = _run(T, obj, basis, allowed, max_pivots)
        pivots += p
        if obj[-1] != 0:
            return LPResult("infeasible", pivots=pivots)
        for j in range(n + n_slack, width):
            allowed[j] = False
        for i in range(len(T) - 1, -1, -1):
            if basis[i] >= n + n_slack:
                col = next((j for j in range(n + n_slack) if T[i][j] != 0), None)
                if col is None:
                    del T[i]
                    del basis[i]
                else:
                    _pivot(T, i, col)
                    basis[i] = col
                    pivots += 1
    obj = [-v for v in c] + [zero] * (width - n) + [zero]
    for i, bcol in enumerate(basis):
        if obj[bcol]:
            factor = obj[bcol]
            obj = [o - factor * v for o, v in zip(obj, T[i])]
    status, p = _run(T, obj, basis, allowed, max_pivots)
    pivots += p
    if status != "optimal":
        return LPResult(status, pivots=pivots)
    x = [zero] * n
    for i, bcol in enumerate(basis):
        if bcol < n:
            x[bcol] = T[i][-1]
    objective = sum((ci * xi for ci, xi in zip(c, x)), zero)
    return LPResult("optimal", [Fraction(int(v.numerator), int(v.denominator)) for v in x],
                    Fraction(int(objective.numerator), int(objective.denominator)), pivots)
