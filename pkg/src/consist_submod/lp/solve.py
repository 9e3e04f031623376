"""Front door for LP solves: exact rational simplex or floating-point HiGHS."""
import numpy as np
from scipy.optimize import linprog

from ..exceptions import LPError
from .simplex import LPResult, linprog_exact


def solve_lp(c, A_ub=(), b_ub=(), A_eq=(), b_eq=(), exact=False):
    """Maximize ``c.x`` subject to the constraints and ``x >= 0``.

    ``exact=True`` uses the rational simplex; otherwise scipy's HiGHS.
    """
    if exact:
        return linprog_exact(c, A_ub, b_ub, A_eq, b_eq)
    kwargs = {}
    if len(A_ub):
        kwargs.update(A_ub=np.asarray(A_ub, dtype=float), b_ub=np.asarray(b_ub, dtype=float))
    if len(A_eq):
        kwargs.update(A_eq=np.asarray(A_eq, dtype=float), b_eq=np.asarray(b_eq, dtype=float))
    res = linprog(-np.asarray(c, dtype=float), bounds=(0, None), method="highs", **kwargs)
    if res.status == 2:
        return LPResult("infeasible")
    if res.status == 3:
        return LPResult("unbounded")
    if res.status != 0:
        raise LPError(f"HiGHS failed: {res.message}")
    return LPResult("optimal", list(res.x), float(-res.fun), int(getattr(res, "nit", 0)))
