from .simplex import LPResult, linprog_exact, to_rational
from .solve import solve_lp

__all__ = ["LPResult", "linprog_exact", "solve_lp", "to_rational"]
