"""Shared helpers: resolving candidate pools and argmax/argmin with index tie-breaking."""
from ..functions import as_mask, bits


def pool_mask(f, pool):
    """Mask of the candidate pool; ``None`` means the whole ground set."""
    if pool is None:
        return (1 << f.n) - 1
    return as_mask(pool, f.n)


def best_marginal(f, current, candidates):
    """``(x, gain)`` maximizing ``f(x | current)`` over ``candidates``; lowest index wins ties."""
    base = f.value(current)
    best_x, best_gain = None, None
    for x in bits(candidates):
        gain = f.value(current | (1 << x)) - base
        if best_gain is None or gain > best_gain:
            best_x, best_gain = x, gain
    return best_x, best_gain
