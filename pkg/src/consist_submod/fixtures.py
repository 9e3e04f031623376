"""Random monotone submodular fixtures used by the property suites and acceptance runs."""
import numpy as np

from .functions import CoverageFunction, TableFunction, concave_modular_table
from .rng import make_rng
from .robust_lp import ScenarioFamily, enumerate_coverage_scenarios


def random_coverage(rng, n, universe=None, density=0.3):
    rng = make_rng(rng)
    universe = int(rng.integers(n, 2 * n + 1)) if universe is None else universe
    sets = []
    for _ in range(n):
        s = np.flatnonzero(rng.random(universe) < density)
        if s.size == 0:
            s = [int(rng.integers(universe))]
        sets.append([int(u) for u in s])
    return CoverageFunction(universe, sets)


def random_concave_modular(rng, n, rows=None):
    rng = make_rng(rng)
    rows = int(rng.integers(1, 4)) if rows is None else rows
    w = rng.random((rows, n)) * (rng.random((rows, n)) < 0.7)
    kind = ("sqrt", "log1p", "min")[int(rng.integers(3))]
    caps = rng.random(rows) * w.sum(axis=1) + 0.1 if kind == "min" else None
    return concave_modular_table(w, kind, caps)


def random_near_modular(rng, n, noise=0.3, spread=0.5):
    """Modular weights in ``[1 - spread, 1]`` plus a small coverage term, so marginals stay large."""
    rng = make_rng(rng)
    modular = concave_modular_table(1 - spread * rng.random(n), "min", [np.inf])
    cov = np.asarray(random_coverage(rng, n).table(), dtype=np.float64)
    return TableFunction(np.asarray(modular.values) + noise * cov / cov.max())


def random_monotone_submodular(rng, n):
    """Coverage, concave-of-modular or near-modular table, chosen at random."""
    rng = make_rng(rng)
    u = rng.random()
    if u < 0.4:
        return random_coverage(rng, n)
    if u < 0.8:
        return random_concave_modular(rng, n)
    return random_near_modular(rng, n)


def random_split(rng, n, n_now, n_future):
    """Disjoint ``(v_now, v_future)`` masks with the given sizes."""
    rng = make_rng(rng)
    perm = [int(x) for x in rng.permutation(n)]
    now = sum(1 << x for x in perm[:n_now])
    fut = sum(1 << x for x in perm[n_now:n_now + n_future])
    return now, fut


# ------------------------------------------------------------ scenario families

def random_coverage_family(rng, n_now, m, universe=None):
    """Coverage family: shared current sets, one random future set per scenario."""
    rng = make_rng(rng)
    cov = random_coverage(rng, n_now, universe)
    N = cov.universe_size
    subsets = []
    for _ in range(m):
        s = np.flatnonzero(rng.random(N) < rng.uniform(0.1, 0.6))
        subsets.append([int(u) for u in s])
    return enumerate_coverage_scenarios(cov, None, subsets)


def _component_tables(rng, n_now, m):
    """Base and per-scenario tables for one random monotone submodular component.

    The component is a concave function of a weighted sum, a weighted
    coverage term or a facility-location term; ``r`` gets scenario-specific
    parameters while the ``V_now`` part is shared.
    """
    size = 1 << n_now
    masks = np.arange(size)
    member = (masks[:, None] >> np.arange(n_now)) & 1  # size x n_now
    kind = int(rng.integers(3))
    if kind == 0:
        w = rng.random(n_now) * (rng.random(n_now) < 0.8)
        s = member @ w
        cap = 0.5 + rng.random() * w.sum()
        phi = (np.sqrt, np.log1p, lambda x: np.minimum(x, cap))[int(rng.integers(3))]
        base = phi(s)
        tables = [phi(s + rng.random() * 2) for _ in range(m)]
    elif kind == 1:
        U = int(rng.integers(2, 7))
        weights = rng.random(U) + 0.1
        cover = rng.random((n_now, U)) < 0.35
        covered = (member @ cover) > 0  # size x U
        base = covered @ weights
        tables = []
        for _ in range(m):
            r_cov = rng.random(U) < 0.4
            tables.append((covered | r_cov) @ weights)
    else:
        U = int(rng.integers(2, 6))
        w = rng.random((n_now, U)) * (rng.random((n_now, U)) < 0.7)
        best = np.zeros((size, U))
        for x in range(n_now):
            best = np.where(member[:, x:x + 1] == 1, np.maximum(best, w[x]), best)
        base = best.sum(axis=1)
        tables = [np.maximum(best, rng.random(U) * (rng.random(U) < 0.6)).sum(axis=1)
                  for _ in range(m)]
    return base, tables


def random_general_family(rng, n_now, m, components=None):
    """Non-coverage family built from sums of random monotone submodular components."""
    rng = make_rng(rng)
    components = int(rng.integers(1, 4)) if components is None else components
    base = np.zeros(1 << n_now)
    tables = [np.zeros(1 << n_now) for _ in range(m)]
    for _ in range(components):
        b, ts = _component_tables(rng, n_now, m)
        base += b
        for j in range(m):
            tables[j] += ts[j]
    return ScenarioFamily(range(n_now), base.tolist(), [t.tolist() for t in tables])


def random_pairs(rng, family, kappa):
    """One random ``(A_i, i)`` pair per scenario with ``|A_i| <= kappa``."""
    rng = make_rng(rng)
    pairs = []
    for j in range(family.size):
        size = int(rng.integers(0, min(kappa, family.n_now) + 1))
        A = rng.choice(family.n_now, size=size, replace=False)
        pairs.append((frozenset(family.v_now[int(a)] for a in A), j))
    return pairs


__all__ = [
    "random_concave_modular", "random_coverage", "random_coverage_family",
    "random_general_family", "random_monotone_submodular", "random_near_modular", "random_pairs", "random_split",
]
