"""Check-Point: the block-based streaming reduction, and its Any-Swap interpolation step."""
import copy
import math
from dataclasses import dataclass, field
from fractions import Fraction

from sklearn.base import BaseEstimator

from .._validation import TOL, check_epsilon, check_int, integral
from ..exceptions import ContractViolation, DomainError
from ..functions import as_mask, bits, mask_to_set
from ..rng import make_rng


def _lowest(mask, count):
    out = 0
    for x in bits(mask)[:count]:
        out |= 1 << x
    return out


def any_swap(A, B, ell):
    """Move ``A`` towards ``B`` by exchanging ``ell`` elements.

    If ``|A - B| <= ell`` the target ``B`` is returned; otherwise the ``ell``
    lowest-index elements of ``A - B`` are replaced by the ``ell`` lowest-index
    elements of ``B - A``.
    """
    a, b = as_mask(A), as_mask(B)
    if a.bit_count() != b.bit_count():
        raise DomainError(f"any_swap needs |A| == |B|, got {a.bit_count()} and {b.bit_count()}")
    ell = check_int(ell, "ell", low=0)
    return mask_to_set(_swap_masks(a, b, ell))


def _swap_masks(a, b, ell):
    only_a, only_b = a & ~b, b & ~a
    if only_a.bit_count() <= ell and only_b.bit_count() <= ell:
        return b
    return (a & ~_lowest(only_a, ell)) | _lowest(only_b, ell)


def swap_toward(A, B, ell):
    """:func:`any_swap` generalized to sets of different sizes (mask in, mask out).

    At most ``ell`` elements leave and at most ``ell`` enter; for equal sizes
    this coincides with :func:`any_swap`.
    """
    return _swap_masks(A, B, ell)


# ------------------------------------------------------------------ parameters

@dataclass(frozen=True)
class BlockPlan:
    """Integer schedule derived from ``(epsilon, k)``."""

    epsilon: Fraction
    k: int
    delta: int
    kappa: int
    swap_size: int
    n_subblocks: int

    def subblock(self, j):
        """Half-open range of within-block positions forming sub-block ``j``."""
        lo = j * self.delta // self.n_subblocks
        hi = (j + 1) * self.delta // self.n_subblocks
        return lo, hi

    @property
    def min_subblock(self):
        return self.delta // self.n_subblocks

    @property
    def consistency_bound(self):
        """Per-step bound on additions: one swap plus the arriving element."""
        return self.swap_size + 1


def block_plan(epsilon, k):
    """Validate ``(epsilon, k)`` and derive block length, robust cardinality and swap size.

    Requires ``1/epsilon`` and ``epsilon*k`` integral.  A block of ``Delta``
    steps is cut into ``min(1/epsilon, Delta)`` near-equal sub-blocks, and the
    swap size ``1/epsilon**2`` must let the shortest sub-block complete the
    transition to a ``kappa``-element target.
    """
    epsilon = check_epsilon(epsilon)
    k = check_int(k, "k", low=1)
    inv = integral(1 / epsilon, "1/epsilon")
    delta = integral(epsilon * k, "epsilon*k")
    if delta < 1:
        raise DomainError(f"epsilon*k must be >= 1, got {epsilon * k}")
    eps = Fraction(1, inv)
    kappa = k - 2 * delta
    if kappa < 0:
        raise DomainError(f"epsilon={eps} leaves a negative robust cardinality for k={k}")
    plan = BlockPlan(eps, k, delta, kappa, inv * inv, min(inv, delta))
    if plan.min_subblock * plan.swap_size < kappa:
        raise DomainError(
            f"with epsilon={eps}, k={k} the shortest sub-block ({plan.min_subblock} steps of "
            f"{plan.swap_size} swaps) cannot reach a {kappa}-element target; "
            f"use snap_epsilon({float(epsilon)}, {k})")
    return plan


def snap_epsilon(epsilon, k):
    """Largest feasible ``epsilon' <= epsilon`` for ``k`` (``1/epsilon'`` and ``epsilon' k`` integral)."""
    check_epsilon(epsilon)
    k = check_int(k, "k", low=1)
    start = max(2, math.ceil(1 / epsilon - TOL))
    for inv in range(start, k + 1):
        if k % inv:
            continue
        try:
            block_plan(Fraction(1, inv), k)
        except DomainError:
            continue
        return Fraction(1, inv)
    raise DomainError(f"no feasible epsilon <= {epsilon} for k={k}")


# ----------------------------------------------------------------------- state

@dataclass
class CheckPointState:
    plan: BlockPlan
    subroutine: object
    seed: int
    t: int = 0
    recent: list = field(default_factory=list)  # (arrival step, element)
    s_old: int = 0
    s_new: int = 0
    alg: int = 0
    arrived: int = 0
    block: int = 0
    subblock_j: int = None
    checkpoints: list = field(default_factory=list)

    @property
    def epsilon(self):
        return self.plan.epsilon

    @property
    def k(self):
        return self.plan.k

    @property
    def recent_mask(self):
        m = 0
        for _, x in self.recent:
            m |= 1 << x
        return m

    @property
    def solution(self):
        return mask_to_set(self.alg)


def check_point_init(epsilon, k, robust_subroutine, seed=None):
    """Fresh state.  ``robust_subroutine(f, pool_mask, kappa, rng)`` returns a set of size <= kappa."""
    plan = block_plan(epsilon, k)
    if not callable(robust_subroutine):
        raise DomainError("robust_subroutine must be callable")
    seed = make_rng(seed).integers(2**63) if seed is None else int(seed)
    return CheckPointState(plan=plan, subroutine=robust_subroutine, seed=int(seed))


def _checkpoint(state, f):
    plan = state.plan
    state.block += 1
    tau = state.t - 1
    state.s_old = state.s_new
    rng = make_rng(state.seed, f"subroutine/{state.block}")
    out = state.subroutine(f, state.arrived, plan.kappa, rng)
    new = as_mask(out, f.n)
    if new & ~state.arrived:
        raise ContractViolation(f"subroutine returned elements that have not arrived by step {tau}")
    if new.bit_count() > plan.kappa:
        raise ContractViolation(
            f"subroutine returned {new.bit_count()} elements, more than kappa={plan.kappa}")
    state.s_new = new
    tau_prev = tau - plan.delta
    state.recent = [(s, x) for s, x in state.recent if s > tau_prev]
    state.subblock_j = int(make_rng(state.seed, f"subblock/{state.block}").integers(plan.n_subblocks))
    state.checkpoints.append((tau, sorted(bits(new)), state.subblock_j))


def check_point_insert(state, x, f):
    """Process the arrival of ``x``; returns ``(state, ALG_t)``.

    The state is updated in place.  Checkpoint work for ``tau = i*Delta``
    happens when element ``tau + 1`` arrives, so a stream ending on a block
    boundary triggers no trailing checkpoint.
    """
    x = int(x)
    if not 0 <= x < f.n:
        raise DomainError(f"element {x} outside the ground set")
    if state.arrived >> x & 1:
        raise DomainError(f"element {x} arrived twice")
    plan = state.plan
    state.t += 1
    t = state.t
    if t > plan.delta:
        pos = (t - 1 - plan.delta) % plan.delta
        if pos == 0:
            _checkpoint(state, f)
        lo, hi = plan.subblock(state.subblock_j)
        if lo <= pos < hi:
            state.s_old = swap_toward(state.s_old, state.s_new, plan.swap_size)
    state.recent.append((t, x))
    state.arrived |= 1 << x
    state.alg = state.s_old | state.recent_mask
    return state, mask_to_set(state.alg)


# ------------------------------------------------------------------- estimator

class CheckPoint(BaseEstimator):
    """Streaming estimator: ``partial_fit(x, f)`` per arrival, current set in ``solution_``.

    ``subroutine`` is a registered name (``"local_search"``, ``"certificate"``,
    ``"minmax"``, ``"brute_opt"``) or a callable with the subroutine contract;
    ``subroutine_params`` are forwarded to the registered factory.
    """

    def __init__(self, epsilon=0.25, k=4, subroutine="local_search", subroutine_params=None,
                 seed=None):
        self.epsilon = epsilon
        self.k = k
        self.subroutine = subroutine
        self.subroutine_params = subroutine_params
        self.seed = seed

    def _init_state(self):
        from .subroutines import resolve_subroutine

        sub = resolve_subroutine(self.subroutine, self.epsilon, self.subroutine_params)
        self.state_ = check_point_init(self.epsilon, self.k, sub, self.seed)

    def partial_fit(self, x, f):
        if not hasattr(self, "state_"):
            self._init_state()
        check_point_insert(self.state_, x, f)
        self.solution_ = self.state_.solution
        return self

    def fit(self, stream, f):
        self._init_state()
        for x in stream:
            self.partial_fit(x, f)
        return self

    def predict(self, f=None):
        return sorted(self.solution_)

    @property
    def consistency_bound(self):
        return block_plan(self.epsilon, self.k).consistency_bound

    def snapshot(self):
        return copy.deepcopy(self)
