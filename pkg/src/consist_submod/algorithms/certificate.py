"""Greedy seed, threshold-gated augmentation, then a uniform subsample of the seed size."""
from dataclasses import dataclass

from sklearn.base import BaseEstimator

from .._validation import check_eta, check_gamma, check_int
from ..exceptions import DomainError
from ..functions import bits, mask_to_set
from ..rng import make_rng
from ._pool import best_marginal, pool_mask
from .greedy import _greedy_mask

THRESHOLD_SLACK = 1e-12


@dataclass(frozen=True)
class CertificateResult:
    seed_solution: frozenset
    augmented: frozenset
    eta_prime: float
    sample: frozenset
    certificate_hit: bool
    kappa: int
    eta: float
    gamma: float
    seed_value: float
    augmentation_order: tuple = ()

    @property
    def budget(self):
        return int(self.eta * self.kappa + 1e-9)


def augment(f, cand, seed_mask, kappa, eta, gamma):
    """Run the augmentation loop; returns ``(A_plus, added, certificate_hit)``.

    At most ``floor(eta * kappa)`` elements are added, each the outside
    element of largest marginal gain provided that gain is at least
    ``gamma * f(S) / kappa``.  ``certificate_hit`` records whether, when the
    loop ends, no remaining element passes the threshold.
    """
    threshold = gamma * f.value(seed_mask) / kappa
    budget = int(eta * kappa + 1e-9)
    A = seed_mask
    added = []
    while True:
        rest = cand & ~A
        if not rest:
            return A, added, True
        x, gain = best_marginal(f, A, rest)
        if gain < threshold - THRESHOLD_SLACK:
            return A, added, True
        if len(added) >= budget:
            return A, added, False
        A |= 1 << x
        added.append(x)


def greedy_with_certificate(f, ground=None, kappa=1, eta=0.1, gamma=0.84, rng=None):
    """Seed with greedy, augment by up to ``eta*kappa`` high-marginal elements, sample ``kappa`` of them."""
    kappa = check_int(kappa, "kappa", low=1)
    eta = check_eta(eta)
    gamma = check_gamma(gamma)
    cand = pool_mask(f, ground)
    if kappa > cand.bit_count():
        raise DomainError(f"kappa={kappa} exceeds the pool size {cand.bit_count()}")
    S, _, _ = _greedy_mask(f, cand, kappa)
    A_plus, added, hit = augment(f, cand, S, kappa, eta, gamma)
    members = bits(A_plus)
    eta_prime = (len(members) - kappa) / kappa
    rng = make_rng(rng)
    picked = rng.choice(len(members), size=kappa, replace=False)
    sample = frozenset(members[i] for i in picked)
    return CertificateResult(
        seed_solution=mask_to_set(S),
        augmented=mask_to_set(A_plus),
        eta_prime=eta_prime,
        sample=sample,
        certificate_hit=hit,
        kappa=kappa,
        eta=eta,
        gamma=gamma,
        seed_value=f.value(S),
        augmentation_order=tuple(added),
    )


class GreedyWithCertificate(BaseEstimator):
    """Estimator wrapper; ``fit`` stores ``result_`` and the sampled ``solution_``."""

    def __init__(self, kappa=1, eta=0.1, gamma=0.84, seed=None):
        self.kappa = kappa
        self.eta = eta
        self.gamma = gamma
        self.seed = seed

    def fit(self, f, ground=None):
        self.result_ = greedy_with_certificate(f, ground, self.kappa, self.eta, self.gamma,
                                               make_rng(self.seed, "certificate"))
        self.solution_ = self.result_.sample
        return self

    def predict(self, f=None):
        return sorted(self.solution_)
