"""Matched Bernoulli pairs with a common treatment effect on the logit scale.

A Neyman-Scott setting: each pair carries its own nuisance intercept, so the
nuisance dimension grows with the data. Ships with the classical partial
likelihoods (profile, modified profile, conditional) and the prior-averaged
likelihood built from hypergeometric factors, all log-safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..core import Dataset, GenerativeModel, SummaryVector
from ..special import DEFAULT_QUADRATURE, pair_hyp2f1


def _sigmoid(x):
    return np.where(x >= 0, 1.0 / (1.0 + np.exp(-x)), np.exp(x) / (1.0 + np.exp(x)))


def _log1pexp(x):
    x = np.asarray(x, dtype=float)
    return np.where(x > 30, x, np.log1p(np.exp(np.minimum(x, 30))))


@dataclass
class MatchedPairsModel(GenerativeModel):
    """R_i0 ~ Be(sigmoid(lam_i)), R_i1 ~ Be(sigmoid(lam_i + psi)).

    theta = (psi, lam_1, ..., lam_k). The prior puts a normal on psi and an
    arcsine Beta(1/2, 1/2) on each sigmoid(lam_i), i.e. the Jeffreys prior of
    a Bernoulli probability pushed to the logit scale.
    """

    k_pairs: int = 30
    psi_prior_mean: float = 0.0
    psi_prior_sd: float = 10.0

    summary_dim = 2
    psi_support = "real"

    def __post_init__(self):
        if self.k_pairs < 1:
            raise ValueError("k_pairs must be positive")
        if self.psi_prior_sd <= 0:
            raise ValueError("psi prior sd must be positive")
        self.theta_dim = 1 + self.k_pairs

    def interest_of(self):
        return (0,)

    def sample_prior(self, rng):
        psi = rng.normal(self.psi_prior_mean, self.psi_prior_sd)
        omega = rng.beta(0.5, 0.5, self.k_pairs)
        lam = np.log(omega) - np.log1p(-omega)
        return self.point(np.concatenate([[psi], lam]))

    def sample_prior_batch(self, rng, size):
        psi = rng.normal(self.psi_prior_mean, self.psi_prior_sd, size)
        omega = rng.beta(0.5, 0.5, (size, self.k_pairs))
        lam = np.log(omega) - np.log1p(-omega)
        return np.column_stack([psi, lam])

    def simulate(self, point, rng):
        psi = point.theta[0]
        lam = point.theta[1:]
        r0 = (rng.random(self.k_pairs) < _sigmoid(lam)).astype(float)
        r1 = (rng.random(self.k_pairs) < _sigmoid(lam + psi)).astype(float)
        return Dataset(np.column_stack([r0, r1]))

    def simulate_summaries_batch(self, thetas, rng):
        psi = thetas[:, :1]
        lam = thetas[:, 1:]
        r0 = rng.random(lam.shape) < _sigmoid(lam)
        r1 = rng.random(lam.shape) < _sigmoid(lam + psi)
        return np.column_stack([r0.mean(axis=1), r1.mean(axis=1)])

    def summarize(self, data):
        return SummaryVector(data.observations.mean(axis=0))

    def log_prior_density(self, theta):
        psi = theta[0]
        lam = theta[1:]
        lp = -0.5 * ((psi - self.psi_prior_mean) / self.psi_prior_sd) ** 2
        lp -= math.log(self.psi_prior_sd) + 0.5 * math.log(2 * math.pi)
        # Beta(1/2,1/2) density of sigmoid(lam) times the logistic Jacobian
        lp += float(
            (-0.5 * (_log1pexp(lam) + _log1pexp(-lam)) - math.log(math.pi)).sum()
        )
        return lp

    def prior_scale(self):
        # sd of logit(Beta(1/2,1/2)) is sqrt(2 * trigamma(1/2)) = pi
        return np.concatenate([[self.psi_prior_sd], np.full(self.k_pairs, math.pi)])

    def prior_psi_pdf(self, psi):
        p = np.atleast_1d(np.asarray(psi, dtype=float))
        zscore = (p - self.psi_prior_mean) / self.psi_prior_sd
        return np.exp(-0.5 * zscore * zscore) / (
            self.psi_prior_sd * math.sqrt(2 * math.pi)
        )

    def make_observed(self, psi_true, seed) -> Dataset:
        """Synthetic data at a fixed effect; pair intercepts come from
        uniform success probabilities pushed through the logit."""
        rng = np.random.default_rng(seed)
        omega = rng.random(self.k_pairs)
        lam = np.log(omega) - np.log1p(-omega)
        return self.simulate(self.point(np.concatenate([[psi_true], lam])), rng)


def pair_counts(data: Dataset) -> dict:
    """Counts n[(j, l)] of pairs with (R_0, R_1) = (j, l)."""
    r0 = data.observations[:, 0].astype(int)
    r1 = data.observations[:, 1].astype(int)
    return {
        (j, l): int(((r0 == j) & (r1 == l)).sum()) for j in (0, 1) for l in (0, 1)
    }


def discordant_stats(data: Dataset) -> tuple[int, int]:
    """(T, b): successes among cases and pair count, both over the pairs with
    exactly one success, the only ones the classical methods keep."""
    counts = pair_counts(data)
    return counts[(0, 1)], counts[(0, 1)] + counts[(1, 0)]


def profile_log_likelihood(psi, t, b):
    """log of e^(psi T) / (1 + e^(psi/2))^(2b)."""
    _check_tb(t, b)
    p = np.asarray(psi, dtype=float)
    return p * t - 2 * b * _log1pexp(p / 2.0)


def profile_lambda_hat(psi):
    """Constrained maximizer of each pair intercept given the effect."""
    return -0.5 * np.asarray(psi, dtype=float)


def profile_argmax(t, b):
    """2 log(T / (b - T)); the known inconsistent maximizer (twice the truth
    for large b). Boundary T in {0, b} has no interior maximum."""
    _check_tb(t, b)
    if t == 0 or t == b:
        return math.inf if t == b else -math.inf
    return 2.0 * math.log(t / (b - t))


def modification_log_factor(psi, b):
    """log of the profile adjustment factor e^(b psi / 4) / (1+e^(psi/2))^b."""
    p = np.asarray(psi, dtype=float)
    return b * p / 4.0 - b * _log1pexp(p / 2.0)


def modified_profile_log_likelihood(psi, t, b):
    return profile_log_likelihood(psi, t, b) + modification_log_factor(psi, b)


def conditional_log_likelihood(psi, t, b):
    """log of C(b,T) e^(psi T) / (1 + e^psi)^b; T | discordant is binomial."""
    _check_tb(t, b)
    p = np.asarray(psi, dtype=float)
    return (
        math.lgamma(b + 1)
        - math.lgamma(t + 1)
        - math.lgamma(b - t + 1)
        + p * t
        - b * _log1pexp(p)
    )


def conditional_argmax(t, b):
    """log(T / (b - T)), the consistent conditional maximizer."""
    _check_tb(t, b)
    if t == 0 or t == b:
        return math.inf if t == b else -math.inf
    return math.log(t / (b - t))


def integrated_log_likelihood(psi, counts, spec=DEFAULT_QUADRATURE):
    """Prior-averaged log likelihood from all pairs, concordant included.

    Each (j, l) category contributes n_jl copies of
    2F1(1, j+l+1/2; 3; 1-e^psi) * e^(psi l). Accumulated in log space.
    """
    total = sum(counts.values())
    if total == 0:
        raise ValueError("counts are all zero")
    p = np.atleast_1d(np.asarray(psi, dtype=float))
    out = np.zeros_like(p)
    for (j, l), n_jl in counts.items():
        if n_jl == 0:
            continue
        f = np.array([pair_hyp2f1(j + l, v, spec) for v in p])
        out += n_jl * (np.log(f) + p * l)
    return out if np.ndim(psi) else float(out[0])


def _check_tb(t, b):
    if b < 1:
        raise ValueError("likelihood undefined without discordant pairs (b = 0)")
    if not 0 <= t <= b:
        raise ValueError(f"need 0 <= T <= b, got T={t}, b={b}")
