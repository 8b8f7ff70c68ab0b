"""Two independent Poisson samples; the interest parameter is the rate ratio.

The benchmark case with a fully known answer: under independent Gamma(a, b)
priors on the two rates, the likelihood integrated over the nuisance rate is
proportional to psi^(n xbar) / (1 + psi)^(n (xbar + ybar)) for every (a, b),
which is the same closed form the classical partial-likelihood routes give.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betaln, gammaln

from ..core import Dataset, GenerativeModel, SummaryVector


@dataclass
class PoissonRatioModel(GenerativeModel):
    """X_i ~ Poisson(theta1), Y_i ~ Poisson(theta2), psi = theta1/theta2."""

    n: int = 10
    a0: float = 0.1
    b0: float = 0.1

    summary_dim = 2
    theta_dim = 2
    psi_support = "positive"

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.a0 <= 0 or self.b0 <= 0:
            raise ValueError("prior parameters must be positive")

    def interest_of(self):
        return lambda theta: np.array([theta[0] / theta[1]])

    def sample_prior(self, rng):
        theta = rng.gamma(self.a0, 1.0 / self.b0, size=2)
        return self.point(theta)

    def sample_prior_batch(self, rng, size):
        return rng.gamma(self.a0, 1.0 / self.b0, size=(size, 2))

    def simulate(self, point, rng):
        t1, t2 = point.theta
        if t1 <= 0 or t2 <= 0:
            raise ValueError("Poisson rates must be positive")
        x = rng.poisson(t1, self.n)
        y = rng.poisson(t2, self.n)
        return Dataset(np.column_stack([x, y]).astype(float))

    def simulate_summaries_batch(self, thetas, rng):
        # Poisson additivity: the sample mean has the law Poisson(n theta)/n,
        # so the batch path draws the sufficient sums directly
        x = rng.poisson(self.n * thetas[:, 0])
        y = rng.poisson(self.n * thetas[:, 1])
        return np.column_stack([x / self.n, y / self.n])

    def summarize(self, data):
        return SummaryVector(data.observations.mean(axis=0))

    def log_prior_density(self, theta):
        if np.any(theta <= 0):
            return -np.inf
        a, b = self.a0, self.b0
        return float(
            2 * (a * math.log(b) - gammaln(a))
            + (a - 1) * np.log(theta).sum()
            - b * theta.sum()
        )

    def prior_scale(self):
        sd = math.sqrt(self.a0) / self.b0
        return np.array([sd, sd])

    def prior_psi_pdf(self, psi):
        """Closed-form marginal prior of the ratio of two iid Gamma(a, b)."""
        p = np.atleast_1d(np.asarray(psi, dtype=float))
        out = np.zeros_like(p)
        pos = p > 0
        a = self.a0
        out[pos] = np.exp(
            (a - 1) * np.log(p[pos]) - 2 * a * np.log1p(p[pos]) - betaln(a, a)
        )
        return out

    def make_observed(self, theta_true, seed) -> Dataset:
        rng = np.random.default_rng(seed)
        return self.simulate(self.point(np.asarray(theta_true, dtype=float)), rng)


def exact_log_integrated_likelihood(psi, xbar, ybar, n):
    """log of psi^(n xbar) / (1 + psi)^(n (xbar + ybar)), elementwise."""
    p = np.asarray(psi, dtype=float)
    if np.any(p <= 0):
        raise ValueError("psi must be positive")
    return n * xbar * np.log(p) - n * (xbar + ybar) * np.log1p(p)


def exact_integrated_likelihood(psi, xbar, ybar, n):
    """Unnormalized exact integrated likelihood, evaluated log-safely."""
    return np.exp(exact_log_integrated_likelihood(psi, xbar, ybar, n))


def exact_curve_argmax(xbar, ybar):
    """The exact maximizer xbar/ybar (stationary point of the closed form)."""
    if ybar <= 0:
        raise ValueError("ybar must be positive for an interior maximum")
    return xbar / ybar
