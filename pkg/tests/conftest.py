import math

import numpy as np
import pytest

from abcintlik.core import Dataset, GenerativeModel, SummaryVector


class GaussianLocationModel(GenerativeModel):
    """Tiny conjugate model for sampler-law tests: N(0,1) prior on a location,
    one noisy observation of it as the data."""

    summary_dim = 1
    theta_dim = 1
    psi_support = "real"

    def __init__(self, noise_sd=0.5, n=5):
        self.noise_sd = noise_sd
        self.n = n

    def sample_prior(self, rng):
        return self.point(np.array([rng.normal()]))

    def sample_prior_batch(self, rng, size):
        return rng.normal(size=(size, 1))

    def simulate(self, point, rng):
        x = point.theta[0] + self.noise_sd * rng.standard_normal(self.n)
        return Dataset(x[:, None])

    def simulate_summaries_batch(self, thetas, rng):
        x = thetas[:, 0][:, None] + self.noise_sd * rng.standard_normal(
            (thetas.shape[0], self.n)
        )
        return x.mean(axis=1)[:, None]

    def summarize(self, data):
        return SummaryVector(data.observations.mean(axis=0))

    def log_prior_density(self, theta):
        return float(-0.5 * theta[0] ** 2 - 0.5 * math.log(2 * math.pi))

    def prior_psi_pdf(self, psi):
        p = np.atleast_1d(np.asarray(psi, dtype=float))
        return np.exp(-0.5 * p * p) / math.sqrt(2 * math.pi)

    def prior_scale(self):
        return np.array([1.0])


@pytest.fixture
def toy_model():
    return GaussianLocationModel()


@pytest.fixture
def toy_observed(toy_model):
    rng = np.random.default_rng(100)
    return toy_model.simulate(toy_model.point(np.array([0.3])), rng)
