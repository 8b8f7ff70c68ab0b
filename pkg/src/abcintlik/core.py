"""Model-agnostic building blocks: parameter points, datasets, summaries, distances.

Every concrete model plugs into the :class:`GenerativeModel` interface so the
samplers and the likelihood-curve estimator never need model-specific code.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np


class DimensionError(ValueError):
    """Vectors of incompatible lengths were combined."""


class ConfigurationError(ValueError):
    """An interest descriptor or run configuration is invalid."""


class DegenerateSampleError(ValueError):
    """A sample without spread was given to a spread-based estimator."""


class NumericalError(RuntimeError):
    """A numerical routine failed to reach its accuracy target."""


class BudgetExhaustedError(RuntimeError):
    """A simulation budget ran out before the stopping rule was met.

    Carries the smallest distance observed so the caller can judge how far
    the tolerance was from being reachable.
    """

    def __init__(self, message, smallest_distance=np.inf, attempts=0):
        super().__init__(message)
        self.smallest_distance = float(smallest_distance)
        self.attempts = int(attempts)


def _frozen(a, dtype=float):
    out = np.array(a, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class ParameterPoint:
    """A point in the full parameter space with a designated interest part.

    ``interest`` selects the low-dimensional quantity of interest out of
    ``theta``: either a sequence of coordinate indices or a callable mapping
    the full vector to the interest vector.
    """

    theta: np.ndarray
    interest: Sequence[int] | Callable[[np.ndarray], np.ndarray] = (0,)

    def __post_init__(self):
        object.__setattr__(self, "theta", _frozen(np.atleast_1d(self.theta)))
        if self.theta.ndim != 1:
            raise ConfigurationError("theta must be a 1-d vector")


def extract_psi(point: ParameterPoint) -> np.ndarray:
    """Return the interest vector of ``point``; deterministic by construction."""
    sel = point.interest
    if callable(sel):
        psi = np.atleast_1d(np.asarray(sel(point.theta), dtype=float))
        if not np.all(np.isfinite(psi)):
            raise ConfigurationError("interest transform produced non-finite values")
        return psi
    idx = np.asarray(sel, dtype=int)
    if idx.size == 0 or idx.min() < -point.theta.size or idx.max() >= point.theta.size:
        raise ConfigurationError(
            f"interest indices {list(idx)} invalid for dimension {point.theta.size}"
        )
    return point.theta[idx].copy()


@dataclass(frozen=True)
class Dataset:
    """Observed or simulated data: ``n`` rows, model-dependent columns."""

    observations: np.ndarray

    def __post_init__(self):
        obs = np.asarray(self.observations, dtype=float)
        if obs.ndim == 1:
            obs = obs[:, None]
        if obs.ndim != 2 or obs.shape[0] < 1:
            raise ValueError("observations must be a non-empty matrix")
        if not np.all(np.isfinite(obs)):
            raise ValueError("observations contain missing or non-finite entries")
        object.__setattr__(self, "observations", _frozen(obs))

    @property
    def n(self) -> int:
        return self.observations.shape[0]

    def column(self, j: int) -> np.ndarray:
        return self.observations[:, j]


@dataclass(frozen=True)
class SummaryVector:
    """Fixed-length vector of summary statistics."""

    values: np.ndarray

    def __post_init__(self):
        v = np.atleast_1d(np.asarray(self.values, dtype=float))
        if v.ndim != 1:
            raise ValueError("summary values must be a 1-d vector")
        if not np.all(np.isfinite(v)):
            raise ValueError("summary values must be finite")
        object.__setattr__(self, "values", _frozen(v))

    def __len__(self) -> int:
        return self.values.size


def euclidean_distance(a: SummaryVector, b: SummaryVector, scale=None) -> float:
    """Euclidean distance between two summary vectors.

    ``scale`` optionally divides each component before comparing (e.g. a
    pilot-run MAD per component); the default compares raw components.
    """
    va, vb = a.values, b.values
    if va.size != vb.size:
        raise DimensionError(f"summary lengths differ: {va.size} != {vb.size}")
    diff = va - vb
    if scale is not None:
        s = np.asarray(scale, dtype=float)
        if s.size != va.size:
            raise DimensionError("scale length does not match summary length")
        if np.any(s <= 0):
            raise ValueError("scale components must be positive")
        diff = diff / s
    return float(np.sqrt(np.dot(diff, diff)))


def seed_sequence(master_seed: int, *key: int) -> np.random.SeedSequence:
    """Seed material derived by hashing the master seed with an index key."""
    return np.random.SeedSequence((int(master_seed),) + tuple(int(k) for k in key))


def rng_from(master_seed: int, *key: int) -> np.random.Generator:
    """Independent generator for (master seed, index key).

    Derivation is position-free: stream ``(seed, i)`` is the same no matter
    how many workers consume the batch or in which order.
    """
    return np.random.Generator(np.random.PCG64(seed_sequence(master_seed, *key)))


class GenerativeModel:
    """Interface every example model implements.

    Simulators must be pure functions of (parameter point, generator state):
    replaying the same generator yields bit-identical datasets. Subclasses
    fill in the abstract pieces; the batch helpers have generic loop
    implementations that subclasses may vectorize.
    """

    #: length of the summary vector produced by ``summarize``
    summary_dim: int = 0
    #: dimension of the full parameter vector
    theta_dim: int = 0
    #: "positive" selects log-scale density estimation for psi by default
    psi_support: str = "real"

    def sample_prior(self, rng: np.random.Generator) -> ParameterPoint:
        raise NotImplementedError

    def simulate(self, point: ParameterPoint, rng: np.random.Generator) -> Dataset:
        raise NotImplementedError

    def summarize(self, data: Dataset) -> SummaryVector:
        raise NotImplementedError

    def psi(self, point: ParameterPoint) -> np.ndarray:
        return extract_psi(point)

    def log_prior_density(self, theta: np.ndarray) -> float:
        """Log prior density of a full parameter vector (for MCMC ratios)."""
        raise NotImplementedError

    def prior_psi_pdf(self, psi: np.ndarray) -> np.ndarray | None:
        """Closed-form marginal prior density of psi, when available."""
        return None

    def prior_scale(self) -> np.ndarray:
        """Per-coordinate prior standard deviations (proposal-scale default)."""
        raise NotImplementedError

    # --- batch helpers used by the rejection sampler -------------------

    def sample_prior_batch(self, rng: np.random.Generator, size: int) -> np.ndarray:
        thetas = np.empty((size, self.theta_dim))
        for i in range(size):
            thetas[i] = self.sample_prior(rng).theta
        return thetas

    def simulate_summaries_batch(
        self, thetas: np.ndarray, rng: np.random.Generator
    ) -> np.ndarray:
        out = np.empty((thetas.shape[0], self.summary_dim))
        for i, th in enumerate(thetas):
            out[i] = self.summarize(self.simulate(self.point(th), rng)).values
        return out

    def point(self, theta: np.ndarray) -> ParameterPoint:
        return ParameterPoint(np.asarray(theta, dtype=float), self.interest_of())

    def interest_of(self) -> Sequence[int] | Callable[[np.ndarray], np.ndarray]:
        return (0,)

    def psi_of_thetas(self, thetas: np.ndarray) -> np.ndarray:
        """Interest vectors for a batch of full parameter vectors, row-wise."""
        thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
        return np.stack([extract_psi(self.point(th)) for th in thetas])
