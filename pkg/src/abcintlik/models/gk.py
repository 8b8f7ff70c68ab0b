"""The g-and-k quantile family: defined by its quantile function, trivial to
simulate by inversion, with no closed-form density. The interest parameter
is one or more quantiles of the distribution itself, obtained by pushing
accepted parameter draws through the quantile function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import backend
from ..core import ConfigurationError, Dataset, GenerativeModel, SummaryVector
from ..samplers import AbcDraws
from ..special import std_normal_quantile, std_normal_quantile_array

DEFAULT_QUANTILE_LEVELS = (0.05, 0.10, 0.25, 0.50)


def gk_quantile(u, a, b, g, k, c=0.8):
    """Quantile function Q(u) = A + B [1 + c tanh(g z/2)] (1 + z^2)^k z with
    z the standard normal quantile of u."""
    scalar = np.ndim(u) == 0
    uu = np.atleast_1d(np.asarray(u, dtype=float))
    if np.any(uu <= 0) or np.any(uu >= 1):
        raise ValueError("quantile orders must lie strictly inside (0, 1)")
    if b <= 0:
        raise ValueError("scale parameter must be positive")
    z = std_normal_quantile_array(uu)
    q = backend.gk_quantile_values(z, float(a), float(b), float(g), float(k), float(c))
    return float(q[0]) if scalar else q


def gk_quantile_from_z(z, a, b, g, k, c=0.8):
    """Quantile values at precomputed standard normal quantiles."""
    zz = np.atleast_1d(np.asarray(z, dtype=float))
    return backend.gk_quantile_values(zz, float(a), float(b), float(g), float(k), float(c))


def is_monotone(a, b, g, k, c=0.8, probe: int = 513) -> bool:
    """Check Q is strictly increasing on a fine probe grid of orders."""
    u = np.linspace(0.001, 0.999, probe)
    q = gk_quantile(u, a, b, g, k, c)
    return bool(np.all(np.diff(q) > 0))


@dataclass
class GkModel(GenerativeModel):
    """Uniform box priors on (A, B, g, k); c is fixed; data simulated by
    inversion of the quantile function."""

    n: int = 1000
    c: float = 0.8
    prior_low: float = 0.0
    prior_high: float = 10.0
    quantile_levels: tuple = DEFAULT_QUANTILE_LEVELS

    summary_dim = 4
    theta_dim = 4
    psi_support = "real"

    def __post_init__(self):
        if self.n < 4:
            raise ValueError("need n >= 4 for four moment summaries")
        if not self.prior_high > self.prior_low:
            raise ValueError("prior box is empty")
        for u in self.quantile_levels:
            if not 0 < u < 1:
                raise ValueError("quantile levels must be in (0, 1)")

    def interest_of(self):
        # full parameter vector; quantile transforms are applied afterwards
        return (0, 1, 2, 3)

    def sample_prior(self, rng):
        return self.point(rng.uniform(self.prior_low, self.prior_high, 4))

    def sample_prior_batch(self, rng, size):
        return rng.uniform(self.prior_low, self.prior_high, (size, 4))

    def simulate(self, point, rng):
        a, b, g, k = point.theta
        u = rng.random(self.n)
        z = std_normal_quantile_array(u)
        return Dataset(gk_quantile_from_z(z, a, b, g, k, self.c))

    def summarize(self, data):
        x = data.observations[:, 0]
        if x.std() == 0:
            raise ValueError("degenerate sample: zero variance")
        return SummaryVector(backend.moment_summaries(x))

    def simulate_summaries_batch(self, thetas, rng):
        out = np.empty((thetas.shape[0], 4))
        for i, th in enumerate(thetas):
            u = rng.random(self.n)
            z = std_normal_quantile_array(u)
            x = gk_quantile_from_z(z, th[0], th[1], th[2], th[3], self.c)
            out[i] = backend.moment_summaries(x)
        return out

    def log_prior_density(self, theta):
        lo, hi = self.prior_low, self.prior_high
        if np.any(theta < lo) or np.any(theta > hi):
            return -np.inf
        return -4.0 * math.log(hi - lo)

    def prior_scale(self):
        return np.full(4, (self.prior_high - self.prior_low) / math.sqrt(12.0))

    def prior_quantile_pdf(self, u0: float):
        """Closed-form prior density of the interest quantile, when one
        exists. Only the median has one: Q(1/2) = A, uniform on the box.
        Other orders mix all four parameters and need the sample route."""
        if u0 != 0.5:
            return None
        lo, hi = self.prior_low, self.prior_high

        def pdf(psi):
            p = np.atleast_1d(np.asarray(psi, dtype=float))
            return np.where((p >= lo) & (p <= hi), 1.0 / (hi - lo), 0.0)

        return pdf

    def make_observed(self, theta_true, seed) -> Dataset:
        rng = np.random.default_rng(seed)
        return self.simulate(self.point(np.asarray(theta_true, dtype=float)), rng)


def quantile_transform(draws: AbcDraws, u0: float, c: float = 0.8) -> AbcDraws:
    """Map accepted (A, B, g, k) draws to the quantile of interest Q(u0).

    The u0 = 1/2 case returns the location draws untouched: the median of
    every g-and-k distribution is A.
    """
    if not 0 < u0 < 1:
        raise ValueError("quantile level must be in (0, 1)")
    thetas = draws.theta_draws if draws.theta_draws is not None else draws.psi_draws
    if thetas is None or thetas.shape[1] != 4:
        raise ConfigurationError("draws do not carry (A, B, g, k) parameters")
    z0 = std_normal_quantile(u0)
    psi = np.empty((thetas.shape[0], 1))
    for i, th in enumerate(thetas):
        psi[i, 0] = gk_quantile_from_z(np.array([z0]), th[0], th[1], th[2], th[3], c)[0]
    return draws.replace_psi(psi)


def prior_quantile_sample(model: GkModel, u0: float, size: int, seed: int) -> np.ndarray:
    """Prior draws of the interest quantile, produced exactly like the
    posterior transform: sample the parameter prior, push through Q(u0)."""
    from ..samplers import prior_psi_sample

    thetas = prior_psi_sample(model, size, seed)
    z0 = std_normal_quantile(u0)
    out = np.empty(thetas.shape[0])
    for i, th in enumerate(thetas):
        out[i] = gk_quantile_from_z(np.array([z0]), th[0], th[1], th[2], th[3], model.c)[0]
    return out
