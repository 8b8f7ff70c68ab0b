"""Likelihood-free samplers: prior rejection and the two tolerance-gated
Metropolis chains, plus pilot-run tolerance calibration.

All three samplers accept a parameter draw only when the distance between
simulated and observed summary statistics is at most the tolerance. The two
chain variants differ in one step: when a proposal fails the distance check,
the move-or-stay chain records the previous state again, while the retry
chain discards the proposal and draws a fresh one, so it always moves unless
the Metropolis ratio itself rejects.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import (
    BudgetExhaustedError,
    Dataset,
    GenerativeModel,
    NumericalError,
    SummaryVector,
    rng_from,
)

# stream labels, so the proposal stream, the chain stream and the prior-psi
# stream derived from one master seed never collide
_STREAM_REJECTION = 1
_STREAM_CHAIN = 2
_STREAM_PRIOR_PSI = 3
_STREAM_PILOT = 4


@dataclass(frozen=True)
class AbcConfig:
    """Run configuration shared by the samplers.

    ``target_accepts`` drives the rejection sampler; set it to None and give
    ``max_proposals`` to scan a fixed proposal budget instead and keep every
    accepted draw. ``chain_length``/``burn_in`` drive the MCMC samplers.
    """

    epsilon: float
    seed: int
    target_accepts: Optional[int] = 1000
    chain_length: int = 10_000
    burn_in: Optional[int] = None
    kernel_scale: Optional[np.ndarray] = None
    summary_scale: Optional[np.ndarray] = None
    max_proposals: int = 200_000_000
    max_init_attempts: int = 10_000_000
    max_step_retries: int = 1_000_000
    chunk_size: int = 20_000
    init_theta: Optional[np.ndarray] = None  # warm start skipping the A1-A3 search

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError("epsilon must be nonnegative")
        if self.target_accepts is not None and self.target_accepts < 1:
            raise ValueError("target_accepts must be positive")
        if self.chain_length < 1:
            raise ValueError("chain_length must be positive")
        if self.effective_burn_in >= self.chain_length:
            raise ValueError("burn_in must be smaller than chain_length")

    @property
    def effective_burn_in(self) -> int:
        if self.burn_in is None:
            return self.chain_length // 10
        return self.burn_in


@dataclass(frozen=True)
class AbcDraws:
    """Accepted interest-parameter draws plus run bookkeeping."""

    psi_draws: np.ndarray          # (M, k)
    distances: np.ndarray          # (M,)
    acceptance_rate: float
    n_proposals: int
    seed: int
    epsilon: float
    sampler: str
    init_attempts: Optional[int] = None
    theta_draws: Optional[np.ndarray] = None  # (M, d), kept for re-transforms

    def __post_init__(self):
        psi = np.atleast_2d(np.asarray(self.psi_draws, dtype=float))
        object.__setattr__(self, "psi_draws", psi)
        object.__setattr__(self, "distances", np.asarray(self.distances, dtype=float))

    @property
    def m(self) -> int:
        return self.psi_draws.shape[0]

    def psi_column(self, j: int = 0) -> np.ndarray:
        return self.psi_draws[:, j]

    def replace_psi(self, psi: np.ndarray) -> "AbcDraws":
        return AbcDraws(
            psi_draws=psi,
            distances=self.distances,
            acceptance_rate=self.acceptance_rate,
            n_proposals=self.n_proposals,
            seed=self.seed,
            epsilon=self.epsilon,
            sampler=self.sampler,
            init_attempts=self.init_attempts,
            theta_draws=self.theta_draws,
        )


@dataclass(frozen=True)
class PilotCalibration:
    """Tolerance picked from a pilot run, with the full distance sample."""

    epsilon: float
    quantile: float
    distances: np.ndarray
    pilot_n: int
    seed: int


def _observed_summary(model: GenerativeModel, observed: Dataset) -> SummaryVector:
    return model.summarize(observed)


def _distances_to_observed(summaries, s_obs, scale):
    diff = summaries - s_obs[None, :]
    if scale is not None:
        diff = diff / np.asarray(scale, dtype=float)[None, :]
    return np.sqrt((diff * diff).sum(axis=1))


def rejection_abc(model: GenerativeModel, observed: Dataset, cfg: AbcConfig) -> AbcDraws:
    """Accept prior draws whose simulated summaries fall within the tolerance.

    Proposals are generated in fixed-size chunks whose generator streams are
    derived from (seed, chunk index), so results do not depend on how chunks
    are scheduled across workers. With ``target_accepts`` set, sampling stops
    at that many accepts; with ``target_accepts=None`` the whole
    ``max_proposals`` budget is scanned and all accepts are returned.
    """
    s_obs = _observed_summary(model, observed).values
    want = cfg.target_accepts
    acc_theta: list[np.ndarray] = []
    acc_dist: list[float] = []
    n_proposals = 0
    smallest = np.inf
    chunk_index = 0

    while n_proposals < cfg.max_proposals:
        size = min(cfg.chunk_size, cfg.max_proposals - n_proposals)
        rng = rng_from(cfg.seed, _STREAM_REJECTION, chunk_index)
        thetas = model.sample_prior_batch(rng, size)
        summaries = model.simulate_summaries_batch(thetas, rng)
        d = _distances_to_observed(summaries, s_obs, cfg.summary_scale)
        finite = np.isfinite(d)
        if finite.any():
            smallest = min(smallest, float(d[finite].min()))
        keep = finite & (d <= cfg.epsilon)

        if want is not None:
            room = want - len(acc_dist)
            keep_idx = np.flatnonzero(keep)[:room]
            consumed = size if keep_idx.size < room else int(keep_idx[-1]) + 1
        else:
            keep_idx = np.flatnonzero(keep)
            consumed = size
        acc_theta.extend(thetas[keep_idx])
        acc_dist.extend(d[keep_idx])
        n_proposals += consumed
        chunk_index += 1
        if want is not None and len(acc_dist) >= want:
            break

    if want is not None and len(acc_dist) < want:
        raise BudgetExhaustedError(
            f"rejection sampler found {len(acc_dist)}/{want} accepts in "
            f"{n_proposals} proposals at epsilon={cfg.epsilon}; "
            f"smallest distance seen was {smallest:.6g}",
            smallest_distance=smallest,
            attempts=n_proposals,
        )

    theta_arr = np.array(acc_theta) if acc_theta else np.empty((0, model.theta_dim))
    psi = model.psi_of_thetas(theta_arr) if theta_arr.size else np.empty((0, 1))
    return AbcDraws(
        psi_draws=psi,
        distances=np.array(acc_dist),
        acceptance_rate=len(acc_dist) / max(n_proposals, 1),
        n_proposals=n_proposals,
        seed=cfg.seed,
        epsilon=cfg.epsilon,
        sampler="rejection",
        theta_draws=theta_arr,
    )


def _simulate_distance(model, theta, rng, s_obs, scale):
    data = model.simulate(model.point(theta), rng)
    s = model.summarize(data).values
    diff = s - s_obs
    if scale is not None:
        diff = diff / scale
    return float(np.sqrt(np.dot(diff, diff)))


def _init_chain(model, rng, s_obs, scale, cfg):
    if cfg.init_theta is not None:
        # warm start: the starting point is fixed, but its companion dataset
        # still has to land within the tolerance
        theta = np.asarray(cfg.init_theta, dtype=float)
        for attempt in range(1, cfg.max_init_attempts + 1):
            d = _simulate_distance(model, theta, rng, s_obs, scale)
            if np.isfinite(d) and d <= cfg.epsilon:
                return theta, d, attempt - 1
        raise ValueError("init_theta never simulates within the tolerance")
    smallest = np.inf
    for attempt in range(1, cfg.max_init_attempts + 1):
        theta = model.sample_prior(rng).theta
        d = _simulate_distance(model, theta, rng, s_obs, scale)
        if np.isfinite(d):
            smallest = min(smallest, d)
            if d <= cfg.epsilon:
                return theta, d, attempt
    raise BudgetExhaustedError(
        f"chain initialization exhausted {cfg.max_init_attempts} attempts at "
        f"epsilon={cfg.epsilon}; smallest distance seen was {smallest:.6g}",
        smallest_distance=smallest,
        attempts=cfg.max_init_attempts,
    )


def _kernel_scale(model, cfg) -> np.ndarray:
    if cfg.kernel_scale is not None:
        scale = np.asarray(cfg.kernel_scale, dtype=float)
        if scale.size == 1:
            return np.full(model.theta_dim, scale.item())
        if scale.size != model.theta_dim:
            raise ValueError("kernel_scale length does not match parameter dimension")
        return scale
    return 0.1 * np.asarray(model.prior_scale(), dtype=float)


def _abc_mcmc(model, observed, cfg, retry: bool) -> AbcDraws:
    s_obs = _observed_summary(model, observed).values
    scale = None if cfg.summary_scale is None else np.asarray(cfg.summary_scale, float)
    rng = rng_from(cfg.seed, _STREAM_CHAIN)
    step = _kernel_scale(model, cfg)

    theta, dist, init_attempts = _init_chain(model, rng, s_obs, scale, cfg)
    log_prior = model.log_prior_density(theta)

    burn = cfg.effective_burn_in
    kept_theta = np.empty((cfg.chain_length - burn, model.theta_dim))
    kept_dist = np.empty(cfg.chain_length - burn)
    accepted = 0
    proposals = 0

    for t in range(1, cfg.chain_length + 1):
        retries_left = cfg.max_step_retries
        while True:
            proposal = theta + step * rng.standard_normal(model.theta_dim)
            proposals += 1
            lp_prop = model.log_prior_density(proposal)
            if not np.isfinite(lp_prop):
                # zero prior density: the Metropolis ratio is 0, keep the state
                break
            d = _simulate_distance(model, proposal, rng, s_obs, scale)
            if np.isfinite(d) and d <= cfg.epsilon:
                # Metropolis ratio of a symmetric random-walk kernel
                if np.log(rng.random()) < lp_prop - log_prior:
                    theta, dist, log_prior = proposal, d, lp_prop
                    accepted += 1
                break
            if not retry:
                break
            retries_left -= 1
            if retries_left <= 0:
                raise BudgetExhaustedError(
                    f"step {t}: no proposal within epsilon={cfg.epsilon} after "
                    f"{cfg.max_step_retries} retries",
                    smallest_distance=d,
                    attempts=cfg.max_step_retries,
                )
        if t > burn:
            kept_theta[t - burn - 1] = theta
            kept_dist[t - burn - 1] = dist

    return AbcDraws(
        psi_draws=model.psi_of_thetas(kept_theta),
        distances=kept_dist,
        acceptance_rate=accepted / proposals,
        n_proposals=proposals,
        seed=cfg.seed,
        epsilon=cfg.epsilon,
        sampler="mcmc_retry" if retry else "mcmc_movestay",
        init_attempts=init_attempts,
        theta_draws=kept_theta,
    )


def abc_mcmc_movestay(model: GenerativeModel, observed: Dataset, cfg: AbcConfig) -> AbcDraws:
    """Tolerance-gated Metropolis chain that repeats the previous state when
    a proposal fails the distance check."""
    return _abc_mcmc(model, observed, cfg, retry=False)


def abc_mcmc_retry(model: GenerativeModel, observed: Dataset, cfg: AbcConfig) -> AbcDraws:
    """Tolerance-gated Metropolis chain that redraws fresh proposals until one
    passes the distance check, so the chain always moves unless the
    Metropolis ratio rejects."""
    return _abc_mcmc(model, observed, cfg, retry=True)


def quantile_from_distances(distances, q: float) -> float:
    """Order-statistic quantile: smallest distance with rank >= q * N."""
    if not 0.0 < q <= 1.0:
        raise ValueError("quantile must be in (0, 1]")
    d = np.asarray(distances, dtype=float)
    d = d[np.isfinite(d)]
    if d.size == 0:
        raise NumericalError("no finite distances to take a quantile of")
    ranked = np.sort(d)
    k = max(1, int(np.ceil(q * d.size)))
    return float(ranked[k - 1])


def calibrate_tolerance(
    model: GenerativeModel,
    observed: Dataset,
    pilot_n: int,
    q: float,
    seed: int = 0,
    summary_scale=None,
) -> PilotCalibration:
    """Tolerance from the q-quantile of pilot prior-predictive distances.

    The quantile follows the order-statistic convention: the smallest
    recorded distance whose rank is at least q * pilot_n. The full distance
    sample is returned for histogram output.
    """
    if pilot_n < 100:
        raise ValueError("pilot_n must be at least 100")
    if not 0.0 < q < 1.0:
        raise ValueError("quantile must be in (0, 1)")
    s_obs = _observed_summary(model, observed).values
    rng = rng_from(seed, _STREAM_PILOT)
    thetas = model.sample_prior_batch(rng, pilot_n)
    summaries = model.simulate_summaries_batch(thetas, rng)
    d = _distances_to_observed(summaries, s_obs, summary_scale)
    return PilotCalibration(
        epsilon=quantile_from_distances(d, q),
        quantile=q,
        distances=d,
        pilot_n=pilot_n,
        seed=seed,
    )


def prior_psi_sample(model: GenerativeModel, size: int, seed: int) -> np.ndarray:
    """Cheap sample from the marginal prior of the interest parameter."""
    rng = rng_from(seed, _STREAM_PRIOR_PSI)
    thetas = model.sample_prior_batch(rng, size)
    return model.psi_of_thetas(thetas)


def pilot_mad_scale(
    model: GenerativeModel, observed: Dataset, pilot_n: int = 500, seed: int = 0
) -> np.ndarray:
    """Per-component median absolute deviations from a pilot run.

    Feed the result to ``AbcConfig.summary_scale`` to compare summary
    components on a common footing. Off by default everywhere: the reference
    analyses all use the unscaled distance.
    """
    rng = rng_from(seed, _STREAM_PILOT, 1)
    thetas = model.sample_prior_batch(rng, pilot_n)
    summaries = model.simulate_summaries_batch(thetas, rng)
    med = np.median(summaries, axis=0)
    mad = np.median(np.abs(summaries - med[None, :]), axis=0)
    if np.any(mad <= 0) or not np.all(np.isfinite(mad)):
        raise NumericalError("pilot summaries have a degenerate component")
    return mad


def pool_chains(chains: list[AbcDraws]) -> AbcDraws:
    """Pool post-burn-in draws from independent chains run on distinct seeds.

    Chains must share the sampler and tolerance; they may run concurrently
    since each one owns its seed-derived stream.
    """
    if not chains:
        raise ValueError("no chains to pool")
    first = chains[0]
    for c in chains[1:]:
        if c.sampler != first.sampler or c.epsilon != first.epsilon:
            raise ValueError("chains were run with different samplers or tolerances")
    total_prop = sum(c.n_proposals for c in chains)
    accepted = sum(round(c.acceptance_rate * c.n_proposals) for c in chains)
    thetas = [c.theta_draws for c in chains]
    return AbcDraws(
        psi_draws=np.concatenate([c.psi_draws for c in chains]),
        distances=np.concatenate([c.distances for c in chains]),
        acceptance_rate=accepted / total_prop,
        n_proposals=total_prop,
        seed=first.seed,
        epsilon=first.epsilon,
        sampler=first.sampler,
        init_attempts=sum(c.init_attempts or 0 for c in chains),
        theta_draws=None if any(t is None for t in thetas) else np.concatenate(thetas),
    )
