import math

import numpy as np
import pytest
from scipy.special import ndtri
from scipy.stats import kstest

import abcintlik as al
from abcintlik.core import rng_from
from abcintlik.models.gk import (
    GkModel,
    gk_quantile,
    gk_quantile_from_z,
    is_monotone,
    prior_quantile_sample,
    quantile_transform,
)

TRUE = (3.0, 1.0, 2.0, 0.5)


def test_median_is_location_for_random_parameters():
    rng = np.random.default_rng(4)
    for _ in range(1000):
        a, b, g, k = rng.uniform(0.01, 10.0, 4)
        assert gk_quantile(0.5, a, b, g, k, 0.8) == a


def test_reduces_to_standard_normal_quantile():
    u = np.linspace(0.01, 0.99, 99)
    q = gk_quantile(u, 0.0, 1.0, 0.0, 0.0, 0.8)
    assert np.abs(q - ndtri(u)).max() < 1e-9


def test_q975_against_normal_oracle():
    assert gk_quantile(0.975, 0.0, 1.0, 0.0, 0.0, 0.8) == pytest.approx(
        1.959964, abs=1e-5
    )


def test_quantile_domain_errors():
    with pytest.raises(ValueError):
        gk_quantile(0.0, *TRUE)
    with pytest.raises(ValueError):
        gk_quantile(1.2, *TRUE)
    with pytest.raises(ValueError):
        gk_quantile(0.5, 3.0, -1.0, 2.0, 0.5)


def test_quantile_strictly_increasing_on_prior_box():
    rng = np.random.default_rng(5)
    for _ in range(200):
        a, b, g, k = rng.uniform(0.0, 10.0, 4)
        assert is_monotone(a, max(b, 1e-3), g, k, 0.8)


def test_simulate_median_concentrates_at_location():
    model = GkModel(n=100_000)
    data = model.make_observed(TRUE, seed=3)
    assert abs(np.median(data.observations[:, 0]) - 3.0) < 0.02


def test_simulate_normal_case_passes_ks():
    # g = k = 0, A = 0, B = 1 is exactly the standard normal(repeat-3 majority)
    model = GkModel(n=5000)
    wins = 0
    for rep in range(3):
        data = model.simulate(
            model.point(np.array([0.0, 1.0, 0.0, 0.0])), rng_from(60 + rep)
        )
        wins += kstest(data.observations[:, 0], "norm").pvalue > 0.01
    assert wins >= 2


def test_simulate_deterministic():
    model = GkModel(n=500)
    a = model.simulate(model.point(np.array(TRUE)), rng_from(9))
    b = model.simulate(model.point(np.array(TRUE)), rng_from(9))
    assert np.array_equal(a.observations, b.observations)


def test_empirical_cdf_matches_inversion_cdf():
    # oracle: invert Q by bisection at each sorted observation, then compare
    # the implied uniforms with their plotting positions
    model = GkModel(n=100_000)
    data = model.make_observed(TRUE, seed=3)
    x = np.sort(data.observations[:, 0])

    lo = np.full(x.size, 1e-9)
    hi = np.full(x.size, 1 - 1e-9)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        q = gk_quantile(mid, *TRUE, 0.8)
        takes_hi = q < x
        lo = np.where(takes_hi, mid, lo)
        hi = np.where(takes_hi, hi, mid)
    u_implied = 0.5 * (lo + hi)
    positions = (np.arange(1, x.size + 1) - 0.5) / x.size
    ks = np.abs(u_implied - positions).max()
    assert ks < 0.02


def test_summaries_hand_computed_five_points():
    model = GkModel(n=5)
    from abcintlik.core import Dataset

    x = np.array([1.0, 2.0, 4.0, 7.0, 11.0])
    mean = x.mean()
    m2 = ((x - mean) ** 2).mean()
    m3 = ((x - mean) ** 3).mean()
    m4 = ((x - mean) ** 4).mean()
    expected = [mean, math.sqrt(m2), m3 / m2**1.5, m4 / m2**2]
    got = model.summarize(Dataset(x[:, None])).values
    assert np.allclose(got, expected, rtol=1e-12)


def test_summaries_translation_changes_only_mean():
    model = GkModel(n=50)
    x = np.random.default_rng(6).standard_normal(50)
    from abcintlik.core import Dataset

    s0 = model.summarize(Dataset(x[:, None])).values
    s1 = model.summarize(Dataset((x + 11.5)[:, None])).values
    assert s1[0] == pytest.approx(s0[0] + 11.5, rel=1e-12)
    assert np.allclose(s0[1:], s1[1:], rtol=1e-9)


def test_summaries_standard_normal_moments():
    model = GkModel(n=200_000)
    data = model.simulate(model.point(np.array([0.0, 1.0, 0.0, 0.0])), rng_from(8))
    mean, sd, skew, kurt = model.summarize(data).values
    assert abs(mean) < 0.02
    assert abs(sd - 1.0) < 0.02
    assert abs(skew) < 0.05
    assert abs(kurt - 3.0) < 0.1  # raw kurtosis convention: normal gives 3


def test_summaries_degenerate_sample():
    model = GkModel(n=5)
    from abcintlik.core import Dataset

    with pytest.raises(ValueError):
        model.summarize(Dataset(np.ones((5, 1))))


def test_psi_transform_at_median_returns_location_draws():
    model = GkModel(n=100)
    observed = model.make_observed(TRUE, seed=3)
    cfg = al.AbcConfig(epsilon=np.inf, seed=2, target_accepts=200, chunk_size=200)
    draws = al.rejection_abc(model, observed, cfg)
    psi = quantile_transform(draws, 0.5, model.c)
    assert np.array_equal(psi.psi_draws[:, 0], draws.theta_draws[:, 0])


def test_psi_transform_degenerate_draws():
    model = GkModel(n=100)
    observed = model.make_observed(TRUE, seed=3)
    cfg = al.AbcConfig(epsilon=np.inf, seed=2, target_accepts=50, chunk_size=50)
    draws = al.rejection_abc(model, observed, cfg)
    theta = np.tile(np.array(TRUE), (50, 1))
    clone = al.AbcDraws(
        psi_draws=theta, distances=draws.distances[:50], acceptance_rate=1.0,
        n_proposals=50, seed=2, epsilon=np.inf, sampler="rejection",
        theta_draws=theta,
    )
    psi = quantile_transform(clone, 0.25, model.c)
    expected = gk_quantile(0.25, *TRUE, model.c)
    assert np.all(psi.psi_draws[:, 0] == expected)


def test_psi_transform_monotone_in_scale_for_upper_quantile():
    # z(0.9) > 0 and g = 0: the quantile grows with B
    q_small = gk_quantile(0.9, 2.0, 1.0, 0.0, 0.3)
    q_big = gk_quantile(0.9, 2.0, 3.0, 0.0, 0.3)
    assert q_big > q_small


def test_psi_transform_validation():
    model = GkModel(n=100)
    observed = model.make_observed(TRUE, seed=3)
    cfg = al.AbcConfig(epsilon=np.inf, seed=2, target_accepts=10, chunk_size=10)
    draws = al.rejection_abc(model, observed, cfg)
    with pytest.raises(ValueError):
        quantile_transform(draws, 0.0)
    with pytest.raises(ValueError):
        quantile_transform(draws, 1.0)


def test_prior_quantile_sample_deterministic_and_median_is_location():
    model = GkModel(n=100)
    a = prior_quantile_sample(model, 0.5, 500, seed=9)
    b = prior_quantile_sample(model, 0.5, 500, seed=9)
    assert np.array_equal(a, b)
    thetas = al.prior_psi_sample(model, 500, 9)
    assert np.array_equal(a, thetas[:, 0])


def test_gk_quantile_from_z_matches_quantile():
    z = np.array([-1.5, 0.0, 2.0])
    from scipy.special import ndtr

    u = ndtr(z)
    direct = gk_quantile_from_z(z, *TRUE, 0.8)
    via_u = gk_quantile(u, *TRUE, 0.8)
    assert np.allclose(direct, via_u, rtol=1e-9, atol=1e-9)
