import math

import numpy as np
import pytest
from scipy.optimize import brentq
from scipy.special import hyp2f1 as scipy_hyp2f1

from abcintlik.core import NumericalError
from abcintlik.special import (
    DEFAULT_QUADRATURE,
    QuadratureSpec,
    adaptive_quadrature,
    pair_hyp2f1,
    pair_hyp2f1_series,
    std_normal_quantile,
    std_normal_quantile_array,
)


def normal_cdf(x):
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def test_quantile_median_is_zero():
    assert std_normal_quantile(0.5) == 0.0


def test_quantile_antisymmetry():
    for u in (0.01, 0.2, 0.4, 0.77, 0.995):
        assert std_normal_quantile(1 - u) == pytest.approx(-std_normal_quantile(u), abs=1e-12)


def test_quantile_0975_against_root_solve():
    # oracle: solve Phi(z) = 0.975 with a bracketing root finder on erfc
    oracle = brentq(lambda z: normal_cdf(z) - 0.975, 0.0, 10.0, xtol=1e-13)
    assert std_normal_quantile(0.975) == pytest.approx(oracle, abs=1e-5)
    assert abs(std_normal_quantile(0.975) - 1.959964) < 1e-5


def test_quantile_cdf_roundtrip_identity():
    grid = np.linspace(1e-4, 1 - 1e-4, 501)
    z = std_normal_quantile_array(grid)
    back = 0.5 * np.array([math.erfc(-v / math.sqrt(2)) for v in z])
    assert np.abs(back - grid).max() < 1e-9


def test_quantile_domain_errors():
    for bad in (0.0, 1.0, -0.3, 1.7):
        with pytest.raises(ValueError):
            std_normal_quantile(bad)
    with pytest.raises(ValueError):
        std_normal_quantile_array(np.array([0.5, 1.0]))


def test_quadrature_polynomial_exact():
    value, err = adaptive_quadrature(lambda x: x * x, 0.0, 1.0)
    assert value == pytest.approx(1.0 / 3.0, abs=1e-14)
    assert err < 1e-12


def test_quadrature_integrable_singularity():
    value, _ = adaptive_quadrature(lambda x: 1.0 / math.sqrt(x), 1e-300, 1.0)
    assert value == pytest.approx(2.0, rel=1e-8)


def test_quadrature_budget_exhaustion_reports_achieved_error():
    spec = QuadratureSpec(abs_tol=1e-15, rel_tol=1e-15, max_subdivisions=3)
    with pytest.raises(NumericalError, match="achieved"):
        adaptive_quadrature(lambda x: math.sin(50 * x) / math.sqrt(x + 1e-12), 0.0, 1.0, spec)


def test_quadrature_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(abs_tol=0.0)
    with pytest.raises(ValueError):
        QuadratureSpec(max_subdivisions=0)


def test_hyp2f1_at_psi_zero_is_exactly_one():
    for s in (0, 1, 2):
        assert pair_hyp2f1(s, 0.0) == 1.0


def test_hyp2f1_invalid_pair_sum():
    with pytest.raises(ValueError):
        pair_hyp2f1(3, 0.5)
    with pytest.raises(ValueError):
        pair_hyp2f1(0, math.inf)


def test_hyp2f1_matches_series_inside_disc():
    # 100 random points with |1 - e^psi| < 0.5; agreement to 1e-8
    rng = np.random.default_rng(21)
    count = 0
    while count < 100:
        psi = rng.uniform(-0.6, 0.6)
        if abs(1 - math.exp(psi)) >= 0.5:
            continue
        s = int(rng.integers(0, 3))
        quad = pair_hyp2f1(s, psi)
        series = pair_hyp2f1_series(s, psi)
        assert abs(quad - series) < 1e-8, (s, psi)
        count += 1


def test_hyp2f1_matches_scipy_outside_disc():
    for s in (0, 1, 2):
        for psi in (-9.0, -2.0, -0.8, 1.5, 4.0, 9.0):
            z = 1.0 - math.exp(psi)
            ref = scipy_hyp2f1(1.0, s + 0.5, 3.0, z)
            assert pair_hyp2f1(s, psi) == pytest.approx(ref, rel=1e-9), (s, psi)


def test_hyp2f1_positive_and_continuous_scan():
    # no sign changes, no non-finite values, small increments over [-10, 10]
    grid = np.linspace(-10, 10, 401)
    for s in (0, 1, 2):
        vals = np.array([pair_hyp2f1(s, p) for p in grid])
        assert np.all(np.isfinite(vals))
        assert np.all(vals > 0)
        rel_step = np.abs(np.diff(np.log(vals)))
        assert rel_step.max() < 0.25


def test_hyp2f1_continuity_under_shrinking_steps():
    # includes psi < -log 2 where z = 1 - e^psi leaves the series disc
    for psi0 in (-5.0, -1.5, 0.7, 3.0):
        for s in (0, 1, 2):
            base = pair_hyp2f1(s, psi0)
            gaps = [abs(pair_hyp2f1(s, psi0 + delta) - base) for delta in (1e-2, 1e-4, 1e-6)]
            assert gaps[0] > gaps[1] > gaps[2] or gaps[2] < 1e-10


def test_quadrature_vs_series_random_pairs():
    rng = np.random.default_rng(33)
    for _ in range(100):
        s = int(rng.integers(0, 3))
        # psi mapped from z uniform in (-0.95, 0.95), inside the disc
        z = rng.uniform(-0.95, 0.95)
        psi = math.log(1.0 - z)
        assert pair_hyp2f1(s, psi) == pytest.approx(
            pair_hyp2f1_series(s, psi), abs=1e-8
        )
