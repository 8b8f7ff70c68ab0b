"""Numerical special functions used by the example models: the standard
normal quantile and the Gauss hypergeometric function 2F1(1, s+1/2; 3; z)
evaluated through its Euler integral representation.

The 2F1 argument arising in the matched-pairs model is z = 1 - e^psi, which
leaves the unit disc for psi < -log 2 or psi large, so a power series is not
globally usable. The integral representation converges for every real psi
because its denominator 1 - w z stays positive on (0, 1); it is evaluated
with an adaptive Gauss-Kronrod rule after a substitution that removes the
algebraic endpoint singularity.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from . import backend
from .core import NumericalError

# Gauss 7 / Kronrod 15 nodes and weights on [-1, 1] (positive half; the rule
# is symmetric). Kronrod nodes at odd indices are the Gauss nodes.
_XK = (0.991455371120813, 0.949107912342759, 0.864864423359769,
       0.741531185599394, 0.586087235467691, 0.405845151377397,
       0.207784955007898, 0.000000000000000)
_WK = (0.022935322010529, 0.063092092629979, 0.104790010322250,
       0.140653259715525, 0.169004726639267, 0.190350578064785,
       0.204432940075298, 0.209482141084728)
_WG = (0.129484966168870, 0.279705391489277, 0.381830050505119,
       0.417959183673469)


@dataclass(frozen=True)
class QuadratureSpec:
    """Error control for the adaptive integrator."""

    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_subdivisions: int = 200

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be at least 1")


DEFAULT_QUADRATURE = QuadratureSpec()


def std_normal_quantile(u: float) -> float:
    """Quantile of the standard normal distribution, |error| < 1e-9."""
    if not 0.0 < u < 1.0:
        raise ValueError(f"quantile order must be in (0, 1), got {u}")
    return float(backend.normal_quantile(np.array([float(u)]))[0])


def std_normal_quantile_array(u) -> np.ndarray:
    """Vectorized standard normal quantile over an array in (0, 1)."""
    arr = np.asarray(u, dtype=float)
    if arr.size and (arr.min() <= 0.0 or arr.max() >= 1.0):
        raise ValueError("quantile orders must lie strictly inside (0, 1)")
    return backend.normal_quantile(arr.ravel()).reshape(arr.shape)


def _gk15(f, a, b):
    """Gauss-Kronrod 15-point estimate on [a, b] with an error estimate."""
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    fv = [0.0] * 15
    for i in range(7):
        x = half * _XK[i]
        fv[i] = f(mid - x)
        fv[14 - i] = f(mid + x)
    fv[7] = f(mid)

    resk = _WK[7] * fv[7]
    resg = _WG[3] * fv[7]
    for i in range(7):
        resk += _WK[i] * (fv[i] + fv[14 - i])
    for i in range(3):
        j = 2 * i + 1
        resg += _WG[i] * (fv[j] + fv[14 - j])
    resk *= half
    resg *= half

    # scaled error estimate in the QUADPACK style
    mean = resk / (b - a)
    resasc = _WK[7] * abs(fv[7] - mean)
    for i in range(7):
        resasc += _WK[i] * (abs(fv[i] - mean) + abs(fv[14 - i] - mean))
    resasc *= abs(half)
    err = abs(resk - resg)
    if resasc != 0.0 and err != 0.0:
        err = resasc * min(1.0, (200.0 * err / resasc) ** 1.5)
    return resk, err


def adaptive_quadrature(f, a: float, b: float, spec: QuadratureSpec = DEFAULT_QUADRATURE):
    """Integrate ``f`` over [a, b] by adaptive interval bisection.

    Returns ``(value, error_estimate)``. Raises :class:`NumericalError` when
    the subdivision budget is exhausted before the tolerances are met; the
    exception message reports the tolerance actually achieved.
    """
    value, err = _gk15(f, a, b)
    intervals = [(-err, a, b, value)]
    heapq.heapify(intervals)
    total_err = err
    total_val = value
    for _ in range(spec.max_subdivisions):
        if total_err <= max(spec.abs_tol, spec.rel_tol * abs(total_val)):
            return total_val, total_err
        neg_err, lo, hi, val = heapq.heappop(intervals)
        mid = 0.5 * (lo + hi)
        v1, e1 = _gk15(f, lo, mid)
        v2, e2 = _gk15(f, mid, hi)
        total_val += v1 + v2 - val
        total_err += e1 + e2 + neg_err
        heapq.heappush(intervals, (-e1, lo, mid, v1))
        heapq.heappush(intervals, (-e2, mid, hi, v2))
    if total_err <= max(spec.abs_tol, spec.rel_tol * abs(total_val)):
        return total_val, total_err
    raise NumericalError(
        f"quadrature budget of {spec.max_subdivisions} subdivisions exhausted; "
        f"achieved absolute error estimate {total_err:.3e}"
    )


def _log_beta(p, q):
    return math.lgamma(p) + math.lgamma(q) - math.lgamma(p + q)


def pair_hyp2f1(pair_sum: int, psi: float, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """2F1(1, s + 1/2; 3; 1 - e^psi) for a Bernoulli pair with s successes.

    ``pair_sum`` is the number of successes in the pair, s in {0, 1, 2}. The
    Euler integral has integrand w^(s-1/2) (1-w)^(3/2-s) / (1 - w z) on
    (0, 1); the w = t^2 (s = 0) and w = 1 - t^2 (s = 2) substitutions remove
    the endpoint singularities. The Beta-function normalization is fixed so
    the value at psi = 0 is exactly 1.
    """
    if pair_sum not in (0, 1, 2):
        raise ValueError(f"pair_sum must be 0, 1 or 2, got {pair_sum}")
    if not math.isfinite(psi):
        raise ValueError("psi must be finite")
    z = -math.expm1(psi)  # 1 - e^psi
    if z == 0.0:
        return 1.0

    if pair_sum == 0:
        def f(t):
            t2 = t * t
            return 2.0 * (1.0 - t2) ** 1.5 / (1.0 - t2 * z)
    elif pair_sum == 2:
        def f(t):
            w = 1.0 - t * t
            return 2.0 * w ** 1.5 / (1.0 - w * z)
    else:
        def f(w):
            return math.sqrt(w * (1.0 - w)) / (1.0 - w * z)

    integral, _ = adaptive_quadrature(f, 0.0, 1.0, spec)
    value = integral / math.exp(_log_beta(pair_sum + 0.5, 2.5 - pair_sum))
    if not (value > 0.0 and math.isfinite(value)):
        raise NumericalError(f"hypergeometric evaluation failed at psi={psi}")
    return value


def pair_hyp2f1_series(pair_sum: int, psi: float, terms: int = 200) -> float:
    """Truncated Gauss series of the same function; only valid for |z| < 1.

    Independent check of the quadrature route inside the convergence disc.
    """
    z = -math.expm1(psi)
    if abs(z) >= 1.0:
        raise ValueError("series diverges for |1 - e^psi| >= 1")
    b = pair_sum + 0.5
    total = 1.0
    term = 1.0
    for m in range(terms):
        term *= (1.0 + m) * (b + m) / (3.0 + m) * z / (m + 1.0)
        total += term
        if abs(term) < 1e-17 * abs(total):
            break
    return total
