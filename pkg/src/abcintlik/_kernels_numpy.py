"""Pure-numpy implementations of the hot numerical kernels.

Reference backend: always available, used when numba is missing or when
``ABCINTLIK_BACKEND=numpy`` is set. Function signatures and semantics match
``_kernels_numba`` one for one.
"""

import numpy as np
from scipy.special import erfc

_SQRT2PI = np.sqrt(2.0 * np.pi)

# Acklam's rational approximation of the standard normal quantile, refined
# below by one Halley step so the absolute error is far under 1e-9.
_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01, -1.328068155288572e+01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00)
_P_LOW = 0.02425


def kde_density(sample, h, grid):
    """Gaussian-kernel density of ``sample`` with bandwidth ``h`` at ``grid``."""
    m = sample.shape[0]
    out = np.empty(grid.shape[0])
    c = 1.0 / (m * h * _SQRT2PI)
    for i in range(grid.shape[0]):
        u = (grid[i] - sample) / h
        out[i] = np.exp(-0.5 * u * u).sum() * c
    return out


def kde_curvature(sample, h, grid):
    """Second derivative of the Gaussian KDE, from the kernel sum itself."""
    m = sample.shape[0]
    out = np.empty(grid.shape[0])
    c = 1.0 / (m * h ** 3 * _SQRT2PI)
    for i in range(grid.shape[0]):
        u = (grid[i] - sample) / h
        out[i] = (np.exp(-0.5 * u * u) * (u * u - 1.0)).sum() * c
    return out


def gk_quantile_values(z, a, b, g, k, c):
    """Quantile-function values of the g-and-k family at normal quantiles ``z``.

    The skewness factor (1 - exp(-g z))/(1 + exp(-g z)) is evaluated as
    tanh(g z / 2), which is the same function without overflow for large g z.
    """
    return a + b * (1.0 + c * np.tanh(0.5 * g * z)) * (1.0 + z * z) ** k * z


def moment_summaries(x):
    """(mean, sd, skewness, kurtosis) with divisor-n central moments.

    Kurtosis is the raw m4/m2^2 (normal data gives 3, not 0).
    """
    n = x.shape[0]
    mean = x.sum() / n
    d = x - mean
    m2 = (d * d).sum() / n
    m3 = (d * d * d).sum() / n
    m4 = (d * d * d * d).sum() / n
    sd = np.sqrt(m2)
    return np.array([mean, sd, m3 / m2 ** 1.5, m4 / (m2 * m2)])


def normal_quantile(u):
    """Standard normal quantile, elementwise, |error| well below 1e-9."""
    u = np.asarray(u, dtype=float)
    x = np.empty_like(u)

    lo = u < _P_LOW
    hi = u > 1.0 - _P_LOW
    mid = ~(lo | hi)

    if np.any(mid):
        q = u[mid] - 0.5
        r = q * q
        num = ((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]
        den = ((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0
        x[mid] = num * q / den
    if np.any(lo):
        q = np.sqrt(-2.0 * np.log(u[lo]))
        num = ((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]
        den = (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
        x[lo] = num / den
    if np.any(hi):
        q = np.sqrt(-2.0 * np.log(1.0 - u[hi]))
        num = ((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]
        den = (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
        x[hi] = -num / den

    # one Halley refinement against the exact normal CDF
    e = 0.5 * erfc(-x / np.sqrt(2.0)) - u
    w = e * _SQRT2PI * np.exp(0.5 * x * x)
    return x - w / (1.0 + 0.5 * x * w)
