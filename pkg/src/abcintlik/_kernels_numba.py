"""Numba-jitted implementations of the hot numerical kernels.

Importing this module requires numba; the backend selector falls back to
``_kernels_numpy`` when it is absent. Loops are written scalar-style so the
compiled code stays allocation-free inside the inner loops.
"""

import math

import numpy as np
from numba import njit

_SQRT2PI = math.sqrt(2.0 * math.pi)

_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01, -1.328068155288572e+01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00)
_P_LOW = 0.02425


@njit(cache=True)
def kde_density(sample, h, grid):
    m = sample.shape[0]
    out = np.empty(grid.shape[0])
    c = 1.0 / (m * h * _SQRT2PI)
    for i in range(grid.shape[0]):
        acc = 0.0
        for j in range(m):
            u = (grid[i] - sample[j]) / h
            acc += math.exp(-0.5 * u * u)
        out[i] = acc * c
    return out


@njit(cache=True)
def kde_curvature(sample, h, grid):
    m = sample.shape[0]
    out = np.empty(grid.shape[0])
    c = 1.0 / (m * h ** 3 * _SQRT2PI)
    for i in range(grid.shape[0]):
        acc = 0.0
        for j in range(m):
            u = (grid[i] - sample[j]) / h
            acc += math.exp(-0.5 * u * u) * (u * u - 1.0)
        out[i] = acc * c
    return out


@njit(cache=True)
def gk_quantile_values(z, a, b, g, k, c):
    out = np.empty(z.shape[0])
    for i in range(z.shape[0]):
        zi = z[i]
        out[i] = a + b * (1.0 + c * math.tanh(0.5 * g * zi)) * (1.0 + zi * zi) ** k * zi
    return out


@njit(cache=True)
def moment_summaries(x):
    n = x.shape[0]
    s = 0.0
    for i in range(n):
        s += x[i]
    mean = s / n
    m2 = 0.0
    m3 = 0.0
    m4 = 0.0
    for i in range(n):
        d = x[i] - mean
        d2 = d * d
        m2 += d2
        m3 += d2 * d
        m4 += d2 * d2
    m2 /= n
    m3 /= n
    m4 /= n
    out = np.empty(4)
    out[0] = mean
    out[1] = math.sqrt(m2)
    out[2] = m3 / m2 ** 1.5
    out[3] = m4 / (m2 * m2)
    return out


@njit(cache=True)
def _nq_scalar(u):
    if u < _P_LOW:
        q = math.sqrt(-2.0 * math.log(u))
        num = ((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]
        den = (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
        x = num / den
    elif u > 1.0 - _P_LOW:
        q = math.sqrt(-2.0 * math.log(1.0 - u))
        num = ((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]
        den = (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
        x = -num / den
    else:
        q = u - 0.5
        r = q * q
        num = ((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]
        den = ((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0
        x = num * q / den
    e = 0.5 * math.erfc(-x / math.sqrt(2.0)) - u
    w = e * _SQRT2PI * math.exp(0.5 * x * x)
    return x - w / (1.0 + 0.5 * x * w)


@njit(cache=True)
def normal_quantile(u):
    out = np.empty(u.shape[0])
    for i in range(u.shape[0]):
        out[i] = _nq_scalar(u[i])
    return out
