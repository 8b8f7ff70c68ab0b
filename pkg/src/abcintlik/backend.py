"""Kernel backend selection.

The hot numerical kernels exist twice: a numba-jitted version and a plain
numpy version. The environment variable ``ABCINTLIK_BACKEND`` picks one at
import time:

* ``auto`` (default) - numba when importable, else numpy;
* ``numba``          - require numba, raise if missing;
* ``numpy``          - force the pure-numpy fallback.

``use_backend`` switches at runtime (tests and the benchmark use it).
"""

from __future__ import annotations

import os
from types import ModuleType

from . import _kernels_numpy

_ENV_VAR = "ABCINTLIK_BACKEND"
_KERNEL_NAMES = (
    "kde_density",
    "kde_curvature",
    "gk_quantile_values",
    "moment_summaries",
    "normal_quantile",
)

_active: ModuleType = _kernels_numpy
_active_name = "numpy"


def _load_numba_kernels() -> ModuleType:
    from . import _kernels_numba

    return _kernels_numba


def use_backend(name: str) -> str:
    """Select the kernel backend by name; returns the name actually in use."""
    global _active, _active_name
    name = name.lower()
    if name == "numpy":
        _active, _active_name = _kernels_numpy, "numpy"
    elif name == "numba":
        _active, _active_name = _load_numba_kernels(), "numba"
    elif name == "auto":
        try:
            _active, _active_name = _load_numba_kernels(), "numba"
        except ImportError:
            _active, _active_name = _kernels_numpy, "numpy"
    else:
        raise ValueError(f"unknown backend {name!r}; expected auto, numba or numpy")
    return _active_name


def active_backend() -> str:
    return _active_name


def kernel(name: str):
    """Resolve a kernel function on the active backend at call time."""
    if name not in _KERNEL_NAMES:
        raise KeyError(name)
    return getattr(_active, name)


def kde_density(sample, h, grid):
    return _active.kde_density(sample, h, grid)


def kde_curvature(sample, h, grid):
    return _active.kde_curvature(sample, h, grid)


def gk_quantile_values(z, a, b, g, k, c):
    return _active.gk_quantile_values(z, a, b, g, k, c)


def moment_summaries(x):
    return _active.moment_summaries(x)


def normal_quantile(u):
    return _active.normal_quantile(u)


use_backend(os.environ.get(_ENV_VAR, "auto"))
