#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Runs every hot kernel on representative workloads under both backends and
prints a timing table plus the worst relative disagreement. Usage:

    python benchmarks/bench_backends.py [--repeats 5]
"""

import argparse
import time

import numpy as np

from abcintlik import _kernels_numpy

try:
    from abcintlik import _kernels_numba

    BACKENDS = {"numpy": _kernels_numpy, "numba": _kernels_numba}
except ImportError:
    BACKENDS = {"numpy": _kernels_numpy}


def workloads():
    rng = np.random.default_rng(0)
    sample = rng.standard_normal(100_000)
    grid = np.linspace(-4.0, 4.0, 512)
    u = rng.uniform(1e-9, 1 - 1e-9, 1_000_000)
    z = rng.standard_normal(1_000_000)
    x = rng.standard_normal(1_000_000)
    return [
        ("kde_density (1e5 sample x 512 grid)", "kde_density", (sample, 0.1, grid)),
        ("kde_curvature (1e5 x 512)", "kde_curvature", (sample, 0.1, grid)),
        ("gk_quantile_values (1e6)", "gk_quantile_values", (z, 3.0, 1.0, 2.0, 0.5, 0.8)),
        ("moment_summaries (1e6)", "moment_summaries", (x,)),
        ("normal_quantile (1e6)", "normal_quantile", (u,)),
    ]


def time_call(fn, args, repeats):
    fn(*args)  # warm-up (and JIT compile on the numba side)
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    print(f"backends: {', '.join(BACKENDS)}")
    header = f"{'kernel':42s}" + "".join(f"{name:>12s}" for name in BACKENDS)
    if len(BACKENDS) > 1:
        header += f"{'speedup':>10s}{'max rel diff':>14s}"
    print(header)
    print("-" * len(header))

    for label, name, call_args in workloads():
        times = {}
        results = {}
        for backend_name, module in BACKENDS.items():
            fn = getattr(module, name)
            times[backend_name] = time_call(fn, call_args, args.repeats)
            results[backend_name] = np.asarray(fn(*call_args))
        row = f"{label:42s}" + "".join(
            f"{times[b] * 1e3:10.2f}ms" for b in BACKENDS
        )
        if len(BACKENDS) > 1:
            speedup = times["numpy"] / times["numba"]
            denom = np.maximum(np.abs(results["numpy"]), 1e-300)
            rel = np.abs(results["numpy"] - results["numba"]) / denom
            row += f"{speedup:9.1f}x{rel.max():14.2e}"
        print(row)


if __name__ == "__main__":
    main()
