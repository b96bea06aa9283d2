#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Times the two hot quadratic-sum kernels on weighting-sized workloads and
verifies the outputs are bit-identical. The same comparison applies to a
full run via the env flag: TRENDVAR_BACKEND=numpy disables numba.
"""

import time

import numpy as np

from trendvar._backend import (
    fixed_quad_sums_numba,
    fixed_quad_sums_numpy,
    pooled_quad_sums_numba,
    pooled_quad_sums_numpy,
)


def timeit(fn, *args, repeat=5):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return out, best


def bench_pooled(k=25, n=125, n_samples=100_000, seed=0):
    rng = np.random.default_rng(seed)
    pool = rng.normal(0.0, 1.0, (k, n))
    idx = rng.integers(0, k, n_samples)
    rhos = rng.uniform(-1.0, 1.0, n_samples)
    print(f"\npooled_quad_sums: pool {k}x{n}, {n_samples} samples")
    out_np, t_np = timeit(pooled_quad_sums_numpy, pool, idx, rhos)
    if pooled_quad_sums_numba is None:
        print(f"  numpy {t_np*1e3:8.2f} ms   (numba unavailable)")
        return
    pooled_quad_sums_numba(pool, idx[:16], rhos[:16])  # JIT warmup
    out_nb, t_nb = timeit(pooled_quad_sums_numba, pool, idx, rhos)
    match = np.array_equal(out_np, out_nb)
    print(f"  numpy {t_np*1e3:8.2f} ms")
    print(f"  numba {t_nb*1e3:8.2f} ms   speedup {t_np/t_nb:5.1f}x   bit-identical: {match}")
    if not match:
        raise SystemExit("backend outputs diverged")


def bench_fixed(n=125, n_samples=100_000, seed=0):
    rng = np.random.default_rng(seed)
    series = rng.normal(0.0, 1.0, n)
    rhos = rng.uniform(-1.0, 1.0, n_samples)
    print(f"\nfixed_quad_sums: series length {n}, {n_samples} samples")
    out_np, t_np = timeit(fixed_quad_sums_numpy, series, rhos)
    if fixed_quad_sums_numba is None:
        print(f"  numpy {t_np*1e3:8.2f} ms   (numba unavailable)")
        return
    fixed_quad_sums_numba(series, rhos[:16])
    out_nb, t_nb = timeit(fixed_quad_sums_numba, series, rhos)
    match = np.array_equal(out_np, out_nb)
    print(f"  numpy {t_np*1e3:8.2f} ms")
    print(f"  numba {t_nb*1e3:8.2f} ms   speedup {t_np/t_nb:5.1f}x   bit-identical: {match}")
    if not match:
        raise SystemExit("backend outputs diverged")


if __name__ == "__main__":
    print("kernel benchmark (numba vs pure numpy)")
    bench_pooled()
    bench_pooled(k=13, n=66, n_samples=100_000)
    bench_fixed()
    bench_fixed(n=33, n_samples=10_000)
