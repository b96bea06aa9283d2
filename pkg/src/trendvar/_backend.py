"""Hot numeric kernels, with numba-compiled and pure-numpy variants.

The kernels compute only the AR(1) quadratic-form accumulations
``ss_s = sum_t (r_t - rho_s * r_{t-1})^2``; every transcendental (log, exp)
stays in shared numpy code upstream. Both variants accumulate the time
dimension in the same sequential order, so their outputs are bit-identical
(the numpy variant vectorizes across samples, which does not change the
per-sample IEEE operation sequence). ``benchmarks/bench_kernels.py`` times
one against the other.

Backend selection: set ``TRENDVAR_BACKEND=numpy`` to force the pure-numpy
path; anything else (default) uses numba when importable.
"""

from __future__ import annotations

import os

import numpy as np

_ENV_VAR = "TRENDVAR_BACKEND"
_CHUNK = 16384  # samples per gather chunk in the numpy path; keeps temporaries small


def _numba_requested() -> bool:
    return os.environ.get(_ENV_VAR, "numba").strip().lower() != "numpy"


def _numba_available() -> bool:
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


def pooled_quad_sums_numpy(resid_pool, idx, rhos):
    """Quadratic AR(1) residual sums for pool-indexed samples, numpy path.

    resid_pool : (p, n) residual series, one row per pool entry
    idx        : (ns,) pool row index per sample
    rhos       : (ns,) lag-1 coefficient per sample
    returns    : (ns,) sum over t of (r[t] - rho*r[t-1])**2
    """
    ns = idx.shape[0]
    n = resid_pool.shape[1]
    out = np.empty(ns)
    for start in range(0, ns, _CHUNK):
        stop = min(start + _CHUNK, ns)
        r = resid_pool[idx[start:stop]]
        rho = rhos[start:stop]
        ss = np.zeros(stop - start)
        for t in range(1, n):
            d = r[:, t] - rho * r[:, t - 1]
            ss += d * d
        out[start:stop] = ss
    return out


def fixed_quad_sums_numpy(series, rhos):
    """Quadratic AR(1) sums of one fixed series under many rho values."""
    n = series.shape[0]
    ss = np.zeros(rhos.shape[0])
    for t in range(1, n):
        d = series[t] - rhos * series[t - 1]
        ss += d * d
    return ss


if _numba_available():
    from numba import njit

    @njit(cache=True)
    def pooled_quad_sums_numba(resid_pool, idx, rhos):
        ns = idx.shape[0]
        n = resid_pool.shape[1]
        out = np.empty(ns)
        for s in range(ns):
            r = resid_pool[idx[s]]
            rho = rhos[s]
            ss = 0.0
            for t in range(1, n):
                d = r[t] - rho * r[t - 1]
                ss += d * d
            out[s] = ss
        return out

    @njit(cache=True)
    def fixed_quad_sums_numba(series, rhos):
        ns = rhos.shape[0]
        n = series.shape[0]
        out = np.empty(ns)
        for s in range(ns):
            rho = rhos[s]
            ss = 0.0
            for t in range(1, n):
                d = series[t] - rho * series[t - 1]
                ss += d * d
            out[s] = ss
        return out

else:
    pooled_quad_sums_numba = None
    fixed_quad_sums_numba = None


USING_NUMBA = _numba_requested() and pooled_quad_sums_numba is not None

if USING_NUMBA:
    pooled_quad_sums = pooled_quad_sums_numba
    fixed_quad_sums = fixed_quad_sums_numba
else:
    pooled_quad_sums = pooled_quad_sums_numpy
    fixed_quad_sums = fixed_quad_sums_numpy


def backend_name() -> str:
    return "numba" if USING_NUMBA else "numpy"
