"""Independent brute-force oracles used to verify the production paths.

These deliberately avoid the package's kernels and accumulation helpers:
likelihood sums run as explicit Python loops, medians are computed from
sorted lists. np.log/np.exp are used (not math.*) because the production
code evaluates transcendentals through numpy arrays.
"""

import numpy as np

LOG_2PI = float(np.log(2.0 * np.pi))


def exhaustive_theil_sen(times, values):
    """All-pairs slope median via explicit loops and sorted-list medians."""
    t = [float(x) for x in times]
    v = [float(x) for x in values]
    n = len(t)
    slopes = []
    for i in range(n):
        for j in range(i + 1, n):
            slopes.append((v[j] - v[i]) / (t[j] - t[i]))

    def median(xs):
        s = sorted(xs)
        m = len(s) // 2
        if len(s) % 2 == 1:
            return s[m]
        return (s[m - 1] + s[m]) / 2

    slope = median(slopes)
    intercept = median([v[i] - slope * t[i] for i in range(n)])
    return slope, intercept


def naive_trend_log_marginals(
    trends, observed, pool_samples, f, sigma_range, rho_range, n_samples, seed
):
    """Direct double-loop Monte Carlo of the trend marginal likelihoods,
    mirroring the documented draw protocol."""
    trends = np.asarray(trends, dtype=np.float64)
    y = np.asarray(observed, dtype=np.float64)
    pool = np.asarray(pool_samples, dtype=np.float64)
    order = np.lexsort(pool.T[::-1])
    feps = f * pool[order]
    k, n = trends.shape
    p = feps.shape[0]
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, p, size=n_samples)
    sigmas = rng.uniform(sigma_range[0], sigma_range[1], size=n_samples)
    rhos = rng.uniform(rho_range[0], rho_range[1], size=n_samples)
    n1 = n - 1
    out = np.empty(k)
    for i in range(k):
        base = y - trends[i]
        lls = np.empty(n_samples)
        for s in range(n_samples):
            var = sigmas[s] * sigmas[s]
            c = -0.5 * n1 * (LOG_2PI + np.log(var))
            r = base - feps[idx[s]]
            rho = rhos[s]
            ss = 0.0
            for t in range(1, n):
                d = r[t] - rho * r[t - 1]
                ss += d * d
            lls[s] = c - 0.5 * ss / var
        m = np.max(lls)
        out[i] = np.log(np.exp(lls - m).sum()) - np.log(lls.size) + m
    return out


def direct_gaussian_loglik(series, sigma, rho):
    """Sum of per-step Gaussian log densities, written out longhand."""
    total = 0.0
    for t in range(1, len(series)):
        z = (series[t] - rho * series[t - 1]) / sigma
        total += -0.5 * z * z - np.log(sigma) - 0.5 * LOG_2PI
    return total


def reference_lowess(x, y, span, iterations):
    """Plain transliteration of robust locally weighted regression with
    tricube weights and bisquare reweighting, solving each local fit by
    least squares on the design matrix."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = x.size
    k = max(2, min(n, int(span * n)))
    fitted = np.zeros(n)
    delta = np.ones(n)
    windows = []
    lo = 0
    for i in range(n):
        while lo + k < n and x[lo + k] - x[i] < x[i] - x[lo]:
            lo += 1
        windows.append((lo, lo + k))
    for _ in range(iterations + 1):
        for i, (lo, hi) in enumerate(windows):
            xs = x[lo:hi]
            ys = y[lo:hi]
            h = max(x[i] - xs[0], xs[-1] - x[i])
            w = np.clip(1.0 - (np.abs(xs - x[i]) / h) ** 3, 0.0, None) ** 3
            w = w * delta[lo:hi]
            design = np.column_stack([np.ones(xs.size), xs - x[i]])
            sw = np.sqrt(w)
            beta, *_ = np.linalg.lstsq(sw[:, None] * design, sw * ys, rcond=None)
            fitted[i] = beta[0]
        resid = y - fitted
        s = np.median(np.abs(resid))
        if s <= 0:
            break
        rw = np.clip(resid / (6.0 * s), -1.0, 1.0)
        delta = (1.0 - rw * rw) ** 2
    return fitted
