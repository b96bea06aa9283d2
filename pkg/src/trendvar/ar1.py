"""AR(1) (red noise) estimation, likelihood, simulation, and spectra.

The likelihood throughout is the conditional one (conditioned on the first
observation): sum over t >= 2 of log N(a_t; rho * a_{t-1}, sigma^2). It has
a closed-form maximizer and matches the lag-1 recursion of the anomaly
model literally.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegeneracyError, InputError

_LOG_2PI = float(np.log(2.0 * np.pi))
_RHO_LIMIT = 1.0 - 1e-9  # stationarity guard for the closed-form estimate


@dataclass(frozen=True)
class Ar1Params:
    """Innovation standard deviation and lag-1 autocorrelation."""

    sigma: float
    rho: float

    def __post_init__(self):
        if not (self.sigma > 0.0):
            raise InputError(f"sigma must be positive, got {self.sigma}")
        if not (abs(self.rho) < 1.0):
            raise InputError(f"|rho| must be below 1, got {self.rho}")


def ar1_conditional_loglik(anomalies: np.ndarray, params: Ar1Params) -> float:
    """Log-likelihood of the series conditional on its first value."""
    a = np.asarray(anomalies, dtype=np.float64)
    if a.size < 2:
        raise InputError(f"need at least 2 values, got {a.size}")
    var = params.sigma * params.sigma
    innov = a[1:] - params.rho * a[:-1]
    n1 = a.size - 1
    return float(
        -0.5 * n1 * (_LOG_2PI + np.log(var)) - 0.5 * np.dot(innov, innov) / var
    )


def ar1_mle(anomalies: np.ndarray) -> Ar1Params:
    """Maximum-likelihood (sigma, rho) under the conditional likelihood.

    rho is the lag-1 least-squares regression coefficient of a_t on
    a_{t-1} (clipped into the stationary region), sigma the root mean
    square of the implied innovations.
    """
    a = np.asarray(anomalies, dtype=np.float64)
    if a.size < 4:
        raise InputError(f"need at least 4 values, got {a.size}")
    if a.std() == 0.0:
        raise DegeneracyError("zero-variance series has no AR(1) estimate")
    denom = np.dot(a[:-1], a[:-1])
    if denom == 0.0:
        raise DegeneracyError("degenerate series: zero lagged energy")
    rho = float(np.dot(a[1:], a[:-1]) / denom)
    rho = min(max(rho, -_RHO_LIMIT), _RHO_LIMIT)
    innov = a[1:] - rho * a[:-1]
    sigma = float(np.sqrt(np.dot(innov, innov) / innov.size))
    if sigma == 0.0:
        raise DegeneracyError("degenerate series: zero innovation variance")
    return Ar1Params(sigma=sigma, rho=rho)


def ar1_simulate(params: Ar1Params, n: int, rng_seed) -> np.ndarray:
    """Simulate one AR(1) path of length n with a stationary start.

    x_1 ~ N(0, sigma^2 / (1 - rho^2)), x_t = rho x_{t-1} + N(0, sigma^2).
    Deterministic given the seed (an int, SeedSequence, or Generator).
    """
    if n < 1:
        raise InputError(f"n must be positive, got {n}")
    return ar1_simulate_batch(params, n, 1, np.random.default_rng(rng_seed))[0]


def ar1_simulate_batch(
    params: Ar1Params, n: int, n_series: int, rng: np.random.Generator
) -> np.ndarray:
    """Simulate ``n_series`` independent AR(1) paths as an (n_series, n) array."""
    sigma, rho = params.sigma, params.rho
    out = np.empty((n_series, n))
    stat_sd = sigma / np.sqrt(1.0 - rho * rho)
    out[:, 0] = rng.normal(0.0, stat_sd, size=n_series)
    if n > 1:
        eps = rng.normal(0.0, sigma, size=(n_series, n - 1))
        for t in range(1, n):
            out[:, t] = rho * out[:, t - 1] + eps[:, t - 1]
    return out


def periodogram(series: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Discrete periodogram of the mean-removed series.

    Frequencies are the Fourier frequencies 1/n .. 1/2; powers are
    normalized so that their sum equals the sample variance (Parseval).
    """
    z = np.asarray(series, dtype=np.float64)
    n = z.size
    if n < 8:
        raise InputError(f"need at least 8 values, got {n}")
    z = z - z.mean()
    spec = np.fft.rfft(z)
    amp2 = np.abs(spec[1:]) ** 2
    powers = 2.0 * amp2 / (n * n)
    if n % 2 == 0:
        powers[-1] = amp2[-1] / (n * n)  # Nyquist bin appears once
    freqs = np.arange(1, n // 2 + 1) / n
    return freqs, powers


def ar1_spectral_density(params: Ar1Params, freqs: np.ndarray) -> np.ndarray:
    """Theoretical AR(1) spectrum on the periodogram's normalization
    (summing to the stationary variance over the positive frequencies)."""
    rho, sigma = params.rho, params.sigma
    shape = 1.0 / (1.0 + rho * rho - 2.0 * rho * np.cos(2.0 * np.pi * freqs))
    var = sigma * sigma / (1.0 - rho * rho)
    return var * shape / shape.sum()
