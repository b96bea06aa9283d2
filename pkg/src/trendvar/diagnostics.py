"""Adequacy checks: trend-weight/variability independence and AR(1) spectra.

The independence check correlates each pseudo-truth row of trend weights
with the ensemble's variability summaries; correlations at or above 0.5 in
magnitude flag the combination assumption. The spectral check compares a
series' periodogram against the percentile envelope of periodograms from
an AR(1) fit, reporting the fraction of ordinates inside.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ar1 import ar1_mle, ar1_simulate_batch, periodogram
from .errors import InputError
from .var_weight import VariabilitySummaries

INDEPENDENCE_THRESHOLD = 0.5


@dataclass(frozen=True)
class IndependenceReport:
    r_sigma: np.ndarray  # per pseudo-truth row; nan where undefined
    r_rho: np.ndarray
    flagged: bool


@dataclass(frozen=True)
class EnvelopeReport:
    fraction_inside: float
    frequencies: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    observed: np.ndarray


def _rank(x: np.ndarray) -> np.ndarray:
    order = np.argsort(x, kind="stable")
    ranks = np.empty(x.size)
    ranks[order] = np.arange(x.size, dtype=np.float64)
    return ranks


def _corr(weights_row: np.ndarray, stat: np.ndarray, method: str) -> float:
    if method == "spearman":
        weights_row, stat = _rank(weights_row), _rank(stat)
    elif method != "pearson":
        raise InputError(f"unknown method {method!r}; use 'pearson' or 'spearman'")
    if weights_row.std() == 0.0 or stat.std() == 0.0:
        return float("nan")
    return float(np.corrcoef(weights_row, stat)[0, 1])


def independence_diagnostic(
    trend_weight_matrix: np.ndarray,
    summaries: VariabilitySummaries,
    method: str = "pearson",
) -> IndependenceReport:
    """Correlate per-truth trend weights with variability summaries.

    Rows with zero weight variance yield undefined correlations (nan) and
    are excluded from the flag.
    """
    w = np.asarray(trend_weight_matrix, dtype=np.float64)
    if w.ndim != 2 or w.shape[1] != summaries.k:
        raise InputError(
            f"weight matrix must have {summaries.k} columns, got shape {w.shape}"
        )
    if summaries.k < 4:
        raise InputError("independence check needs at least 4 models")
    sig = summaries.sigmas
    rho = summaries.rhos
    r_sigma = np.array([_corr(row, sig, method) for row in w])
    r_rho = np.array([_corr(row, rho, method) for row in w])
    finite = np.concatenate([r_sigma[~np.isnan(r_sigma)], r_rho[~np.isnan(r_rho)]])
    flagged = bool(np.any(np.abs(finite) >= INDEPENDENCE_THRESHOLD))
    return IndependenceReport(r_sigma=r_sigma, r_rho=r_rho, flagged=flagged)


def spectrum_envelope_check(
    anomalies: np.ndarray,
    n_realizations: int = 1000,
    rng_seed=0,
    percentiles: tuple[float, float] = (5.0, 95.0),
) -> EnvelopeReport:
    """Fraction of the observed periodogram inside the AR(1) envelope.

    Fits AR(1) parameters to the anomalies, simulates ``n_realizations``
    series of the same length, and builds the per-frequency percentile
    envelope of their periodograms. "Inside" is the closed interval.
    """
    a = np.asarray(anomalies, dtype=np.float64)
    if a.size < 16:
        raise InputError(f"need at least 16 values, got {a.size}")
    if not (0.0 <= percentiles[0] < percentiles[1] <= 100.0):
        raise InputError(f"bad percentile pair {percentiles}")
    params = ar1_mle(a)
    freqs, observed = periodogram(a)
    rng = np.random.default_rng(rng_seed)
    sims = ar1_simulate_batch(params, a.size, n_realizations, rng)
    powers = np.empty((n_realizations, freqs.size))
    for r in range(n_realizations):
        powers[r] = periodogram(sims[r])[1]
    lower = np.percentile(powers, percentiles[0], axis=0)
    upper = np.percentile(powers, percentiles[1], axis=0)
    inside = (observed >= lower) & (observed <= upper)
    return EnvelopeReport(
        fraction_inside=float(inside.mean()),
        frequencies=freqs,
        lower=lower,
        upper=upper,
        observed=observed,
    )
