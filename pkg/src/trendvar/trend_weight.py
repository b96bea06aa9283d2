"""Trend submodel weighting by Monte Carlo marginal likelihood.

Each model's trend is scored against the raw observed series under a
hierarchical model: observations = model trend + scaled discrepancy drawn
from next-closest inter-model trend differences + AR(1) noise with
parameters drawn from a uniform prior box. The marginal likelihood is a
plain Monte Carlo average of the AR(1) conditional likelihood over shared
draws of (discrepancy, sigma, rho).

Draw protocol (mirrored by the brute-force reference in the test suite):
with ``rng = np.random.default_rng(rng_seed)`` and the pool rows in
lexicographic order, draw in sequence ``idx = rng.integers(0, p, n)``,
``sigma = rng.uniform(*sigma_range, n)``, ``rho = rng.uniform(*rho_range, n)``.
One draw set is shared by every model, which makes the weights exactly
symmetric under model permutation and exactly uniform for identical models.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._backend import pooled_quad_sums
from .errors import InputError
from .model_weights import WeightVector, log_mean_exp, normalize_log_weights
from .series import TimeSeries

_LOG_2PI = float(np.log(2.0 * np.pi))


@dataclass(frozen=True)
class EnsembleTrends:
    """Calibration-period trend vectors, one row per model."""

    model_ids: tuple[str, ...]
    trends: np.ndarray

    def __post_init__(self):
        trends = np.asarray(self.trends, dtype=np.float64)
        object.__setattr__(self, "trends", trends)
        object.__setattr__(self, "model_ids", tuple(str(m) for m in self.model_ids))
        if trends.ndim != 2:
            raise InputError("trends must be a (k, n) array")
        k = trends.shape[0]
        if k < 2:
            raise InputError(f"need at least 2 models, got {k}")
        if len(self.model_ids) != k:
            raise InputError(
                f"{len(self.model_ids)} model ids for {k} trend vectors"
            )
        if len(set(self.model_ids)) != k:
            raise InputError("model ids must be unique")
        if not np.all(np.isfinite(trends)):
            raise InputError("trends contain non-finite values")

    @property
    def k(self) -> int:
        return self.trends.shape[0]


@dataclass(frozen=True)
class DiscrepancyPool:
    """Unscaled trend-error samples: each model's trend minus its
    next-closest other trend, in model order."""

    samples: np.ndarray
    source_pairs: tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class TrendPrior:
    """Uniform prior box for the AR(1) noise parameters plus model priors."""

    sigma_range: tuple[float, float] = (0.0, 5.0)
    rho_range: tuple[float, float] = (-1.0, 1.0)
    model_priors: np.ndarray | None = None

    def __post_init__(self):
        if not (self.sigma_range[1] > self.sigma_range[0] >= 0.0):
            raise InputError(f"bad sigma range {self.sigma_range}")
        if not (1.0 >= self.rho_range[1] > self.rho_range[0] >= -1.0):
            raise InputError(f"bad rho range {self.rho_range}")
        if self.model_priors is not None:
            p = np.asarray(self.model_priors, dtype=np.float64)
            object.__setattr__(self, "model_priors", p)
            if np.any(p < 0.0) or abs(float(p.sum()) - 1.0) > 1e-9:
                raise InputError("model priors must be nonnegative and sum to 1")


def _closest_index(vectors: np.ndarray, metric: str) -> np.ndarray:
    """Index of each row's nearest other row; ties go to the lowest index."""
    k = vectors.shape[0]
    diff = vectors[:, None, :] - vectors[None, :, :]
    if metric == "l1":
        dist = np.abs(diff).sum(axis=2)
    elif metric == "l2":
        dist = np.sqrt((diff * diff).sum(axis=2))
    else:
        raise InputError(f"unknown metric {metric!r}; use 'l1' or 'l2'")
    np.fill_diagonal(dist, np.inf)
    return dist.argmin(axis=1)


def build_discrepancy_pool(
    trends: EnsembleTrends, metric: str = "l1"
) -> DiscrepancyPool:
    """Trend-error pool from next-closest inter-model differences."""
    closest = _closest_index(trends.trends, metric)
    samples = trends.trends - trends.trends[closest]
    pairs = tuple(
        (trends.model_ids[i], trends.model_ids[int(closest[i])])
        for i in range(trends.k)
    )
    return DiscrepancyPool(samples=samples, source_pairs=pairs)


def _canonical_rows(samples: np.ndarray) -> np.ndarray:
    """Rows sorted lexicographically by leading columns, so that the pool
    presented to the sampler does not depend on model ordering."""
    order = np.lexsort(samples.T[::-1])
    return samples[order]


def trend_log_marginals(
    trends: EnsembleTrends,
    observed_values: np.ndarray,
    pool: DiscrepancyPool,
    f: float,
    prior: TrendPrior,
    n_samples: int,
    rng_seed,
) -> np.ndarray:
    """Log Monte Carlo marginal likelihood per model (shared draws)."""
    y = np.asarray(observed_values, dtype=np.float64)
    n = y.size
    if n != trends.trends.shape[1]:
        raise InputError(
            f"observation length {n} does not match trend length "
            f"{trends.trends.shape[1]}"
        )
    if n_samples < 1:
        raise InputError("n_samples must be positive")
    if f < 0.0:
        raise InputError(f"f must be nonnegative, got {f}")
    rng = np.random.default_rng(rng_seed)
    feps = f * _canonical_rows(pool.samples)
    p = feps.shape[0]
    idx = rng.integers(0, p, size=n_samples)
    sigmas = rng.uniform(prior.sigma_range[0], prior.sigma_range[1], size=n_samples)
    rhos = rng.uniform(prior.rho_range[0], prior.rho_range[1], size=n_samples)
    variances = sigmas * sigmas
    n1 = n - 1
    log_norm = -0.5 * n1 * (_LOG_2PI + np.log(variances))
    out = np.empty(trends.k)
    for i in range(trends.k):
        resid_pool = (y - trends.trends[i]) - feps
        ss = pooled_quad_sums(resid_pool, idx, rhos)
        out[i] = log_mean_exp(log_norm - 0.5 * ss / variances)
    return out


def trend_weights(
    trends: EnsembleTrends,
    observed: TimeSeries,
    pool: DiscrepancyPool,
    f: float,
    prior: TrendPrior | None = None,
    n_samples: int = 100_000,
    rng_seed=0,
) -> WeightVector:
    """Posterior trend-submodel probabilities given the raw observed series."""
    prior = prior or TrendPrior()
    marg = trend_log_marginals(
        trends, observed.values, pool, f, prior, n_samples, rng_seed
    )
    if prior.model_priors is None:
        return normalize_log_weights(marg)
    if prior.model_priors.size != trends.k:
        raise InputError(
            f"{prior.model_priors.size} model priors for {trends.k} models"
        )
    with np.errstate(divide="ignore"):
        return normalize_log_weights(marg + np.log(prior.model_priors))
