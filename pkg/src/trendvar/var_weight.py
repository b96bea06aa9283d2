"""Variability submodel weighting by Monte Carlo marginal likelihood.

Each model is summarized by the maximum-likelihood AR(1) parameters of its
calibration anomalies. Candidate parameters for the real system are the
model's summary plus a scaled error sample: errors come from next-closest
summary differences augmented with a (0, 0) sample and smoothed with
independent normal jitter whose per-dimension standard deviation is one
fifth of the base sample range. Draws are clipped for stability before the
AR(1) likelihood of the observed anomalies is averaged.

Draw protocol: with ``rng = np.random.default_rng(rng_seed)`` and the base
samples in lexicographic order, draw ``idx = rng.integers(0, k + 1, n)``,
``z_sigma = rng.standard_normal(n)``, ``z_rho = rng.standard_normal(n)``.
The error sample is ``base[idx] + z * jitter_sd`` and enters each model's
parameters scaled by f. One draw set is shared by every model (see
trend_weight for why).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._backend import fixed_quad_sums
from .ar1 import Ar1Params, ar1_conditional_loglik, ar1_mle
from .errors import InputError, TrendvarError
from .model_weights import WeightVector, log_mean_exp, normalize_log_weights

_LOG_2PI = float(np.log(2.0 * np.pi))


@dataclass(frozen=True)
class VariabilitySummaries:
    """Per-model MLE summaries (sigma, rho) of calibration anomalies."""

    model_ids: tuple[str, ...]
    stats: tuple[Ar1Params, ...]

    def __post_init__(self):
        object.__setattr__(self, "model_ids", tuple(str(m) for m in self.model_ids))
        object.__setattr__(self, "stats", tuple(self.stats))
        if len(self.model_ids) != len(self.stats):
            raise InputError("one summary per model id required")
        if len(set(self.model_ids)) != len(self.model_ids):
            raise InputError("model ids must be unique")

    @property
    def k(self) -> int:
        return len(self.stats)

    @property
    def sigmas(self) -> np.ndarray:
        return np.array([p.sigma for p in self.stats])

    @property
    def rhos(self) -> np.ndarray:
        return np.array([p.rho for p in self.stats])


@dataclass(frozen=True)
class VarErrorPool:
    """k next-closest (sigma, rho) differences plus the (0, 0) sample, and
    the per-dimension jitter sd (one fifth of each base-sample range)."""

    base_samples: np.ndarray
    jitter_sd: tuple[float, float]


@dataclass(frozen=True)
class ClippingRule:
    """Stability clipping for sampled parameters: |rho| capped, sigma
    floored at a fraction of the smallest model summary sigma."""

    rho_cap: float = 0.999
    sigma_floor_factor: float = 0.01


def summarize_variability(
    anomalies: list[np.ndarray], model_ids: list[str] | None = None
) -> VariabilitySummaries:
    """MLE AR(1) summaries for each model's anomaly vector."""
    if model_ids is None:
        model_ids = [f"model_{i}" for i in range(len(anomalies))]
    if len(model_ids) != len(anomalies):
        raise InputError("one model id per anomaly vector required")
    stats = []
    for mid, a in zip(model_ids, anomalies):
        try:
            stats.append(ar1_mle(a))
        except TrendvarError as exc:
            raise type(exc)(f"model {mid!r}: {exc}") from exc
    return VariabilitySummaries(model_ids=tuple(model_ids), stats=tuple(stats))


def next_closest_var(
    summaries: VariabilitySummaries, anomalies: list[np.ndarray]
) -> np.ndarray:
    """For each model i, the other model whose summary parameters maximize
    the likelihood of model i's anomalies."""
    k = summaries.k
    if k < 2:
        raise InputError(f"need at least 2 models, got {k}")
    if len(anomalies) != k:
        raise InputError("one anomaly vector per model required")
    out = np.empty(k, dtype=np.int64)
    for i in range(k):
        best, best_ll = -1, -np.inf
        for j in range(k):
            if j == i:
                continue
            ll = ar1_conditional_loglik(anomalies[i], summaries.stats[j])
            if ll > best_ll:
                best, best_ll = j, ll
        out[i] = best
    return out


def build_var_error_pool(
    summaries: VariabilitySummaries, assignments: np.ndarray
) -> VarErrorPool:
    """Error pool from next-closest summary differences plus (0, 0)."""
    assignments = np.asarray(assignments, dtype=np.int64)
    if assignments.shape != (summaries.k,):
        raise InputError("one assignment per model required")
    if np.any(assignments == np.arange(summaries.k)):
        raise InputError("a model cannot be its own next-closest")
    sig = summaries.sigmas
    rho = summaries.rhos
    base = np.column_stack(
        [sig - sig[assignments], rho - rho[assignments]]
    )
    base = np.vstack([base, np.zeros((1, 2))])
    jitter = (
        float(base[:, 0].max() - base[:, 0].min()) / 5.0,
        float(base[:, 1].max() - base[:, 1].min()) / 5.0,
    )
    return VarErrorPool(base_samples=base, jitter_sd=jitter)


def _canonical_rows(samples: np.ndarray) -> np.ndarray:
    order = np.lexsort(samples.T[::-1])
    return samples[order]


def draw_error_samples(
    pool: VarErrorPool, n_samples: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Unscaled (eps_sigma, eps_rho) samples: bootstrap of the base pool
    plus independent normal jitter."""
    base = _canonical_rows(pool.base_samples)
    idx = rng.integers(0, base.shape[0], size=n_samples)
    z_sig = rng.standard_normal(n_samples)
    z_rho = rng.standard_normal(n_samples)
    eps_sig = base[idx, 0] + z_sig * pool.jitter_sd[0]
    eps_rho = base[idx, 1] + z_rho * pool.jitter_sd[1]
    return eps_sig, eps_rho


def clip_thetas(
    sigmas: np.ndarray,
    rhos: np.ndarray,
    clip: ClippingRule,
    sigma_floor: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Apply the stability clipping to sampled (sigma, rho) arrays."""
    return (
        np.maximum(sigmas, sigma_floor),
        np.clip(rhos, -clip.rho_cap, clip.rho_cap),
    )


def var_log_marginals(
    summaries: VariabilitySummaries,
    pool: VarErrorPool,
    observed_anomalies: np.ndarray,
    f: float,
    clip: ClippingRule | None = None,
    n_samples: int = 10_000,
    rng_seed=0,
) -> np.ndarray:
    """Log Monte Carlo marginal likelihood per variability submodel."""
    clip = clip or ClippingRule()
    dy = np.asarray(observed_anomalies, dtype=np.float64)
    if dy.size < 2:
        raise InputError("observed anomalies need at least 2 values")
    if n_samples < 1:
        raise InputError("n_samples must be positive")
    if f < 0.0:
        raise InputError(f"f must be nonnegative, got {f}")
    rng = np.random.default_rng(rng_seed)
    eps_sig, eps_rho = draw_error_samples(pool, n_samples, rng)
    sigma_floor = clip.sigma_floor_factor * float(summaries.sigmas.min())
    n1 = dy.size - 1
    out = np.empty(summaries.k)
    for i, stat in enumerate(summaries.stats):
        sig_i, rho_i = clip_thetas(
            stat.sigma + f * eps_sig, stat.rho + f * eps_rho, clip, sigma_floor
        )
        variances = sig_i * sig_i
        ss = fixed_quad_sums(dy, rho_i)
        lls = -0.5 * n1 * (_LOG_2PI + np.log(variances)) - 0.5 * ss / variances
        out[i] = log_mean_exp(lls)
    return out


def var_weights(
    summaries: VariabilitySummaries,
    pool: VarErrorPool,
    observed_anomalies: np.ndarray,
    f: float,
    clip: ClippingRule | None = None,
    n_samples: int = 10_000,
    rng_seed=0,
) -> WeightVector:
    """Posterior variability-submodel probabilities (uniform priors)."""
    return normalize_log_weights(
        var_log_marginals(
            summaries, pool, observed_anomalies, f, clip, n_samples, rng_seed
        )
    )
