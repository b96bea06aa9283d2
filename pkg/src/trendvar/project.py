"""Weighted probabilistic projections of system change.

The change of a draw is the projection-period mean of (model future trend
+ time-constant bias + internal variability) minus the model's reference
period mean. Internal variability comes either from bootstrap resampling
of future anomalies ("boot") or from an AR(1) process fitted to them
("ar1"). Draws are mixed across models according to the weight vector.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass

import numpy as np

from .ar1 import ar1_mle, ar1_simulate_batch
from .errors import InputError, TrendvarError
from .model_weights import WeightVector

DENSITY_GRID_POINTS = 512
_DENSITY_BINS = 4096


class Variant(str, enum.Enum):
    BOOT = "boot"
    AR1 = "ar1"


@dataclass(frozen=True)
class ProjectionInputs:
    """Per-model future decompositions plus the mixture-level settings."""

    model_ids: tuple[str, ...]
    future_trends: np.ndarray
    future_anomalies: np.ndarray
    reference_means: np.ndarray
    weights: WeightVector
    bias_scale: float
    f: float
    variant: Variant
    n_draws: int = 100_000

    def __post_init__(self):
        ft = np.asarray(self.future_trends, dtype=np.float64)
        fa = np.asarray(self.future_anomalies, dtype=np.float64)
        rm = np.asarray(self.reference_means, dtype=np.float64)
        object.__setattr__(self, "future_trends", ft)
        object.__setattr__(self, "future_anomalies", fa)
        object.__setattr__(self, "reference_means", rm)
        object.__setattr__(self, "model_ids", tuple(str(m) for m in self.model_ids))
        k = len(self.model_ids)
        if ft.ndim != 2 or ft.shape[0] != k or fa.shape != ft.shape or rm.shape != (k,):
            raise InputError("inconsistent projection input shapes")
        if len(self.weights) != k:
            raise InputError(f"{len(self.weights)} weights for {k} models")
        if self.bias_scale < 0.0 or self.f < 0.0:
            raise InputError("bias_scale and f must be nonnegative")
        if self.n_draws < 1:
            raise InputError("n_draws must be positive")

    @property
    def k(self) -> int:
        return len(self.model_ids)


@dataclass(frozen=True)
class ProjectionResult:
    """Monte Carlo sample of the change plus its summary statistics."""

    delta_samples: np.ndarray
    mean: float
    median: float
    mode: float
    ci90: tuple[float, float]
    per_model_draw_counts: np.ndarray

    def __post_init__(self):
        lo, hi = self.ci90
        if not (lo <= self.median <= hi):
            raise InputError("credible interval does not bracket the median")


def future_bias_scale(
    future_trends: np.ndarray,
    period_means: np.ndarray | None = None,
    metric: str = "l1",
) -> float:
    """Sample sd of future period-mean next-closest model differences.

    Closeness is measured between future trend vectors; period means
    default to the trend means but raw means may be passed instead.
    """
    from .trend_weight import _closest_index

    ft = np.asarray(future_trends, dtype=np.float64)
    if ft.ndim != 2 or ft.shape[0] < 2:
        raise InputError("need future trends for at least 2 models")
    k = ft.shape[0]
    if k == 2:
        warnings.warn(
            "bias scale from 2 models uses two mirrored differences",
            stacklevel=2,
        )
    means = ft.mean(axis=1) if period_means is None else np.asarray(period_means)
    if means.shape != (k,):
        raise InputError(f"period_means must have shape ({k},)")
    closest = _closest_index(ft, metric)
    d = means - means[closest]
    return float(d.std(ddof=1))


def _silverman_bandwidth(samples: np.ndarray) -> float:
    sd = float(samples.std())
    q75, q25 = np.percentile(samples, [75.0, 25.0])
    a = min(sd, (q75 - q25) / 1.34)
    if a == 0.0:
        a = sd
    return 0.9 * a * samples.size ** (-0.2)


def density_grid(
    samples: np.ndarray, grid_points: int = DENSITY_GRID_POINTS
) -> tuple[np.ndarray, np.ndarray]:
    """Gaussian KDE (Silverman bandwidth) on a grid spanning the sample
    range plus three bandwidths, pre-binned for speed."""
    s = np.asarray(samples, dtype=np.float64)
    lo, hi = float(s.min()), float(s.max())
    bw = _silverman_bandwidth(s)
    if bw == 0.0:
        # all samples identical: a narrow box around the common value
        half = max(1e-9, 1e-9 * abs(lo))
        x = np.linspace(lo - half, lo + half, grid_points)
        return x, np.full(grid_points, 1.0 / (2.0 * half))
    counts, edges = np.histogram(s, bins=_DENSITY_BINS, range=(lo, hi))
    centers = 0.5 * (edges[:-1] + edges[1:])
    x = np.linspace(lo - 3.0 * bw, hi + 3.0 * bw, grid_points)
    z = (x[:, None] - centers[None, :]) / bw
    kern = np.exp(-0.5 * z * z)
    dens = kern @ counts / (s.size * bw * np.sqrt(2.0 * np.pi))
    return x, dens


def summarize(delta_samples: np.ndarray) -> tuple[float, float, float, tuple[float, float]]:
    """Mean, median, KDE mode, and equal-tailed 90% credible interval."""
    s = np.asarray(delta_samples, dtype=np.float64)
    if s.size < 1000:
        raise InputError(f"need at least 1000 samples, got {s.size}")
    if s.min() == s.max():
        c = float(s[0])
        return c, c, c, (c, c)
    mean = float(s.mean())
    median = float(np.median(s))
    p5, p95 = np.percentile(s, [5.0, 95.0])
    x, dens = density_grid(s)
    mode = float(x[int(np.argmax(dens))])
    return mean, median, mode, (float(p5), float(p95))


def sample_projection(inputs: ProjectionInputs, rng_seed=0) -> ProjectionResult:
    """Draw the weighted mixture of per-model changes.

    Per draw: pick a model by its weight, add a time-constant bias
    b ~ N(0, (f * bias_scale)^2) and the projection-period mean of the
    internal-variability sample, subtract the model's reference mean.
    Draw order (fixing reproducibility): model indices, then biases, then
    per-model variability blocks in ascending model order.
    """
    rng = np.random.default_rng(rng_seed)
    k = inputs.k
    m = inputs.future_trends.shape[1]
    w = inputs.weights.weights
    idx = rng.choice(k, size=inputs.n_draws, p=w)
    bias = rng.normal(0.0, inputs.f * inputs.bias_scale, size=inputs.n_draws)
    trend_means = inputs.future_trends.mean(axis=1)
    delta = np.empty(inputs.n_draws)
    for i in range(k):
        sel = np.flatnonzero(idx == i)
        if sel.size == 0:
            continue
        anoms = inputs.future_anomalies[i]
        if inputs.variant is Variant.BOOT:
            picks = rng.integers(0, m, size=(sel.size, m))
            eps_mean = anoms[picks].mean(axis=1)
        else:
            try:
                params = ar1_mle(anoms)
            except TrendvarError as exc:
                raise type(exc)(
                    f"model {inputs.model_ids[i]!r} future anomalies: {exc}"
                ) from exc
            eps_mean = ar1_simulate_batch(params, m, sel.size, rng).mean(axis=1)
        delta[sel] = trend_means[i] + bias[sel] + eps_mean - inputs.reference_means[i]
    mean, median, mode, ci90 = summarize(delta)
    return ProjectionResult(
        delta_samples=delta,
        mean=mean,
        median=median,
        mode=mode,
        ci90=ci90,
        per_model_draw_counts=np.bincount(idx, minlength=k),
    )
