"""Model weight vectors, their combination, and log-space helpers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegeneracyError, InputError

_SUM_TOL = 1e-9


@dataclass(frozen=True)
class WeightVector:
    """Per-model probabilities: nonnegative, summing to 1 within 1e-9."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        object.__setattr__(self, "weights", w)
        if w.ndim != 1 or w.size == 0:
            raise InputError("weights must be a nonempty vector")
        if np.any(w < 0.0) or not np.all(np.isfinite(w)):
            raise InputError("weights must be finite and nonnegative")
        if abs(float(w.sum()) - 1.0) > _SUM_TOL:
            raise InputError(f"weights sum to {float(w.sum())!r}, expected 1")

    def __len__(self) -> int:
        return self.weights.size


def log_mean_exp(log_values: np.ndarray) -> float:
    """log of the mean of exp(log_values), max-shifted for stability."""
    m = np.max(log_values)
    if not np.isfinite(m):
        return float(m) if m == -np.inf else float("nan")
    return float(np.log(np.exp(log_values - m).sum()) - np.log(log_values.size) + m)


def normalize_log_weights(log_weights: np.ndarray) -> WeightVector:
    """Exponentiate and normalize unnormalized log weights.

    The total is accumulated in value-sorted order so the result is exactly
    invariant to permutations of the input."""
    lw = np.asarray(log_weights, dtype=np.float64)
    m = np.max(lw)
    if not np.isfinite(m):
        raise DegeneracyError(
            "all marginal likelihoods vanished; weights are undefined"
        )
    w = np.exp(lw - m)
    return WeightVector(w / np.sort(w).sum())


def combine_weights(trend_w: WeightVector, var_w: WeightVector) -> WeightVector:
    """Per-model product of trend and variability weights, renormalized."""
    if len(trend_w) != len(var_w):
        raise InputError(
            f"length mismatch: {len(trend_w)} trend vs {len(var_w)} variability"
        )
    prod = trend_w.weights * var_w.weights
    total = float(np.sort(prod).sum())
    if total <= 0.0:
        raise DegeneracyError("all combined weights are zero")
    return WeightVector(prod / total)


def trend_only_weights(trend_w: WeightVector) -> WeightVector:
    """The trend-only baseline: variability treated as uninformative, so the
    combined weights are exactly the trend weights."""
    return WeightVector(trend_w.weights.copy())
