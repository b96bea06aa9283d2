"""Trend/anomaly decomposition of time series.

Splits a raw series into a deterministic trend (Theil-Sen line or robust
locally weighted regression) plus anomalies, in absolute form or relative
(mean-normalized) form. The decomposition is deterministic and exactly
reversible.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DegeneracyError, InputError
from .series import TimeSeries

RELATIVE_MEAN_GUARD = 1e-8  # |mean| must exceed this times the sample sd


class SmootherKind(str, enum.Enum):
    THEIL_SEN = "theilsen"
    LOWESS = "lowess"


class Mode(str, enum.Enum):
    ABSOLUTE = "absolute"
    RELATIVE = "relative"


@dataclass(frozen=True)
class SmootherSpec:
    """Trend smoother choice. ``span`` and ``iterations`` apply to lowess only."""

    kind: SmootherKind = SmootherKind.THEIL_SEN
    span: float = 0.8
    iterations: int = 3

    def __post_init__(self):
        if not (0.0 < self.span <= 1.0):
            raise InputError(f"span must be in (0, 1], got {self.span}")
        if self.iterations < 1:
            raise InputError(f"iterations must be positive, got {self.iterations}")


@dataclass(frozen=True)
class Decomposition:
    """Trend plus anomalies; in relative mode the anomalies are divided by
    the series mean and reconstruction is trend + series_mean * anomalies."""

    trend: np.ndarray
    anomalies: np.ndarray
    mode: Mode
    series_mean: float | None = None

    def reconstruct(self) -> np.ndarray:
        if self.mode is Mode.RELATIVE:
            return self.trend + self.series_mean * self.anomalies
        return self.trend + self.anomalies


def theil_sen(series: TimeSeries) -> tuple[float, float]:
    """Robust line fit: slope is the median of all pairwise slopes
    (v_j - v_i)/(t_j - t_i) over i < j, intercept the median of
    v_i - slope * t_i. Slope is per original time unit.
    """
    t = series.times.astype(np.float64)
    v = series.values
    n = t.size
    if n < 2:
        raise InputError("theil_sen needs at least 2 points")
    iu, ju = np.triu_indices(n, k=1)
    slopes = (v[ju] - v[iu]) / (t[ju] - t[iu])
    slope = float(np.median(slopes))
    intercept = float(np.median(v - slope * t))
    return slope, intercept


def _neighbor_window_starts(x: np.ndarray, k: int) -> np.ndarray:
    """Start index of the k-nearest contiguous window around each point."""
    n = x.size
    starts = np.empty(n, dtype=np.int64)
    lo = 0
    for i in range(n):
        while lo + k < n and x[lo + k] - x[i] < x[i] - x[lo]:
            lo += 1
        starts[i] = lo
    return starts


def lowess(series: TimeSeries, spec: SmootherSpec) -> np.ndarray:
    """Robust locally weighted regression trend evaluated at the input times.

    Local linear fits with tricube distance weights over the span-nearest
    neighbours, followed by ``spec.iterations`` bisquare robustness
    reweightings (residuals scaled by six times their median magnitude).
    """
    if spec.kind is not SmootherKind.LOWESS:
        raise InputError(f"lowess called with smoother kind {spec.kind.value}")
    x = series.times.astype(np.float64)
    y = series.values
    n = x.size
    if n < 5:
        raise InputError(f"lowess needs at least 5 points, got {n}")
    k = int(spec.span * n)
    if k < 2:
        raise InputError(
            f"span {spec.span} gives {k} neighbours on {n} points; need at least 2"
        )
    starts = _neighbor_window_starts(x, k)
    fitted = np.zeros(n)
    delta = np.ones(n)
    for _ in range(spec.iterations + 1):
        for i in range(n):
            lo = starts[i]
            xs = x[lo : lo + k]
            ys = y[lo : lo + k]
            width = max(x[i] - xs[0], xs[-1] - x[i])
            w = np.clip(1.0 - (np.abs(xs - x[i]) / width) ** 3, 0.0, None) ** 3
            w *= delta[lo : lo + k]
            sw = w.sum()
            if sw <= 0.0:
                fitted[i] = ys.mean()
                continue
            xc = xs - x[i]
            mx = np.dot(w, xc) / sw
            my = np.dot(w, ys) / sw
            vxx = np.dot(w, xc * xc) / sw - mx * mx
            if vxx <= 1e-12 * width * width:
                fitted[i] = my
                continue
            vxy = np.dot(w, xc * ys) / sw - mx * my
            fitted[i] = my - (vxy / vxx) * mx
        resid = y - fitted
        s = float(np.median(np.abs(resid)))
        if s <= 0.0:
            break
        rw = np.clip(resid / (6.0 * s), -1.0, 1.0)
        delta = (1.0 - rw * rw) ** 2
    return fitted


def fit_trend(series: TimeSeries, spec: SmootherSpec) -> np.ndarray:
    """Trend vector for the given smoother choice."""
    if spec.kind is SmootherKind.THEIL_SEN:
        slope, intercept = theil_sen(series)
        return intercept + slope * series.times.astype(np.float64)
    return lowess(series, spec)


def split_anomalies(series: TimeSeries, trend: np.ndarray, mode: Mode) -> Decomposition:
    """Form the anomaly component for a given trend.

    Absolute mode: anomalies = values - trend. Relative mode: anomalies are
    additionally divided by the (raw) series mean, which must be bounded
    away from zero.
    """
    trend = np.asarray(trend, dtype=np.float64)
    if trend.shape != series.values.shape:
        raise InputError(
            f"trend length {trend.size} does not match series length {len(series)}"
        )
    resid = series.values - trend
    if mode is Mode.ABSOLUTE:
        return Decomposition(trend=trend, anomalies=resid, mode=mode)
    mean = series.mean()
    sd = float(series.values.std())
    if abs(mean) <= RELATIVE_MEAN_GUARD * sd:
        raise DegeneracyError(
            f"relative decomposition needs |mean| > {RELATIVE_MEAN_GUARD} * sd; "
            f"got mean {mean:.3e} with sd {sd:.3e}"
        )
    return Decomposition(
        trend=trend, anomalies=resid / mean, mode=mode, series_mean=mean
    )


def decompose(series: TimeSeries, spec: SmootherSpec, mode: Mode) -> Decomposition:
    """Split a series into trend (per the smoother spec) and anomalies."""
    return split_anomalies(series, fit_trend(series, spec), mode)
