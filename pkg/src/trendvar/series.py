"""Regularly spaced scalar time series, the universal input type."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError


@dataclass(frozen=True)
class TimeSeries:
    """A regularly spaced series of real values over an integer time axis.

    Invariants enforced at construction: strictly increasing times with a
    constant step, no missing (non-finite) values, equal lengths, n >= 3.
    """

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=np.int64)
        values = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)
        if times.ndim != 1 or values.ndim != 1:
            raise InputError("times and values must be one-dimensional")
        if times.size != values.size:
            raise InputError(
                f"length mismatch: {times.size} times vs {values.size} values"
            )
        if times.size < 3:
            raise InputError(f"series needs at least 3 points, got {times.size}")
        steps = np.diff(times)
        if np.any(steps <= 0):
            raise InputError("times must be strictly increasing")
        if np.any(steps != steps[0]):
            raise InputError("times must have a constant step")
        if not np.all(np.isfinite(values)):
            bad = int(np.flatnonzero(~np.isfinite(values))[0])
            raise InputError(
                f"non-finite value at time {int(times[bad])} (index {bad})"
            )

    def __len__(self) -> int:
        return self.times.size

    @property
    def step(self) -> int:
        return int(self.times[1] - self.times[0])

    def mean(self) -> float:
        return float(self.values.mean())

    def slice_period(self, period: tuple[int, int]) -> "TimeSeries":
        """Return the sub-series with t0 <= time <= t1."""
        t0, t1 = int(period[0]), int(period[1])
        if t0 > t1:
            raise InputError(f"empty period [{t0}, {t1}]")
        mask = (self.times >= t0) & (self.times <= t1)
        if not mask.any():
            raise InputError(
                f"period [{t0}, {t1}] outside series range "
                f"[{int(self.times[0])}, {int(self.times[-1])}]"
            )
        covered = (self.times[0] <= t0) and (self.times[-1] >= t1)
        if not covered:
            raise InputError(
                f"period [{t0}, {t1}] not fully covered by series range "
                f"[{int(self.times[0])}, {int(self.times[-1])}]"
            )
        return TimeSeries(self.times[mask], self.values[mask])
