import numpy as np
import pytest

from trendvar import Ar1Params, TimeSeries
from trendvar.ar1 import ar1_simulate_batch


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def make_series(values, start=0, step=1):
    values = np.asarray(values, dtype=np.float64)
    times = start + step * np.arange(values.size, dtype=np.int64)
    return TimeSeries(times, values)


def ar1_series(sigma, rho, n, rng):
    return ar1_simulate_batch(Ar1Params(sigma, rho), n, 1, rng)[0]
