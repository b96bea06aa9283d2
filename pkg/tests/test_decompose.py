import numpy as np
import pytest
from statsmodels.nonparametric.smoothers_lowess import lowess as sm_lowess

from trendvar import (
    InputError,
    Mode,
    SmootherKind,
    SmootherSpec,
    TimeSeries,
    decompose,
    lowess,
    split_anomalies,
    theil_sen,
)
from trendvar.errors import DegeneracyError

from .conftest import make_series
from .reference_impls import exhaustive_theil_sen

LOWESS_SPEC = SmootherSpec(kind=SmootherKind.LOWESS, span=0.8, iterations=3)


class TestTimeSeries:
    def test_rejects_short_series(self):
        with pytest.raises(InputError):
            TimeSeries(np.array([0, 1]), np.array([1.0, 2.0]))

    def test_rejects_irregular_step(self):
        with pytest.raises(InputError):
            TimeSeries(np.array([0, 1, 3]), np.zeros(3))

    def test_rejects_nan(self):
        with pytest.raises(InputError, match="non-finite"):
            TimeSeries(np.arange(4), np.array([1.0, np.nan, 2.0, 3.0]))

    def test_slice_period(self):
        ts = make_series(np.arange(10.0), start=2000)
        sub = ts.slice_period((2003, 2007))
        assert list(sub.times) == [2003, 2004, 2005, 2006, 2007]
        with pytest.raises(InputError):
            ts.slice_period((2005, 2015))


class TestTheilSen:
    def test_exact_linear(self):
        slope, intercept = theil_sen(make_series([1.0, 2.0, 3.0]))
        assert slope == pytest.approx(1.0)
        assert intercept == pytest.approx(1.0)

    def test_constant(self):
        slope, intercept = theil_sen(make_series([5.0, 5.0, 5.0, 5.0]))
        assert slope == 0.0
        assert intercept == 5.0

    def test_pairwise_median_example(self):
        # six pairwise slopes {3, 0.5, 4/3, -2, 0.5, 3}; even-length median
        slope, _ = theil_sen(make_series([0.0, 3.0, 1.0, 4.0]))
        assert slope == pytest.approx((0.5 + 4.0 / 3.0) / 2)

    def test_matches_exhaustive_oracle(self, rng):
        for _ in range(100):
            n = int(rng.integers(3, 9))
            values = rng.normal(0.0, 3.0, n)
            ts = make_series(values, start=int(rng.integers(0, 50)))
            slope, intercept = theil_sen(ts)
            ref_slope, ref_intercept = exhaustive_theil_sen(ts.times, ts.values)
            assert slope == ref_slope
            assert intercept == ref_intercept

    def test_outlier_robustness(self, rng):
        n = 40
        base = 2.0 + 0.3 * np.arange(n)
        for _ in range(20):
            values = base.copy()
            corrupt = rng.choice(n, size=n // 4, replace=False)
            values[corrupt] += rng.normal(0.0, 50.0, corrupt.size)
            slope, _ = theil_sen(make_series(values))
            assert abs(slope - 0.3) < 0.03

    def test_deterministic(self, rng):
        values = rng.normal(0.0, 1.0, 30)
        ts = make_series(values)
        assert theil_sen(ts) == theil_sen(ts)


class TestLowess:
    def test_linear_data_exact(self):
        values = 2.0 + 0.5 * np.arange(50)
        trend = lowess(make_series(values), LOWESS_SPEC)
        assert np.allclose(trend, values, rtol=1e-8)

    def test_matches_statsmodels_reference(self):
        n = 100
        t = np.arange(n, dtype=float)
        noise_rng = np.random.default_rng(7)
        values = np.sin(2 * np.pi * t / n) + noise_rng.normal(0.0, 0.25, n)
        trend = lowess(make_series(values), LOWESS_SPEC)
        ref = sm_lowess(values, t, frac=0.8, it=3, delta=0.0, return_sorted=False)
        assert np.max(np.abs(trend - ref)) < 1e-6

    @pytest.mark.parametrize("n,span", [(20, 0.8), (60, 0.5), (125, 0.8)])
    def test_output_length(self, rng, n, span):
        values = rng.normal(0.0, 1.0, n)
        spec = SmootherSpec(kind=SmootherKind.LOWESS, span=span)
        assert lowess(make_series(values), spec).size == n

    def test_too_few_neighbors(self):
        spec = SmootherSpec(kind=SmootherKind.LOWESS, span=0.1)
        with pytest.raises(InputError, match="neighbours"):
            lowess(make_series(np.arange(10.0)), spec)

    def test_wrong_kind_rejected(self):
        with pytest.raises(InputError):
            lowess(make_series(np.arange(10.0)), SmootherSpec())


class TestDecompose:
    def test_linear_theilsen_zero_anomalies(self):
        values = 1.0 + 2.0 * np.arange(20)
        dec = decompose(make_series(values), SmootherSpec(), Mode.ABSOLUTE)
        assert np.allclose(dec.anomalies, 0.0, atol=1e-12)

    def test_relative_normalization(self):
        # prescribed constant trend 10 over values with mean 10
        ts = make_series([10.0, 12.0, 8.0, 10.0])
        dec = split_anomalies(ts, np.full(4, 10.0), Mode.RELATIVE)
        assert dec.series_mean == pytest.approx(10.0)
        assert np.allclose(dec.anomalies, [0.0, 0.2, -0.2, 0.0])

    @pytest.mark.parametrize("mode", [Mode.ABSOLUTE, Mode.RELATIVE])
    @pytest.mark.parametrize("kind", [SmootherKind.THEIL_SEN, SmootherKind.LOWESS])
    def test_reconstruction(self, rng, mode, kind):
        spec = SmootherSpec(kind=kind)
        for _ in range(10):
            values = 10.0 + rng.normal(0.0, 1.0, 40) + 0.1 * np.arange(40)
            ts = make_series(values)
            dec = decompose(ts, spec, mode)
            scale = np.max(np.abs(values))
            assert np.max(np.abs(dec.reconstruct() - values)) < 1e-10 * scale

    def test_relative_near_zero_mean_rejected(self, rng):
        values = rng.normal(0.0, 1.0, 30)
        values -= values.mean()
        with pytest.raises(DegeneracyError):
            decompose(make_series(values), SmootherSpec(), Mode.RELATIVE)

    def test_deterministic(self, rng):
        values = rng.normal(0.0, 1.0, 30)
        ts = make_series(values)
        a = decompose(ts, LOWESS_SPEC, Mode.ABSOLUTE)
        b = decompose(ts, LOWESS_SPEC, Mode.ABSOLUTE)
        assert np.array_equal(a.trend, b.trend)
        assert np.array_equal(a.anomalies, b.anomalies)
