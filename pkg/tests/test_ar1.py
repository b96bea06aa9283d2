import numpy as np
import pytest

from trendvar import (
    Ar1Params,
    DegeneracyError,
    InputError,
    ar1_conditional_loglik,
    ar1_mle,
    ar1_simulate,
    periodogram,
)
from trendvar.ar1 import ar1_simulate_batch, ar1_spectral_density

from .reference_impls import direct_gaussian_loglik


class TestAr1Params:
    def test_rejects_bad_sigma(self):
        with pytest.raises(InputError):
            Ar1Params(sigma=0.0, rho=0.5)

    def test_rejects_nonstationary_rho(self):
        with pytest.raises(InputError):
            Ar1Params(sigma=1.0, rho=1.0)


class TestConditionalLoglik:
    def test_two_step_example(self):
        # anomalies (0, 1, 0): innovations 1 - 0.5*0 = 1 and 0 - 0.5*1 = -0.5
        ll = ar1_conditional_loglik(np.array([0.0, 1.0, 0.0]), Ar1Params(1.0, 0.5))
        phi = lambda z: np.exp(-0.5 * z * z) / np.sqrt(2 * np.pi)
        assert ll == pytest.approx(np.log(phi(1.0) * phi(0.5)))
        assert ll == pytest.approx(np.log(0.24197 * 0.35207), abs=1e-4)

    def test_rho_zero_reduces_to_white_noise(self, rng):
        a = rng.normal(0.0, 1.0, 50)
        sigma = 1.3
        ll = ar1_conditional_loglik(a, Ar1Params(sigma, 0.0))
        iid = sum(
            -0.5 * (x / sigma) ** 2 - np.log(sigma) - 0.5 * np.log(2 * np.pi)
            for x in a[1:]
        )
        assert ll == pytest.approx(iid)

    def test_joint_scaling_shift(self, rng):
        a = rng.normal(0.0, 2.0, 30)
        params = Ar1Params(1.5, 0.4)
        c = 3.7
        scaled = ar1_conditional_loglik(c * a, Ar1Params(c * 1.5, 0.4))
        base = ar1_conditional_loglik(a, params)
        assert scaled == pytest.approx(base - (a.size - 1) * np.log(c))

    def test_matches_direct_density_sum(self, rng):
        a = rng.normal(0.0, 1.0, 20)
        ll = ar1_conditional_loglik(a, Ar1Params(0.8, -0.3))
        assert ll == pytest.approx(direct_gaussian_loglik(a, 0.8, -0.3), rel=1e-12)


class TestMle:
    def test_recovers_known_parameters(self):
        series = ar1_simulate(Ar1Params(1.0, 0.6), 10_000, rng_seed=11)
        est = ar1_mle(series)
        assert est.sigma == pytest.approx(1.0, abs=0.03)
        assert est.rho == pytest.approx(0.6, abs=0.03)

    def test_white_noise(self):
        series = ar1_simulate(Ar1Params(2.0, 0.0), 10_000, rng_seed=5)
        est = ar1_mle(series)
        assert est.rho == pytest.approx(0.0, abs=0.03)
        assert est.sigma == pytest.approx(2.0, abs=0.05)

    def test_contract_bounds(self, rng):
        for _ in range(50):
            series = rng.normal(0.0, rng.uniform(0.1, 5.0), int(rng.integers(4, 60)))
            est = ar1_mle(series)
            assert abs(est.rho) < 1.0
            assert est.sigma > 0.0

    def test_zero_variance_rejected(self):
        with pytest.raises(DegeneracyError):
            ar1_mle(np.full(10, 3.0))

    def test_maximizes_conditional_loglik(self, rng):
        for _ in range(10):
            series = ar1_simulate(
                Ar1Params(rng.uniform(0.5, 2.0), rng.uniform(-0.7, 0.7)),
                200,
                rng_seed=int(rng.integers(1 << 31)),
            )
            est = ar1_mle(series)
            best = ar1_conditional_loglik(series, est)
            for sigma in np.linspace(0.3, 3.0, 12):
                for rho in np.linspace(-0.9, 0.9, 13):
                    assert (
                        ar1_conditional_loglik(series, Ar1Params(sigma, rho))
                        <= best + 1e-9
                    )

    def test_consistency_improves_with_length(self):
        errs = []
        for n in (200, 2000, 20_000):
            est = ar1_mle(ar1_simulate(Ar1Params(1.0, 0.5), n, rng_seed=42))
            errs.append(abs(est.rho - 0.5) + abs(est.sigma - 1.0))
        assert errs[2] < errs[0]


class TestSimulate:
    def test_deterministic(self):
        a = ar1_simulate(Ar1Params(1.0, 0.3), 100, rng_seed=7)
        b = ar1_simulate(Ar1Params(1.0, 0.3), 100, rng_seed=7)
        assert np.array_equal(a, b)

    def test_white_noise_sd(self):
        series = ar1_simulate(Ar1Params(1.0, 0.0), 100_000, rng_seed=3)
        assert series.std() == pytest.approx(1.0, rel=0.01)

    def test_lag1_autocorrelation(self):
        series = ar1_simulate(Ar1Params(1.0, 0.7), 100_000, rng_seed=9)
        r = np.corrcoef(series[:-1], series[1:])[0, 1]
        assert r == pytest.approx(0.7, abs=0.01)

    def test_batch_shape_and_stationary_start(self, rng):
        sims = ar1_simulate_batch(Ar1Params(1.0, 0.8), 50, 20_000, rng)
        assert sims.shape == (20_000, 50)
        assert sims[:, 0].std() == pytest.approx(1.0 / np.sqrt(1 - 0.64), rel=0.02)


class TestPeriodogram:
    def test_pure_cosine_concentrates(self):
        n = 64
        k = 8
        t = np.arange(n)
        freqs, powers = periodogram(np.cos(2 * np.pi * k * t / n))
        assert freqs[np.argmax(powers)] == pytest.approx(k / n)
        assert powers[np.argmax(powers)] / powers.sum() > 0.999

    def test_parseval(self, rng):
        for n in (32, 65, 100):
            z = rng.normal(0.0, 1.0, n)
            _, powers = periodogram(z)
            assert powers.sum() == pytest.approx(z.var(), abs=1e-8)

    def test_white_noise_flat(self):
        series = ar1_simulate(Ar1Params(1.0, 0.0), 20_000, rng_seed=13)
        _, powers = periodogram(series)
        bins = np.array_split(powers, 10)
        means = np.array([b.mean() for b in bins])
        assert means.max() / means.min() < 3.0

    def test_short_series_rejected(self):
        with pytest.raises(InputError):
            periodogram(np.arange(5.0))


def test_simulated_spectra_match_theory(rng):
    # envelope from 1000 realizations should cover most of a fresh realization
    params = Ar1Params(1.0, 0.6)
    n = 128
    sims = ar1_simulate_batch(params, n, 1000, rng)
    powers = np.array([periodogram(s)[1] for s in sims])
    lo, hi = np.percentile(powers, [5, 95], axis=0)
    freqs, fresh = periodogram(ar1_simulate_batch(params, n, 1, rng)[0])
    inside = ((fresh >= lo) & (fresh <= hi)).mean()
    assert inside >= 0.75
    dens = ar1_spectral_density(params, freqs)
    # theoretical curve sits inside the envelope almost everywhere
    theory_inside = ((dens >= lo) & (dens <= hi)).mean()
    assert theory_inside >= 0.9
