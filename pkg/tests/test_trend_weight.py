import numpy as np
import pytest

from trendvar import (
    DegeneracyError,
    EnsembleTrends,
    InputError,
    TimeSeries,
    TrendPrior,
    build_discrepancy_pool,
    trend_log_marginals,
    trend_weights,
)

from .conftest import make_series
from .reference_impls import naive_trend_log_marginals


def flat_trends(levels, n):
    levels = np.asarray(levels, dtype=np.float64)
    return EnsembleTrends(
        model_ids=[f"m{i}" for i in range(levels.size)],
        trends=np.tile(levels[:, None], (1, n)),
    )


class TestDiscrepancyPool:
    def test_identical_models_zero_pool(self):
        trends = EnsembleTrends(["a", "b"], np.ones((2, 5)))
        pool = build_discrepancy_pool(trends)
        assert np.array_equal(pool.samples, np.zeros((2, 5)))

    def test_next_closest_example(self):
        trends = EnsembleTrends(
            ["m0", "m1", "m2"],
            np.array([[0.0, 0.0], [1.0, 1.0], [5.0, 5.0]]),
        )
        pool = build_discrepancy_pool(trends)
        # closest(m0)=m1, closest(m1)=m0, closest(m2)=m1
        assert pool.source_pairs == (("m0", "m1"), ("m1", "m0"), ("m2", "m1"))
        assert np.array_equal(pool.samples[2], [4.0, 4.0])

    def test_pool_size(self, rng):
        for k in (2, 5, 9):
            trends = EnsembleTrends(
                [f"m{i}" for i in range(k)], rng.normal(0.0, 1.0, (k, 12))
            )
            assert build_discrepancy_pool(trends).samples.shape == (k, 12)

    def test_matches_exhaustive_l1(self, rng):
        k, n = 6, 10
        mat = rng.normal(0.0, 2.0, (k, n))
        trends = EnsembleTrends([f"m{i}" for i in range(k)], mat)
        pool = build_discrepancy_pool(trends)
        for i in range(k):
            dists = [
                np.abs(mat[i] - mat[j]).sum() if j != i else np.inf for j in range(k)
            ]
            j = int(np.argmin(dists))
            assert np.array_equal(pool.samples[i], mat[i] - mat[j])

    def test_too_small_ensemble(self):
        with pytest.raises(InputError):
            EnsembleTrends(["a"], np.ones((1, 4)))


class TestTrendWeights:
    def test_identical_trends_exact_uniform(self, rng):
        n = 20
        trends = flat_trends([1.0, 1.0, 1.0, 1.0], n)
        pool = build_discrepancy_pool(trends)
        observed = make_series(1.0 + rng.normal(0.0, 0.5, n))
        w = trend_weights(trends, observed, pool, f=1.0, n_samples=500, rng_seed=1)
        assert np.array_equal(w.weights, np.full(4, 0.25))

    def test_argmax_identifies_nearest_model(self):
        # three flat trends 0/1/5, pseudo-observations near 0: argmax must
        # land on the first model for every seed at a large sample count
        n = 30
        trends = flat_trends([0.0, 1.0, 5.0], n)
        pool = build_discrepancy_pool(trends)
        noise = np.random.default_rng(8).normal(0.0, 0.3, n)
        observed = make_series(noise)
        hits = 0
        for seed in range(20):
            w = trend_weights(
                trends, observed, pool, f=0.5, n_samples=1_000_000, rng_seed=seed
            )
            hits += int(np.argmax(w.weights) == 0)
        assert hits == 20

    def test_matches_naive_double_loop_bitwise(self, rng):
        k, n, ns = 3, 10, 300
        for seed in (0, 1, 2):
            mat = rng.normal(0.0, 1.0, (k, n)) + np.linspace(0, 2, k)[:, None]
            trends = EnsembleTrends([f"m{i}" for i in range(k)], mat)
            pool = build_discrepancy_pool(trends)
            observed = mat[0] + rng.normal(0.0, 0.4, n)
            prior = TrendPrior()
            got = trend_log_marginals(
                trends, observed, pool, 0.8, prior, ns, rng_seed=seed
            )
            want = naive_trend_log_marginals(
                mat,
                observed,
                pool.samples,
                0.8,
                prior.sigma_range,
                prior.rho_range,
                ns,
                seed,
            )
            assert np.array_equal(got, want)

    def test_seed_determinism(self, rng):
        trends = flat_trends([0.0, 2.0], 15)
        pool = build_discrepancy_pool(trends)
        observed = make_series(rng.normal(0.0, 1.0, 15))
        a = trend_weights(trends, observed, pool, 1.0, n_samples=2000, rng_seed=5)
        b = trend_weights(trends, observed, pool, 1.0, n_samples=2000, rng_seed=5)
        assert np.array_equal(a.weights, b.weights)

    def test_permutation_equivariance(self, rng):
        k, n = 4, 18
        mat = rng.normal(0.0, 1.0, (k, n)).cumsum(axis=1)
        observed = make_series(rng.normal(0.0, 1.0, n))
        ids = [f"m{i}" for i in range(k)]
        perm = [2, 0, 3, 1]
        w1 = trend_weights(
            EnsembleTrends(ids, mat),
            observed,
            build_discrepancy_pool(EnsembleTrends(ids, mat)),
            1.0,
            n_samples=3000,
            rng_seed=9,
        )
        permuted = EnsembleTrends([ids[i] for i in perm], mat[perm])
        w2 = trend_weights(
            permuted,
            observed,
            build_discrepancy_pool(permuted),
            1.0,
            n_samples=3000,
            rng_seed=9,
        )
        assert np.array_equal(w2.weights, w1.weights[perm])

    def test_large_f_diffuses_toward_uniform(self):
        n = 25
        trends = flat_trends([0.0, 1.0, 3.0], n)
        pool = build_discrepancy_pool(trends)
        observed = make_series(np.random.default_rng(2).normal(0.0, 0.3, n))
        deviations = []
        for f in (1.0, 10.0, 100.0):
            devs = []
            for seed in range(5):
                w = trend_weights(
                    trends, observed, pool, f, n_samples=50_000, rng_seed=seed
                )
                devs.append(np.abs(w.weights - 1.0 / 3.0).max())
            deviations.append(np.mean(devs))
        assert deviations[2] < deviations[1] < deviations[0]

    def test_weight_axioms(self, rng):
        for _ in range(20):
            k = int(rng.integers(2, 6))
            n = int(rng.integers(10, 25))
            mat = rng.normal(0.0, 1.0, (k, n)).cumsum(axis=1)
            trends = EnsembleTrends([f"m{i}" for i in range(k)], mat)
            pool = build_discrepancy_pool(trends)
            observed = make_series(rng.normal(0.0, 1.0, n))
            w = trend_weights(
                trends,
                observed,
                pool,
                f=float(rng.uniform(0.0, 2.0)),
                n_samples=400,
                rng_seed=int(rng.integers(1 << 31)),
            )
            assert np.all(w.weights >= 0.0)
            assert abs(w.weights.sum() - 1.0) <= 1e-9

    def test_mismatched_lengths_rejected(self, rng):
        trends = flat_trends([0.0, 1.0], 10)
        pool = build_discrepancy_pool(trends)
        observed = make_series(rng.normal(0.0, 1.0, 12))
        with pytest.raises(InputError):
            trend_weights(trends, observed, pool, 1.0, n_samples=100)

    def test_degenerate_all_underflow(self):
        # residuals overflow the quadratic form, every log likelihood is -inf
        n = 50
        trends = flat_trends([0.0, 1.0], n)
        pool = build_discrepancy_pool(trends)
        observed = make_series(np.full(n, 1e200))
        with pytest.raises(DegeneracyError):
            trend_weights(trends, observed, pool, 0.0, n_samples=50, rng_seed=0)

    def test_custom_model_priors(self, rng):
        n = 20
        trends = flat_trends([0.0, 0.0], n)
        pool = build_discrepancy_pool(trends)
        observed = make_series(rng.normal(0.0, 0.5, n))
        prior = TrendPrior(model_priors=np.array([0.8, 0.2]))
        w = trend_weights(trends, observed, pool, 1.0, prior, 500, 3)
        assert w.weights[0] == pytest.approx(0.8)
        assert w.weights[1] == pytest.approx(0.2)
