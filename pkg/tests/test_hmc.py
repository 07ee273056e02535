import numpy as np
import pytest

from riskreach.hmc import (
    effective_sample_size,
    nuts_sample,
    split_rhat,
    standard_normal_self_test,
)


def gaussian_target(mu, var):
    def f(x):
        d = x - mu
        return -0.5 * float(d @ d) / var, -d / var

    return f


class TestSampler:
    def test_standard_normal_moments_and_ess(self):
        st = standard_normal_self_test(seed=0)
        assert st["mean_abs_error"] <= 0.05
        assert st["var_abs_error"] <= 0.1
        assert st["min_ess"] >= 1000
        assert st["max_rhat"] <= 1.05

    def test_acceptance_near_target(self):
        st = standard_normal_self_test(seed=3)
        assert 0.6 <= st["mean_accept"] <= 0.99

    def test_deterministic_given_seed(self):
        f = gaussian_target(np.array([1.0, -2.0]), 2.0)
        a = nuts_sample(f, np.zeros(2), chains=2, warmup=100, samples=100, seed=7)
        b = nuts_sample(f, np.zeros(2), chains=2, warmup=100, samples=100, seed=7)
        assert np.array_equal(a.draws, b.draws)

    def test_different_chains_differ(self):
        f = gaussian_target(np.zeros(1), 1.0)
        run = nuts_sample(f, np.zeros(1), chains=2, warmup=100, samples=100, seed=0)
        assert not np.array_equal(run.draws[0], run.draws[1])

    def test_recovers_shifted_scaled_gaussian(self):
        mu = np.array([3.0, -1.5])
        f = gaussian_target(mu, 4.0)
        run = nuts_sample(f, np.zeros(2), chains=4, warmup=400, samples=800, seed=11)
        flat = run.flat()
        assert np.max(np.abs(flat.mean(axis=0) - mu)) <= 0.15
        assert np.max(np.abs(flat.var(axis=0) - 4.0)) <= 0.5

    def test_rejects_bad_configuration(self):
        f = gaussian_target(np.zeros(1), 1.0)
        with pytest.raises(ValueError):
            nuts_sample(f, np.zeros(1), chains=0)
        with pytest.raises(ValueError):
            nuts_sample(lambda x: (float("nan"), x), np.zeros(1))


class TestDiagnostics:
    def test_rhat_near_one_for_iid_chains(self):
        rng = np.random.default_rng(0)
        draws = rng.standard_normal((4, 1000, 2))
        r = split_rhat(draws)
        assert np.all(np.abs(r - 1.0) < 0.02)

    def test_rhat_detects_disjoint_chains(self):
        rng = np.random.default_rng(1)
        draws = rng.standard_normal((4, 500, 1))
        draws[0] += 5.0  # one chain stuck elsewhere
        assert split_rhat(draws)[0] > 1.5

    def test_rhat_detects_trend_within_chain(self):
        rng = np.random.default_rng(2)
        draws = rng.standard_normal((2, 1000, 1)) + np.linspace(
            0, 4, 1000
        ).reshape(1, -1, 1)
        assert split_rhat(draws)[0] > 1.05

    def test_ess_close_to_n_for_iid(self):
        rng = np.random.default_rng(3)
        draws = rng.standard_normal((4, 2000, 1))
        ess = effective_sample_size(draws)[0]
        assert 0.75 * 8000 <= ess <= 1.35 * 8000

    def test_ess_small_for_sticky_chain(self):
        rng = np.random.default_rng(4)
        n = 2000
        ar = np.empty((1, n, 1))
        x = 0.0
        for i in range(n):  # AR(1) with strong persistence
            x = 0.97 * x + rng.standard_normal() * np.sqrt(1 - 0.97**2)
            ar[0, i, 0] = x
        ess = effective_sample_size(ar)[0]
        assert ess < 0.1 * n

    def test_shape_validation(self):
        with pytest.raises(ValueError):
            split_rhat(np.zeros((2, 3, 1)))
        with pytest.raises(ValueError):
            effective_sample_size(np.zeros((2, 4, 1)))
