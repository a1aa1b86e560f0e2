import numpy as np
import pytest

from pppks.estimation import EstimatorKind, gamma_mle
from pppks.mcmc import McmcSettings
from pppks.models import Dataset, GammaParams, bad_priors, good_priors
from pppks.ppp import PppConfig, estimate_ppp, estimate_ppp_multi, two_sided
from pppks.statistics import StatisticKind


def _dataset(seed=51, n=20):
    rng = np.random.default_rng(seed)
    return Dataset(rng.gamma(2.0, 1.0 / 5.0, size=n))


class TestTwoSided:
    def test_values(self):
        assert two_sided(0.5) == 1.0
        assert two_sided(0.1) == pytest.approx(0.2)
        assert two_sided(0.9) == pytest.approx(0.2)
        assert two_sided(0.0) == 0.0
        assert two_sided(1.0) == 0.0

    def test_domain(self):
        with pytest.raises(ValueError):
            two_sided(-0.1)
        with pytest.raises(ValueError):
            two_sided(1.1)


class TestConfig:
    def test_defaults(self):
        cfg = PppConfig()
        assert cfg.estimator is EstimatorKind.MLE
        assert cfg.statistic is StatisticKind.MODIFIED_KS
        assert cfg.m_draws is None

    def test_m_draws_floor(self):
        with pytest.raises(ValueError):
            PppConfig(m_draws=99)


class TestEstimatePpp:
    def test_proportion_with_injected_statistic(self):
        # inject a deterministic statistic so the p-value is an exact count:
        # t(observed) is the dataset mean, replicates vary around theirs
        d = _dataset()
        cfg = PppConfig(m_draws=200)
        res = estimate_ppp(
            d,
            good_priors(),
            cfg,
            np.random.default_rng(1),
            statistic_fn=lambda ds, est, x: float(ds.observations.mean()),
        )
        t_rep = res.t_replicates
        assert res.m_draws == 200
        assert t_rep.shape == (200,)
        assert res.p_value == np.count_nonzero(t_rep >= res.t_obs) / 200.0

    def test_p_value_in_unit_interval_and_reproducible(self):
        d = _dataset()
        cfg = PppConfig(m_draws=150)
        a = estimate_ppp(d, good_priors(), cfg, np.random.default_rng(2))
        b = estimate_ppp(d, good_priors(), cfg, np.random.default_rng(2))
        assert 0.0 <= a.p_value <= 1.0
        assert a.p_value == b.p_value
        assert a.t_obs == b.t_obs
        np.testing.assert_array_equal(a.t_replicates, b.t_replicates)

    def test_different_seeds_differ(self):
        d = _dataset()
        cfg = PppConfig(m_draws=150)
        a = estimate_ppp(d, good_priors(), cfg, np.random.default_rng(3))
        b = estimate_ppp(d, good_priors(), cfg, np.random.default_rng(4))
        assert not np.array_equal(a.t_replicates, b.t_replicates)

    def test_observed_estimate_is_mle_estimate(self):
        d = _dataset()
        cfg = PppConfig(m_draws=100)
        mle = gamma_mle(d)
        res = estimate_ppp(
            d,
            good_priors(),
            cfg,
            np.random.default_rng(5),
            statistic_fn=lambda ds, est, x: est.alpha,
        )
        assert res.t_obs == pytest.approx(mle.alpha, rel=1e-12)

    def test_estimator_injection(self):
        d = _dataset()
        cfg = PppConfig(m_draws=100)
        fixed = GammaParams(2.0, 5.0)
        res = estimate_ppp(
            d,
            good_priors(),
            cfg,
            np.random.default_rng(6),
            statistic_fn=lambda ds, est, x: est.beta,
            estimator_fn=lambda ds, chain: fixed,
        )
        assert res.t_obs == 5.0
        assert res.p_value == 1.0  # every replicate ties at exactly beta = 5

    def test_m_exceeding_retained_rejected(self):
        d = _dataset()
        cfg = PppConfig(mcmc=McmcSettings(burn_in=100, iterations=500, thin=5), m_draws=200)
        with pytest.raises(ValueError):
            estimate_ppp(d, good_priors(), cfg, np.random.default_rng(7))

    def test_two_sided_only_for_chi_squared(self):
        d = _dataset()
        res_ks = estimate_ppp(
            d, good_priors(), PppConfig(m_draws=100), np.random.default_rng(8)
        )
        assert res_ks.two_sided_p is None
        res_chi = estimate_ppp(
            d,
            good_priors(),
            PppConfig(statistic=StatisticKind.CHI_SQUARED, m_draws=100),
            np.random.default_rng(8),
        )
        assert res_chi.two_sided_p == pytest.approx(two_sided(res_chi.p_value))

    def test_score_requires_covariates(self):
        d = _dataset()
        cfg = PppConfig(statistic=StatisticKind.SCORE, m_draws=100)
        with pytest.raises(ValueError):
            estimate_ppp(d, good_priors(), cfg, np.random.default_rng(9))

    def test_posterior_mean_estimator_runs(self):
        d = _dataset(n=10)
        cfg = PppConfig(estimator=EstimatorKind.POSTERIOR_MEAN, m_draws=100)
        res = estimate_ppp(d, bad_priors(), cfg, np.random.default_rng(10))
        assert 0.0 <= res.p_value <= 1.0


class TestEstimatePppMulti:
    def test_shared_chain_consistency(self):
        # KS on the gamma CDF and PIT-KS with identical margins must agree
        # exactly when computed from the same chain and replicates
        d = _dataset()
        out = estimate_ppp_multi(
            d,
            good_priors(),
            PppConfig(m_draws=150),
            [StatisticKind.MODIFIED_KS, StatisticKind.PIT_KS],
            np.random.default_rng(11),
        )
        a = out[StatisticKind.MODIFIED_KS]
        b = out[StatisticKind.PIT_KS]
        assert a.p_value == b.p_value
        np.testing.assert_allclose(a.t_replicates, b.t_replicates, atol=1e-12)

    def test_single_statistic_wrapper_equivalence(self):
        d = _dataset()
        multi = estimate_ppp_multi(
            d,
            good_priors(),
            PppConfig(m_draws=120),
            [StatisticKind.MODIFIED_KS],
            np.random.default_rng(12),
        )[StatisticKind.MODIFIED_KS]
        single = estimate_ppp(
            d, good_priors(), PppConfig(m_draws=120), np.random.default_rng(12)
        )
        assert multi.p_value == single.p_value
        np.testing.assert_array_equal(multi.t_replicates, single.t_replicates)
