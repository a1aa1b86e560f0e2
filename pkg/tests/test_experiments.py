import numpy as np
import pytest

from pppks.estimation import EstimatorKind
from pppks.experiments import (
    TWO_SAMPLE_KS_C99,
    ExperimentConfig,
    Scenario,
    rejection_rate,
    replication_seed,
    run_contiguity_check,
    run_null_calibration,
    run_power,
    summarize,
    two_sample_ks_distance,
    uniformity_ks_distance,
)
from pppks.models import ModelSpec, bad_priors, good_priors
from pppks.ppp import PppConfig
from pppks.statistics import StatisticKind

from helpers import oracle_two_sample_ks, oracle_uniform_ks


def _config(
    replications=6,
    n=15,
    statistics=(StatisticKind.MODIFIED_KS,),
    model=None,
    estimator=EstimatorKind.MLE,
    seed=42,
    parallelism=1,
    m_draws=100,
):
    return ExperimentConfig(
        scenario=Scenario.NULL_CALIBRATION,
        n=n,
        replications=replications,
        prior=good_priors(),
        estimator=estimator,
        statistics=tuple(statistics),
        data_model=model or ModelSpec.gamma(2.0, 5.0),
        ppp_config=PppConfig(estimator=estimator, m_draws=m_draws),
        master_seed=seed,
        parallelism=parallelism,
    )


class TestConfig:
    @pytest.mark.parametrize(
        "kw", [{"replications": 0}, {"n": 0}, {"parallelism": 0}, {"statistics": ()}]
    )
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            _config(**kw)

    def test_estimator_mismatch_rejected(self):
        cfg = ExperimentConfig(
            scenario=Scenario.NULL_CALIBRATION,
            n=15,
            replications=2,
            prior=good_priors(),
            estimator=EstimatorKind.POSTERIOR_MEAN,
            statistics=(StatisticKind.MODIFIED_KS,),
            data_model=ModelSpec.gamma(2.0, 5.0),
            ppp_config=PppConfig(estimator=EstimatorKind.MLE, m_draws=100),
            master_seed=1,
        )
        with pytest.raises(ValueError):
            run_null_calibration(cfg)


class TestSeeding:
    def test_replication_seed_stable(self):
        a = replication_seed(42, 3).generate_state(4)
        b = replication_seed(42, 3).generate_state(4)
        np.testing.assert_array_equal(a, b)

    def test_replication_seed_distinct(self):
        a = replication_seed(42, 3).generate_state(4)
        b = replication_seed(42, 4).generate_state(4)
        c = replication_seed(43, 3).generate_state(4)
        assert not np.array_equal(a, b)
        assert not np.array_equal(a, c)


class TestStudies:
    def test_null_calibration_rows_and_summary(self):
        cfg = _config(statistics=(StatisticKind.MODIFIED_KS, StatisticKind.CHI_SQUARED))
        res = run_null_calibration(cfg)
        assert len(res.rows) == cfg.replications * 2
        for stat in ("modified_ks", "chi_squared"):
            entry = res.summary[stat]
            assert entry["count"] == cfg.replications
            assert entry["excluded"] == 0
            assert 0.0 <= entry["mean"] <= 1.0
            assert set(entry["rejection_rates"]) == {"0.01", "0.05", "0.1"}
        # MLE runs record the observed-data estimate
        assert all(r.est_alpha is not None and r.est_alpha > 0 for r in res.rows)

    def test_two_sided_column_only_for_chi_squared(self):
        cfg = _config(statistics=(StatisticKind.MODIFIED_KS, StatisticKind.CHI_SQUARED))
        res = run_null_calibration(cfg)
        for r in res.rows:
            if r.statistic == "chi_squared":
                assert r.two_sided_p is not None
            else:
                assert r.two_sided_p is None

    def test_null_requires_gamma_family(self):
        with pytest.raises(ValueError):
            run_null_calibration(_config(model=ModelSpec.weibull(2.0, 0.2)))

    def test_power_requires_non_gamma(self):
        cfg = _config()
        with pytest.raises(ValueError):
            run_power(cfg)

    def test_power_runs_with_alternatives(self):
        cfg = _config(
            model=ModelSpec.lognormal(0.0, 0.5),
            statistics=(StatisticKind.MODIFIED_KS, StatisticKind.SCORE),
            replications=4,
        )
        res = run_power(cfg)
        assert res.summary["score"]["count"] == 4

    def test_glm_covariates_redrawn_per_replication(self):
        # the GLM with redrawn covariates must not produce identical rows
        cfg = _config(
            model=ModelSpec.gamma_glm(2.0, 5.0, 0.5, np.ones(15)),
            statistics=(StatisticKind.SCORE,),
            replications=4,
        )
        res = run_power(cfg)
        p = [r.p_value for r in res.rows]
        assert len(set(p)) > 1

    def test_deterministic_across_parallelism(self):
        serial = run_null_calibration(_config(parallelism=1))
        parallel = run_null_calibration(_config(parallelism=3))
        assert [r.p_value for r in serial.rows] == [r.p_value for r in parallel.rows]
        assert [r.t_obs for r in serial.rows] == [r.t_obs for r in parallel.rows]

    def test_posterior_mean_study_runs(self):
        cfg = _config(
            replications=3, n=10, estimator=EstimatorKind.POSTERIOR_MEAN, seed=7
        )
        cfg = ExperimentConfig(
            scenario=cfg.scenario,
            n=cfg.n,
            replications=cfg.replications,
            prior=bad_priors(),
            estimator=cfg.estimator,
            statistics=cfg.statistics,
            data_model=cfg.data_model,
            ppp_config=cfg.ppp_config,
            master_seed=cfg.master_seed,
        )
        res = run_null_calibration(cfg)
        assert res.summary["modified_ks"]["count"] == 3
        # posterior-mean runs do not carry an MLE estimate column
        assert all(r.est_alpha is None for r in res.rows)


class TestSummaryHelpers:
    def test_uniformity_distance_vs_oracle(self):
        rng = np.random.default_rng(61)
        for _ in range(5):
            v = rng.random(int(rng.integers(5, 200)))
            assert uniformity_ks_distance(v) == pytest.approx(
                oracle_uniform_ks(v), abs=1e-12
            )

    def test_uniformity_distance_hand_value(self):
        assert uniformity_ks_distance([0.5]) == pytest.approx(0.5)
        # 1e4 stratified pseudo-uniforms sit well inside the DKW band
        u = (np.arange(10000) + 0.5) / 10000.0
        assert uniformity_ks_distance(u) < 0.0136

    def test_rejection_rate(self):
        p = [0.01, 0.04, 0.2, 0.9]
        assert rejection_rate(p, 0.05) == 0.5
        assert rejection_rate(p, 0.001) == 0.0
        # two-sided doubling: 0.9 -> 0.2, 0.01 -> 0.02, 0.04 -> 0.08
        assert rejection_rate(p, 0.05, two_sided=True) == 0.25
        with pytest.raises(ValueError):
            rejection_rate(p, 0.0)

    def test_two_sample_ks_vs_oracle(self):
        rng = np.random.default_rng(62)
        a = rng.normal(size=80)
        b = rng.normal(0.5, 1.0, size=120)
        assert two_sample_ks_distance(a, b) == pytest.approx(
            oracle_two_sample_ks(a, b), abs=1e-12
        )

    def test_summarize_counts_errors(self):
        from pppks.experiments import ReplicationRow

        rows = [
            ReplicationRow(0, "modified_ks", 0.2, None, 1.0, None, None),
            ReplicationRow(1, "modified_ks", None, None, None, None, None, error="x"),
        ]
        out = summarize(rows, (StatisticKind.MODIFIED_KS,))
        assert out["modified_ks"]["count"] == 1
        assert out["modified_ks"]["excluded"] == 1


class TestContiguity:
    def test_report_fields_and_band(self):
        rep = run_contiguity_check(n=200, c=2.0, replications=200, seed=63)
        assert rep.n == 200 and rep.c == 2.0 and rep.replications == 200
        assert rep.equal_dist_band_99 == pytest.approx(
            TWO_SAMPLE_KS_C99 * np.sqrt(2.0 / 200.0)
        )
        assert 0.0 <= rep.distance <= 1.0

    def test_small_n_rejected(self):
        with pytest.raises(ValueError):
            run_contiguity_check(n=50, c=2.0, replications=100, seed=1)
