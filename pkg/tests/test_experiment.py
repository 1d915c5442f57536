import pytest

from emse_unlearn.data import ScenarioSpec
from emse_unlearn.experiment import ConfigError, ExperimentConfig, check_thresholds, run_experiment


@pytest.fixture(scope="module")
def runs():
    return {name: run_experiment(ExperimentConfig(degree=3, scenario=ScenarioSpec(name, seed=2), plot=False))
            for name in ("cluster", "heavy", "overlap")}


def test_cluster_post_unlearn_fair_r2(runs):
    assert runs["cluster"].post_metrics.fair_r2 >= 0.7
    assert runs["cluster"].post_metrics.r2_wanted > runs["cluster"].pre_metrics.r2_wanted


def test_heavy_forgets_unwanted(runs):
    assert runs["heavy"].post_metrics.exp_r2_unwanted >= 0.8


def test_overlap_fair_r2_stays_low(runs):
    assert runs["overlap"].overlap_warning
    assert runs["overlap"].post_metrics.fair_r2 < runs["cluster"].post_metrics.fair_r2 - 0.2


def test_pre_and_post_share_dataset(runs):
    r = runs["heavy"]
    assert (r.pre_metrics.n_wanted, r.pre_metrics.n_unwanted) == (r.post_metrics.n_wanted, r.post_metrics.n_unwanted)
    assert r.dataset.x_range is not None and r.raw.x_range is None


def test_config_round_trip():
    cfg = ExperimentConfig.from_dict({"scenario": {"name": "heavy", "seed": 3}, "degree": 2,
                                      "learn": {"optimizer": "gd", "step_size": 0.001}})
    assert ExperimentConfig.from_dict(cfg.to_dict()) == cfg
    assert cfg.with_overrides(seed=9).scenario.seed == 9


def test_config_needs_one_source():
    with pytest.raises(ConfigError):
        ExperimentConfig(degree=1)
    with pytest.raises(ConfigError):
        ExperimentConfig(degree=1, scenario=ScenarioSpec(), data="x.csv")


def test_threshold_checks(runs):
    r = runs["cluster"]
    checks = check_thresholds({"r2_wanted_gain_min": 0.2, "fair_r2_max": 0.1}, r.pre_metrics, r.post_metrics)
    assert [c["passed"] for c in checks] == [False, True]
