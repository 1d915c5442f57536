"""Learn, unlearn and evaluate in one reproducible run.

A run is driven by a JSON config::

    {
      "scenario": {"name": "cluster", "seed": 1},   # or "data": "samples.csv"
      "degree": 3,                                  # required
      "sigma": 0.7071067811865475,
      "normalize": true,
      "init": {"mode": "zeros", "scale": 0.1},
      "learn": {"optimizer": "adam", "step_size": 0.01, ...},
      "unlearn": {"optimizer": "adam", "step_size": 0.01, ...},
      "out_dir": "out",
      "plot": true,
      "overlap_threshold": 0.5,
      "thresholds": {"r2_wanted_min": 0.9, "exp_r2_unwanted_min": 0.8}
    }

Threshold keys are ``<metric>_min`` / ``<metric>_max`` for any post-unlearning
metric, plus ``r2_wanted_gain_min`` (post minus pre wanted R^2).
"""

from __future__ import annotations

import csv
import json
import logging
import warnings
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path

from .data import Dataset, ScenarioSpec, generate, load_csv, normalize_x, save_csv
from .loss import DEFAULT_SIGMA, LossSpec
from .metrics import DEFAULT_OVERLAP_THRESHOLD, MetricsReport, evaluate
from .model import PolynomialModel, init_model
from .optim import TrainConfig, TrainTrace, train, unlearn
from .plotting import TITLES, plot_fit

logger = logging.getLogger(__name__)

_METRIC_FIELDS = tuple(MetricsReport.__dataclass_fields__)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    degree: int
    scenario: ScenarioSpec | None = None
    data: str | None = None
    sigma: float = DEFAULT_SIGMA
    normalize: bool = True
    init_mode: str = "zeros"
    init_scale: float = 0.1
    learn: TrainConfig = field(default_factory=TrainConfig)
    unlearn: TrainConfig = field(default_factory=TrainConfig)
    out_dir: str = "out"
    plot: bool = True
    overlap_threshold: float = DEFAULT_OVERLAP_THRESHOLD
    thresholds: dict = field(default_factory=dict)

    def __post_init__(self):
        if (self.scenario is None) == (self.data is None):
            raise ConfigError("config needs exactly one of 'scenario' or 'data'")
        if not isinstance(self.degree, int) or isinstance(self.degree, bool) or self.degree < 0:
            raise ConfigError(f"'degree' must be a non-negative integer, got {self.degree!r}")
        LossSpec("EMSE", self.sigma)
        for key in self.thresholds:
            if key == "r2_wanted_gain_min":
                continue
            base, _, bound = key.rpartition("_")
            if bound not in ("min", "max") or base not in _METRIC_FIELDS:
                raise ConfigError(f"unknown threshold {key!r}")

    @classmethod
    def from_dict(cls, d: dict) -> ExperimentConfig:
        d = dict(d)
        known = {"scenario", "data", "degree", "sigma", "normalize", "init", "learn", "unlearn",
                 "out_dir", "plot", "overlap_threshold", "thresholds"}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config key(s): {', '.join(sorted(unknown))}")
        if "degree" not in d:
            raise ConfigError("config is missing required key 'degree'")
        init = dict(d.pop("init", None) or {})
        kwargs = {
            "init_mode": init.pop("mode", "zeros"),
            "init_scale": init.pop("scale", 0.1),
        }
        if init:
            raise ConfigError(f"unknown init option(s): {', '.join(sorted(init))}")
        if d.get("scenario") is not None:
            kwargs["scenario"] = ScenarioSpec.from_dict(d.pop("scenario"))
        else:
            d.pop("scenario", None)
        for phase in ("learn", "unlearn"):
            kwargs[phase] = TrainConfig.from_dict(d.pop(phase, None))
        kwargs.update(d)
        return cls(**kwargs)

    def to_dict(self) -> dict:
        return {
            "scenario": None if self.scenario is None else self.scenario.to_dict(),
            "data": self.data,
            "degree": self.degree,
            "sigma": self.sigma,
            "normalize": self.normalize,
            "init": {"mode": self.init_mode, "scale": self.init_scale},
            "learn": self.learn.to_dict(),
            "unlearn": self.unlearn.to_dict(),
            "out_dir": self.out_dir,
            "plot": self.plot,
            "overlap_threshold": self.overlap_threshold,
            "thresholds": dict(self.thresholds),
        }

    def with_overrides(self, seed: int | None = None, out_dir: str | None = None,
                       plot: bool | None = None) -> ExperimentConfig:
        cfg = self
        if seed is not None:
            cfg = replace(cfg, learn=replace(cfg.learn, seed=seed), unlearn=replace(cfg.unlearn, seed=seed))
            if cfg.scenario is not None:
                cfg = replace(cfg, scenario=replace(cfg.scenario, seed=seed))
        if out_dir is not None:
            cfg = replace(cfg, out_dir=out_dir)
        if plot is not None:
            cfg = replace(cfg, plot=plot)
        return cfg


def load_config(path) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    try:
        return ExperimentConfig.from_dict(raw)
    except TypeError as exc:
        raise ConfigError(f"{path}: {exc}") from None


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    raw: Dataset
    dataset: Dataset
    pre_model: PolynomialModel
    post_model: PolynomialModel
    pre_metrics: MetricsReport
    post_metrics: MetricsReport
    learn_trace: TrainTrace
    unlearn_trace: TrainTrace
    checks: list = field(default_factory=list)
    started: str = ""
    finished: str = ""

    @property
    def overlap_warning(self) -> bool:
        return self.post_metrics.overlap_warning(self.config.overlap_threshold)

    @property
    def thresholds_met(self) -> bool:
        return all(c["passed"] for c in self.checks)

    def report(self) -> dict:
        x_range = self.dataset.x_range
        return {
            "config": self.config.to_dict(),
            "pre_metrics": self.pre_metrics.to_dict(),
            "post_metrics": self.post_metrics.to_dict(),
            "learn_trace": self.learn_trace.to_dict(),
            "unlearn_trace": self.unlearn_trace.to_dict(),
            "pre_model": model_record(self.pre_model, x_range),
            "post_model": model_record(self.post_model, x_range),
            "overlap_warning": self.overlap_warning,
            "threshold_checks": self.checks,
            "thresholds_met": self.thresholds_met,
            "timestamps": {"started": self.started, "finished": self.finished},
        }


def model_record(model: PolynomialModel, x_range=None) -> dict:
    rec = model.to_dict()
    rec["x_range"] = None if x_range is None else list(x_range)
    return rec


def save_model(model: PolynomialModel, path, x_range=None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_record(model, x_range), fh, indent=2, allow_nan=False)
        fh.write("\n")


def load_model(path) -> tuple[PolynomialModel, tuple[float, float] | None]:
    with open(path, encoding="utf-8") as fh:
        rec = json.load(fh)
    try:
        model = PolynomialModel(rec["degree"], rec["coefficients"])
    except KeyError as exc:
        raise ConfigError(f"{path}: model file is missing {exc}") from None
    x_range = rec.get("x_range")
    return model, None if x_range is None else (float(x_range[0]), float(x_range[1]))


def check_thresholds(thresholds: dict, pre: MetricsReport, post: MetricsReport) -> list[dict]:
    checks = []
    for key, limit in sorted(thresholds.items()):
        if key == "r2_wanted_gain_min":
            value = post.r2_wanted - pre.r2_wanted
            ok = value >= limit
        else:
            base, _, bound = key.rpartition("_")
            value = getattr(post, base)
            ok = value >= limit if bound == "min" else value <= limit
        checks.append({"name": key, "value": value, "limit": limit, "passed": bool(ok)})
    return checks


def load_dataset(cfg: ExperimentConfig) -> Dataset:
    if cfg.scenario is not None:
        return generate(cfg.scenario)
    return load_csv(cfg.data)


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Train on all samples under MSE, then unlearn under EMSE from that fit."""
    started = datetime.now(timezone.utc).isoformat()
    raw = load_dataset(cfg)
    ds = normalize_x(raw) if cfg.normalize else raw
    start = init_model(cfg.degree, cfg.init_mode, cfg.learn.seed, cfg.init_scale)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        learned, learn_trace = train(start, ds.xs, ds.ys, ds.wanted, LossSpec("MSE"), cfg.learn)
        pre = evaluate(learned, ds.xs, ds.ys, ds.wanted, cfg.overlap_threshold)
        forgot, unlearn_trace = unlearn(learned, ds.xs, ds.ys, ds.wanted, cfg.sigma, cfg.unlearn)
        post = evaluate(forgot, ds.xs, ds.ys, ds.wanted, cfg.overlap_threshold)

    result = ExperimentResult(cfg, raw, ds, learned, forgot, pre, post, learn_trace, unlearn_trace,
                              check_thresholds(cfg.thresholds, pre, post), started)
    if result.overlap_warning:
        logger.warning("overlap diagnostic %.3f exceeds %.3f: fair R^2 assumes the wanted and unwanted "
                       "fits are independent, which these inputs do not support",
                       post.overlap_score, cfg.overlap_threshold)
    result.finished = datetime.now(timezone.utc).isoformat()
    return result


def write_outputs(result: ExperimentResult, out_dir=None) -> dict[str, Path]:
    """Write report.json, metrics.csv, data.csv, both models and (optionally) SVG plots."""
    out = Path(out_dir or result.config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {}
    x_range = result.dataset.x_range

    paths["report"] = out / "report.json"
    with open(paths["report"], "w", encoding="utf-8") as fh:
        json.dump(result.report(), fh, indent=2, allow_nan=False)
        fh.write("\n")

    paths["metrics"] = out / "metrics.csv"
    with open(paths["metrics"], "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["phase", *_METRIC_FIELDS])
        for phase, m in (("pre", result.pre_metrics), ("post", result.post_metrics)):
            writer.writerow([phase, *(repr(getattr(m, f)) for f in _METRIC_FIELDS)])

    raw = result.raw
    paths["data"] = out / "data.csv"
    save_csv(raw, paths["data"])
    paths["model_before"] = out / "model_before.json"
    save_model(result.pre_model, paths["model_before"], x_range)
    paths["model_after"] = out / "model_after.json"
    save_model(result.post_model, paths["model_after"], x_range)

    if result.config.plot:
        paths["before"] = plot_fit(raw, result.pre_model, out / "before.svg", x_range, TITLES["before"])
        paths["after"] = plot_fit(raw, result.post_model, out / "after.svg", x_range, TITLES["after"])
    return paths
