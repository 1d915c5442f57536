"""Train polynomial regressors, then unlearn designated samples with the EMSE criterion."""

from .data import Dataset, ScenarioSpec, denormalize_x, generate, load_csv, normalize_x, save_csv
from .loss import DEFAULT_SIGMA, LossConfigError, LossSpec, emse, loss_grad_params, mse, unwanted_term
from .metrics import (
    MetricsReport,
    OverlapWarning,
    evaluate,
    exponential_r_squared,
    fair_r_squared,
    overlap_diagnostic,
    r_squared,
)
from .model import PolynomialModel, design_matrix, init_model, predict
from .optim import TrainConfig, TrainingError, TrainTrace, adam_step, gd_step, train, unlearn

__version__ = "0.1.0"
