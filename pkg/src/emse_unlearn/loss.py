"""Squared-error and Ethical MSE (EMSE) objectives with analytic gradients.

EMSE keeps the squared error on wanted samples and adds, for every unwanted
sample, the barrier ``-log(1 - c * exp(-r**2 / (2 sigma**2)))`` with
``c = 1 / (sqrt(2 pi) sigma)``.  The barrier is largest at zero residual and
vanishes as the residual grows, so minimizing it pushes the model away from
unwanted targets.  Both objectives use the sum form, not the mean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import PolynomialModel, design_matrix, predict

DEFAULT_SIGMA = 1.0 / math.sqrt(2.0)
# Below this the barrier's log argument can reach zero or go negative.
SIGMA_LOWER_BOUND = 1.0 / math.sqrt(2.0 * math.pi)


class LossConfigError(ValueError):
    pass


def _check_sigma(sigma: float) -> float:
    sigma = float(sigma)
    if not (math.isfinite(sigma) and sigma > SIGMA_LOWER_BOUND):
        raise LossConfigError(
            f"sigma={sigma!r} is invalid: EMSE needs sigma > 1/sqrt(2*pi) = {SIGMA_LOWER_BOUND:.6f} "
            f"so that 1 - exp(-r^2/(2 sigma^2))/(sqrt(2 pi) sigma) stays inside (0, 1)"
        )
    return sigma


def wanted_weight(sigma: float) -> float:
    """Factor ``1 / (2 sigma**2)`` on the wanted squared residuals.

    Rounded to 15 decimals so that the default sigma gives exactly 1.0 and EMSE
    with no unwanted samples reproduces :func:`mse` bit for bit.
    """
    return round(1.0 / (2.0 * sigma * sigma), 15)


def barrier_scale(sigma: float) -> float:
    return 1.0 / (math.sqrt(2.0 * math.pi) * sigma)


@dataclass(frozen=True)
class LossSpec:
    """Selects the objective. ``sigma`` only matters for EMSE."""

    kind: str = "EMSE"
    sigma: float = DEFAULT_SIGMA

    def __post_init__(self):
        kind = str(self.kind).upper()
        if kind not in ("MSE", "EMSE"):
            raise LossConfigError(f"unknown loss kind {self.kind!r} (expected 'MSE' or 'EMSE')")
        object.__setattr__(self, "kind", kind)
        if kind == "EMSE":
            object.__setattr__(self, "sigma", _check_sigma(self.sigma))

    def to_dict(self) -> dict:
        return {"kind": self.kind, "sigma": self.sigma}


def _pair(y, yhat):
    y = np.asarray(y, dtype=np.float64).ravel()
    yhat = np.asarray(yhat, dtype=np.float64).ravel()
    if y.shape != yhat.shape:
        raise ValueError(f"length mismatch: y has {y.shape[0]} values, yhat has {yhat.shape[0]}")
    if y.size == 0:
        raise ValueError("empty dataset")
    return y, yhat


def _wanted_mask(wanted, n: int) -> np.ndarray:
    wanted = np.asarray(wanted, dtype=bool).ravel()
    if wanted.shape[0] != n:
        raise ValueError(f"mask has {wanted.shape[0]} labels for {n} samples")
    return wanted


def mse(y, yhat) -> float:
    """Sum of squared residuals."""
    y, yhat = _pair(y, yhat)
    r = y - yhat
    return float(np.sum(r * r))


def _barrier_probability(r: np.ndarray, sigma: float) -> np.ndarray:
    # p = c * exp(-r^2 / (2 sigma^2)); p <= c < 1 for a validated sigma.
    return barrier_scale(sigma) * np.exp(-(r * r) / (2.0 * sigma * sigma))


def unwanted_term(r, sigma: float = DEFAULT_SIGMA):
    """Barrier value ``-log(1 - c exp(-r^2 / (2 sigma^2)))`` for residual(s) ``r``."""
    sigma = _check_sigma(sigma)
    r_arr = np.asarray(r, dtype=np.float64)
    out = -np.log1p(-_barrier_probability(r_arr, sigma))
    return float(out) if out.ndim == 0 else out


def emse(y, yhat, wanted, sigma: float = DEFAULT_SIGMA) -> float:
    """Ethical MSE.

    Parameters
    ----------
    y, yhat : array-like
        Targets and predictions.
    wanted : array-like of bool
        True for samples to keep, False for samples to forget.
    sigma : float
        Likelihood scale; the default ``1/sqrt(2)`` leaves the wanted part as a
        plain sum of squares.
    """
    sigma = _check_sigma(sigma)
    y, yhat = _pair(y, yhat)
    wanted = _wanted_mask(wanted, y.size)
    r = y - yhat
    rw = r[wanted]
    ru = r[~wanted]
    wanted_part = wanted_weight(sigma) * float(np.sum(rw * rw))
    unwanted_part = float(np.sum(unwanted_term(ru, sigma))) if ru.size else 0.0
    return wanted_part + unwanted_part


def loss_value(spec: LossSpec, y, yhat, wanted) -> float:
    if spec.kind == "MSE":
        return mse(y, yhat)
    return emse(y, yhat, wanted, spec.sigma)


def loss_grad_predictions(spec: LossSpec, y, yhat, wanted) -> np.ndarray:
    """Derivative of the selected loss with respect to each prediction."""
    y, yhat = _pair(y, yhat)
    r = y - yhat
    if spec.kind == "MSE":
        return -2.0 * r
    sigma = spec.sigma
    wanted = _wanted_mask(wanted, y.size)
    grad = -2.0 * wanted_weight(sigma) * r
    ru = r[~wanted]
    if ru.size:
        p = _barrier_probability(ru, sigma)
        # d/dyhat of -log(1 - p) = (r / sigma^2) * p / (1 - p)
        grad[~wanted] = (ru / (sigma * sigma)) * p / (1.0 - p)
    return grad


def loss_grad_params(model: PolynomialModel, xs, y, wanted, spec: LossSpec) -> np.ndarray:
    """Gradient of the selected loss with respect to the model coefficients."""
    X = design_matrix(xs, model.degree)
    yhat = predict(model, xs)
    return X.T @ loss_grad_predictions(spec, y, yhat, wanted)


def loss_and_grad(model: PolynomialModel, X: np.ndarray, y: np.ndarray, wanted: np.ndarray,
                  spec: LossSpec) -> tuple[float, np.ndarray]:
    """Loss and coefficient gradient given a precomputed design matrix."""
    yhat = X @ model.coefficients
    return loss_value(spec, y, yhat, wanted), X.T @ loss_grad_predictions(spec, y, yhat, wanted)
