"""Full-batch training loops and the unlearning procedure."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field

import numpy as np

from .loss import LossSpec, loss_grad_predictions, loss_value
from .model import PolynomialModel, design_matrix

logger = logging.getLogger(__name__)


class TrainingError(FloatingPointError):
    """Raised when the loss or gradient stops being finite."""


@dataclass(frozen=True)
class TrainConfig:
    optimizer: str = "adam"
    step_size: float = 0.01
    max_iters: int = 20000
    grad_tol: float = 1e-8
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        opt = str(self.optimizer).lower()
        if opt == "sgd":
            opt = "gd"
        if opt not in ("gd", "adam"):
            raise ValueError(f"unknown optimizer {self.optimizer!r} (expected 'gd' or 'adam')")
        object.__setattr__(self, "optimizer", opt)
        if not self.step_size > 0:
            raise ValueError(f"step_size must be positive, got {self.step_size}")
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise ValueError(f"max_iters must be a positive integer, got {self.max_iters}")
        if not self.grad_tol > 0:
            raise ValueError(f"grad_tol must be positive, got {self.grad_tol}")
        if not (0 < self.adam_beta1 < 1 and 0 < self.adam_beta2 < 1):
            raise ValueError("adam_beta1 and adam_beta2 must lie strictly between 0 and 1")
        if not self.adam_eps > 0:
            raise ValueError(f"adam_eps must be positive, got {self.adam_eps}")
        object.__setattr__(self, "max_iters", int(self.max_iters))

    @classmethod
    def from_dict(cls, d: dict | None) -> TrainConfig:
        d = dict(d or {})
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown training option(s): {', '.join(sorted(unknown))}")
        return cls(**d)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class TrainTrace:
    losses: list[float] = field(default_factory=list)
    final_grad_norm: float = float("nan")
    iterations_used: int = 0
    converged: bool = False

    def to_dict(self) -> dict:
        return {
            "losses": list(self.losses),
            "final_grad_norm": self.final_grad_norm,
            "iterations_used": self.iterations_used,
            "converged": self.converged,
        }


@dataclass
class OptimizerState:
    params: np.ndarray
    m: np.ndarray | None = None
    v: np.ndarray | None = None
    t: int = 0


def gd_step(state: OptimizerState, grad: np.ndarray, step_size: float) -> OptimizerState:
    return OptimizerState(state.params - step_size * grad, state.m, state.v, state.t + 1)


def adam_step(state: OptimizerState, grad: np.ndarray, step_size: float,
              beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8) -> OptimizerState:
    """One bias-corrected Adam update."""
    t = state.t + 1
    m = np.zeros_like(grad) if state.m is None else state.m
    v = np.zeros_like(grad) if state.v is None else state.v
    m = beta1 * m + (1.0 - beta1) * grad
    v = beta2 * v + (1.0 - beta2) * (grad * grad)
    m_hat = m / (1.0 - beta1 ** t)
    v_hat = v / (1.0 - beta2 ** t)
    params = state.params - step_size * m_hat / (np.sqrt(v_hat) + eps)
    return OptimizerState(params, m, v, t)


def _step(cfg: TrainConfig, state: OptimizerState, grad: np.ndarray) -> OptimizerState:
    if cfg.optimizer == "gd":
        return gd_step(state, grad, cfg.step_size)
    return adam_step(state, grad, cfg.step_size, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps)


def train(init: PolynomialModel, xs, y, wanted, spec: LossSpec,
          cfg: TrainConfig | None = None) -> tuple[PolynomialModel, TrainTrace]:
    """Minimize ``spec``'s loss over the coefficients, starting from ``init``.

    Returns the lowest-loss iterate seen, so the result never scores worse than
    the starting point. Stops when the gradient infinity-norm drops below
    ``cfg.grad_tol`` or after ``cfg.max_iters`` updates.
    """
    cfg = cfg or TrainConfig()
    y = np.asarray(y, dtype=np.float64).ravel()
    wanted = np.asarray(wanted, dtype=bool).ravel()
    X = design_matrix(xs, init.degree)
    if X.shape[0] == 0:
        raise ValueError("empty dataset")
    if not (y.shape[0] == wanted.shape[0] == X.shape[0]):
        raise ValueError(f"xs, y and mask lengths differ: {X.shape[0]}, {y.shape[0]}, {wanted.shape[0]}")

    state = OptimizerState(np.array(init.coefficients, dtype=np.float64))
    trace = TrainTrace()
    best_params, best_loss = state.params, np.inf
    for it in range(cfg.max_iters + 1):
        with np.errstate(over="ignore", invalid="ignore"):
            yhat = X @ state.params
            loss = loss_value(spec, y, yhat, wanted)
            grad = X.T @ loss_grad_predictions(spec, y, yhat, wanted)
        if not (np.isfinite(loss) and np.all(np.isfinite(grad))):
            raise TrainingError(
                f"non-finite {'loss' if not np.isfinite(loss) else 'gradient'} at iteration {it}; "
                f"parameters={state.params.tolist()}"
            )
        trace.losses.append(float(loss))
        gnorm = float(np.max(np.abs(grad)))
        if loss < best_loss:
            best_params, best_loss, trace.final_grad_norm = state.params, loss, gnorm
        if gnorm < cfg.grad_tol:
            trace.converged = True
            break
        if it == cfg.max_iters:
            break
        state = _step(cfg, state, grad)
        trace.iterations_used = state.t
    logger.debug("train %s: %d iterations, loss %.6g, converged=%s",
                 spec.kind, trace.iterations_used, best_loss, trace.converged)
    return PolynomialModel(init.degree, best_params), trace


def unlearn(trained: PolynomialModel, xs, y, wanted, sigma: float,
            cfg: TrainConfig | None = None) -> tuple[PolynomialModel, TrainTrace]:
    """Forget the unwanted samples by re-optimizing EMSE from the trained parameters."""
    wanted = np.asarray(wanted, dtype=bool).ravel()
    if not wanted.any():
        raise ValueError("unlearning needs at least one wanted sample; every sample is labeled unwanted")
    return train(trained, xs, y, wanted, LossSpec("EMSE", sigma), cfg)
