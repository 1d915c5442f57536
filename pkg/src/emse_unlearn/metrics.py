"""Fit and forgetting scores: subset R^2, exponential R^2, fair R^2.

R^2 is computed per subset with that subset's own mean, and is not floored at
zero.  The exponential transform ``1 - exp(-(1 - R^2))`` maps R^2 in
``(-inf, 1]`` onto ``[0, 1)``; values near 1 mean the model does not represent
the subset.  Fair R^2 multiplies the wanted-side representativeness by the
unwanted-side unrepresentativeness, which assumes the two are independent.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np
from scipy.stats import wasserstein_distance

from .model import PolynomialModel, predict

DEFAULT_OVERLAP_THRESHOLD = 0.5


class DegenerateSubsetError(ValueError):
    pass


class OverlapWarning(UserWarning):
    """Wanted and unwanted inputs overlap enough that fair R^2 is unreliable."""


def r_squared(y, yhat) -> float:
    """``1 - RSS / TSS`` with TSS taken about the mean of ``y``."""
    y = np.asarray(y, dtype=np.float64).ravel()
    yhat = np.asarray(yhat, dtype=np.float64).ravel()
    if y.shape != yhat.shape:
        raise ValueError(f"length mismatch: {y.shape[0]} targets, {yhat.shape[0]} predictions")
    if y.size < 2:
        raise DegenerateSubsetError(f"R^2 needs at least 2 samples, got {y.size}")
    resid = y - yhat
    dev = y - y.mean()
    tss = float(np.sum(dev * dev))
    if tss == 0.0:
        raise DegenerateSubsetError("degenerate subset: all targets are equal, total sum of squares is 0")
    return 1.0 - float(np.sum(resid * resid)) / tss


def exponential_r_squared(r2: float) -> float:
    if r2 > 1.0:
        raise ValueError(f"R^2 cannot exceed 1, got {r2}")
    return -math.expm1(-(1.0 - r2))


def fair_r_squared(exp_r2_wanted: float, exp_r2_unwanted: float) -> float:
    # Exactly 1.0 is tolerated: exponential_r_squared saturates in floating
    # point once R^2 drops below about -36.
    for name, v in (("exp_r2_wanted", exp_r2_wanted), ("exp_r2_unwanted", exp_r2_unwanted)):
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"{name} must lie in [0, 1), got {v}")
    return (1.0 - exp_r2_wanted) * exp_r2_unwanted


def overlap_diagnostic(xs, wanted) -> float:
    """Heuristic overlap score of wanted vs unwanted inputs, in ``[0, 1]``.

    ``1 - min(1, W1 / s)`` where ``W1`` is the 1-D Wasserstein distance between
    the two subsets' min-max-normalized x values and ``s`` is the pooled
    standard deviation of those values. Identical samples score 1; subsets
    whose distance exceeds the pooled spread score 0.
    """
    xs = np.asarray(xs, dtype=np.float64).ravel()
    wanted = np.asarray(wanted, dtype=bool).ravel()
    if xs.shape != wanted.shape:
        raise ValueError(f"{xs.shape[0]} inputs but {wanted.shape[0]} labels")
    if wanted.all() or not wanted.any():
        raise ValueError("overlap diagnostic needs non-empty wanted and unwanted subsets")
    lo, hi = xs.min(), xs.max()
    if hi == lo:
        return 1.0
    u = (xs - lo) / (hi - lo)
    dist = wasserstein_distance(u[wanted], u[~wanted])
    spread = float(np.std(u))
    return float(1.0 - min(1.0, dist / spread))


@dataclass(frozen=True)
class MetricsReport:
    r2_wanted: float
    r2_unwanted: float
    exp_r2_wanted: float
    exp_r2_unwanted: float
    fair_r2: float
    n_wanted: int
    n_unwanted: int
    overlap_score: float

    def to_dict(self) -> dict:
        return asdict(self)

    def overlap_warning(self, threshold: float = DEFAULT_OVERLAP_THRESHOLD) -> bool:
        return self.overlap_score > threshold


def evaluate(model: PolynomialModel, xs, y, wanted,
             overlap_threshold: float = DEFAULT_OVERLAP_THRESHOLD) -> MetricsReport:
    """Score ``model`` on both subsets.

    Emits :class:`OverlapWarning` when the overlap diagnostic exceeds
    ``overlap_threshold``.
    """
    xs = np.asarray(xs, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    wanted = np.asarray(wanted, dtype=bool).ravel()
    yhat = predict(model, xs)

    r2 = {}
    for name, sel in (("wanted", wanted), ("unwanted", ~wanted)):
        try:
            r2[name] = r_squared(y[sel], yhat[sel])
        except DegenerateSubsetError as exc:
            raise DegenerateSubsetError(f"{name} subset: {exc}") from None

    exp_w = exponential_r_squared(r2["wanted"])
    exp_u = exponential_r_squared(r2["unwanted"])
    overlap = overlap_diagnostic(xs, wanted)
    if overlap > overlap_threshold:
        warnings.warn(
            f"overlap diagnostic {overlap:.3f} exceeds {overlap_threshold}: wanted and unwanted "
            "inputs are hard to separate, fair R^2 assumes independence",
            OverlapWarning,
            stacklevel=2,
        )
    return MetricsReport(
        r2_wanted=r2["wanted"],
        r2_unwanted=r2["unwanted"],
        exp_r2_wanted=exp_w,
        exp_r2_unwanted=exp_u,
        fair_r2=fair_r_squared(exp_w, exp_u),
        n_wanted=int(wanted.sum()),
        n_unwanted=int((~wanted).sum()),
        overlap_score=overlap,
    )
