"""Polynomial hypothesis class in the raw monomial basis."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PolynomialModel:
    """Polynomial ``sum_k coefficients[k] * x**k``.

    ``coefficients[k]`` multiplies ``x**k``, so the vector has ``degree + 1``
    entries.
    """

    degree: int
    coefficients: np.ndarray

    def __post_init__(self):
        if int(self.degree) != self.degree or self.degree < 0:
            raise ValueError(f"degree must be a non-negative integer, got {self.degree!r}")
        coefs = np.array(self.coefficients, dtype=np.float64).ravel()
        if coefs.shape[0] != self.degree + 1:
            raise ValueError(
                f"expected {self.degree + 1} coefficients for degree {self.degree}, got {coefs.shape[0]}"
            )
        if not np.all(np.isfinite(coefs)):
            bad = int(np.flatnonzero(~np.isfinite(coefs))[0])
            raise ValueError(f"coefficient {bad} is not finite")
        coefs.setflags(write=False)
        object.__setattr__(self, "degree", int(self.degree))
        object.__setattr__(self, "coefficients", coefs)

    @classmethod
    def from_coefficients(cls, coefficients) -> PolynomialModel:
        coefs = np.asarray(coefficients, dtype=np.float64).ravel()
        return cls(coefs.shape[0] - 1, coefs)

    def to_dict(self) -> dict:
        return {"degree": self.degree, "coefficients": [float(c) for c in self.coefficients]}

    def __eq__(self, other):
        if not isinstance(other, PolynomialModel):
            return NotImplemented
        return self.degree == other.degree and np.array_equal(self.coefficients, other.coefficients)

    __hash__ = None


def _as_finite_vector(xs, name="xs") -> np.ndarray:
    xs = np.asarray(xs, dtype=np.float64).ravel()
    bad = np.flatnonzero(~np.isfinite(xs))
    if bad.size:
        raise ValueError(f"{name}[{int(bad[0])}] is not finite ({xs[bad[0]]})")
    return xs


def design_matrix(xs, degree: int) -> np.ndarray:
    """Vandermonde matrix with increasing powers: entry ``(i, k)`` is ``xs[i]**k``."""
    if int(degree) != degree or degree < 0:
        raise ValueError(f"degree must be a non-negative integer, got {degree!r}")
    xs = _as_finite_vector(xs)
    return np.vander(xs, int(degree) + 1, increasing=True)


def predict(model: PolynomialModel, xs) -> np.ndarray:
    """Evaluate ``model`` at ``xs`` using Horner's scheme."""
    xs = _as_finite_vector(xs)
    coefs = model.coefficients
    out = np.full_like(xs, coefs[-1])
    with np.errstate(over="ignore", invalid="ignore"):
        for c in coefs[-2::-1]:
            out = out * xs + c
    bad = np.flatnonzero(~np.isfinite(out))
    if bad.size:
        raise FloatingPointError(f"prediction overflowed at sample {int(bad[0])} (x={xs[bad[0]]})")
    return out


def init_model(degree: int, mode: str = "zeros", seed: int = 0, scale: float = 0.1) -> PolynomialModel:
    """Initial parameters: all zeros, or uniform on ``[-scale, scale]`` drawn from ``seed``."""
    if mode == "zeros":
        return PolynomialModel(degree, np.zeros(degree + 1))
    if mode == "uniform":
        if not scale > 0:
            raise ValueError(f"uniform init needs scale > 0, got {scale}")
        rng = np.random.default_rng(seed)
        return PolynomialModel(degree, rng.uniform(-scale, scale, size=degree + 1))
    raise ValueError(f"unknown init mode {mode!r} (expected 'zeros' or 'uniform')")
