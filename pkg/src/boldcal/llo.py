"""Shift/scale recalibration on the log-odds scale and its Bernoulli likelihood.

The core map sends a probability ``x`` to

    c(x; delta, gamma) = delta * x**gamma / (delta * x**gamma + (1 - x)**gamma)

which is linear on the log-odds scale: logit(c) = gamma * logit(x) + log(delta).
``delta`` shifts the average prediction, ``gamma`` spreads (gamma > 1) or
compresses (0 < gamma < 1) predictions around it.  The identity pair
(delta=1, gamma=1) leaves predictions untouched, ``gamma=0`` collapses every
prediction to ``delta / (delta + 1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit, logit

from .errors import NonInvertibleError, ParameterError

# Predictions are clamped into [EPS, 1-EPS] before any log-odds transform:
# real data sets contain hard 0.00 / 1.00 predictions, where logit is undefined.
EPS = 1e-9


def clamp(x: np.ndarray, eps: float = EPS) -> np.ndarray:
    """Clip probabilities into the open interval [eps, 1-eps]."""
    return np.clip(x, eps, 1.0 - eps)


@dataclass(frozen=True)
class LLOParams:
    """Shift/scale pair of the recalibration map.

    ``delta`` acts multiplicatively on the odds scale (must be positive),
    ``gamma`` is the slope on the log-odds scale (any real, including 0).
    """

    delta: float
    gamma: float

    def __post_init__(self):
        if not (math.isfinite(self.delta) and self.delta > 0):
            raise ParameterError(f"delta must be a positive finite real, got {self.delta}")
        if not math.isfinite(self.gamma):
            raise ParameterError(f"gamma must be finite, got {self.gamma}")

    @property
    def is_identity(self) -> bool:
        return self.delta == 1.0 and self.gamma == 1.0


IDENTITY = LLOParams(1.0, 1.0)


@dataclass(frozen=True)
class PredictionSet:
    """Paired probability predictions ``x`` and binary outcomes ``y``.

    ``labels`` optionally names each observation (kept for line-plot output).
    """

    x: np.ndarray
    y: np.ndarray
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y)
        if x.ndim != 1 or y.ndim != 1 or len(x) != len(y):
            raise ParameterError("x and y must be 1-D vectors of equal length")
        if len(x) < 1:
            raise ParameterError("a prediction set needs at least one observation")
        if np.any(~np.isfinite(x)) or np.any(x < 0.0) or np.any(x > 1.0):
            raise ParameterError("predictions must lie in [0, 1]")
        if not np.all((y == 0) | (y == 1)):
            raise ParameterError("outcomes must be 0 or 1")
        if self.labels is not None and len(self.labels) != len(x):
            raise ParameterError("labels must match the number of observations")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y.astype(np.int64))

    @property
    def n(self) -> int:
        return len(self.x)

    @property
    def base_rate(self) -> float:
        return float(np.mean(self.y))


def llo_adjust(x: np.ndarray, params: LLOParams, eps: float = EPS) -> np.ndarray:
    """Apply the shift/scale map elementwise.

    Computed through the log-odds form, which never overflows, then clipped
    back into [eps, 1-eps] so downstream logs stay finite.  The identity pair
    short-circuits so that it reproduces the (clamped) input bit for bit.
    """
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        return x.copy()
    xc = clamp(x, eps)
    if params.is_identity:
        return xc
    t = params.gamma * logit(xc) + math.log(params.delta)
    return clamp(expit(t), eps)


def llo_inverse(params: LLOParams) -> LLOParams:
    """Parameters that undo ``params``: (delta**(-1/gamma), 1/gamma).

    Raises :class:`NonInvertibleError` for gamma == 0, whose collapse map
    destroys the input and has no inverse.
    """
    if params.gamma == 0.0:
        raise NonInvertibleError("gamma == 0 collapses all predictions; no inverse exists")
    return LLOParams(params.delta ** (-1.0 / params.gamma), 1.0 / params.gamma)


def log_likelihood(data: PredictionSet, params: LLOParams, eps: float = EPS) -> float:
    """Bernoulli log-likelihood of the outcomes under adjusted probabilities.

    sum_i [ y_i * log c(x_i) + (1 - y_i) * log(1 - c(x_i)) ], always <= 0 and
    finite because the adjusted probabilities are clamped away from {0, 1}.
    """
    c = llo_adjust(data.x, params, eps)
    return float(np.sum(np.where(data.y == 1, np.log(c), np.log1p(-c))))
