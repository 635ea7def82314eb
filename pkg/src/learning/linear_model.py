"""
L2-Regularized Logistic Regression

Prediction, loss, gradient and segment risks for a linear model
w in R^D over labels in {-1, +1}:

    f(w; x, y) = log(1 + exp(-y w.x)) + (mu / 2) ||w||^2

With an intercept column the last coordinate is left out of the penalty.
Functions taking `mu` accept either a scalar or the per-coordinate vector
returned by LossConfig.penalty.

Losses are evaluated with logaddexp so large margins never overflow.
"""

import math
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Union

import numpy as np

from src.streams.data_model import LabeledPoint, PointCollection, as_arrays

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

Penalty = Union[float, np.ndarray]


class RiskKind(Enum):
    """Risk used when evaluating a model on a segment."""
    LOGISTIC = "logistic"
    ZERO_ONE = "zero_one"


class WeightInit(Enum):
    """Initial weights for a freshly created model."""
    ZERO = "zero"
    GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class LossConfig:
    """
    Regularization strength for the logistic objective.

    `intercept` marks the last feature as a constant column whose weight is
    not penalized.
    """
    mu: float
    intercept: bool = False

    def __post_init__(self):
        if not self.mu > 0:
            raise ValueError(f"mu must be positive, got {self.mu}")

    def penalty(self, dimension: int) -> Penalty:
        """L2 strength per coordinate: mu itself, or a vector with a zero intercept entry."""
        if not self.intercept:
            return self.mu
        scale = np.full(dimension, self.mu)
        scale[-1] = 0.0
        return scale


def regularizer(w: np.ndarray, mu: Penalty) -> float:
    return 0.5 * float(np.sum(mu * w * w))


def initial_weights(dimension: int, init: WeightInit, rng: np.random.Generator) -> np.ndarray:
    if init == WeightInit.GAUSSIAN:
        return rng.normal(0.0, 0.01, size=dimension)
    return np.zeros(dimension)


def _check_dimension(w: np.ndarray, features: np.ndarray) -> None:
    width = features.shape[-1] if features.size else w.shape[0]
    if width != w.shape[0]:
        raise ValueError(f"Dimension mismatch: weights have {w.shape[0]}, features have {width}")


def sigmoid(z):
    """Logistic function, stable for large |z|."""
    return np.exp(-np.logaddexp(0.0, -z))


def predict(w: np.ndarray, x: np.ndarray) -> int:
    """Sign of w.x, with ties going to +1."""
    _check_dimension(w, x)
    return 1 if float(x @ w) >= 0.0 else -1


def predict_batch(w: np.ndarray, features: np.ndarray) -> np.ndarray:
    _check_dimension(w, features)
    return np.where(features @ w >= 0.0, 1, -1)


def positive_probability(w: np.ndarray, features: np.ndarray) -> np.ndarray:
    """Model probability of label +1 for each row."""
    _check_dimension(w, features)
    return sigmoid(features @ w)


def point_loss(w: np.ndarray, p: LabeledPoint, cfg: LossConfig) -> float:
    _check_dimension(w, p.features)
    z = -p.label * float(p.features @ w)
    return float(np.logaddexp(0.0, z)) + regularizer(w, cfg.penalty(w.shape[0]))


def point_gradient(w: np.ndarray, p: LabeledPoint, cfg: LossConfig) -> np.ndarray:
    _check_dimension(w, p.features)
    return gradient_at(w, p.features, p.label, cfg.penalty(w.shape[0]))


def gradient_at(w: np.ndarray, x: np.ndarray, y: int, mu: Penalty) -> np.ndarray:
    """Gradient of the regularized loss at one point given as raw arrays."""
    z = -y * float(x @ w)
    if z >= 0.0:
        s = 1.0 / (1.0 + math.exp(-z))
    else:
        e = math.exp(z)
        s = e / (1.0 + e)
    return (-y * s) * x + mu * w


def risk_on_arrays(
    w: np.ndarray,
    features: np.ndarray,
    labels: np.ndarray,
    mu: Penalty,
    kind: RiskKind
) -> float:
    """Average risk over rows of a non-empty segment."""
    if labels.shape[0] == 0:
        raise ValueError("Risk of an empty segment is undefined")
    _check_dimension(w, features)
    scores = features @ w
    if kind == RiskKind.ZERO_ONE:
        predictions = np.where(scores >= 0.0, 1, -1)
        return float(np.mean(predictions != labels))
    return float(np.mean(np.logaddexp(0.0, -labels * scores))) + regularizer(w, mu)


def segment_risk(
    w: np.ndarray,
    points: PointCollection,
    cfg: LossConfig,
    kind: RiskKind = RiskKind.LOGISTIC
) -> float:
    """
    Average loss of w over a collection of points.

    Args:
        w: Model weights
        points: Batch, SampleSet, (features, labels) tuple or LabeledPoint sequence
        cfg: Loss configuration (mu is ignored for the zero-one risk)
        kind: LOGISTIC for the regularized objective, ZERO_ONE for misclassification rate

    Returns:
        The average risk

    Raises:
        ValueError: If the collection is empty or dimensions mismatch
    """
    features, labels = as_arrays(points)
    return risk_on_arrays(w, features, labels, cfg.penalty(w.shape[0]), kind)


def objective_and_gradient(
    w: np.ndarray,
    features: np.ndarray,
    labels: np.ndarray,
    mu: Penalty
):
    """Full-batch regularized logistic risk and its gradient."""
    z = -labels * (features @ w)
    value = float(np.mean(np.logaddexp(0.0, z))) + regularizer(w, mu)
    coefficients = -labels * sigmoid(z)
    gradient = features.T @ coefficients / labels.shape[0] + mu * w
    return value, gradient
