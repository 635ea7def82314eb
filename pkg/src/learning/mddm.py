"""
McDiarmid Drift Detection (MDDM)

Keeps a sliding window of prediction-correctness bits and compares their
weighted mean against the highest weighted mean seen so far. A drop of at
least epsilon_d signals drift, where

    epsilon_d = sqrt( (sum_i v_i^2 / 2) * ln(1 / delta_w) )

over the normalized window weights v. Three weighting schemes give newer
positions more weight: arithmetic (1 + i*d), geometric (r^i) and
Euler (exp(lambda * i)).
"""

import math
import logging
from collections import deque
from dataclasses import dataclass
from enum import Enum

import numpy as np

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)


class WeightingScheme(Enum):
    ARITHMETIC = "arithmetic"
    GEOMETRIC = "geometric"
    EULER = "euler"


class DetectorSignal(Enum):
    NO_DRIFT = "no_drift"
    DRIFT = "drift"


@dataclass(frozen=True)
class MddmConfig:
    """Window size, confidence and per-scheme weighting parameters."""
    window_size: int = 100
    delta_w: float = 1e-6
    scheme: WeightingScheme = WeightingScheme.GEOMETRIC
    difference: float = 0.01
    ratio: float = 1.01
    lambda_: float = 0.01

    def __post_init__(self):
        if self.window_size < 1:
            raise ValueError(f"window_size must be >= 1, got {self.window_size}")
        if not 0.0 < self.delta_w < 1.0:
            raise ValueError(f"delta_w must be in (0, 1), got {self.delta_w}")


SCHEME_SUFFIXES = {
    "a": WeightingScheme.ARITHMETIC,
    "g": WeightingScheme.GEOMETRIC,
    "e": WeightingScheme.EULER,
}


def window_weights(config: MddmConfig) -> np.ndarray:
    """Normalized weights, oldest window position first."""
    positions = np.arange(config.window_size, dtype=float)
    if config.scheme == WeightingScheme.ARITHMETIC:
        raw = 1.0 + positions * config.difference
    elif config.scheme == WeightingScheme.GEOMETRIC:
        raw = config.ratio ** positions
    else:
        raw = np.exp(config.lambda_ * positions)
    return raw / raw.sum()


def drift_threshold(weights: np.ndarray, delta_w: float) -> float:
    return math.sqrt(float(np.sum(weights ** 2)) / 2.0 * math.log(1.0 / delta_w))


class MddmDetector:
    """
    Streaming MDDM test over correctness bits.

    The test runs only once the window is full. After a drift signal the
    window and the running maximum are cleared.
    """

    def __init__(self, config: MddmConfig = None):
        self.config = config or MddmConfig()
        self.weights = window_weights(self.config)
        self.epsilon = drift_threshold(self.weights, self.config.delta_w)
        self.window: deque = deque(maxlen=self.config.window_size)
        self.max_weighted_mean = 0.0
        self.detections = 0

    def reset(self) -> None:
        self.window.clear()
        self.max_weighted_mean = 0.0

    def update(self, correct: bool) -> DetectorSignal:
        self.window.append(1.0 if correct else 0.0)
        if len(self.window) < self.config.window_size:
            return DetectorSignal.NO_DRIFT

        weighted_mean = float(self.weights @ np.fromiter(self.window, float, len(self.window)))
        self.max_weighted_mean = max(self.max_weighted_mean, weighted_mean)
        if self.max_weighted_mean - weighted_mean >= self.epsilon:
            self.detections += 1
            self.reset()
            return DetectorSignal.DRIFT
        return DetectorSignal.NO_DRIFT


def mddm_update(state: MddmDetector, correct: bool) -> DetectorSignal:
    """Feed one correctness bit to a detector."""
    return state.update(correct)


def create_detector(variant: str = "g", **overrides) -> MddmDetector:
    """
    Factory function for MDDM detectors.

    Args:
        variant: "a" (arithmetic), "g" (geometric) or "e" (Euler)
        **overrides: Any MddmConfig field

    Returns:
        Configured MddmDetector
    """
    if variant not in SCHEME_SUFFIXES:
        raise ValueError(f"Unknown MDDM variant '{variant}'; expected one of a, g, e")
    return MddmDetector(MddmConfig(scheme=SCHEME_SUFFIXES[variant], **overrides))
