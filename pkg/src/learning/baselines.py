"""
Baseline Learners

    Oblivious    one STRSAGA model trained on everything, never reset
    Aware        oracle that resets its model at the known drift times
    MddmLearner  resets its model when an MDDM detector signals drift
    Aue          Accuracy Updated Ensemble of linear experts
    OnePassSgd   one SGD step per arriving point
"""

import logging
from dataclasses import dataclass
from typing import Iterable, List, Optional, Tuple

import numpy as np

from src.learning.base import (
    AdaptiveLearner,
    LearnerConfig,
    LearnerState,
    ModelSlot,
    SingleModelLearner,
)
from src.learning.mddm import DetectorSignal, MddmDetector
from src.learning.update_processes import UpdateProcess
from src.streams.data_model import Batch

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)


class Oblivious(SingleModelLearner):
    """Single model over the entire stream."""

    def __init__(self, dimension: int, config: LearnerConfig, rng: np.random.Generator,
                 name: str = "obl", start_step: int = 0):
        super().__init__(name, dimension, config, rng, start_step)


class OnePassSgd(SingleModelLearner):
    """Plain SGD touching each new point exactly once."""

    def __init__(self, dimension: int, config: LearnerConfig, rng: np.random.Generator,
                 name: str = "1pass-sgd", start_step: int = 0):
        super().__init__(name, dimension, config, rng, start_step, UpdateProcess.SINGLE_PASS_SGD)


class Aware(SingleModelLearner):
    """Resets its model, before predicting, at every known drift time."""

    def __init__(self, dimension: int, config: LearnerConfig, rng: np.random.Generator,
                 drift_times: Iterable[int] = (), name: str = "aware", start_step: int = 0):
        super().__init__(name, dimension, config, rng, start_step)
        self.drift_times = frozenset(int(t) for t in drift_times)

    def prepare(self, batch: Batch) -> None:
        t = batch.time_step
        if t in self.drift_times and self.model.segment_start != t:
            self.reset_model(t)


class MddmLearner(SingleModelLearner):
    """
    Single model monitored by an MDDM detector.

    Correctness bits of the model's predictions on each batch are fed one
    point at a time. The first signal stops the feed for that batch and the
    model is replaced by a fresh one that trains on the current batch onward.
    """

    def __init__(self, dimension: int, config: LearnerConfig, rng: np.random.Generator,
                 detector: MddmDetector, name: str = "mddm", start_step: int = 0):
        super().__init__(name, dimension, config, rng, start_step)
        self.detector = detector

    def train(self, batch: Batch) -> Tuple[int, int]:
        correct = self.model.predict(batch.features) == batch.labels
        for bit in correct:
            if self.detector.update(bool(bit)) == DetectorSignal.DRIFT:
                logger.info(f"{self.name} detected drift at t={batch.time_step}")
                if self.model.segment.size > 0:
                    self.reset_model(batch.time_step)
                break
        return super().train(batch)


@dataclass(frozen=True)
class AueConfig:
    """Ensemble capacity k and the smoothing term of the weights."""
    max_experts: int = 10
    epsilon: float = 1e-9

    def __post_init__(self):
        if self.max_experts < 1:
            raise ValueError(f"max_experts must be >= 1, got {self.max_experts}")


@dataclass
class Expert:
    slot: ModelSlot
    weight: float


class Aue(AdaptiveLearner):
    """
    Accuracy Updated Ensemble over linear experts.

    Each step every expert is re-weighted by 1 / (MSE_r + MSE_j + eps) on the
    new batch, a fresh expert joins with weight 1 / (MSE_r + eps), the
    lowest-weighted expert is evicted beyond `max_experts`, and all experts
    train on the batch. Predictions are a weighted vote of 2 P(+1) - 1.
    """

    def __init__(self, dimension: int, config: LearnerConfig, rng: np.random.Generator,
                 aue_config: Optional[AueConfig] = None, name: str = "aue"):
        super().__init__(name, dimension, config, rng)
        self.aue_config = aue_config or AueConfig()
        self.max_experts = self.aue_config.max_experts
        self.experts: List[Expert] = []

    @property
    def state(self) -> LearnerState:
        return LearnerState.ENSEMBLE

    def _heaviest(self) -> Optional[Expert]:
        if not self.experts:
            return None
        return max(self.experts, key=lambda e: e.weight)

    def predict(self, batch: Batch) -> np.ndarray:
        if not self.experts:
            return np.ones(batch.size, dtype=np.int64)
        votes = np.zeros(batch.size)
        for expert in self.experts:
            votes += expert.weight * (2.0 * expert.slot.positive_probability(batch.features) - 1.0)
        return np.where(votes >= 0.0, 1, -1)

    def serving_model(self) -> Tuple[str, int]:
        heaviest = self._heaviest()
        if heaviest is None:
            return "", 0
        return heaviest.slot.model_id, heaviest.slot.segment_start

    def predictive_model_id(self) -> str:
        return self.serving_model()[0]

    @staticmethod
    def random_mse(labels: np.ndarray) -> float:
        """MSE of a classifier predicting at random with the batch class priors."""
        positive = float(np.mean(labels == 1))
        return sum(p * (1.0 - p) ** 2 for p in (positive, 1.0 - positive))

    @staticmethod
    def expert_mse(slot: ModelSlot, batch: Batch) -> float:
        positive = slot.positive_probability(batch.features)
        true_class = np.where(batch.labels == 1, positive, 1.0 - positive)
        return float(np.mean((1.0 - true_class) ** 2))

    def train(self, batch: Batch) -> Tuple[int, int]:
        mse_r = self.random_mse(batch.labels)
        for expert in self.experts:
            expert.weight = 1.0 / (mse_r + self.expert_mse(expert.slot, batch) + self.aue_config.epsilon)

        self.experts.append(Expert(self.new_slot(batch.time_step), 1.0 / (mse_r + self.aue_config.epsilon)))
        while len(self.experts) > self.max_experts:
            weakest = min(range(len(self.experts)), key=lambda i: self.experts[i].weight)
            self.experts.pop(weakest)

        budget = self.config.budget.per_model_budget(len(self.experts))
        gradients = sum(expert.slot.train(batch, budget, self.rng) for expert in self.experts)
        return gradients, len(self.experts)
