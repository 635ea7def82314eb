"""
DriftSurf: Stable/Reactive Drift Adaptation

A two-state learner. In the stable state it trains a predictive model and a
stable model (a fresh model started after the last reactive phase). A jump
in the predictive model's zero-one risk on the incoming batch moves it to
the reactive state, where a new reactive model trains alongside the
predictive one for r steps. At the end of the reactive phase the reactive
model replaces the predictive one only if its risk over the reactive-phase
batches is strictly lower.

Entry conditions, checked on the predictive model before it trains on X_t:
    condition 1: risk(X_t) > best_risk + delta
    condition 3: risk(X_t) > stable model risk(X_t) + delta'
best_risk is the lowest pre-update batch risk of the current predictive
model. It resets to +inf when the predictive model is replaced.

Exactly two models train at every step.
"""

import math
import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from src.learning.base import (
    AdaptiveLearner,
    LearnerConfig,
    LearnerState,
    ModelSlot,
    Trigger,
)
from src.learning.linear_model import RiskKind
from src.streams.data_model import Batch, concatenate

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DriftSurfConfig:
    """
    Reactive-phase length and entry thresholds.

    delta_prime defaults to delta / 2. With greedy serving, the reactive
    model answers predictions during the reactive phase whenever it beat the
    predictive model on the most recent batch.
    """
    r: int = 4
    delta: float = 0.1
    delta_prime: Optional[float] = None
    greedy: bool = True
    detection_risk: RiskKind = RiskKind.ZERO_ONE

    def __post_init__(self):
        if self.r < 1:
            raise ValueError(f"r must be >= 1, got {self.r}")
        if self.delta < 0:
            raise ValueError(f"delta must be non-negative, got {self.delta}")
        if self.delta_prime is None:
            object.__setattr__(self, "delta_prime", self.delta / 2.0)


class DriftSurf(AdaptiveLearner):
    """DriftSurf state machine over ModelSlots."""

    MODELS_PER_STEP = 2

    def __init__(
        self,
        dimension: int,
        config: LearnerConfig,
        drift_config: Optional[DriftSurfConfig] = None,
        rng: Optional[np.random.Generator] = None,
        name: str = "driftsurf",
        start_step: int = 0
    ):
        super().__init__(name, dimension, config, rng or np.random.default_rng())
        self.drift_config = drift_config or DriftSurfConfig()
        self._state = LearnerState.STABLE
        self.predictive: ModelSlot = self.new_slot(start_step)
        self.stable_model: ModelSlot = self.new_slot(start_step)
        self.reactive_model: Optional[ModelSlot] = None
        self.best_risk = math.inf
        self.reactive_buffer: List[Batch] = []
        self.reactive_steps = 0
        self.serving_reactive = False

    @property
    def state(self) -> LearnerState:
        return self._state

    def _serving_slot(self) -> ModelSlot:
        if self.serving_reactive and self.reactive_model is not None:
            return self.reactive_model
        return self.predictive

    def predict(self, batch: Batch) -> np.ndarray:
        return self._serving_slot().predict(batch.features)

    def serving_model(self) -> Tuple[str, int]:
        slot = self._serving_slot()
        return slot.model_id, slot.segment_start

    def predictive_model_id(self) -> str:
        return self.predictive.model_id

    def _train_pair(self, first: ModelSlot, second: ModelSlot, batch: Batch) -> int:
        budget = self.config.budget.per_model_budget(self.MODELS_PER_STEP)
        return first.train(batch, budget, self.rng) + second.train(batch, budget, self.rng)

    def _entry_trigger(self, batch_risk: float, batch: Batch) -> Tuple[Optional[Trigger], float]:
        kind = self.drift_config.detection_risk
        if batch_risk > self.best_risk + self.drift_config.delta:
            return Trigger.CONDITION_1, math.nan
        if self.stable_model.segment.size > 0:
            stable_risk = self.stable_model.risk(batch.features, batch.labels, kind)
            if batch_risk > stable_risk + self.drift_config.delta_prime:
                return Trigger.CONDITION_3, stable_risk
            return None, stable_risk
        return None, math.nan

    def train(self, batch: Batch) -> Tuple[int, int]:
        kind = self.drift_config.detection_risk
        t = batch.time_step
        batch_risk = self.predictive.risk(batch.features, batch.labels, kind)

        if self._state == LearnerState.STABLE:
            trigger, stable_risk = self._entry_trigger(batch_risk, batch)
            previous_best = self.best_risk
            self.best_risk = min(self.best_risk, batch_risk)
            if trigger is None:
                gradients = self._train_pair(self.predictive, self.stable_model, batch)
                return gradients, self.MODELS_PER_STEP
            self._enter_reactive(t, trigger, batch_risk, previous_best, stable_risk)
        else:
            self.best_risk = min(self.best_risk, batch_risk)

        self.reactive_buffer.append(batch)
        gradients = self._train_pair(self.predictive, self.reactive_model, batch)
        self.reactive_steps += 1

        if self.reactive_steps >= self.drift_config.r:
            self._exit_reactive(t)
        elif self.drift_config.greedy:
            predictive_risk = self.predictive.risk(batch.features, batch.labels, kind)
            reactive_risk = self.reactive_model.risk(batch.features, batch.labels, kind)
            self.serving_reactive = reactive_risk < predictive_risk

        return gradients, self.MODELS_PER_STEP

    def _enter_reactive(self, t: int, trigger: Trigger, batch_risk: float,
                        best_risk: float, stable_risk: float) -> None:
        self._state = LearnerState.REACTIVE
        self.reactive_model = self.new_slot(t)
        self.reactive_buffer = []
        self.reactive_steps = 0
        self.serving_reactive = False
        self.record_transition(
            t, LearnerState.STABLE, LearnerState.REACTIVE, trigger, self.predictive.model_id,
            batch_risk=batch_risk, best_risk=best_risk, stable_risk=stable_risk,
        )
        logger.info(f"{self.name} entered reactive state at t={t} ({trigger.value})")

    def _exit_reactive(self, t: int) -> None:
        kind = self.drift_config.detection_risk
        features, labels = concatenate(self.reactive_buffer)
        predictive_risk = self.predictive.risk(features, labels, kind)
        reactive_risk = self.reactive_model.risk(features, labels, kind)

        if reactive_risk < predictive_risk:
            self.predictive = self.reactive_model
            self.best_risk = math.inf
            trigger = Trigger.SWITCH
        else:
            trigger = Trigger.KEEP

        self._state = LearnerState.STABLE
        self.reactive_model = None
        self.reactive_buffer = []
        self.reactive_steps = 0
        self.serving_reactive = False
        self.stable_model = self.new_slot(t + 1)
        self.record_transition(
            t, LearnerState.REACTIVE, LearnerState.STABLE, trigger, self.predictive.model_id,
            predictive_risk=predictive_risk, reactive_risk=reactive_risk,
        )
        logger.info(f"{self.name} left reactive state at t={t} ({trigger.value})")
