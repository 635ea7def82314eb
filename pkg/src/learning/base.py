"""
Shared Building Blocks for Adaptive Learners

ModelSlot wraps one linear model with its sample set and optimizer state.
AdaptiveLearner is the interface every compared algorithm implements: a
test phase that predicts a batch before its labels are used, and a train
phase that updates models on it.
"""

import math
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from src.learning.linear_model import (
    LossConfig,
    Penalty,
    RiskKind,
    WeightInit,
    initial_weights,
    positive_probability,
    predict_batch,
    risk_on_arrays,
)
from src.learning.update_processes import (
    BudgetPolicy,
    SgdState,
    StrsagaState,
    UpdateProcess,
    sgd_single_pass_update,
    sgd_update,
    strsaga_update,
)
from src.streams.data_model import Batch, SampleSet, StreamStore

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)


class LearnerState(Enum):
    """State tag reported in step records."""
    STABLE = "stable"
    REACTIVE = "reactive"
    SINGLE = "single"
    ENSEMBLE = "ensemble"


class Trigger(Enum):
    """Why a transition happened."""
    CONDITION_1 = "condition_1"
    CONDITION_3 = "condition_3"
    SWITCH = "switch"
    KEEP = "keep"
    RESET = "reset"


@dataclass(frozen=True)
class LearnerConfig:
    """Training hyperparameters shared by all models of one learner."""
    loss: LossConfig
    eta: float
    budget: BudgetPolicy
    update_process: UpdateProcess = UpdateProcess.STRSAGA
    init: WeightInit = WeightInit.ZERO

    def __post_init__(self):
        if not self.eta > 0:
            raise ValueError(f"eta must be positive, got {self.eta}")


@dataclass(frozen=True)
class TransitionRecord:
    """One state change or model replacement inside a learner."""
    algorithm: str
    time_step: int
    from_state: str
    to_state: str
    trigger: str
    model_id: str
    risks: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "algorithm": self.algorithm,
            "time_step": self.time_step,
            "from_state": self.from_state,
            "to_state": self.to_state,
            "trigger": self.trigger,
            "model_id": self.model_id,
            "risks": {k: (v if math.isfinite(v) else None) for k, v in self.risks.items()},
        }


@dataclass(frozen=True)
class ServedPredictions:
    """Predictions for a batch and which model produced them."""
    predictions: np.ndarray
    serving_model_id: str
    serving_segment_start: int


@dataclass(frozen=True)
class StepResult:
    """Everything one test-then-train step reports."""
    time_step: int
    predictions: np.ndarray
    misclassification: float
    state: str
    model_id: str
    serving_model_id: str
    serving_segment_start: int
    gradients_spent: int
    models_trained: int


class ModelSlot:
    """
    One linear model: weights, the segment it trains on, and its optimizer.

    The segment starts empty at `start_step` and shares the learner's
    StreamStore with every other slot of the same learner.
    """

    def __init__(
        self,
        model_id: str,
        dimension: int,
        store: StreamStore,
        start_step: int,
        config: LearnerConfig,
        rng: np.random.Generator,
        process: Optional[UpdateProcess] = None
    ):
        self.model_id = model_id
        self.process = process or config.update_process
        weights = initial_weights(dimension, config.init, rng)
        segment = SampleSet(store, start_step)
        if self.process == UpdateProcess.STRSAGA:
            self.state = StrsagaState(w=weights, eta=config.eta, loss=config.loss, segment=segment)
        else:
            self.state = SgdState(w=weights, eta=config.eta, loss=config.loss, sample_set=segment)

    @property
    def weights(self) -> np.ndarray:
        return self.state.w

    @property
    def segment(self) -> SampleSet:
        if isinstance(self.state, StrsagaState):
            return self.state.segment
        return self.state.sample_set

    @property
    def segment_start(self) -> int:
        return self.segment.t_start

    @property
    def mu(self) -> Penalty:
        return self.state.loss.penalty(self.weights.shape[0])

    def effective_points(self) -> Tuple[np.ndarray, np.ndarray]:
        """The points the optimizer currently minimizes risk over."""
        return self.state.effective_points()

    def train(self, batch: Batch, budget: int, rng: np.random.Generator) -> int:
        """Run this slot's update process; returns gradients computed."""
        before = self.state.gradients_computed
        if self.process == UpdateProcess.STRSAGA:
            strsaga_update(self.state, batch, budget, rng)
        elif self.process == UpdateProcess.SGD:
            sgd_update(self.state, batch, budget, rng)
        else:
            sgd_single_pass_update(self.state, batch, budget, rng)
        return self.state.gradients_computed - before

    def predict(self, features: np.ndarray) -> np.ndarray:
        return predict_batch(self.weights, features)

    def positive_probability(self, features: np.ndarray) -> np.ndarray:
        return positive_probability(self.weights, features)

    def risk(self, features: np.ndarray, labels: np.ndarray, kind: RiskKind) -> float:
        return risk_on_arrays(self.weights, features, labels, self.mu, kind)


class AdaptiveLearner(ABC):
    """
    Base class for every compared algorithm.

    Subclasses own one StreamStore and create models through new_slot().
    """

    def __init__(self, name: str, dimension: int, config: LearnerConfig, rng: np.random.Generator):
        self.name = name
        self.dimension = dimension
        self.config = config
        self.rng = rng
        self.store = StreamStore()
        self.transitions: List[TransitionRecord] = []
        self._models_created = 0

    def new_slot(self, start_step: int, process: Optional[UpdateProcess] = None) -> ModelSlot:
        model_id = f"{self.name}-m{self._models_created}"
        self._models_created += 1
        return ModelSlot(model_id, self.dimension, self.store, start_step, self.config, self.rng, process)

    def record_transition(
        self,
        time_step: int,
        from_state: LearnerState,
        to_state: LearnerState,
        trigger: Trigger,
        model_id: str,
        **risks: float
    ) -> TransitionRecord:
        record = TransitionRecord(
            algorithm=self.name,
            time_step=time_step,
            from_state=from_state.value,
            to_state=to_state.value,
            trigger=trigger.value,
            model_id=model_id,
            risks={k: float(v) for k, v in risks.items()},
        )
        self.transitions.append(record)
        logger.debug(f"{self.name} t={time_step}: {from_state.value} -> {to_state.value} ({trigger.value})")
        return record

    def prepare(self, batch: Batch) -> None:
        """Hook run before predicting a batch. Does nothing by default."""

    @abstractmethod
    def predict(self, batch: Batch) -> np.ndarray:
        """Labels in {-1, +1} for every point of the batch."""

    @abstractmethod
    def serving_model(self) -> Tuple[str, int]:
        """(model id, segment start) of the model answering predictions."""

    @abstractmethod
    def predictive_model_id(self) -> str:
        """Id of the learner's main model."""

    @property
    @abstractmethod
    def state(self) -> LearnerState:
        """Current state tag."""

    @abstractmethod
    def train(self, batch: Batch) -> Tuple[int, int]:
        """Update models on the batch; returns (gradients spent, models trained)."""

    def test(self, batch: Batch) -> ServedPredictions:
        self.prepare(batch)
        model_id, segment_start = self.serving_model()
        return ServedPredictions(self.predict(batch), model_id, segment_start)

    def step(self, batch: Batch) -> StepResult:
        """Predict the batch, then train on it."""
        outcome = self.test(batch)
        return self.complete_step(batch, outcome)

    def complete_step(self, batch: Batch, outcome: ServedPredictions) -> StepResult:
        gradients, models_trained = self.train(batch)
        return StepResult(
            time_step=batch.time_step,
            predictions=outcome.predictions,
            misclassification=float(np.mean(outcome.predictions != batch.labels)),
            state=self.state.value,
            model_id=self.predictive_model_id(),
            serving_model_id=outcome.serving_model_id,
            serving_segment_start=outcome.serving_segment_start,
            gradients_spent=gradients,
            models_trained=models_trained,
        )


class SingleModelLearner(AdaptiveLearner):
    """A learner serving and training exactly one model."""

    def __init__(self, name: str, dimension: int, config: LearnerConfig, rng: np.random.Generator,
                 start_step: int = 0, process: Optional[UpdateProcess] = None):
        super().__init__(name, dimension, config, rng)
        self._process = process
        self.model = self.new_slot(start_step, process)

    @property
    def state(self) -> LearnerState:
        return LearnerState.SINGLE

    def predict(self, batch: Batch) -> np.ndarray:
        return self.model.predict(batch.features)

    def serving_model(self) -> Tuple[str, int]:
        return self.model.model_id, self.model.segment_start

    def predictive_model_id(self) -> str:
        return self.model.model_id

    def reset_model(self, time_step: int, **risks: float) -> None:
        """Replace the model with a fresh one whose segment starts at time_step."""
        self.model = self.new_slot(time_step, self._process)
        self.record_transition(time_step, LearnerState.SINGLE, LearnerState.SINGLE,
                               Trigger.RESET, self.model.model_id, **risks)

    def train(self, batch: Batch) -> Tuple[int, int]:
        budget = self.config.budget.per_model_budget(1)
        return self.model.train(batch, budget, self.rng), 1
