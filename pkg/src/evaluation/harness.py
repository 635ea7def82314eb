"""
Experiment Harness

Runs every requested algorithm over the same batch sequence with
test-then-train evaluation: at each time step all algorithms predict the
batch before any of them trains on it. Trials use seed + trial_index and
run concurrently on a thread pool; results are merged in trial order, so
output does not depend on the thread count.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from config.hyperparameters import (
    AUE_DEFAULTS,
    DRIFTSURF_DEFAULTS,
    DATASETS,
    DatasetProfile,
    get_profile,
)
from src.evaluation.records import StepRecord, summarize, timeseries, records_frame
from src.learning.base import AdaptiveLearner, LearnerConfig
from src.learning.baselines import Aue, AueConfig, Aware, MddmLearner, Oblivious, OnePassSgd
from src.learning.driftsurf import DriftSurf, DriftSurfConfig
from src.learning.linear_model import LossConfig, RiskKind
from src.learning.mddm import create_detector
from src.learning.update_processes import BudgetPolicy, DivisionMode, UpdateProcess
from src.streams.csv_loader import load_csv
from src.streams.data_model import Batch
from src.streams.generators import build_stream, with_intercept

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

ALGORITHMS = (
    "driftsurf",
    "driftsurf-nogreedy",
    "aware",
    "mddm-a",
    "mddm-g",
    "mddm-e",
    "aue",
    "aue-k2",
    "obl",
    "1pass-sgd",
)

CSV_FAMILY = "csv"


@dataclass
class ExperimentConfig:
    """
    One benchmark run: dataset, algorithms, budget and trial settings.

    mu, eta, batch_size, total_steps and drift_times default to the
    dataset's registered profile. The budget is rho = rho_multiplier * m
    unless an absolute rho is given.
    """
    dataset: str
    algorithms: List[str] = field(default_factory=lambda: ["driftsurf", "aware", "obl"])
    rho_multiplier: float = 2.0
    rho: Optional[int] = None
    division_mode: DivisionMode = DivisionMode.PER_MODEL
    update_process: UpdateProcess = UpdateProcess.STRSAGA
    trials: int = 5
    seed: int = 0
    mu: Optional[float] = None
    eta: Optional[float] = None
    batch_size: Optional[int] = None
    total_steps: Optional[int] = None
    drift_times: Optional[Tuple[int, ...]] = None
    r: int = DRIFTSURF_DEFAULTS["r"]
    delta: float = DRIFTSURF_DEFAULTS["delta"]
    intercept: bool = True
    csv_path: Optional[str] = None
    label_column: str = "label"
    categorical_columns: Tuple[str, ...] = ()
    label_map: Optional[Dict[str, int]] = None
    scale_to_unit: bool = True

    def validate(self) -> None:
        """
        Raises:
            ValueError: Listing every invalid field by path
        """
        errors = []
        if self.csv_path is None and self.dataset not in DATASETS:
            errors.append(f"dataset: unknown dataset '{self.dataset}'")
        if self.csv_path is not None:
            for name in ("mu", "eta", "batch_size"):
                if getattr(self, name) is None:
                    errors.append(f"{name}: required for CSV streams")
        if not self.algorithms:
            errors.append("algorithms: at least one algorithm is required")
        for i, name in enumerate(self.algorithms):
            if name not in ALGORITHMS:
                errors.append(f"algorithms[{i}]: unknown algorithm '{name}'")
        if len(set(self.algorithms)) != len(self.algorithms):
            errors.append("algorithms: duplicate entries")
        if self.trials < 1:
            errors.append(f"trials: must be >= 1, got {self.trials}")
        if self.rho is not None and self.rho < 1:
            errors.append(f"rho: must be >= 1, got {self.rho}")
        if self.rho is None and not self.rho_multiplier > 0:
            errors.append(f"rho_multiplier: must be positive, got {self.rho_multiplier}")
        for name in ("mu", "eta"):
            value = getattr(self, name)
            if value is not None and not value > 0:
                errors.append(f"{name}: must be positive, got {value}")
        for name in ("batch_size", "total_steps"):
            value = getattr(self, name)
            if value is not None and value < 1:
                errors.append(f"{name}: must be >= 1, got {value}")
        if self.r < 1:
            errors.append(f"r: must be >= 1, got {self.r}")
        if self.delta < 0:
            errors.append(f"delta: must be non-negative, got {self.delta}")
        for i, t in enumerate(self.drift_times or ()):
            if t < 0:
                errors.append(f"drift_times[{i}]: must be non-negative, got {t}")
        if errors:
            raise ValueError("Invalid experiment config:\n  " + "\n  ".join(errors))

    def resolve_profile(self) -> DatasetProfile:
        """The registered profile with this config's overrides applied."""
        if self.csv_path is not None:
            base = DatasetProfile(name=self.dataset or Path(self.csv_path).stem, family=CSV_FAMILY,
                                  mu=self.mu, eta=self.eta, batch_size=self.batch_size)
        else:
            base = get_profile(self.dataset)
        overrides = {
            "mu": self.mu,
            "eta": self.eta,
            "batch_size": self.batch_size,
            "total_steps": self.total_steps,
            "drift_times": tuple(self.drift_times) if self.drift_times is not None else None,
        }
        return replace(base, **{k: v for k, v in overrides.items() if v is not None})

    def budget_policy(self, batch_size: int) -> BudgetPolicy:
        rho = self.rho if self.rho is not None else int(round(self.rho_multiplier * batch_size))
        return BudgetPolicy(rho_per_step=rho, division_mode=self.division_mode)


@dataclass
class TrialResult:
    trial: int
    records: List[StepRecord]
    transitions: List[Dict[str, Any]]


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    records: List[StepRecord]
    transitions: List[Dict[str, Any]]

    @property
    def frame(self) -> pd.DataFrame:
        return records_frame(self.records)

    @property
    def summary(self) -> pd.DataFrame:
        return summarize(self.frame)

    @property
    def timeseries(self) -> pd.DataFrame:
        return timeseries(self.frame)


def load_stream(config: ExperimentConfig, profile: DatasetProfile, seed: int) -> List[Batch]:
    if profile.family == CSV_FAMILY:
        batches = load_csv(
            config.csv_path,
            label_column=config.label_column,
            batch_size=profile.batch_size,
            categorical_columns=config.categorical_columns,
            label_map=config.label_map,
            scale_to_unit=config.scale_to_unit,
        )
        if config.total_steps is not None:
            batches = batches[:config.total_steps]
        return with_intercept(batches) if config.intercept else batches
    return build_stream(profile, seed, intercept=config.intercept)


def build_learner(
    name: str,
    dimension: int,
    config: ExperimentConfig,
    profile: DatasetProfile,
    rng: np.random.Generator
) -> AdaptiveLearner:
    """Instantiate one named algorithm."""
    learner_config = LearnerConfig(
        loss=LossConfig(mu=profile.mu, intercept=config.intercept),
        eta=profile.eta,
        budget=config.budget_policy(profile.batch_size),
        update_process=config.update_process,
    )
    if name in ("driftsurf", "driftsurf-nogreedy"):
        drift_config = DriftSurfConfig(r=config.r, delta=config.delta, greedy=name == "driftsurf",
                                       detection_risk=RiskKind.ZERO_ONE)
        return DriftSurf(dimension, learner_config, drift_config, rng, name=name)
    if name == "aware":
        return Aware(dimension, learner_config, rng, drift_times=profile.drift_times)
    if name.startswith("mddm-"):
        return MddmLearner(dimension, learner_config, rng, create_detector(name[-1]), name=name)
    if name in AUE_DEFAULTS:
        return Aue(dimension, learner_config, rng, AueConfig(max_experts=AUE_DEFAULTS[name]), name=name)
    if name == "obl":
        return Oblivious(dimension, learner_config, rng)
    if name == "1pass-sgd":
        return OnePassSgd(dimension, learner_config, rng)
    raise ValueError(f"Unknown algorithm '{name}'")


def run_trial(config: ExperimentConfig, profile: DatasetProfile, trial: int) -> TrialResult:
    """
    Run all algorithms over one stream realization.

    Every learner draws its sampling randomness from a generator seeded by
    the trial seed, independent of the stream's own generator.
    """
    seed = config.seed + trial
    batches = load_stream(config, profile, seed)
    if not batches:
        raise ValueError(f"Dataset '{profile.name}' produced no batches")
    dimension = batches[0].dimension
    learners = [
        build_learner(name, dimension, config, profile, np.random.default_rng([seed, 1]))
        for name in config.algorithms
    ]

    records: List[StepRecord] = []
    for batch in batches:
        served = [learner.test(batch) for learner in learners]
        for learner, outcome in zip(learners, served):
            result = learner.complete_step(batch, outcome)
            records.append(StepRecord(
                trial=trial,
                dataset=profile.name,
                algorithm=learner.name,
                time_step=result.time_step,
                misclassification=result.misclassification,
                state=result.state,
                model_id=result.model_id,
                serving_model_id=result.serving_model_id,
                serving_segment_start=result.serving_segment_start,
                gradients_spent=result.gradients_spent,
                models_trained=result.models_trained,
            ))

    transitions = [
        {"trial": trial, "dataset": profile.name, **transition.to_dict()}
        for learner in learners
        for transition in learner.transitions
    ]
    transitions.sort(key=lambda d: (d["time_step"], config.algorithms.index(d["algorithm"])))
    logger.info(f"Trial {trial} of {profile.name} finished ({len(batches)} steps)")
    return TrialResult(trial=trial, records=records, transitions=transitions)


def run_experiment(config: ExperimentConfig, threads: int = 1) -> ExperimentResult:
    """
    Run all trials of an experiment.

    Args:
        config: Validated on entry
        threads: Maximum trials run concurrently

    Returns:
        ExperimentResult with records and transitions in trial order
    """
    config.validate()
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")
    profile = config.resolve_profile()
    logger.info(
        f"Running {config.algorithms} on {profile.name}: {config.trials} trials, "
        f"{min(threads, config.trials)} threads"
    )

    with ThreadPoolExecutor(max_workers=min(threads, config.trials)) as pool:
        trial_results = list(pool.map(lambda i: run_trial(config, profile, i), range(config.trials)))

    records = [r for result in trial_results for r in result.records]
    transitions = [t for result in trial_results for t in result.transitions]
    return ExperimentResult(config=config, records=records, transitions=transitions)
