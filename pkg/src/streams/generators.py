"""
Synthetic Stream Generators for the DriftSurf Benchmark

Creates seeded streams of labeled batches with known concept drift.
Every generated label is in {-1, +1} and point ids are unique across the
stream. Noise flips each label independently with probability noise_rate.

Families:
    sea         3 features in [0, 10]; +1 iff x1 + x2 <= theta
    hyperplane  rotating hyperplane, weights drifting every point
    sine1       +1 iff x2 <= sin(x1), reversed at each change point
    mixed       2 boolean + 2 numeric features, reversed at each change point
    circles     +1 iff inside the current circle, gradual transitions
    halfspace   stationary random half-space (base for drift injection)

Usage:
    from src.streams.generators import GeneratorSpec, generate
    batches = generate(GeneratorSpec(family=Family.SEA, seed=0))
"""

import math
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from config.hyperparameters import DatasetProfile
from src.streams.data_model import Batch
from src.streams.injectors import inject_label_swap, inject_rotation

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

# SEA concept thresholds by concept number
SEA_THRESHOLDS = {1: 9.0, 2: 8.0, 3: 7.0, 4: 9.5}

# Circles concepts: (center, radius)
CIRCLES_CONCEPTS = (
    ((0.2, 0.5), 0.15),
    ((0.4, 0.5), 0.20),
    ((0.6, 0.5), 0.25),
    ((0.8, 0.5), 0.30),
)


class Family(Enum):
    SEA = "sea"
    HYPERPLANE = "hyperplane"
    SINE1 = "sine1"
    MIXED = "mixed"
    CIRCLES = "circles"
    HALFSPACE = "halfspace"


class DriftKind(Enum):
    ABRUPT = "abrupt"
    GRADUAL = "gradual"


@dataclass(frozen=True)
class DriftSchedule:
    """
    Concept transitions of a stream.

    Each window (start, end) moves from concept k to concept k+1. Abrupt
    drifts are zero-length windows (s, s): concept k+1 applies from step s.
    Inside a gradual window a point follows the new concept with
    probability (t - start + 1) / (end - start + 1).
    """
    windows: Tuple[Tuple[int, int], ...] = ()

    @classmethod
    def abrupt(cls, change_points: Sequence[int]) -> "DriftSchedule":
        return cls(tuple((int(s), int(s)) for s in change_points))

    @classmethod
    def gradual(cls, windows: Sequence[Tuple[int, int]]) -> "DriftSchedule":
        return cls(tuple((int(s), int(e)) for s, e in windows))

    @property
    def kind(self) -> DriftKind:
        if any(end > start for start, end in self.windows):
            return DriftKind.GRADUAL
        return DriftKind.ABRUPT

    @property
    def drift_times(self) -> Tuple[int, ...]:
        return tuple(start for start, _ in self.windows)

    def validate(self) -> None:
        """Windows must be ordered and non-overlapping; drifts past the stream end never apply."""
        previous_end = 0
        for start, end in self.windows:
            if end < start:
                raise ValueError(f"Drift window ({start}, {end}) ends before it starts")
            if start < previous_end:
                raise ValueError(f"Drift windows overlap or are unordered at ({start}, {end})")
            previous_end = end

    def concept_mix(self, t: int) -> Tuple[int, int, float]:
        """(old concept, new concept, probability of the new concept) at step t."""
        concept = 0
        for start, end in self.windows:
            if t >= end and t >= start:
                concept += 1
                continue
            if start <= t < end:
                return concept, concept + 1, (t - start + 1) / (end - start + 1)
            break
        return concept, concept, 0.0


@dataclass(frozen=True)
class GeneratorSpec:
    """Family, parameters, noise and shape of a synthetic stream."""
    family: Family
    params: Mapping[str, Any] = field(default_factory=dict)
    noise_rate: float = 0.0
    total_steps: int = 100
    batch_size: int = 1000
    seed: int = 0

    def validate(self) -> None:
        if not 0.0 <= self.noise_rate <= 1.0:
            raise ValueError(f"noise_rate must be in [0, 1], got {self.noise_rate}")
        if self.total_steps < 1:
            raise ValueError(f"total_steps must be >= 1, got {self.total_steps}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")


class ConceptStream(ABC):
    """Feature sampling plus a label function per concept."""

    def __init__(self, spec: GeneratorSpec, rng: np.random.Generator):
        self.spec = spec
        self.rng = rng
        self.schedule = self.build_schedule()
        self.schedule.validate()

    def build_schedule(self) -> DriftSchedule:
        return DriftSchedule()

    @abstractmethod
    def sample_features(self, m: int) -> np.ndarray:
        """Draw an (m, D) feature matrix."""

    @abstractmethod
    def concept_labels(self, concept: int, features: np.ndarray) -> np.ndarray:
        """Clean labels of the rows under one concept."""

    def clean_batch(self, t: int, m: int) -> Tuple[np.ndarray, np.ndarray]:
        features = self.sample_features(m)
        old, new, p_new = self.schedule.concept_mix(t)
        labels = self.concept_labels(old, features)
        if new != old:
            follows_new = self.rng.random(m) < p_new
            labels = np.where(follows_new, self.concept_labels(new, features), labels)
        return features, labels


def sea_labels(features: np.ndarray, theta: float) -> np.ndarray:
    return np.where(features[:, 0] + features[:, 1] <= theta, 1, -1)


class SeaStream(ConceptStream):
    """
    SEA concepts. Params: concept_order (concept numbers 1-4) and optional
    transition_windows; without windows the stream is cut into equal
    abrupt segments.
    """

    def build_schedule(self) -> DriftSchedule:
        order = tuple(self.spec.params.get("concept_order", (3, 2, 4, 1)))
        unknown = [c for c in order if c not in SEA_THRESHOLDS]
        if unknown:
            raise ValueError(f"Unknown SEA concepts {unknown}; expected numbers 1-4")
        self.thresholds = [SEA_THRESHOLDS[c] for c in order]
        windows = self.spec.params.get("transition_windows")
        if windows is not None:
            schedule = DriftSchedule.gradual(windows)
        else:
            segment = self.spec.total_steps / len(order)
            schedule = DriftSchedule.abrupt([round(k * segment) for k in range(1, len(order))])
        if len(schedule.windows) != len(order) - 1:
            raise ValueError(
                f"SEA needs {len(order) - 1} transitions for {len(order)} concepts, "
                f"got {len(schedule.windows)}"
            )
        return schedule

    def sample_features(self, m: int) -> np.ndarray:
        return self.rng.uniform(0.0, 10.0, size=(m, 3))

    def concept_labels(self, concept: int, features: np.ndarray) -> np.ndarray:
        return sea_labels(features, self.thresholds[concept])


def sine1_labels(features: np.ndarray, reversed_: bool = False) -> np.ndarray:
    labels = np.where(features[:, 1] <= np.sin(features[:, 0]), 1, -1)
    return -labels if reversed_ else labels


class Sine1Stream(ConceptStream):
    """Points in [0, 1]^2; labels reverse at each change point in params['reversals']."""

    def build_schedule(self) -> DriftSchedule:
        return DriftSchedule.abrupt(self.spec.params.get("reversals", (20, 40, 60, 80)))

    def sample_features(self, m: int) -> np.ndarray:
        return self.rng.uniform(0.0, 1.0, size=(m, 2))

    def concept_labels(self, concept: int, features: np.ndarray) -> np.ndarray:
        return sine1_labels(features, reversed_=concept % 2 == 1)


def mixed_labels(features: np.ndarray, reversed_: bool = False) -> np.ndarray:
    curve = features[:, 3] < 0.5 + 0.3 * np.sin(3.0 * math.pi * features[:, 2])
    votes = features[:, 0].astype(int) + features[:, 1].astype(int) + curve.astype(int)
    labels = np.where(votes >= 2, 1, -1)
    return -labels if reversed_ else labels


class MixedStream(ConceptStream):
    """x1, x2 boolean (0/1); x3, x4 in [0, 1]; reversed at each change point."""

    def build_schedule(self) -> DriftSchedule:
        return DriftSchedule.abrupt(self.spec.params.get("reversals", (20, 40, 60, 80)))

    def sample_features(self, m: int) -> np.ndarray:
        booleans = self.rng.integers(0, 2, size=(m, 2)).astype(float)
        numeric = self.rng.uniform(0.0, 1.0, size=(m, 2))
        return np.hstack([booleans, numeric])

    def concept_labels(self, concept: int, features: np.ndarray) -> np.ndarray:
        return mixed_labels(features, reversed_=concept % 2 == 1)


def circle_labels(features: np.ndarray, center: Tuple[float, float], radius: float) -> np.ndarray:
    offset = features[:, :2] - np.asarray(center)
    return np.where(np.sum(offset * offset, axis=1) <= radius * radius, 1, -1)


class CirclesStream(ConceptStream):
    """Four circles visited in order with gradual transitions."""

    def build_schedule(self) -> DriftSchedule:
        windows = self.spec.params.get("transition_windows", ((25, 30), (50, 55), (75, 80)))
        return DriftSchedule.gradual(windows)

    def sample_features(self, m: int) -> np.ndarray:
        return self.rng.uniform(0.0, 1.0, size=(m, 2))

    def concept_labels(self, concept: int, features: np.ndarray) -> np.ndarray:
        center, radius = CIRCLES_CONCEPTS[min(concept, len(CIRCLES_CONCEPTS) - 1)]
        return circle_labels(features, center, radius)


class HalfspaceStream(ConceptStream):
    """Stationary half-space through the cube center with a random normal."""

    def __init__(self, spec: GeneratorSpec, rng: np.random.Generator):
        super().__init__(spec, rng)
        self.dimension = int(spec.params.get("dimension", 20))
        self.normal = rng.normal(size=self.dimension)

    def sample_features(self, m: int) -> np.ndarray:
        return self.rng.uniform(0.0, 1.0, size=(m, self.dimension))

    def concept_labels(self, concept: int, features: np.ndarray) -> np.ndarray:
        return np.where((features - 0.5) @ self.normal >= 0.0, 1, -1)


class HyperplaneStream(ConceptStream):
    """
    Rotating hyperplane: +1 iff sum_i w_i x_i >= 0.5 * sum_i w_i.

    After every point each weight moves by `magnitude` in its current
    direction, and each direction flips with `reversal_probability`.
    """

    def __init__(self, spec: GeneratorSpec, rng: np.random.Generator):
        super().__init__(spec, rng)
        self.dimension = int(spec.params.get("dimension", 10))
        self.magnitude = float(spec.params.get("magnitude", 0.001))
        self.reversal_probability = float(spec.params.get("reversal_probability", 0.1))
        self.weights = rng.uniform(0.0, 1.0, size=self.dimension)
        self.directions = np.ones(self.dimension)

    def sample_features(self, m: int) -> np.ndarray:
        return self.rng.uniform(0.0, 1.0, size=(m, self.dimension))

    def concept_labels(self, concept: int, features: np.ndarray) -> np.ndarray:
        raise NotImplementedError("Hyperplane labels depend on per-point weights")

    def clean_batch(self, t: int, m: int) -> Tuple[np.ndarray, np.ndarray]:
        features = self.sample_features(m)
        flips = self.rng.random((m, self.dimension)) < self.reversal_probability
        directions = self.directions * np.cumprod(np.where(flips, -1.0, 1.0), axis=0)
        drifted = self.weights + self.magnitude * np.cumsum(directions, axis=0)
        # point i is labeled with the weights before its own update
        point_weights = np.vstack([self.weights, drifted[:-1]])
        scores = np.sum(point_weights * features, axis=1)
        labels = np.where(scores >= 0.5 * point_weights.sum(axis=1), 1, -1)
        self.weights = drifted[-1]
        self.directions = directions[-1]
        return features, labels


STREAM_CLASSES = {
    Family.SEA: SeaStream,
    Family.HYPERPLANE: HyperplaneStream,
    Family.SINE1: Sine1Stream,
    Family.MIXED: MixedStream,
    Family.CIRCLES: CirclesStream,
    Family.HALFSPACE: HalfspaceStream,
}


def iter_batches(spec: GeneratorSpec) -> Iterator[Batch]:
    """
    Lazily yield the batches of a synthetic stream.

    Raises:
        ValueError: If the spec or its drift schedule is invalid
    """
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    stream = STREAM_CLASSES[spec.family](spec, rng)
    m = spec.batch_size
    for t in range(spec.total_steps):
        features, labels = stream.clean_batch(t, m)
        if spec.noise_rate > 0.0:
            labels = np.where(rng.random(m) < spec.noise_rate, -labels, labels)
        yield Batch(time_step=t, features=features, labels=labels, ids=np.arange(t * m, (t + 1) * m))


def generate(spec: GeneratorSpec) -> List[Batch]:
    """Materialize a whole synthetic stream."""
    batches = list(iter_batches(spec))
    logger.info(f"Generated {len(batches)} batches of {spec.batch_size} points ({spec.family.value})")
    return batches


def with_intercept(batches: Sequence[Batch]) -> List[Batch]:
    """Append a constant 1.0 feature to every point."""
    return [
        b.with_features(np.hstack([b.features, np.ones((b.size, 1))]))
        for b in batches
    ]


def spec_from_profile(profile: DatasetProfile, seed: int,
                      total_steps: Optional[int] = None,
                      batch_size: Optional[int] = None) -> GeneratorSpec:
    return GeneratorSpec(
        family=Family(profile.family),
        params=dict(profile.params),
        noise_rate=profile.noise_rate,
        total_steps=total_steps or profile.total_steps,
        batch_size=batch_size or profile.batch_size,
        seed=seed,
    )


def build_stream(profile: DatasetProfile, seed: int, intercept: bool = True,
                 total_steps: Optional[int] = None,
                 batch_size: Optional[int] = None) -> List[Batch]:
    """
    Generate a registered dataset, apply its drift injections, and
    optionally append the intercept feature.
    """
    batches = generate(spec_from_profile(profile, seed, total_steps, batch_size))
    if profile.label_swaps:
        batches = inject_label_swap(batches, profile.label_swaps)
    if profile.rotations:
        batches = inject_rotation(batches, profile.rotations, profile.rotation_axes, profile.rotation_angle)
    if intercept:
        batches = with_intercept(batches)
    return batches
