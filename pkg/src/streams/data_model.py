"""
Stream Data Model for the DriftSurf Benchmark

Core value types shared by every stage of the pipeline: labeled points, the
batches that arrive at each time step, and the sample sets models train over.

A SampleSet is a view of a contiguous range of time steps inside a
StreamStore. Each algorithm instance owns one store, so a reactive model's
sample set shares point storage with the predictive model's set instead of
copying it.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)


def _frozen_array(values, dtype) -> np.ndarray:
    array = np.array(values, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class LabeledPoint:
    """One feature vector with its binary label and stream-unique id."""
    features: np.ndarray
    label: int
    id: int

    def __post_init__(self):
        if self.label not in (-1, 1):
            raise ValueError(f"Label must be -1 or +1, got {self.label}")
        object.__setattr__(self, "features", _frozen_array(self.features, float))

    @property
    def dimension(self) -> int:
        return int(self.features.shape[0])


@dataclass(frozen=True)
class Batch:
    """
    The points arriving at one time step, stored column-wise.

    Attributes:
        time_step: Non-negative step index
        features: (m, D) float array
        labels: (m,) int array with values in {-1, +1}
        ids: (m,) int array of stream-unique point ids
    """
    time_step: int
    features: np.ndarray
    labels: np.ndarray
    ids: np.ndarray

    def __post_init__(self):
        if self.time_step < 0:
            raise ValueError(f"time_step must be non-negative, got {self.time_step}")
        features = _frozen_array(self.features, float)
        labels = _frozen_array(self.labels, np.int64)
        ids = _frozen_array(self.ids, np.int64)
        if features.ndim != 2:
            raise ValueError(f"features must be 2-D (m, D), got shape {features.shape}")
        if features.shape[0] == 0:
            raise ValueError("A batch must contain at least one point")
        if labels.shape != (features.shape[0],) or ids.shape != labels.shape:
            raise ValueError(
                f"Batch at t={self.time_step}: {features.shape[0]} feature rows, "
                f"{labels.shape} labels, {ids.shape} ids"
            )
        if not np.all((labels == 1) | (labels == -1)):
            raise ValueError(f"Batch at t={self.time_step} has labels outside {{-1, +1}}")
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "ids", ids)

    @property
    def size(self) -> int:
        return int(self.labels.shape[0])

    @property
    def dimension(self) -> int:
        return int(self.features.shape[1])

    @property
    def points(self) -> List[LabeledPoint]:
        return [
            LabeledPoint(features=self.features[i], label=int(self.labels[i]), id=int(self.ids[i]))
            for i in range(self.size)
        ]

    @classmethod
    def from_points(cls, time_step: int, points: Sequence[LabeledPoint]) -> "Batch":
        if not points:
            raise ValueError("A batch must contain at least one point")
        return cls(
            time_step=time_step,
            features=np.vstack([p.features for p in points]),
            labels=np.array([p.label for p in points]),
            ids=np.array([p.id for p in points]),
        )

    def with_features(self, features: np.ndarray) -> "Batch":
        """Copy of this batch with replaced features (same labels and ids)."""
        return Batch(self.time_step, features, self.labels, self.ids)

    def with_labels(self, labels: np.ndarray) -> "Batch":
        """Copy of this batch with replaced labels (same features and ids)."""
        return Batch(self.time_step, self.features, labels, self.ids)


class StreamStore:
    """
    Append-only point storage for one algorithm instance.

    Batches must be ingested in consecutive time-step order. Ingesting a step
    that is already stored is a no-op, so several sample sets may append the
    same batch.
    """

    def __init__(self, initial_capacity: int = 1024):
        self._capacity = initial_capacity
        self._features: Optional[np.ndarray] = None
        self._labels = np.empty(initial_capacity, dtype=np.int64)
        self._ids = np.empty(initial_capacity, dtype=np.int64)
        self._size = 0
        self._first_step: Optional[int] = None
        # _offsets[k] is the first row of the k-th ingested step; last entry is _size
        self._offsets: List[int] = [0]

    @property
    def size(self) -> int:
        return self._size

    @property
    def next_step(self) -> Optional[int]:
        """The only time step ingest() will accept as new, or None before the first ingest."""
        if self._first_step is None:
            return None
        return self._first_step + len(self._offsets) - 1

    @property
    def features(self) -> np.ndarray:
        if self._features is None:
            return np.empty((0, 0))
        return self._features[:self._size]

    @property
    def labels(self) -> np.ndarray:
        return self._labels[:self._size]

    @property
    def ids(self) -> np.ndarray:
        return self._ids[:self._size]

    def row_offset(self, time_step: int) -> int:
        """First storage row of a time step; steps not yet ingested map to the end."""
        if self._first_step is None:
            return 0
        k = time_step - self._first_step
        if k < 0:
            raise ValueError(f"Time step {time_step} precedes the store's first step {self._first_step}")
        if k >= len(self._offsets):
            return self._size
        return self._offsets[k]

    def ingest(self, batch: Batch) -> Tuple[int, int]:
        """
        Store a batch and return its (start, end) row range.

        Raises:
            ValueError: If the batch skips a time step or has the wrong dimension
        """
        if self._first_step is None:
            self._first_step = batch.time_step
            self._features = np.empty((self._capacity, batch.dimension))

        expected = self.next_step
        if batch.time_step < expected:
            return self.row_offset(batch.time_step), self.row_offset(batch.time_step + 1)
        if batch.time_step > expected:
            raise ValueError(
                f"Stream store expected time step {expected}, got {batch.time_step}"
            )
        if batch.dimension != self._features.shape[1]:
            raise ValueError(
                f"Batch dimension {batch.dimension} does not match store dimension "
                f"{self._features.shape[1]}"
            )

        start, end = self._size, self._size + batch.size
        self._reserve(end)
        self._features[start:end] = batch.features
        self._labels[start:end] = batch.labels
        self._ids[start:end] = batch.ids
        self._size = end
        self._offsets.append(end)
        return start, end

    def _reserve(self, rows: int) -> None:
        if rows <= self._capacity:
            return
        capacity = self._capacity
        while capacity < rows:
            capacity *= 2
        features = np.empty((capacity, self._features.shape[1]))
        features[:self._size] = self._features[:self._size]
        labels = np.empty(capacity, dtype=np.int64)
        labels[:self._size] = self._labels[:self._size]
        ids = np.empty(capacity, dtype=np.int64)
        ids[:self._size] = self._ids[:self._size]
        self._features, self._labels, self._ids = features, labels, ids
        self._capacity = capacity


class SampleSet:
    """
    The points of time steps [t_start, t_end) held in a shared StreamStore.

    A new set is empty (t_end == t_start) and grows only by appending the
    batch of step t_end.
    """

    def __init__(self, store: StreamStore, start_step: int):
        if start_step < 0:
            raise ValueError(f"start_step must be non-negative, got {start_step}")
        self._store = store
        self.t_start = start_step
        self.t_end = start_step

    @property
    def store(self) -> StreamStore:
        return self._store

    def row_range(self) -> Tuple[int, int]:
        if self.t_end == self.t_start:
            return 0, 0
        return self._store.row_offset(self.t_start), self._store.row_offset(self.t_end)

    @property
    def size(self) -> int:
        start, end = self.row_range()
        return end - start

    def __len__(self) -> int:
        return self.size

    @property
    def features(self) -> np.ndarray:
        start, end = self.row_range()
        return self._store.features[start:end]

    @property
    def labels(self) -> np.ndarray:
        start, end = self.row_range()
        return self._store.labels[start:end]

    @property
    def ids(self) -> np.ndarray:
        start, end = self.row_range()
        return self._store.ids[start:end]

    def point(self, index: int) -> LabeledPoint:
        size = self.size
        if not 0 <= index < size:
            raise IndexError(f"Point index {index} out of range for sample set of size {size}")
        start, _ = self.row_range()
        row = start + index
        return LabeledPoint(
            features=self._store.features[row],
            label=int(self._store.labels[row]),
            id=int(self._store.ids[row]),
        )

    def append_batch(self, batch: Batch) -> "SampleSet":
        """
        Extend the set with the batch of time step t_end.

        Raises:
            ValueError: If batch.time_step != t_end
        """
        if batch.time_step != self.t_end:
            raise ValueError(
                f"Sample set [{self.t_start}, {self.t_end}) cannot append batch of "
                f"time step {batch.time_step}"
            )
        self._store.ingest(batch)
        self.t_end += 1
        return self

    def spawn(self) -> "SampleSet":
        """Empty set sharing this set's store, starting at this set's next step."""
        return SampleSet(self._store, self.t_end)

    def uniform_index(self, rng: np.random.Generator) -> int:
        size = self.size
        if size == 0:
            raise ValueError("Cannot sample from an empty sample set")
        return int(rng.integers(size))

    def uniform_sample(self, rng: np.random.Generator) -> LabeledPoint:
        return self.point(self.uniform_index(rng))


PointCollection = Union[Batch, SampleSet, Sequence[LabeledPoint], Tuple[np.ndarray, np.ndarray]]


def append_batch(sample_set: SampleSet, batch: Batch) -> SampleSet:
    """Extend a sample set with the next batch. See SampleSet.append_batch."""
    return sample_set.append_batch(batch)


def uniform_sample(sample_set: SampleSet, rng: np.random.Generator) -> LabeledPoint:
    """
    Draw one point uniformly at random from a non-empty sample set.

    Raises:
        ValueError: If the set is empty
    """
    return sample_set.uniform_sample(rng)


def as_arrays(points: PointCollection) -> Tuple[np.ndarray, np.ndarray]:
    """
    Normalize any point collection to (features, labels) arrays.

    Accepts a Batch, a SampleSet, a (features, labels) tuple, or a sequence
    of LabeledPoint.
    """
    if isinstance(points, (Batch, SampleSet)):
        return points.features, points.labels
    if isinstance(points, tuple) and len(points) == 2 and isinstance(points[0], np.ndarray):
        return np.asarray(points[0], dtype=float), np.asarray(points[1])
    points = list(points)
    if not points:
        return np.empty((0, 0)), np.empty(0, dtype=np.int64)
    return np.vstack([p.features for p in points]), np.array([p.label for p in points])


def concatenate(batches: Sequence[Batch]) -> Tuple[np.ndarray, np.ndarray]:
    """Stack the features and labels of several batches."""
    if not batches:
        return np.empty((0, 0)), np.empty(0, dtype=np.int64)
    return (
        np.vstack([b.features for b in batches]),
        np.concatenate([b.labels for b in batches]),
    )
