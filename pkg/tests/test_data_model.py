"""
Test Suite for Stream Data Model

Tests batches, the shared stream store, and sample set views.

Run with: pytest tests/test_data_model.py -v
"""

import pytest
from pathlib import Path
import sys

import numpy as np

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.streams.data_model import (
    Batch,
    LabeledPoint,
    SampleSet,
    StreamStore,
    append_batch,
    as_arrays,
    uniform_sample,
)


def make_batch(t: int, m: int, dimension: int = 2) -> Batch:
    """Batch whose first feature encodes the point id."""
    ids = np.arange(t * m, (t + 1) * m)
    features = np.column_stack([ids.astype(float)] + [np.zeros(m)] * (dimension - 1))
    return Batch(time_step=t, features=features, labels=np.where(ids % 2 == 0, 1, -1), ids=ids)


class TestBatch:
    """Test cases for Batch and LabeledPoint."""

    def test_batch_properties(self):
        """Test size, dimension and point view."""
        batch = make_batch(0, 3)
        assert batch.size == 3
        assert batch.dimension == 2
        points = batch.points
        assert [p.id for p in points] == [0, 1, 2]
        assert points[1].label == -1

    def test_batch_is_immutable(self):
        """Test arrays cannot be written after construction."""
        batch = make_batch(0, 3)
        with pytest.raises(ValueError):
            batch.features[0, 0] = 5.0

    def test_invalid_label_rejected(self):
        """Test labels outside {-1, +1} raise."""
        with pytest.raises(ValueError):
            Batch(time_step=0, features=np.zeros((2, 1)), labels=np.array([1, 0]), ids=np.arange(2))

    def test_empty_batch_rejected(self):
        """Test a batch needs at least one point."""
        with pytest.raises(ValueError):
            Batch(time_step=0, features=np.zeros((0, 2)), labels=np.array([]), ids=np.array([]))

    def test_point_label_validated(self):
        """Test LabeledPoint rejects non-binary labels."""
        with pytest.raises(ValueError):
            LabeledPoint(features=np.zeros(2), label=2, id=0)

    def test_from_points_roundtrip(self):
        """Test building a batch from labeled points."""
        batch = make_batch(4, 5)
        rebuilt = Batch.from_points(4, batch.points)
        assert np.array_equal(rebuilt.features, batch.features)
        assert np.array_equal(rebuilt.ids, batch.ids)


class TestSampleSet:
    """Test cases for SampleSet views over a StreamStore."""

    @pytest.fixture
    def store(self):
        return StreamStore(initial_capacity=4)

    def test_append_to_empty_set(self, store):
        """Test empty set + batch(m=3) -> size 3."""
        sample_set = SampleSet(store, 0)
        append_batch(sample_set, make_batch(0, 3))
        assert sample_set.size == 3
        assert (sample_set.t_start, sample_set.t_end) == (0, 1)

    def test_append_grows_by_m(self, store):
        """Test size 10 (m=5) + one batch -> size 15."""
        sample_set = SampleSet(store, 0)
        sample_set.append_batch(make_batch(0, 5)).append_batch(make_batch(1, 5))
        assert sample_set.size == 10
        sample_set.append_batch(make_batch(2, 5))
        assert sample_set.size == 15
        assert list(sample_set.ids) == list(range(15))

    def test_wrong_time_step_rejected(self, store):
        """Test appending a non-contiguous batch raises."""
        sample_set = SampleSet(store, 0)
        sample_set.append_batch(make_batch(0, 5)).append_batch(make_batch(1, 5))
        with pytest.raises(ValueError):
            sample_set.append_batch(make_batch(3, 5))

    def test_sets_share_storage(self, store):
        """Test a spawned set sees the same rows without copying."""
        older = SampleSet(store, 0)
        older.append_batch(make_batch(0, 4))
        newer = older.spawn()
        older.append_batch(make_batch(1, 4))
        newer.append_batch(make_batch(1, 4))
        assert store.size == 8
        assert older.size == 8
        assert newer.size == 4
        assert list(newer.ids) == [4, 5, 6, 7]

    def test_store_rejects_skipped_step(self, store):
        """Test the store only accepts the next step."""
        store.ingest(make_batch(0, 2))
        with pytest.raises(ValueError):
            store.ingest(make_batch(2, 2))

    def test_store_ingest_is_idempotent(self, store):
        """Test re-ingesting a stored step returns its rows."""
        store.ingest(make_batch(0, 2))
        store.ingest(make_batch(1, 3))
        assert store.ingest(make_batch(1, 3)) == (2, 5)
        assert store.size == 5

    def test_point_lookup(self, store):
        """Test relative point access within a view."""
        sample_set = SampleSet(store, 0)
        sample_set.append_batch(make_batch(0, 3))
        point = sample_set.point(2)
        assert point.id == 2
        assert point.features[0] == 2.0
        with pytest.raises(IndexError):
            sample_set.point(3)

    def test_as_arrays_accepts_collections(self, store):
        """Test normalizing batches, sets and point lists."""
        batch = make_batch(0, 3)
        sample_set = SampleSet(store, 0).append_batch(batch)
        for collection in (batch, sample_set, batch.points, (batch.features, batch.labels)):
            features, labels = as_arrays(collection)
            assert features.shape == (3, 2)
            assert list(labels) == [1, -1, 1]


class TestUniformSample:
    """Test cases for uniform sampling."""

    @pytest.fixture
    def store(self):
        return StreamStore()

    def test_empty_set_raises(self, store):
        """Test sampling from an empty set is an error."""
        with pytest.raises(ValueError):
            uniform_sample(SampleSet(store, 0), np.random.default_rng(0))

    def test_singleton_always_returned(self, store):
        """Test a singleton set returns its only point."""
        sample_set = SampleSet(store, 0).append_batch(make_batch(0, 1))
        rng = np.random.default_rng(1)
        assert all(uniform_sample(sample_set, rng).id == 0 for _ in range(20))

    def test_reproducible_with_seed(self, store):
        """Test the same seed yields the same sequence."""
        sample_set = SampleSet(store, 0).append_batch(make_batch(0, 4))
        rng_a, rng_b = np.random.default_rng(7), np.random.default_rng(7)
        seq_a = [uniform_sample(sample_set, rng_a).id for _ in range(10)]
        seq_b = [uniform_sample(sample_set, rng_b).id for _ in range(10)]
        assert seq_a == seq_b

    def test_frequencies_are_uniform(self, store):
        """Test per-point frequencies stay within 5 sigma of the mean."""
        sample_set = SampleSet(store, 0).append_batch(make_batch(0, 10000))
        rng = np.random.default_rng(3)
        draws = np.array([sample_set.uniform_index(rng) for _ in range(10**6)])
        counts = np.bincount(draws, minlength=10000)
        expected = draws.size / 10000
        sigma = np.sqrt(expected * (1 - 1 / 10000))
        assert np.all(np.abs(counts - expected) <= 5 * sigma + 1)
