"""
Test Suite for MDDM Drift Detector

Run with: pytest tests/test_mddm.py -v
"""

import pytest
from pathlib import Path
import sys

import numpy as np

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.learning.mddm import (
    DetectorSignal,
    MddmConfig,
    MddmDetector,
    WeightingScheme,
    create_detector,
    drift_threshold,
    mddm_update,
    window_weights,
)


def feed(detector: MddmDetector, bits) -> list:
    """Indices at which the detector signalled."""
    return [i for i, bit in enumerate(bits) if mddm_update(detector, bit) == DetectorSignal.DRIFT]


class TestWeights:
    """Test cases for weighting schemes and thresholds."""

    @pytest.mark.parametrize("scheme", list(WeightingScheme))
    def test_weights_normalized_and_increasing(self, scheme):
        weights = window_weights(MddmConfig(scheme=scheme))
        assert weights.sum() == pytest.approx(1.0)
        assert np.all(np.diff(weights) > 0)

    def test_uniform_threshold(self):
        """Test epsilon for uniform weights, n = 100, delta_w = 1e-6."""
        assert drift_threshold(np.full(100, 0.01), 1e-6) == pytest.approx(0.26283, abs=1e-5)

    def test_geometric_threshold(self):
        detector = create_detector("g")
        assert detector.epsilon == pytest.approx(0.2733, abs=1e-3)
        assert detector.weights[-1] / detector.weights[-2] == pytest.approx(1.01)

    def test_unknown_variant(self):
        with pytest.raises(ValueError):
            create_detector("x")

    def test_invalid_config(self):
        with pytest.raises(ValueError):
            MddmConfig(window_size=0)
        with pytest.raises(ValueError):
            MddmConfig(delta_w=1.5)


class TestDetection:
    """Test cases for the streaming test."""

    def test_all_correct_never_signals(self):
        assert feed(create_detector("g"), [True] * 1000) == []

    def test_no_test_before_window_full(self):
        detector = create_detector("g")
        assert feed(detector, [True] * 50 + [False] * 49) == []

    @pytest.mark.parametrize("variant", ["a", "g", "e"])
    def test_signals_within_incorrect_run(self, variant):
        """Test 100 correct then 100 incorrect bits signal in the second half."""
        signals = feed(create_detector(variant), [True] * 100 + [False] * 100)
        assert signals
        assert 100 <= signals[0] < 200

    def test_geometric_signal_timing(self):
        """Test the geometric detector needs roughly 20 incorrect bits."""
        signals = feed(create_detector("g"), [True] * 100 + [False] * 30)
        assert signals
        assert 15 <= signals[0] - 100 <= 21

    def test_reset_after_signal(self):
        """Test window and running maximum clear on drift."""
        detector = create_detector("g")
        for bit in [True] * 100 + [False] * 30:
            if mddm_update(detector, bit) == DetectorSignal.DRIFT:
                break
        assert detector.detections == 1
        assert len(detector.window) == 0
        assert detector.max_weighted_mean == 0.0

    def test_post_reset_independent_of_history(self):
        """Test behavior after a signal matches a fresh detector."""
        used = create_detector("g")
        for bit in [True] * 100 + [False] * 100:
            if mddm_update(used, bit) == DetectorSignal.DRIFT:
                break
        tail = [False] * 100 + [True] * 100 + [False] * 60
        assert feed(used, tail) == feed(create_detector("g"), tail)
