"""
Test Suite for Linear Model Module

Tests prediction, regularized logistic loss, gradients and segment risks.

Run with: pytest tests/test_linear_model.py -v
"""

import math
import pytest
from pathlib import Path
import sys

import numpy as np

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.learning.linear_model import (
    LossConfig,
    RiskKind,
    point_gradient,
    point_loss,
    predict,
    predict_batch,
    segment_risk,
)
from src.streams.data_model import Batch, LabeledPoint


class TestPredict:
    """Test cases for the sign predictor."""

    def test_zero_weights_predict_positive(self):
        """Test ties go to +1."""
        assert predict(np.zeros(3), np.array([4.0, -2.0, 1.0])) == 1

    def test_negative_score(self):
        assert predict(np.array([1.0, 0.0]), np.array([-2.0, 5.0])) == -1

    def test_positive_score(self):
        assert predict(np.array([1.0, 1.0]), np.array([0.5, 0.5])) == 1

    def test_dimension_mismatch(self):
        """Test mismatched weights and features raise."""
        with pytest.raises(ValueError):
            predict(np.zeros(2), np.zeros(3))

    def test_batch_prediction(self):
        features = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 0.0]])
        assert list(predict_batch(np.array([1.0, 0.0]), features)) == [1, -1, 1]


class TestLossAndGradient:
    """Test cases for point loss and gradient."""

    @pytest.fixture
    def cfg(self):
        return LossConfig(mu=0.01)

    def test_mu_must_be_positive(self):
        with pytest.raises(ValueError):
            LossConfig(mu=0.0)

    def test_zero_weights_loss_is_ln2(self, cfg):
        point = LabeledPoint(np.array([3.0, -1.0]), 1, 0)
        assert point_loss(np.zeros(2), point, cfg) == pytest.approx(math.log(2))

    def test_known_loss_value(self, cfg):
        """Test log(1 + e^2) + 0.005 for a misclassified point."""
        point = LabeledPoint(np.array([2.0, 0.0]), -1, 0)
        loss = point_loss(np.array([1.0, 0.0]), point, cfg)
        assert loss == pytest.approx(math.log1p(math.exp(2.0)) + 0.005)
        assert loss == pytest.approx(2.1319, abs=1e-4)

    def test_large_margin_leaves_regularizer(self, cfg):
        """Test the loss tends to (mu/2)||w||^2 without overflow."""
        w = np.array([1e4, 0.0])
        point = LabeledPoint(np.array([1e3, 0.0]), 1, 0)
        assert point_loss(w, point, cfg) == pytest.approx(0.5 * 0.01 * 1e8)

    def test_large_negative_margin_is_finite(self, cfg):
        w = np.array([1e4, 0.0])
        point = LabeledPoint(np.array([1e3, 0.0]), -1, 0)
        assert math.isfinite(point_loss(w, point, cfg))

    def test_zero_weights_gradient(self, cfg):
        """Test gradient at w = 0 is -y x / 2."""
        x = np.array([2.0, -4.0])
        gradient = point_gradient(np.zeros(2), LabeledPoint(x, 1, 0), cfg)
        assert np.allclose(gradient, -x / 2)

    def test_zero_features_gradient_is_regularizer(self, cfg):
        w = np.array([0.3, -0.7])
        gradient = point_gradient(w, LabeledPoint(np.zeros(2), -1, 0), cfg)
        assert np.allclose(gradient, 0.01 * w)

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_gradient_matches_finite_differences(self, cfg, seed):
        """Test analytic gradient against central differences."""
        rng = np.random.default_rng(seed)
        w = rng.normal(size=4)
        point = LabeledPoint(rng.normal(size=4), int(rng.choice([-1, 1])), 0)
        analytic = point_gradient(w, point, cfg)
        h = 1e-6
        numeric = np.array([
            (point_loss(w + h * e, point, cfg) - point_loss(w - h * e, point, cfg)) / (2 * h)
            for e in np.eye(4)
        ])
        assert np.allclose(analytic, numeric, rtol=1e-5, atol=1e-8)


class TestUnpenalizedIntercept:
    """Test cases for the intercept coordinate left out of the L2 penalty."""

    @pytest.fixture
    def cfg(self):
        return LossConfig(mu=0.01, intercept=True)

    def test_penalty_vector(self, cfg):
        assert list(cfg.penalty(3)) == [0.01, 0.01, 0.0]
        assert LossConfig(mu=0.01).penalty(3) == 0.01

    def test_intercept_weight_not_shrunk(self, cfg):
        """Test only the feature weights pick up the regularization gradient."""
        w = np.array([0.3, -5.0])
        gradient = point_gradient(w, LabeledPoint(np.zeros(2), 1, 0), cfg)
        assert np.allclose(gradient, [0.01 * 0.3, 0.0])

    def test_loss_ignores_intercept_magnitude(self, cfg):
        point = LabeledPoint(np.zeros(2), 1, 0)
        small = point_loss(np.array([1.0, 0.0]), point, cfg)
        large = point_loss(np.array([1.0, 100.0]), point, cfg)
        assert small == pytest.approx(large)
        assert small == pytest.approx(math.log(2) + 0.005)

    @pytest.mark.parametrize("seed", [0, 1])
    def test_gradient_matches_finite_differences(self, cfg, seed):
        rng = np.random.default_rng(seed)
        w = rng.normal(size=3)
        point = LabeledPoint(np.append(rng.normal(size=2), 1.0), int(rng.choice([-1, 1])), 0)
        analytic = point_gradient(w, point, cfg)
        h = 1e-6
        numeric = np.array([
            (point_loss(w + h * e, point, cfg) - point_loss(w - h * e, point, cfg)) / (2 * h)
            for e in np.eye(3)
        ])
        assert np.allclose(analytic, numeric, rtol=1e-5, atol=1e-8)


class TestSegmentRisk:
    """Test cases for segment risks."""

    @pytest.fixture
    def batch(self):
        features = np.array([[1.0, 0.0], [2.0, 0.0], [-1.0, 0.0], [-3.0, 0.0]])
        return Batch(time_step=0, features=features, labels=np.array([1, 1, -1, -1]), ids=np.arange(4))

    def test_constant_predictor_zero_one(self, batch):
        """Test w = 0 predicts +1, so risk is the fraction of -1 labels."""
        assert segment_risk(np.zeros(2), batch, LossConfig(0.1), RiskKind.ZERO_ONE) == pytest.approx(0.5)

    def test_zero_weights_logistic(self, batch):
        assert segment_risk(np.zeros(2), batch, LossConfig(0.1), RiskKind.LOGISTIC) == pytest.approx(math.log(2))

    def test_perfect_separator(self, batch):
        assert segment_risk(np.array([1.0, 0.0]), batch, LossConfig(0.1), RiskKind.ZERO_ONE) == 0.0

    def test_logistic_is_mean_point_loss(self, batch):
        cfg = LossConfig(0.05)
        w = np.array([0.4, -1.0])
        expected = np.mean([point_loss(w, p, cfg) for p in batch.points])
        assert segment_risk(w, batch.points, cfg) == pytest.approx(expected)

    def test_empty_collection_raises(self):
        with pytest.raises(ValueError):
            segment_risk(np.zeros(2), [], LossConfig(0.1))
