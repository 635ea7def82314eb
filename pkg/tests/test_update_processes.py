"""
Test Suite for Update Processes

Tests SGD, STRSAGA, single-pass SGD, the budget policy and the ERM oracle.

Run with: pytest tests/test_update_processes.py -v
"""

import pytest
from pathlib import Path
import sys

import numpy as np

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.learning.linear_model import LossConfig, objective_and_gradient, point_gradient
from src.learning.update_processes import (
    BudgetPolicy,
    DivisionMode,
    SgdState,
    StrsagaState,
    erm_optimize,
    sgd_single_pass_update,
    sgd_update,
    strsaga_update,
    suboptimality,
)
from src.streams.data_model import Batch, LabeledPoint, SampleSet, StreamStore


def random_batch(t: int, m: int, rng: np.random.Generator, dimension: int = 3) -> Batch:
    features = rng.normal(size=(m, dimension))
    labels = np.where(features[:, 0] + 0.3 * rng.normal(size=m) >= 0, 1, -1)
    return Batch(time_step=t, features=features, labels=labels, ids=np.arange(t * m, (t + 1) * m))


def strsaga_state(dimension: int = 3, eta: float = 0.05, mu: float = 0.01) -> StrsagaState:
    return StrsagaState(w=np.zeros(dimension), eta=eta, loss=LossConfig(mu), segment=SampleSet(StreamStore(), 0))


def sgd_state(dimension: int = 3, eta: float = 0.05, mu: float = 0.01) -> SgdState:
    return SgdState(w=np.zeros(dimension), eta=eta, loss=LossConfig(mu), sample_set=SampleSet(StreamStore(), 0))


class TestBudgetPolicy:
    """Test cases for budget division."""

    def test_per_model_gives_full_budget(self):
        policy = BudgetPolicy(2000, DivisionMode.PER_MODEL)
        assert policy.per_model_budget(2) == 2000

    def test_per_algorithm_floors(self):
        """Test rho = 4m split across 10 experts."""
        policy = BudgetPolicy(4 * 1000, DivisionMode.PER_ALGORITHM)
        assert policy.per_model_budget(10) == 400
        assert BudgetPolicy(7, DivisionMode.PER_ALGORITHM).per_model_budget(2) == 3

    def test_invalid_budget(self):
        with pytest.raises(ValueError):
            BudgetPolicy(0)
        with pytest.raises(ValueError):
            BudgetPolicy(10).per_model_budget(0)


class TestSgdUpdate:
    """Test cases for SGD and single-pass SGD."""

    def test_zero_budget_only_appends(self):
        rng = np.random.default_rng(0)
        state = sgd_update(sgd_state(), random_batch(0, 5, rng), 0, rng)
        assert np.array_equal(state.w, np.zeros(3))
        assert state.sample_size == 5
        assert state.gradients_computed == 0

    def test_single_step_algebra(self):
        """Test one step from w = 0 on one point."""
        x = np.array([1.0, -2.0, 0.5])
        batch = Batch(time_step=0, features=x[None, :], labels=np.array([-1]), ids=np.array([0]))
        state = sgd_update(sgd_state(eta=0.1), batch, 1, np.random.default_rng(0))
        assert np.allclose(state.w, -0.1 * (-(-1) * x / 2))

    def test_converges_on_toy_set(self):
        """Test SGD approaches the ERM solution on two 1-D points."""
        batch = Batch(time_step=0, features=np.array([[1.0], [-0.5]]), labels=np.array([1, 1]), ids=np.arange(2))
        cfg = LossConfig(0.1)
        w_star = erm_optimize(batch, cfg)
        state = sgd_update(sgd_state(dimension=1, eta=0.01, mu=0.1), batch, 10**5, np.random.default_rng(4))
        assert abs(state.w[0] - w_star[0]) < 0.05

    def test_budget_accounting(self):
        rng = np.random.default_rng(1)
        state = sgd_state()
        for t in range(3):
            sgd_update(state, random_batch(t, 10, rng), 25, rng)
        assert state.gradients_computed == 75
        assert state.sample_size == 30

    def test_single_pass_uses_m_steps(self):
        """Test one step per new point even with a larger budget."""
        rng = np.random.default_rng(2)
        state = sgd_single_pass_update(sgd_state(), random_batch(0, 10, rng), 20, rng)
        assert state.gradients_computed == 10

    def test_single_pass_order(self):
        """Test steps follow arrival order."""
        rng = np.random.default_rng(3)
        batch = random_batch(0, 4, rng)
        state = sgd_single_pass_update(sgd_state(eta=0.1), batch, 8, rng)
        w = np.zeros(3)
        for p in batch.points:
            w = w - 0.1 * point_gradient(w, p, LossConfig(0.01))
        assert np.allclose(state.w, w)


class TestStrsagaUpdate:
    """Test cases for STRSAGA."""

    def test_fresh_state_admission_schedule(self):
        """Test m = 2, budget 4: admissions at iterations 1 and 2."""
        rng = np.random.default_rng(0)
        state = strsaga_update(strsaga_state(), random_batch(0, 2, rng), 4, rng)
        assert state.sample_size == 2
        assert state.waiting_size == 0
        assert state.gradients_computed == 4

    def test_admissions_bounded_by_half_budget(self):
        """Test at most ceil(rho / 2) admissions per call, empty-set admission included."""
        rng = np.random.default_rng(1)
        state = strsaga_state()
        strsaga_update(state, random_batch(0, 50, rng), 10, rng)
        # iterations 1, 2, 4, 6, 8 admit; the cap leaves iteration 10 uniform
        assert state.sample_size == 5
        assert state.gradients_computed == 10
        strsaga_update(state, random_batch(1, 50, rng), 10, rng)
        assert state.sample_size == 10
        assert state.waiting_size == 90

    @pytest.mark.parametrize("budget", [1, 3, 7, 10])
    def test_fresh_admissions_never_exceed_cap(self, budget):
        rng = np.random.default_rng(budget)
        state = strsaga_update(strsaga_state(), random_batch(0, 50, rng), budget, rng)
        assert state.sample_size == (budget + 1) // 2

    def test_every_point_in_exactly_one_place(self):
        rng = np.random.default_rng(2)
        state = strsaga_state()
        for t in range(4):
            strsaga_update(state, random_batch(t, 30, rng), 20, rng)
        sample, waiting = set(state.sample_ids), set(state.waiting_ids)
        assert not sample & waiting
        assert sample | waiting == set(range(120))
        # waiting room stays FIFO
        assert list(state.waiting_ids) == sorted(state.waiting_ids)

    def test_steady_state_drains_waiting_room(self):
        """Test rho = 2m admits every batch within its own step."""
        rng = np.random.default_rng(3)
        state = strsaga_state()
        m = 20
        for t in range(5):
            strsaga_update(state, random_batch(t, m, rng), 2 * m, rng)
            assert state.waiting_size == 0
            assert state.sample_size == (t + 1) * m

    def test_average_alpha_is_maintained(self):
        """Test the incremental alpha sum matches the stored alphas."""
        rng = np.random.default_rng(4)
        state = strsaga_state()
        for t in range(6):
            strsaga_update(state, random_batch(t, 25, rng), 40, rng)
        stored = state.alpha[:state.sample_size]
        assert np.allclose(state.average_alpha, stored.mean(axis=0), atol=1e-9)

    def test_zero_budget_only_queues(self):
        rng = np.random.default_rng(5)
        state = strsaga_update(strsaga_state(), random_batch(0, 5, rng), 0, rng)
        assert state.sample_size == 0
        assert state.waiting_size == 5
        assert np.array_equal(state.w, np.zeros(3))

    def test_deterministic_for_seed(self):
        batches = [random_batch(t, 15, np.random.default_rng(t)) for t in range(3)]
        results = []
        for _ in range(2):
            rng = np.random.default_rng(9)
            state = strsaga_state()
            for batch in batches:
                strsaga_update(state, batch, 30, rng)
            results.append(state.w.copy())
        assert np.array_equal(results[0], results[1])

    def test_beats_sgd_on_fixed_set(self):
        """Test variance reduction on a fixed point set at equal step size."""
        wins = 0
        for seed in range(5):
            rng = np.random.default_rng(seed)
            batch = random_batch(0, 100, rng, dimension=4)
            cfg = LossConfig(0.01)
            w_star = erm_optimize(batch, cfg)
            strsaga = strsaga_update(strsaga_state(4, 0.1), batch, 5000, np.random.default_rng(seed))
            sgd = sgd_update(sgd_state(4, 0.1), batch, 5000, np.random.default_rng(seed))
            wins += suboptimality(strsaga.w, batch, cfg, w_star) < suboptimality(sgd.w, batch, cfg, w_star)
        assert wins >= 3


class TestErmOptimize:
    """Test cases for the ERM oracle."""

    def test_single_point_solution(self):
        """Test w* solves w = sigma(-w) for x = 1, y = +1, mu = 1."""
        point = LabeledPoint(np.array([1.0]), 1, 0)
        w_star = erm_optimize([point], LossConfig(1.0))
        assert w_star[0] == pytest.approx(0.401058, abs=1e-6)

    def test_symmetric_pair_gives_zero(self):
        x = np.array([0.7, -1.2])
        points = [LabeledPoint(x, 1, 0), LabeledPoint(x, -1, 1)]
        assert np.allclose(erm_optimize(points, LossConfig(0.1)), 0.0, atol=1e-8)

    def test_gradient_norm_within_tolerance(self):
        rng = np.random.default_rng(0)
        batch = random_batch(0, 200, rng, dimension=5)
        cfg = LossConfig(0.01)
        w_star = erm_optimize(batch, cfg, tol=1e-8)
        _, gradient = objective_and_gradient(w_star, batch.features, batch.labels, cfg.mu)
        assert np.linalg.norm(gradient) <= 1e-8

    def test_suboptimality_of_optimum_is_zero(self):
        rng = np.random.default_rng(1)
        batch = random_batch(0, 100, rng)
        cfg = LossConfig(0.01)
        w_star = erm_optimize(batch, cfg)
        assert abs(suboptimality(w_star, batch, cfg, w_star)) <= 2e-8
        assert suboptimality(rng.normal(size=3), batch, cfg, w_star) > 0

    def test_iteration_cap_reports_gradient_norm(self):
        rng = np.random.default_rng(2)
        batch = random_batch(0, 50, rng)
        with pytest.raises(RuntimeError, match="gradient norm"):
            erm_optimize(batch, LossConfig(0.01), tol=1e-12, max_iterations=2)

    def test_empty_set_raises(self):
        with pytest.raises(ValueError):
            erm_optimize([], LossConfig(0.1))

    def test_unpenalized_intercept_centers_threshold(self):
        """Test a mirror-symmetric 1-D set puts the boundary at its midpoint."""
        xs = [1.0, 2.0, 4.0, 5.0]
        points = [LabeledPoint(np.array([x, 1.0]), 1 if x > 3 else -1, i) for i, x in enumerate(xs)]
        w_star = erm_optimize(points, LossConfig(1.0, intercept=True))
        assert -w_star[1] / w_star[0] == pytest.approx(3.0, abs=1e-6)

    def test_penalized_intercept_pulls_threshold(self):
        xs = [1.0, 2.0, 4.0, 5.0]
        points = [LabeledPoint(np.array([x, 1.0]), 1 if x > 3 else -1, i) for i, x in enumerate(xs)]
        w_star = erm_optimize(points, LossConfig(1.0))
        assert -w_star[1] / w_star[0] < 2.9
