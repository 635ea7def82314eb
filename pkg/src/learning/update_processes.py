"""
Update Processes for Streaming Linear Models

Each update process consumes one new batch plus a gradient budget and moves
a model's weights toward the empirical risk minimizer of its sample set:

    STRSAGA      variance-reduced updates; new points enter a FIFO waiting
                 room and are admitted into the effective sample set on
                 alternating iterations
    SGD          appends the batch, then takes `budget` uniform steps
    single pass  one SGD step per new point, in arrival order

Also provides the full-batch ERM oracle used to measure sub-optimality and
the budget policy deciding how many gradients each model gets per step.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from src.learning.linear_model import LossConfig, gradient_at, objective_and_gradient
from src.streams.data_model import Batch, PointCollection, SampleSet, as_arrays

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

ARMIJO_C = 1e-4
ERM_TOLERANCE = 1e-8
ERM_MAX_ITERATIONS = 10**6


class UpdateProcess(Enum):
    """Optimizer used by a model slot."""
    STRSAGA = "strsaga"
    SGD = "sgd"
    SINGLE_PASS_SGD = "single_pass_sgd"


class DivisionMode(Enum):
    """How the per-step gradient budget is shared among live models."""
    PER_MODEL = "per_model"
    PER_ALGORITHM = "per_algorithm"


@dataclass(frozen=True)
class BudgetPolicy:
    """
    Per-time-step gradient budget rho and its division among models.

    PER_MODEL gives every live model rho gradients; PER_ALGORITHM splits
    rho evenly (floor) across the live models of one algorithm.
    """
    rho_per_step: int
    division_mode: DivisionMode = DivisionMode.PER_MODEL

    def __post_init__(self):
        if self.rho_per_step < 1:
            raise ValueError(f"rho_per_step must be >= 1, got {self.rho_per_step}")

    def per_model_budget(self, live_models: int) -> int:
        if live_models < 1:
            raise ValueError(f"live_models must be >= 1, got {live_models}")
        if self.division_mode == DivisionMode.PER_ALGORITHM:
            return self.rho_per_step // live_models
        return self.rho_per_step


@dataclass
class SgdState:
    """Weights plus the full sample set for plain SGD."""
    w: np.ndarray
    eta: float
    loss: LossConfig
    sample_set: SampleSet
    gradients_computed: int = 0

    @property
    def sample_size(self) -> int:
        return self.sample_set.size

    def effective_points(self):
        return self.sample_set.features, self.sample_set.labels


@dataclass
class StrsagaState:
    """
    STRSAGA optimizer state.

    `segment` holds every point that arrived since the model was created.
    The first `admitted` of them form the effective sample set S; the rest,
    in arrival order, are the waiting room. `alpha` stores the last gradient
    seen for each point (zero until first visited) and `alpha_sum` their sum
    over S.
    """
    w: np.ndarray
    eta: float
    loss: LossConfig
    segment: SampleSet
    admitted: int = 0
    alpha: np.ndarray = field(default=None)
    alpha_sum: np.ndarray = field(default=None)
    gradients_computed: int = 0

    def __post_init__(self):
        dimension = self.w.shape[0]
        if self.alpha is None:
            self.alpha = np.zeros((0, dimension))
        if self.alpha_sum is None:
            self.alpha_sum = np.zeros(dimension)

    @property
    def sample_size(self) -> int:
        return self.admitted

    @property
    def waiting_size(self) -> int:
        return self.segment.size - self.admitted

    @property
    def waiting_ids(self) -> np.ndarray:
        return self.segment.ids[self.admitted:]

    @property
    def sample_ids(self) -> np.ndarray:
        return self.segment.ids[:self.admitted]

    @property
    def average_alpha(self) -> np.ndarray:
        if self.admitted == 0:
            return np.zeros_like(self.alpha_sum)
        return self.alpha_sum / self.admitted

    def effective_points(self):
        return self.segment.features[:self.admitted], self.segment.labels[:self.admitted]

    def _reserve_alpha(self, rows: int) -> None:
        if rows <= self.alpha.shape[0]:
            return
        grown = np.zeros((max(rows, 2 * self.alpha.shape[0]), self.alpha.shape[1]))
        grown[:self.alpha.shape[0]] = self.alpha
        self.alpha = grown


def sgd_update(state: SgdState, batch: Batch, budget: int, rng: np.random.Generator) -> SgdState:
    """
    Append the batch to the sample set, then take `budget` SGD steps on
    points drawn uniformly from the whole set.
    """
    state.sample_set.append_batch(batch)
    if budget <= 0:
        return state

    features, labels = state.sample_set.features, state.sample_set.labels
    mu, eta, w = state.loss.penalty(state.w.shape[0]), state.eta, state.w
    for index in rng.integers(0, labels.shape[0], size=budget):
        w -= eta * gradient_at(w, features[index], int(labels[index]), mu)
    state.gradients_computed += budget
    return state


def sgd_single_pass_update(state: SgdState, batch: Batch, budget: int, rng: np.random.Generator) -> SgdState:
    """One SGD step per new point in arrival order, capped by the budget."""
    state.sample_set.append_batch(batch)
    steps = min(batch.size, budget)
    mu, eta, w = state.loss.penalty(state.w.shape[0]), state.eta, state.w
    for i in range(steps):
        w -= eta * gradient_at(w, batch.features[i], int(batch.labels[i]), mu)
    state.gradients_computed += steps
    return state


def strsaga_update(state: StrsagaState, batch: Batch, budget: int, rng: np.random.Generator) -> StrsagaState:
    """
    Move the batch into the waiting room, then run `budget` STRSAGA iterations.

    Iterations are numbered from 1 within this call. On even iterations with
    a non-empty waiting room the oldest waiting point is admitted into S and
    used; otherwise a point is drawn uniformly from S. When S is empty the
    waiting-room head is admitted instead, and when both are empty the
    iteration does nothing. A call admits at most ceil(budget / 2) points,
    the empty-set admission included.
    """
    state.segment.append_batch(batch)
    total = state.segment.size
    state._reserve_alpha(total)
    if budget <= 0:
        return state

    features, labels = state.segment.features, state.segment.labels
    mu, eta, w = state.loss.penalty(state.w.shape[0]), state.eta, state.w
    alpha, alpha_sum = state.alpha, state.alpha_sum
    draws = rng.random(budget)
    admissions_left = (budget + 1) // 2
    steps = 0

    for j in range(1, budget + 1):
        n = state.admitted
        if n < total and admissions_left > 0 and (j % 2 == 0 or n == 0):
            index = n
            state.admitted = n = n + 1
            admissions_left -= 1
        elif n > 0:
            index = min(int(draws[j - 1] * n), n - 1)
        else:
            continue

        average = alpha_sum / n
        g = gradient_at(w, features[index], int(labels[index]), mu)
        correction = g - alpha[index]
        w -= eta * (correction + average)
        alpha_sum += correction
        alpha[index] = g
        steps += 1

    state.gradients_computed += steps
    return state


def erm_optimize(
    points: PointCollection,
    cfg: LossConfig,
    tol: float = ERM_TOLERANCE,
    max_iterations: int = ERM_MAX_ITERATIONS
) -> np.ndarray:
    """
    Minimize the regularized logistic risk over a fixed point set.

    Full-batch gradient descent with Barzilai-Borwein trial steps and Armijo
    backtracking, stopped when the gradient norm drops to `tol`.

    Args:
        points: Any point collection accepted by as_arrays
        cfg: Loss configuration
        tol: Gradient-norm stopping tolerance
        max_iterations: Iteration cap

    Returns:
        Minimizer weights

    Raises:
        ValueError: If the point set is empty
        RuntimeError: If the cap is reached before convergence
    """
    features, labels = as_arrays(points)
    if labels.shape[0] == 0:
        raise ValueError("ERM oracle needs at least one point")

    w = np.zeros(features.shape[1])
    mu = cfg.penalty(w.shape[0])
    value, gradient = objective_and_gradient(w, features, labels, mu)
    # 1/L for the logistic risk: L <= mean ||x||^2 / 4 + mu
    step = 1.0 / (0.25 * float(np.mean(np.sum(features * features, axis=1))) + cfg.mu)

    for iteration in range(max_iterations):
        grad_sq = float(gradient @ gradient)
        if np.sqrt(grad_sq) <= tol:
            logger.debug(f"ERM converged after {iteration} iterations")
            return w

        t = step
        while True:
            candidate = w - t * gradient
            new_value, new_gradient = objective_and_gradient(candidate, features, labels, mu)
            if new_value <= value - ARMIJO_C * t * grad_sq:
                break
            # near the optimum the decrease falls below float resolution of the objective
            if new_value <= value + 1e-14 * abs(value) and new_gradient @ new_gradient < grad_sq:
                break
            t *= 0.5
            if t < 1e-30:
                raise RuntimeError(
                    f"ERM line search stalled at gradient norm {np.sqrt(grad_sq):.3e}"
                )

        s = candidate - w
        y = new_gradient - gradient
        curvature = float(s @ y)
        step = float(s @ s) / curvature if curvature > 0 else t
        w, value, gradient = candidate, new_value, new_gradient

    raise RuntimeError(
        f"ERM did not converge in {max_iterations} iterations; "
        f"gradient norm {np.linalg.norm(gradient):.3e}"
    )


def suboptimality(w: np.ndarray, points: PointCollection, cfg: LossConfig,
                  reference: Optional[np.ndarray] = None) -> float:
    """R_S(w) - R_S(w*) for the ERM minimizer w* of the same points."""
    features, labels = as_arrays(points)
    if reference is None:
        reference = erm_optimize((features, labels), cfg)
    mu = cfg.penalty(w.shape[0])
    value, _ = objective_and_gradient(w, features, labels, mu)
    optimum, _ = objective_and_gradient(reference, features, labels, mu)
    return value - optimum
