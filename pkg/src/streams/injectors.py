"""
Drift Injectors

Turn a stationary stream into a drifting one at chosen time steps:
label swaps negate every label from the change point on, and rotations
rotate a pair of feature axes. Both act cumulatively, so a second swap
restores the original labels and a second 180 degree rotation restores
the original features.
"""

import math
import logging
from typing import List, Sequence, Tuple

import numpy as np

from src.streams.data_model import Batch

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)


def _changes_before(t: int, at_steps: Sequence[int]) -> int:
    return sum(1 for s in at_steps if s <= t)


def inject_label_swap(stream: Sequence[Batch], at_steps: Sequence[int]) -> List[Batch]:
    """Negate labels of every batch after an odd number of change points."""
    steps = sorted(int(s) for s in at_steps)
    result = []
    for batch in stream:
        if _changes_before(batch.time_step, steps) % 2 == 1:
            batch = batch.with_labels(-batch.labels)
        result.append(batch)
    logger.info(f"Injected label swaps at {steps}")
    return result


def _cos_sin(angle_deg: float) -> Tuple[float, float]:
    # exact values for quarter turns
    quarter = angle_deg / 90.0
    if float(quarter).is_integer():
        return [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)][int(quarter) % 4]
    radians = math.radians(angle_deg)
    return math.cos(radians), math.sin(radians)


def inject_rotation(
    stream: Sequence[Batch],
    at_steps: Sequence[int],
    axis_pair: Tuple[int, int],
    angle_deg: float
) -> List[Batch]:
    """
    Rotate features in the plane of axis_pair by angle_deg at each change point.

    Raises:
        IndexError: If an axis is outside the feature dimension
        ValueError: If both axes are the same
    """
    i, j = axis_pair
    if i == j:
        raise ValueError(f"Rotation axes must differ, got ({i}, {j})")
    steps = sorted(int(s) for s in at_steps)
    result = []
    for batch in stream:
        if not (0 <= i < batch.dimension and 0 <= j < batch.dimension):
            raise IndexError(f"Rotation axes ({i}, {j}) out of range for dimension {batch.dimension}")
        turns = _changes_before(batch.time_step, steps)
        if turns:
            cos, sin = _cos_sin(turns * angle_deg)
            features = np.array(batch.features)
            xi, xj = batch.features[:, i], batch.features[:, j]
            features[:, i] = cos * xi - sin * xj
            features[:, j] = sin * xi + cos * xj
            batch = batch.with_features(features)
        result.append(batch)
    logger.info(f"Injected {angle_deg} degree rotations of axes ({i}, {j}) at {steps}")
    return result
