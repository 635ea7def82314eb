"""
Dataset Hyperparameters for the DriftSurf Benchmark

Per-dataset training defaults (regularization mu, step size eta, batch size m,
number of time steps b), the drift times handed to the Aware oracle, and the
generator family plus parameters used to synthesize each stream.

Values for the synthetic families follow the published grid-search results.
The two "-synthetic" profiles are stand-ins for the semi-synthetic rows: a
stationary half-space stream with the same drift injection (label swap or
180 degree rotation) applied at the same time steps.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, Mapping, Tuple


@dataclass(frozen=True)
class DatasetProfile:
    """Everything needed to build one benchmark stream and train on it."""
    name: str
    family: str
    mu: float
    eta: float
    batch_size: int
    total_steps: int = 100
    noise_rate: float = 0.0
    params: Mapping[str, Any] = field(default_factory=dict)
    drift_times: Tuple[int, ...] = ()
    label_swaps: Tuple[int, ...] = ()
    rotations: Tuple[int, ...] = ()
    rotation_axes: Tuple[int, int] = (0, 7)
    rotation_angle: float = 180.0


# Drift times of the abrupt SEA schedule (4 equal segments over b=100)
SEA_DRIFTS = (25, 50, 75)
# Label reversals for SINE1 and Mixed
REVERSAL_DRIFTS = (20, 40, 60, 80)
# Gradual Circles transitions, 5 steps each
CIRCLES_WINDOWS = ((25, 30), (50, 55), (75, 80))
# Semi-synthetic injection points
INJECTED_DRIFTS = (30, 60)
# Label noise the rotating-hyperplane generator applies by default
HYPERPLANE_NOISE = 0.05


def _sea(name: str, noise_rate: float) -> DatasetProfile:
    return DatasetProfile(
        name=name,
        family="sea",
        mu=1e-2,
        eta=1e-3,
        batch_size=1000,
        noise_rate=noise_rate,
        params={"concept_order": (3, 2, 4, 1)},
        drift_times=SEA_DRIFTS,
    )


DATASETS: Dict[str, DatasetProfile] = {
    "sea0": _sea("sea0", 0.0),
    "sea10": _sea("sea10", 0.1),
    "sea20": _sea("sea20", 0.2),
    "sea30": _sea("sea30", 0.3),
    "sea-gradual": DatasetProfile(
        name="sea-gradual",
        family="sea",
        mu=1e-2,
        eta=1e-3,
        batch_size=1000,
        params={"concept_order": (1, 2), "transition_windows": ((40, 60),)},
        drift_times=(50,),
    ),
    "sea0-stationary": DatasetProfile(
        name="sea0-stationary",
        family="sea",
        mu=1e-2,
        eta=1e-3,
        batch_size=1000,
        params={"concept_order": (3,)},
    ),
    "hyperplane-slow": DatasetProfile(
        name="hyperplane-slow",
        family="hyperplane",
        mu=1e-3,
        eta=1e-1,
        batch_size=1000,
        noise_rate=HYPERPLANE_NOISE,
        params={"dimension": 10, "magnitude": 0.001, "reversal_probability": 0.1},
    ),
    "hyperplane-fast": DatasetProfile(
        name="hyperplane-fast",
        family="hyperplane",
        mu=1e-3,
        eta=1e-2,
        batch_size=1000,
        noise_rate=HYPERPLANE_NOISE,
        params={"dimension": 10, "magnitude": 0.1, "reversal_probability": 0.1},
    ),
    "sine1": DatasetProfile(
        name="sine1",
        family="sine1",
        mu=1e-3,
        eta=2e-1,
        batch_size=100,
        params={"reversals": REVERSAL_DRIFTS},
        drift_times=REVERSAL_DRIFTS,
    ),
    "mixed": DatasetProfile(
        name="mixed",
        family="mixed",
        mu=1e-3,
        eta=1e-1,
        batch_size=1000,
        params={"reversals": REVERSAL_DRIFTS},
        drift_times=REVERSAL_DRIFTS,
    ),
    "circles": DatasetProfile(
        name="circles",
        family="circles",
        mu=1e-3,
        eta=1e-1,
        batch_size=100,
        params={"transition_windows": CIRCLES_WINDOWS},
        drift_times=tuple(start for start, _ in CIRCLES_WINDOWS),
    ),
    "rcv1-synthetic": DatasetProfile(
        name="rcv1-synthetic",
        family="halfspace",
        mu=1e-3,
        eta=1e-1,
        batch_size=200,
        params={"dimension": 20},
        drift_times=INJECTED_DRIFTS,
        label_swaps=INJECTED_DRIFTS,
    ),
    "covtype-synthetic": DatasetProfile(
        name="covtype-synthetic",
        family="halfspace",
        mu=1e-3,
        eta=1e-1,
        batch_size=1000,
        params={"dimension": 10},
        drift_times=INJECTED_DRIFTS,
        rotations=INJECTED_DRIFTS,
        rotation_axes=(0, 7),
        rotation_angle=180.0,
    ),
}

# DriftSurf defaults: reactive length r, entry threshold delta (delta' = delta/2)
DRIFTSURF_DEFAULTS = {"r": 4, "delta": 0.1}

# MDDM defaults: window n, confidence delta_w, per-scheme weighting parameter
MDDM_DEFAULTS = {
    "window_size": 100,
    "delta_w": 1e-6,
    "difference": 0.01,
    "ratio": 1.01,
    "lambda_": 0.01,
}

# AUE ensemble capacities
AUE_DEFAULTS = {"aue": 10, "aue-k2": 2}


def get_profile(name: str) -> DatasetProfile:
    """
    Look up a dataset profile by name.

    Args:
        name: Registry key, e.g. "sea0" or "hyperplane-slow"

    Returns:
        The registered DatasetProfile

    Raises:
        ValueError: If the dataset is not registered
    """
    try:
        return DATASETS[name]
    except KeyError:
        available = ", ".join(sorted(DATASETS))
        raise ValueError(f"Unknown dataset '{name}'. Available: {available}") from None
