"""
CSV Stream Loader

Reads a labeled CSV file into consecutive batches of m rows. Categorical
columns are one-hot encoded and, by default, every feature is min-max
scaled to [0, 1]. Labels are mapped to {-1, +1}.

Rows past the last full batch are dropped.
"""

import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from src.streams.data_model import Batch

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)


def _map_labels(raw: pd.Series, label_map: Optional[Dict[str, int]]) -> np.ndarray:
    if label_map is not None:
        mapped = raw.astype(str).map({str(k): int(v) for k, v in label_map.items()})
        unmapped = sorted(raw[mapped.isna()].astype(str).unique())
        if unmapped:
            raise ValueError(f"Labels without a mapping: {unmapped}")
        labels = mapped.to_numpy(dtype=np.int64)
        if not np.all(np.isin(labels, (-1, 1))):
            raise ValueError("label_map must map every label to -1 or +1")
        return labels

    unique = raw.unique()
    values = sorted(unique) if pd.api.types.is_numeric_dtype(raw) else sorted(unique, key=str)
    if len(values) != 2 and not set(values) <= {-1, 1}:
        raise ValueError(
            f"Binary labels required; found {len(values)} distinct values. "
            f"Pass a label mapping to choose the classes."
        )
    if set(values) <= {-1, 1}:
        return raw.to_numpy(dtype=np.int64)
    if set(values) == {0, 1}:
        return np.where(raw.to_numpy() == 1, 1, -1)
    negative, positive = values
    logger.info(f"Mapping label '{negative}' to -1 and '{positive}' to +1")
    return np.where(raw == positive, 1, -1)


def load_csv(
    path: str,
    label_column: str,
    batch_size: int,
    categorical_columns: Sequence[str] = (),
    label_map: Optional[Dict[str, int]] = None,
    scale_to_unit: bool = True
) -> List[Batch]:
    """
    Load a CSV file as a stream of batches.

    Args:
        path: CSV file with a header row
        label_column: Name of the label column
        batch_size: Points per batch (m)
        categorical_columns: Columns to one-hot encode
        label_map: Optional raw-label -> {-1, +1} mapping
        scale_to_unit: Min-max scale each feature to [0, 1]

    Returns:
        floor(rows / m) batches with time steps 0, 1, ...

    Raises:
        FileNotFoundError: If the file does not exist
        ValueError: On ragged rows, missing or non-binary labels, or
            non-numeric feature columns
    """
    csv_path = Path(path)
    if not csv_path.exists():
        raise FileNotFoundError(f"CSV file not found: {path}")
    if batch_size < 1:
        raise ValueError(f"batch_size must be >= 1, got {batch_size}")

    try:
        frame = pd.read_csv(csv_path, on_bad_lines="error")
    except pd.errors.ParserError as e:
        raise ValueError(f"Malformed CSV {path}: {e}") from e

    if label_column not in frame.columns:
        raise ValueError(f"Label column '{label_column}' not in {list(frame.columns)}")
    if frame.isna().any().any():
        raise ValueError(f"CSV {path} has missing values")

    labels = _map_labels(frame[label_column], label_map)
    features = frame.drop(columns=[label_column])
    if categorical_columns:
        features = pd.get_dummies(features, columns=list(categorical_columns), dtype=float)

    non_numeric = [c for c in features.columns if not pd.api.types.is_numeric_dtype(features[c])]
    if non_numeric:
        raise ValueError(f"Non-numeric feature columns {non_numeric}; list them as categorical")

    values = features.to_numpy(dtype=float)
    if scale_to_unit:
        low, high = values.min(axis=0), values.max(axis=0)
        span = np.where(high > low, high - low, 1.0)
        values = (values - low) / span

    count = len(values) // batch_size
    dropped = len(values) - count * batch_size
    if dropped:
        logger.warning(f"Dropping {dropped} trailing rows that do not fill a batch")

    batches = [
        Batch(
            time_step=t,
            features=values[t * batch_size:(t + 1) * batch_size],
            labels=labels[t * batch_size:(t + 1) * batch_size],
            ids=np.arange(t * batch_size, (t + 1) * batch_size),
        )
        for t in range(count)
    ]
    logger.info(f"Loaded {count} batches of {batch_size} points from {csv_path.name}")
    return batches
