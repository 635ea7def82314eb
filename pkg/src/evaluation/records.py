"""
Result Records and Output Files

StepRecord is one row of records.csv: a single algorithm's test-then-train
outcome at one time step of one trial. Summaries are computed with pandas:
the time-averaged misclassification per trial, then the median over trials.

Output files written by write_outputs():
    records.csv       every step record
    summary.csv       per (dataset, algorithm) median of time-averaged misclassification
    timeseries.csv    per (dataset, algorithm, time step) median misclassification
    transitions.log   one JSON object per state transition
"""

import json
import logging
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence

import pandas as pd

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StepRecord:
    trial: int
    dataset: str
    algorithm: str
    time_step: int
    misclassification: float
    state: str
    model_id: str
    serving_model_id: str
    serving_segment_start: int
    gradients_spent: int
    models_trained: int


RESULT_COLUMNS = [f.name for f in fields(StepRecord)]


def records_frame(records: Iterable[StepRecord]) -> pd.DataFrame:
    return pd.DataFrame([asdict(r) for r in records], columns=RESULT_COLUMNS)


def summarize(records) -> pd.DataFrame:
    """
    Median over trials of each trial's time-averaged misclassification.

    Args:
        records: StepRecords or a records DataFrame

    Returns:
        DataFrame with dataset, algorithm, trials, mean_misclass_median
        and the median of per-trial mean gradients per step
    """
    frame = records if isinstance(records, pd.DataFrame) else records_frame(records)
    if frame.empty:
        return pd.DataFrame(columns=["dataset", "algorithm", "trials", "mean_misclass_median", "gradients_per_step"])
    per_trial = (
        frame.groupby(["dataset", "algorithm", "trial"], sort=False)
        .agg(misclassification=("misclassification", "mean"),
             gradients_per_step=("gradients_spent", "mean"))
        .reset_index()
    )
    return (
        per_trial.groupby(["dataset", "algorithm"], sort=False)
        .agg(trials=("trial", "nunique"),
             mean_misclass_median=("misclassification", "median"),
             gradients_per_step=("gradients_per_step", "median"))
        .reset_index()
    )


def timeseries(records) -> pd.DataFrame:
    """Median misclassification over trials at every time step."""
    frame = records if isinstance(records, pd.DataFrame) else records_frame(records)
    return (
        frame.groupby(["dataset", "algorithm", "time_step"], sort=False)["misclassification"]
        .median()
        .reset_index()
        .sort_values(["dataset", "algorithm", "time_step"], kind="stable")
        .reset_index(drop=True)
    )


def write_transitions(transitions: Sequence[Dict[str, Any]], path: Path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for transition in transitions:
            f.write(json.dumps(transition) + "\n")


def read_transitions(path: Path) -> List[Dict[str, Any]]:
    with open(path, "r", encoding="utf-8") as f:
        return [json.loads(line) for line in f if line.strip()]


def write_outputs(records: Sequence[StepRecord], transitions: Sequence[Dict[str, Any]],
                  output_dir: str) -> Dict[str, Path]:
    """Write every output file into output_dir and return their paths."""
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    frame = records_frame(records)
    paths = {
        "records": out / "records.csv",
        "summary": out / "summary.csv",
        "timeseries": out / "timeseries.csv",
        "transitions": out / "transitions.log",
    }
    frame.to_csv(paths["records"], index=False)
    summarize(frame).to_csv(paths["summary"], index=False)
    timeseries(frame).to_csv(paths["timeseries"], index=False)
    write_transitions(transitions, paths["transitions"])
    logger.info(f"Wrote {len(frame)} step records to {out}")
    return paths
