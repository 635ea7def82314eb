"""
Probes

Measurements that check the benchmark behaves as expected on small runs:

    suboptimality     R_S(w) - R_S(w*) of a STRSAGA model over its own
                      effective sample set, on a stationary stream
    strsaga-vs-sgd    sub-optimality of STRSAGA against plain SGD on a fixed
                      point set under the same gradient budget
    recovery          steps after a drift until the serving model has
                      trained only on post-drift data
    false-positives   DriftSurf switches and MDDM resets on a stationary
                      stream

Each probe returns ProbeReports whose pass flag is a pure function of the
measured values.
"""

import json
import math
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from config.hyperparameters import get_profile
from src.evaluation.harness import ExperimentConfig, run_experiment
from src.evaluation.records import records_frame
from src.learning.base import LearnerConfig, ModelSlot
from src.learning.linear_model import LossConfig
from src.learning.update_processes import (
    BudgetPolicy,
    UpdateProcess,
    suboptimality,
)
from src.streams.data_model import Batch, PointCollection, StreamStore
from src.streams.generators import Family, GeneratorSpec, build_stream, generate, with_intercept

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

PROBES = ("suboptimality", "strsaga-vs-sgd", "recovery", "false-positives")


@dataclass
class ProbeReport:
    """Measured values of one probed quantity and whether they pass."""
    probe: str
    quantity: str
    values: List[float]
    reference: str
    passed: bool
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def median(self) -> float:
        return float(np.median(self.values)) if self.values else math.nan

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["median"] = self.median
        return data


def measure_suboptimality(weights: np.ndarray, points: PointCollection, cfg: LossConfig) -> float:
    """Sub-optimality of weights against the ERM minimizer of the same points."""
    return suboptimality(weights, points, cfg)


def _filter(frame: pd.DataFrame, algorithm: Optional[str], trial: Optional[int]) -> pd.DataFrame:
    if algorithm is not None:
        frame = frame[frame["algorithm"] == algorithm]
    if trial is not None:
        frame = frame[frame["trial"] == trial]
    return frame


def measure_recovery(records, drift_time: int, algorithm: Optional[str] = None,
                     trial: Optional[int] = None) -> float:
    """
    Steps from drift_time until the serving model's segment starts at or
    after drift_time; +inf if that never happens.
    """
    frame = records if isinstance(records, pd.DataFrame) else records_frame(records)
    frame = _filter(frame, algorithm, trial)
    recovered = frame[(frame["time_step"] >= drift_time) & (frame["serving_segment_start"] >= drift_time)]
    if recovered.empty:
        return math.inf
    return float(recovered["time_step"].min() - drift_time)


def measure_false_positives(transitions: Iterable[Dict[str, Any]], stationary_range: Tuple[int, int],
                            algorithm: Optional[str] = None,
                            trial: Optional[int] = None) -> Tuple[int, int]:
    """
    (reactive entries, model replacements) inside [start, end).

    Replacements are DriftSurf switches or detector resets.
    """
    start, end = stationary_range
    entries = replacements = 0
    for t in transitions:
        if algorithm is not None and t["algorithm"] != algorithm:
            continue
        if trial is not None and t.get("trial") != trial:
            continue
        if not start <= t["time_step"] < end:
            continue
        if t["to_state"] == "reactive":
            entries += 1
        elif t["trigger"] in ("switch", "reset"):
            replacements += 1
    return entries, replacements


def detection_statistics(transitions: Iterable[Dict[str, Any]], drift_times: Sequence[int],
                         total_steps: int, algorithm: str, tolerance: int = 4,
                         trial: Optional[int] = None) -> Dict[str, float]:
    """
    False-positive rate and mean detection delay of reactive entries or resets.

    A detection within `tolerance` steps after a drift time counts as true;
    any other detection is a false positive. The rate is false positives
    over the non-drift steps.
    """
    detections = sorted(
        t["time_step"] for t in transitions
        if t["algorithm"] == algorithm and (trial is None or t.get("trial") == trial)
        and (t["to_state"] == "reactive" or t["trigger"] == "reset")
    )
    delays, false_positives = [], 0
    matched = set()
    for step in detections:
        hit = next((d for d in drift_times if d <= step <= d + tolerance and d not in matched), None)
        if hit is None:
            false_positives += 1
        else:
            matched.add(hit)
            delays.append(step - hit)
    quiet_steps = max(total_steps - len(drift_times) * (tolerance + 1), 1)
    return {
        "false_positive_rate": false_positives / quiet_steps,
        "mean_delay": float(np.mean(delays)) if delays else math.inf,
        "detected": float(len(matched)),
    }


def _run_slot(batches: Sequence[Batch], cfg: LearnerConfig, process: UpdateProcess, seed: int,
              checkpoints: Sequence[int]) -> Dict[int, float]:
    rng = np.random.default_rng(seed)
    slot = ModelSlot("probe", batches[0].dimension, StreamStore(), batches[0].time_step, cfg, rng, process)
    budget = cfg.budget.per_model_budget(1)
    gaps = {}
    for count, batch in enumerate(batches, start=1):
        slot.train(batch, budget, rng)
        if count in checkpoints:
            gaps[count] = measure_suboptimality(slot.weights, slot.effective_points(), cfg.loss)
    return gaps


def probe_suboptimality(seed: int = 0, trials: int = 5, checkpoints: Sequence[int] = (10, 20, 40),
                        dataset: str = "sea0-stationary",
                        batch_size: Optional[int] = None) -> ProbeReport:
    """Median STRSAGA sub-optimality should not increase from one checkpoint to the next."""
    checkpoints = sorted(checkpoints)
    profile = get_profile(dataset)
    batch_size = batch_size or profile.batch_size
    cfg = LearnerConfig(loss=LossConfig(profile.mu, intercept=True), eta=profile.eta,
                        budget=BudgetPolicy(2 * batch_size))
    trajectories = []
    for trial_seed in range(seed, seed + trials):
        batches = build_stream(profile, trial_seed, total_steps=max(checkpoints), batch_size=batch_size)
        trajectories.append(_run_slot(batches, cfg, UpdateProcess.STRSAGA, trial_seed, checkpoints))
    finals = [trajectory[max(checkpoints)] for trajectory in trajectories]
    medians = {c: float(np.median([tr[c] for tr in trajectories])) for c in checkpoints}
    passed = all(medians[a] >= medians[b] for a, b in zip(checkpoints, checkpoints[1:]))
    return ProbeReport(
        probe="suboptimality",
        quantity="final sub-optimality",
        values=finals,
        reference="median non-increasing over checkpoints " + ", ".join(str(c) for c in checkpoints),
        passed=passed,
        details={"median_by_checkpoint": medians},
    )


def probe_strsaga_vs_sgd(seed: int = 0, trials: int = 5, points: int = 100, budget_factor: int = 50,
                         eta: float = 0.1, mu: float = 1e-2) -> ProbeReport:
    """On one fixed point set, STRSAGA should reach lower sub-optimality than SGD."""
    ratios, strsaga_gaps, sgd_gaps = [], [], []
    for trial_seed in range(seed, seed + trials):
        spec = GeneratorSpec(family=Family.HALFSPACE, params={"dimension": 5},
                             noise_rate=0.1, total_steps=1, batch_size=points, seed=trial_seed)
        batches = with_intercept(generate(spec))
        cfg = LearnerConfig(loss=LossConfig(mu, intercept=True), eta=eta, budget=BudgetPolicy(budget_factor * points))
        strsaga = _run_slot(batches, cfg, UpdateProcess.STRSAGA, trial_seed, (1,))[1]
        sgd = _run_slot(batches, cfg, UpdateProcess.SGD, trial_seed, (1,))[1]
        strsaga_gaps.append(strsaga)
        sgd_gaps.append(sgd)
        ratios.append(strsaga / sgd if sgd > 0 else math.inf)
    return ProbeReport(
        probe="strsaga-vs-sgd",
        quantity="STRSAGA / SGD sub-optimality",
        values=ratios,
        reference="< 1",
        passed=float(np.median(strsaga_gaps)) < float(np.median(sgd_gaps)),
        details={"strsaga_median": float(np.median(strsaga_gaps)),
                 "sgd_median": float(np.median(sgd_gaps))},
    )


def probe_recovery(seed: int = 0, trials: int = 5, dataset: str = "rcv1-synthetic",
                   drift_time: int = 30, total_steps: int = 45,
                   batch_size: Optional[int] = None) -> List[ProbeReport]:
    """
    Recovery time after an abrupt drift. Aware recovers immediately,
    DriftSurf within 2r steps on at least 4 of 5 trials, and the oblivious
    learner never does. Details carry the detection delay and false-positive
    rate of each trial.
    """
    config = ExperimentConfig(dataset=dataset, algorithms=["driftsurf", "aware", "obl"],
                              trials=trials, seed=seed, total_steps=total_steps, batch_size=batch_size)
    result = run_experiment(config)
    frame = result.frame
    bound = 2 * config.r
    expectations = {
        "aware": ("all == 0", lambda values: all(v == 0 for v in values)),
        "driftsurf": (f"<= {bound} in >= 80% of trials",
                      lambda values: sum(v <= bound for v in values) >= 0.8 * len(values)),
        "obl": ("never (inf)", lambda values: all(math.isinf(v) for v in values)),
    }
    reports = []
    for algorithm, (reference, check) in expectations.items():
        values = [measure_recovery(frame, drift_time, algorithm, trial) for trial in range(trials)]
        detection = [detection_statistics(result.transitions, [drift_time], total_steps, algorithm, trial=trial)
                     for trial in range(trials)]
        reports.append(ProbeReport(
            probe="recovery",
            quantity=f"{algorithm} recovery steps",
            values=values,
            reference=reference,
            passed=check(values),
            details={"detection": detection},
        ))
    return reports


def probe_false_positives(seed: int = 0, trials: int = 5, dataset: str = "sea0-stationary",
                          total_steps: int = 100,
                          batch_size: Optional[int] = None) -> List[ProbeReport]:
    """DriftSurf should rarely replace its model on a stationary stream."""
    config = ExperimentConfig(dataset=dataset, algorithms=["driftsurf", "mddm-g"],
                              trials=trials, seed=seed, total_steps=total_steps, batch_size=batch_size)
    result = run_experiment(config)
    reports = []
    for algorithm in config.algorithms:
        counts = [measure_false_positives(result.transitions, (0, total_steps), algorithm, trial)
                  for trial in range(trials)]
        replacements = [float(c[1]) for c in counts]
        reports.append(ProbeReport(
            probe="false-positives",
            quantity=f"{algorithm} model replacements",
            values=replacements,
            reference="median <= 1" if algorithm == "driftsurf" else "reported",
            passed=float(np.median(replacements)) <= 1 if algorithm == "driftsurf" else True,
            details={
                "reactive_entries": [float(c[0]) for c in counts],
                "false_positive_rate": [
                    detection_statistics(result.transitions, (), total_steps, algorithm, trial=trial)
                    ["false_positive_rate"]
                    for trial in range(trials)
                ],
            },
        ))
    return reports


def run_probes(seed: int = 0, trials: int = 5, which: Sequence[str] = PROBES) -> List[ProbeReport]:
    """Run the selected probes and return all their reports."""
    unknown = [w for w in which if w not in PROBES]
    if unknown:
        raise ValueError(f"Unknown probes {unknown}; available: {', '.join(PROBES)}")
    reports: List[ProbeReport] = []
    if "suboptimality" in which:
        reports.append(probe_suboptimality(seed, trials))
    if "strsaga-vs-sgd" in which:
        reports.append(probe_strsaga_vs_sgd(seed, trials))
    if "recovery" in which:
        reports.extend(probe_recovery(seed, trials))
    if "false-positives" in which:
        reports.extend(probe_false_positives(seed, trials))
    for report in reports:
        status = "PASS" if report.passed else "FAIL"
        logger.info(f"[{status}] {report.probe}: {report.quantity} median={report.median:.4g}")
    return reports


def write_probe_reports(reports: Sequence[ProbeReport], output_dir: str):
    """Write probes.csv (one row per report) and probes.json."""
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = [
        {"probe": r.probe, "quantity": r.quantity, "median": r.median,
         "reference": r.reference, "passed": r.passed}
        for r in reports
    ]
    pd.DataFrame(rows).to_csv(out / "probes.csv", index=False)
    with open(out / "probes.json", "w", encoding="utf-8") as f:
        json.dump([r.to_dict() for r in reports], f, indent=2, default=str)
    return out / "probes.csv", out / "probes.json"
