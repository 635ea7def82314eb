"""
Command-Line Interface for the DriftSurf Benchmark

Subcommands:
    run     one experiment (dataset x algorithms x trials)
    sweep   every combination of a key = value1 | value2 grid file
    probe   the probe suite

Exit codes: 0 on success, 2 on configuration errors, 1 on runtime failures.
"""

import argparse
import itertools
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import pandas as pd

from config.hyperparameters import DATASETS
from config.settings import create_runtime_settings
from src.evaluation.harness import ALGORITHMS, ExperimentConfig, run_experiment
from src.evaluation.probes import PROBES, run_probes, write_probe_reports
from src.evaluation.records import write_outputs
from src.learning.update_processes import DivisionMode, UpdateProcess

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2

RHO_MODES = {
    "per-model": DivisionMode.PER_MODEL,
    "per-alg": DivisionMode.PER_ALGORITHM,
    "per_model": DivisionMode.PER_MODEL,
    "per_alg": DivisionMode.PER_ALGORITHM,
}
CSV_PREFIX = "csv:"


def parse_rho(value: str) -> Tuple[Optional[float], Optional[int]]:
    """'2m' -> (2.0, None) as a multiple of m; '4000' -> (None, 4000)."""
    text = value.strip().lower()
    try:
        if text.endswith("m"):
            return float(text[:-1] or 1), None
        return None, int(text)
    except ValueError:
        raise ValueError(f"rho must look like '2m' or an integer, got '{value}'") from None


def _split(value: str) -> List[str]:
    return [part.strip() for part in value.split(",") if part.strip()]


def _bool(value: str) -> bool:
    text = str(value).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"Expected a boolean, got '{value}'")


OPTION_PARSERS: Dict[str, Callable[[str], Any]] = {
    "dataset": str,
    "algos": str,
    "rho": str,
    "rho_mode": str,
    "update_process": str,
    "trials": int,
    "seed": int,
    "mu": float,
    "eta": float,
    "batch_size": int,
    "steps": int,
    "r": int,
    "delta": float,
    "intercept": _bool,
    "drift_times": str,
    "csv": str,
    "label_column": str,
    "categorical": str,
}


def make_config(
    dataset: str,
    algos: str = "driftsurf,aware,obl",
    rho: str = "2m",
    rho_mode: str = "per-model",
    update_process: str = "strsaga",
    trials: int = 5,
    seed: int = 0,
    mu: Optional[float] = None,
    eta: Optional[float] = None,
    batch_size: Optional[int] = None,
    steps: Optional[int] = None,
    r: int = 4,
    delta: float = 0.1,
    intercept: bool = True,
    drift_times: Optional[str] = None,
    csv: Optional[str] = None,
    label_column: str = "label",
    categorical: Optional[str] = None,
) -> ExperimentConfig:
    """
    Build and validate an ExperimentConfig from CLI-level options.

    A dataset of the form "csv:<path>" streams that CSV file.
    """
    if dataset.startswith(CSV_PREFIX):
        csv = dataset[len(CSV_PREFIX):]
        dataset = Path(csv).stem
    if rho_mode not in RHO_MODES:
        raise ValueError(f"rho_mode: expected one of {', '.join(RHO_MODES)}, got '{rho_mode}'")
    try:
        process = UpdateProcess(update_process)
    except ValueError:
        raise ValueError(f"update_process: expected strsaga or sgd, got '{update_process}'") from None
    if process == UpdateProcess.SINGLE_PASS_SGD:
        raise ValueError("update_process: expected strsaga or sgd")
    multiplier, absolute = parse_rho(rho)
    config = ExperimentConfig(
        dataset=dataset,
        algorithms=_split(algos),
        rho_multiplier=multiplier if multiplier is not None else 2.0,
        rho=absolute,
        division_mode=RHO_MODES[rho_mode],
        update_process=process,
        trials=trials,
        seed=seed,
        mu=mu,
        eta=eta,
        batch_size=batch_size,
        total_steps=steps,
        drift_times=tuple(int(t) for t in _split(drift_times)) if drift_times else None,
        r=r,
        delta=delta,
        intercept=intercept,
        csv_path=csv,
        label_column=label_column,
        categorical_columns=tuple(_split(categorical)) if categorical else (),
    )
    config.validate()
    return config


def parse_grid_file(path: str) -> Dict[str, List[Any]]:
    """
    Read a sweep grid: one `key = value1 | value2 | ...` per line.

    Blank lines and lines starting with '#' are ignored. Keys are the
    options of the run subcommand, with dashes or underscores.

    Raises:
        FileNotFoundError: If the grid file is missing
        ValueError: On unknown keys, malformed lines or unparsable values
    """
    grid_path = Path(path)
    if not grid_path.exists():
        raise FileNotFoundError(f"Grid file not found: {path}")
    grid: Dict[str, List[Any]] = {}
    for number, line in enumerate(grid_path.read_text(encoding="utf-8").splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{number}: expected 'key = value', got '{line}'")
        key, raw = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in OPTION_PARSERS:
            raise ValueError(f"{path}:{number}: unknown key '{key}'")
        try:
            grid[key] = [OPTION_PARSERS[key](v.strip()) for v in raw.split("|") if v.strip()]
        except ValueError as e:
            raise ValueError(f"{path}:{number}: {e}") from None
        if not grid[key]:
            raise ValueError(f"{path}:{number}: no values for '{key}'")
    if "dataset" not in grid and "csv" not in grid:
        raise ValueError(f"{path}: a sweep needs at least one dataset")
    return grid


def expand_grid(grid: Dict[str, List[Any]]) -> List[Dict[str, Any]]:
    keys = list(grid)
    return [dict(zip(keys, values)) for values in itertools.product(*(grid[k] for k in keys))]


def _slug(options: Dict[str, Any], varying: Sequence[str]) -> str:
    parts = [f"{k}-{options[k]}" for k in varying] or ["run"]
    return "_".join(str(p).replace("/", "-").replace(",", "+") for p in parts)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="run_benchmark.py",
        description="Streaming drift-adaptation benchmark",
    )
    parser.add_argument("--threads", type=int, default=None,
                        help="Trials run in parallel (default: DRIFTSURF_THREADS or 1)")
    parser.add_argument("--log-level", default=None, help="Logging level (default: DRIFTSURF_LOG_LEVEL)")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Run one experiment")
    run.add_argument("--dataset", default=None,
                     help=f"csv:<path> or one of: {', '.join(sorted(DATASETS))}")
    run.add_argument("--csv", default=None, help="Labeled CSV file to stream instead of a dataset")
    run.add_argument("--label-column", default="label")
    run.add_argument("--categorical", default=None, help="Comma-separated categorical columns")
    run.add_argument("--algos", default="driftsurf,aware,obl",
                     help=f"Comma-separated subset of: {', '.join(ALGORITHMS)}")
    run.add_argument("--rho", default="2m", help="Gradient budget per step, e.g. 2m, 4m or 4000")
    run.add_argument("--rho-mode", default="per-model", choices=sorted(RHO_MODES))
    run.add_argument("--update-process", default="strsaga", choices=["strsaga", "sgd"])
    run.add_argument("--trials", type=int, default=5)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--mu", type=float, default=None)
    run.add_argument("--eta", type=float, default=None)
    run.add_argument("--batch-size", type=int, default=None)
    run.add_argument("--steps", type=int, default=None)
    run.add_argument("--drift-times", default=None, help="Comma-separated drift times for Aware")
    run.add_argument("--r", type=int, default=4, help="DriftSurf reactive-phase length")
    run.add_argument("--delta", type=float, default=0.1, help="DriftSurf entry threshold")
    run.add_argument("--no-intercept", action="store_true")
    run.add_argument("--out", default=None, help="Output directory (default: DRIFTSURF_OUTPUT_DIR)")

    sweep = sub.add_parser("sweep", help="Run every combination of a grid file")
    sweep.add_argument("--grid", required=True, help="Grid file of 'key = v1 | v2' lines")
    sweep.add_argument("--out", default=None)

    probe = sub.add_parser("probe", help="Run the probe suite")
    probe.add_argument("--which", default=",".join(PROBES), help=f"Comma-separated subset of: {', '.join(PROBES)}")
    probe.add_argument("--trials", type=int, default=5)
    probe.add_argument("--seed", type=int, default=0)
    probe.add_argument("--out", default=None)
    return parser


def _run_command(args: argparse.Namespace, threads: int, default_out: str) -> int:
    if args.dataset is None and args.csv is None:
        raise ValueError("dataset: pass --dataset or --csv")
    config = make_config(
        dataset=args.dataset or Path(args.csv).stem,
        algos=args.algos,
        rho=args.rho,
        rho_mode=args.rho_mode,
        update_process=args.update_process,
        trials=args.trials,
        seed=args.seed,
        mu=args.mu,
        eta=args.eta,
        batch_size=args.batch_size,
        steps=args.steps,
        r=args.r,
        delta=args.delta,
        intercept=not args.no_intercept,
        drift_times=args.drift_times,
        csv=args.csv,
        label_column=args.label_column,
        categorical=args.categorical,
    )
    result = run_experiment(config, threads=threads)
    paths = write_outputs(result.records, result.transitions, args.out or default_out)
    print(result.summary.to_string(index=False))
    print(f"\nResults written to {paths['records'].parent}")
    return EXIT_OK


def _sweep_command(args: argparse.Namespace, threads: int, default_out: str) -> int:
    grid = parse_grid_file(args.grid)
    combinations = expand_grid(grid)
    varying = [k for k, values in grid.items() if len(values) > 1]
    configs = []
    for options in combinations:
        dataset = options.pop("dataset", None) or Path(options["csv"]).stem
        configs.append((options, make_config(dataset=dataset, **options)))

    out = Path(args.out or default_out)
    summaries = []
    for index, (options, config) in enumerate(configs, start=1):
        logger.info(f"Sweep {index}/{len(configs)}: {config.dataset} {options}")
        result = run_experiment(config, threads=threads)
        write_outputs(result.records, result.transitions, out / _slug({"dataset": config.dataset, **options}, ["dataset"] + [k for k in varying if k != "dataset"]))
        summary = result.summary
        for key in varying:
            if key != "dataset":
                summary[key] = options[key]
        summaries.append(summary)

    combined = pd.concat(summaries, ignore_index=True)
    out.mkdir(parents=True, exist_ok=True)
    combined.to_csv(out / "sweep_summary.csv", index=False)
    print(combined.to_string(index=False))
    return EXIT_OK


def _probe_command(args: argparse.Namespace, default_out: str) -> int:
    which = _split(args.which)
    reports = run_probes(seed=args.seed, trials=args.trials, which=which)
    csv_path, _ = write_probe_reports(reports, args.out or default_out)
    for report in reports:
        status = "PASS" if report.passed else "FAIL"
        print(f"{status:4}  {report.probe:16} {report.quantity:40} median={report.median:.4g}  ({report.reference})")
    print(f"\nProbe reports written to {csv_path.parent}")
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)

    try:
        settings = create_runtime_settings(threads=args.threads, log_level=args.log_level)
        if args.command == "run":
            return _run_command(args, settings.threads, settings.output_dir)
        if args.command == "sweep":
            return _sweep_command(args, settings.threads, settings.output_dir)
        return _probe_command(args, settings.output_dir)
    except (ValueError, FileNotFoundError) as e:
        logger.error(f"Configuration error: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as e:
        logger.error(f"Run failed: {type(e).__name__}: {e}")
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_RUNTIME
