"""
Runtime Settings for the DriftSurf Benchmark

Environment-driven settings shared by the CLI and the results viewer.
Values are read from the process environment after loading a local .env file.

Environment variables:
    DRIFTSURF_THREADS     maximum number of trials run in parallel (default 1)
    DRIFTSURF_OUTPUT_DIR  default output directory (default ./results)
    DRIFTSURF_LOG_LEVEL   logging level name (default INFO)
"""

import os
import logging
from dataclasses import dataclass
from typing import Optional

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RuntimeSettings:
    """Process-level settings for experiment runs."""
    threads: int = 1
    output_dir: str = "./results"
    log_level: str = "INFO"


def create_runtime_settings(
    threads: Optional[int] = None,
    output_dir: Optional[str] = None,
    log_level: Optional[str] = None
) -> RuntimeSettings:
    """
    Factory function to create runtime settings from environment.

    Args:
        threads: Override trial parallelism cap
        output_dir: Override output directory
        log_level: Override logging level

    Returns:
        Configured RuntimeSettings instance

    Raises:
        ValueError: If DRIFTSURF_THREADS is not a positive integer
    """
    from dotenv import load_dotenv
    load_dotenv()

    if threads is None:
        raw = os.environ.get('DRIFTSURF_THREADS', '1')
        try:
            threads = int(raw)
        except ValueError:
            raise ValueError(f"DRIFTSURF_THREADS must be an integer, got '{raw}'") from None
    if threads < 1:
        raise ValueError(f"DRIFTSURF_THREADS must be >= 1, got {threads}")

    output_dir = output_dir or os.environ.get('DRIFTSURF_OUTPUT_DIR', './results')
    log_level = (log_level or os.environ.get('DRIFTSURF_LOG_LEVEL', 'INFO')).upper()

    logging.getLogger().setLevel(log_level)
    logger.info(f"Runtime settings: threads={threads}, output_dir={output_dir}")

    return RuntimeSettings(threads=threads, output_dir=output_dir, log_level=log_level)
