"""
DriftSurf Benchmark Runner

Usage:
    python run_benchmark.py run --dataset sea0 --algos driftsurf,aware,obl --rho 2m --trials 5
    python run_benchmark.py run --dataset hyperplane-fast --rho-mode per_alg --out results/hyper
    python run_benchmark.py run --csv data/stream.csv --label-column y --mu 1e-3 --eta 0.1 --batch-size 100
    python run_benchmark.py sweep --grid grids/sea.grid --out results/sweep
    python run_benchmark.py probe --which recovery,false-positives --trials 5
"""

import sys

from src.evaluation.cli import main

if __name__ == '__main__':
    sys.exit(main())
