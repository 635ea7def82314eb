"""
Test Suite for Command-Line Interface

Run with: pytest tests/test_cli.py -v
"""

import pytest
from pathlib import Path
import sys

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.evaluation.cli import (
    EXIT_CONFIG,
    EXIT_OK,
    expand_grid,
    main,
    make_config,
    parse_grid_file,
    parse_rho,
)
from src.learning.update_processes import DivisionMode, UpdateProcess


class TestParsing:
    """Test cases for option parsing."""

    def test_parse_rho(self):
        assert parse_rho("2m") == (2.0, None)
        assert parse_rho("4M") == (4.0, None)
        assert parse_rho("4000") == (None, 4000)

    def test_parse_rho_invalid(self):
        with pytest.raises(ValueError):
            parse_rho("lots")

    def test_make_config(self):
        config = make_config("sea10", algos="driftsurf, obl", rho="4m", rho_mode="per-alg",
                             update_process="sgd", steps=20)
        assert config.algorithms == ["driftsurf", "obl"]
        assert config.rho_multiplier == 4.0
        assert config.division_mode == DivisionMode.PER_ALGORITHM
        assert config.update_process == UpdateProcess.SGD
        assert config.total_steps == 20

    def test_make_config_csv(self):
        config = make_config("csv:data/prices.csv", mu=1e-3, eta=0.1, batch_size=10,
                             drift_times="5,9")
        assert config.csv_path == "data/prices.csv"
        assert config.dataset == "prices"
        assert config.drift_times == (5, 9)

    def test_make_config_rejects_single_pass(self):
        with pytest.raises(ValueError, match="update_process"):
            make_config("sea0", update_process="single-pass-sgd")

    def test_make_config_bad_mode(self):
        with pytest.raises(ValueError, match="rho_mode"):
            make_config("sea0", rho_mode="shared")


class TestGridFile:
    """Test cases for sweep grids."""

    def test_parse_and_expand(self, tmp_path):
        grid_path = tmp_path / "grid.txt"
        grid_path.write_text("# sweep\ndataset = sea0 | sea10\nrho = 2m | 4m\ntrials = 3\n")
        grid = parse_grid_file(str(grid_path))
        assert grid == {"dataset": ["sea0", "sea10"], "rho": ["2m", "4m"], "trials": [3]}
        combos = expand_grid(grid)
        assert len(combos) == 4
        assert combos[0] == {"dataset": "sea0", "rho": "2m", "trials": 3}

    def test_dashed_keys(self, tmp_path):
        grid_path = tmp_path / "grid.txt"
        grid_path.write_text("dataset = sea0\nrho-mode = per-model | per-alg\n")
        assert parse_grid_file(str(grid_path))["rho_mode"] == ["per-model", "per-alg"]

    def test_unknown_key(self, tmp_path):
        grid_path = tmp_path / "grid.txt"
        grid_path.write_text("dataset = sea0\ncolour = red\n")
        with pytest.raises(ValueError, match="colour"):
            parse_grid_file(str(grid_path))

    def test_missing_dataset(self, tmp_path):
        grid_path = tmp_path / "grid.txt"
        grid_path.write_text("trials = 2\n")
        with pytest.raises(ValueError, match="dataset"):
            parse_grid_file(str(grid_path))


class TestMain:
    """Test cases for exit codes and outputs."""

    def test_bad_config_exit_code(self, tmp_path):
        code = main(["run", "--dataset", "sea0", "--algos", "bogus", "--out", str(tmp_path)])
        assert code == EXIT_CONFIG

    def test_missing_csv_exit_code(self, tmp_path):
        code = main(["run", "--csv", str(tmp_path / "absent.csv"), "--mu", "0.01", "--eta", "0.1",
                     "--batch-size", "5", "--out", str(tmp_path)])
        assert code == EXIT_CONFIG

    def test_run_writes_outputs(self, tmp_path):
        code = main(["--threads", "1", "run", "--dataset", "sea0", "--algos", "obl,aware",
                     "--trials", "1", "--batch-size", "20", "--steps", "10", "--out", str(tmp_path)])
        assert code == EXIT_OK
        for name in ("records.csv", "summary.csv", "timeseries.csv", "transitions.log"):
            assert (tmp_path / name).exists()

    def test_sweep_writes_summary(self, tmp_path):
        grid_path = tmp_path / "grid.txt"
        grid_path.write_text("dataset = sea0\nalgos = obl\ntrials = 1\nbatch-size = 20\n"
                             "steps = 5\nrho = 1m | 2m\n")
        code = main(["sweep", "--grid", str(grid_path), "--out", str(tmp_path / "sweep")])
        assert code == EXIT_OK
        assert (tmp_path / "sweep" / "sweep_summary.csv").exists()
