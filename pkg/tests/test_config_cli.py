"""Config parsing, the sweep harness, CSV schema, and the CLI surface."""

import csv
import os

import numpy as np
import pytest

from seedmatch import cli, harness
from seedmatch.config import (
    CSV_COLUMNS,
    ExperimentConfig,
    GridPoint,
    parse_config_text,
)
from seedmatch.errors import ConfigError

BASIC = """
# comment line
master_seed=7
trials=2
algorithm=alg2
n=100
p=0.1
s=0.9
alpha=0.3
alpha=0.6
epsilon=0.1
"""


def test_parse_and_grid_order():
    cfg = parse_config_text(BASIC)
    assert cfg.master_seed == 7 and cfg.trials == 2
    points = cfg.grid_points()
    assert [pt.alpha for pt in points] == [0.3, 0.6]
    assert points[0].index == 0 and points[1].index == 1


def test_density_from_exponent_pair():
    cfg = parse_config_text(
        "n=400\na=0.5\nb=2.0\ns=0.9\nalpha=0.5\nepsilon=0.1\n"
    )
    (pt,) = cfg.grid_points()
    assert pt.p == pytest.approx(2.0 * 400**0.5 / 400)


def test_parse_errors():
    with pytest.raises(ConfigError):
        parse_config_text("bogus line\n")
    with pytest.raises(ConfigError):
        parse_config_text("frobnicate=1\n")
    with pytest.raises(ConfigError):
        parse_config_text("n=abc\n")
    with pytest.raises(ConfigError):
        parse_config_text("trials=1\ntrials=2\n")


def test_validate_rejects_incomplete_grids():
    with pytest.raises(ConfigError):
        parse_config_text("n=10\ns=0.9\nalpha=0.5\nepsilon=0.1\n").validate()
    with pytest.raises(ConfigError):
        parse_config_text(
            "n=10\np=0.1\na=0.5\ns=0.9\nalpha=0.5\nepsilon=0.1\n"
        ).validate()
    cfg = parse_config_text(BASIC)
    cfg.algorithm = "nope"
    with pytest.raises(ConfigError):
        cfg.validate()


def test_trial_seed_mixing():
    a = harness.trial_seed(1, 0, 0)
    assert a == harness.trial_seed(1, 0, 0)
    assert len({harness.trial_seed(1, i, j) for i in range(8) for j in range(8)}) == 64


def test_run_trial_row_schema():
    point = GridPoint(0, 100, 0.1, 0.9, 0.5, 0.1)
    row = harness.run_trial(point, 0, 7, "alg2")
    assert set(CSV_COLUMNS) <= set(row)
    assert row["algorithm"] == "alg2"
    assert row["error"] == ""
    assert 0.0 <= row["fraction_correct"] <= 1.0
    assert row["d"] == 3  # np = 10 = sqrt(100)


def test_run_trial_records_derivation_error():
    point = GridPoint(0, 50, 0.0001, 0.5, 0.5, 0.1)
    row = harness.run_trial(point, 0, 7, "alg1")
    assert row["error"].startswith("DerivationError")


def test_sweep_and_csv_roundtrip(tmp_path):
    cfg = parse_config_text(BASIC)
    rows = harness.run_sweep(cfg, jobs=1)
    assert len(rows) == 4  # 2 alphas x 2 trials
    out = tmp_path / "sweep.csv"
    harness.write_csv(rows, out)
    with open(out, newline="") as f:
        parsed = list(csv.DictReader(f))
    assert len(parsed) == 4
    assert list(parsed[0]) == CSV_COLUMNS


def test_generate_and_match_instance_dir(tmp_path):
    cfg = parse_config_text(
        "master_seed=3\ntrials=1\nn=40\np=0.2\ns=0.9\nalpha=0.5\nepsilon=0.1\n"
    )
    paths = harness.generate_instances(cfg, tmp_path / "insts")
    assert len(paths) == 1
    row = harness.match_instance_dir(paths[0], "alg2")
    assert row["error"] == ""
    assert row["n"] == 40


def test_cli_end_to_end(tmp_path, capsys):
    config = tmp_path / "exp.cfg"
    config.write_text(
        "master_seed=5\ntrials=1\nalgorithm=alg2\n"
        "n=60\np=0.15\ns=0.9\nalpha=0.5\nepsilon=0.1\n"
    )
    out_dir = tmp_path / "insts"
    assert cli.main(["generate", "--config", str(config), "--out", str(out_dir)]) == 0
    (inst_dir,) = sorted(os.listdir(out_dir))
    csv_path = tmp_path / "one.csv"
    rc = cli.main(
        ["match", str(out_dir / inst_dir), "--algo", "alg2", "--out", str(csv_path)]
    )
    assert rc == 0
    assert csv_path.exists()
    sweep_csv = tmp_path / "sweep.csv"
    rc = cli.main(
        ["sweep", "--config", str(config), "--out", str(sweep_csv), "--jobs", "1"]
    )
    assert rc == 0
    rc = cli.main(["report", str(sweep_csv), "--out", str(tmp_path / "figs")])
    assert rc == 0
    figs = os.listdir(tmp_path / "figs")
    assert any(name.endswith(".png") for name in figs)
    capsys.readouterr()


def test_cli_error_paths(tmp_path, capsys):
    assert cli.main(["sweep", "--config", str(tmp_path / "nope.cfg"),
                     "--out", str(tmp_path / "x.csv")]) == 1
    bad = tmp_path / "bad.cfg"
    bad.write_text("nonsense\n")
    assert cli.main(["sweep", "--config", str(bad),
                     "--out", str(tmp_path / "x.csv")]) == 1
    capsys.readouterr()


def test_cli_seedless_budget_exit_code(tmp_path, capsys):
    config = tmp_path / "exp.cfg"
    config.write_text(
        "master_seed=5\ntrials=1\nn=30\np=0.3\ns=1.0\nalpha=0.9\nepsilon=0.1\n"
    )
    out_dir = tmp_path / "insts"
    cli.main(["generate", "--config", str(config), "--out", str(out_dir)])
    (inst_dir,) = sorted(os.listdir(out_dir))
    rc = cli.main(["seedless", str(out_dir / inst_dir), "--budget", "10"])
    assert rc == 3
    capsys.readouterr()


def test_cli_verify_quick(capsys):
    assert cli.main(["verify", "--quick"]) == 0
    out = capsys.readouterr().out
    assert "[PASS]" in out


def test_cli_match_param_override(tmp_path, capsys):
    config = tmp_path / "exp.cfg"
    config.write_text(
        "master_seed=9\ntrials=1\nn=60\np=0.15\ns=0.9\nalpha=0.5\nepsilon=0.1\n"
    )
    out_dir = tmp_path / "insts"
    cli.main(["generate", "--config", str(config), "--out", str(out_dir)])
    (inst_dir,) = sorted(os.listdir(out_dir))
    rc = cli.main(
        ["match", str(out_dir / inst_dir), "--algo", "alg2", "--set", "d=3"]
    )
    assert rc == 0
    capsys.readouterr()


def test_fmt_rules():
    assert harness._fmt(True) == "1"
    assert harness._fmt(False) == "0"
    assert harness._fmt("") == ""
    assert harness._fmt(None) == ""
    assert harness._fmt(0.25) == "0.25"
    assert harness._fmt(3) == "3"
