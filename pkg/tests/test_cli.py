"""Command line behavior: exit codes, outputs, overrides, messages."""

import json
import os

import numpy as np
import pytest

from maflow import cli
from maflow import grid as gridmod


@pytest.fixture(autouse=True)
def _isolated_output(monkeypatch, tmp_path):
    monkeypatch.delenv("MAFLOW_OUTPUT_DIR", raising=False)
    monkeypatch.chdir(tmp_path)


def _write_cfg(tmp_path, name="run.json", **sections):
    path = tmp_path / name
    path.write_text(json.dumps(sections))
    return str(path)


def _flat_cfg(tmp_path, out, **extra):
    base = dict(
        grid={"n": 1, "m": 16},
        solver={"T": 0.25},
        initial={"base": 0.0,
                 "terms": [{"type": "cos", "axis": 0, "amplitude": 0.02}]},
        output={"dir": out},
    )
    base.update(extra)
    return _write_cfg(tmp_path, **base)


def test_no_command_prints_usage():
    assert cli.main([]) == 1


def test_missing_config_argument_is_usage_error(capsys):
    assert cli.main(["solve"]) == 1
    assert "error:" in capsys.readouterr().err


def test_solve_writes_trajectory(tmp_path, capsys):
    out = str(tmp_path / "out")
    cfg = _flat_cfg(tmp_path, out)
    assert cli.main(["solve", cfg]) == 0
    msg = capsys.readouterr().out
    assert "steps " in msg and "wrote " in msg
    assert os.path.isdir(out)
    assert any(f.endswith(".maf") for f in os.listdir(out))


def test_env_dir_overrides_config(tmp_path, monkeypatch):
    out = str(tmp_path / "from_config")
    env = str(tmp_path / "from_env")
    cfg = _flat_cfg(tmp_path, out)
    monkeypatch.setenv("MAFLOW_OUTPUT_DIR", env)
    assert cli.main(["solve", cfg]) == 0
    assert os.path.isdir(env)
    assert not os.path.exists(out)


def test_set_override_changes_run(tmp_path, capsys):
    out = str(tmp_path / "out")
    cfg = _flat_cfg(tmp_path, out)
    assert cli.main(["solve", cfg, "--set", "solver.T=0.05"]) == 0
    short = capsys.readouterr().out
    assert cli.main(["solve", cfg]) == 0
    long = capsys.readouterr().out
    steps_short = int(short.splitlines()[0].split()[1])
    steps_long = int(long.splitlines()[0].split()[1])
    assert steps_short < steps_long


def test_unknown_key_rejected_by_name(tmp_path, capsys):
    cfg = _flat_cfg(tmp_path, str(tmp_path / "out"))
    assert cli.main(["solve", cfg, "--set", "solver.bogus=1"]) == 1
    assert "unknown config key: solver.bogus" in capsys.readouterr().err
    assert cli.main(["solve", cfg, "--set", "nonsense.x=1"]) == 1
    assert "unknown config key: nonsense" in capsys.readouterr().err


def test_malformed_override(tmp_path, capsys):
    cfg = _flat_cfg(tmp_path, str(tmp_path / "out"))
    assert cli.main(["solve", cfg, "--set", "solver.T"]) == 1
    assert "key=value" in capsys.readouterr().err


def test_invalid_json_reported(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{")
    assert cli.main(["solve", str(path)]) == 1
    assert "not valid JSON" in capsys.readouterr().err


def test_horizon_past_degeneration_names_the_limit(tmp_path, capsys):
    cfg = _write_cfg(
        tmp_path,
        grid={"n": 1, "m": 16},
        family={"rule": "nkrf", "A": [[[2.0, 0.0]]], "B": [[[-1.0, 0.0]]]},
        solver={"T": 2.0},
    )
    assert cli.main(["solve", cfg]) == 1
    assert "1.09861229" in capsys.readouterr().err


def test_step_budget_exhaustion_exits_two(tmp_path, capsys):
    cfg = _flat_cfg(tmp_path, str(tmp_path / "out"),
                    solver={"T": 0.25, "max_steps": 1})
    assert cli.main(["solve", cfg]) == 2
    assert "error:" in capsys.readouterr().err


def test_static_writes_field(tmp_path, capsys):
    out = str(tmp_path / "out")
    cfg = _write_cfg(tmp_path, grid={"n": 1, "m": 16},
                     output={"dir": out})
    assert cli.main(["static", cfg]) == 0
    msg = capsys.readouterr().out
    assert "residual" in msg
    field = gridmod.load_field(os.path.join(out, "static.maf"))
    assert np.all(field.values == 0.0)


def test_verify_single_field(tmp_path, capsys):
    grid = gridmod.TorusGrid(1, 16)
    fpath = str(tmp_path / "zero.maf")
    gridmod.save_field(gridmod.ScalarField(grid, np.zeros(grid.shape)),
                       fpath)
    cfg = _write_cfg(tmp_path, grid={"n": 1, "m": 16},
                     forcing={"alpha": 0.0})
    assert cli.main(["verify", cfg, fpath]) == 0
    msg = capsys.readouterr().out
    assert "subsolution:" in msg and "supersolution:" in msg
    assert "FAIL" not in msg
    # drifting up fast is not a subsolution
    assert cli.main(["verify", cfg, fpath, "--rate", "1.0",
                     "--kind", "sub"]) == 2
    assert "FAIL" in capsys.readouterr().out


def test_verify_trajectory_of_fields(tmp_path, capsys):
    grid = gridmod.TorusGrid(1, 16)
    paths = []
    for k in range(2):
        p = str(tmp_path / ("snap%d.maf" % k))
        gridmod.save_field(gridmod.ScalarField(grid, np.zeros(grid.shape)),
                           p)
        paths.append(p)
    cfg = _write_cfg(tmp_path, grid={"n": 1, "m": 16},
                     forcing={"alpha": 0.0},
                     solver={"T": 0.5, "snapshot_times": [0.0, 0.5]})
    assert cli.main(["verify", cfg] + paths) == 0
    assert "PASS" in capsys.readouterr().out


def test_verify_grid_mismatch(tmp_path, capsys):
    grid = gridmod.TorusGrid(1, 16)
    fpath = str(tmp_path / "zero.maf")
    gridmod.save_field(gridmod.ScalarField(grid, np.zeros(grid.shape)),
                       fpath)
    cfg = _write_cfg(tmp_path, grid={"n": 1, "m": 32})
    assert cli.main(["verify", cfg, fpath]) == 1
    assert "does not match" in capsys.readouterr().err


def test_scenario_command_runs_and_writes(tmp_path, capsys):
    out = str(tmp_path / "results")
    cfg = _write_cfg(tmp_path,
                     scenario={"name": "comparison_suite",
                               "resolution": 16, "T": 0.125},
                     output={"dir": out})
    assert cli.main(["scenario", cfg, "--threads", "1"]) == 0
    msg = capsys.readouterr().out
    assert "scenario comparison_suite: PASS" in msg
    assert os.path.exists(os.path.join(out, "comparison_suite",
                                       "manifest.csv"))


def test_scenario_requires_name(tmp_path, capsys):
    cfg = _write_cfg(tmp_path, scenario={"resolution": 16})
    assert cli.main(["scenario", cfg]) == 1
    assert "scenario.name is required" in capsys.readouterr().err


def test_scenario_flips_refused(tmp_path, capsys):
    cfg = _write_cfg(tmp_path, scenario={"name": "flips"})
    assert cli.main(["scenario", cfg]) == 1
    assert "discontinuous density" in capsys.readouterr().err


def test_failing_scenario_exits_two(tmp_path, capsys):
    # too coarse for the decay-window fit: the run must report the
    # failure honestly and signal it in the exit status
    out = str(tmp_path / "results")
    cfg = _write_cfg(tmp_path,
                     scenario={"name": "canonical_model",
                               "resolution": 32, "T": 3.0},
                     output={"dir": out})
    assert cli.main(["scenario", cfg, "--threads", "1"]) == 2
    assert "FAIL" in capsys.readouterr().out


def test_cohomology_reports_degeneration_time(tmp_path, capsys):
    cfg = _write_cfg(
        tmp_path,
        grid={"n": 1, "m": 16},
        family={"rule": "nkrf", "A": [[[2.0, 0.0]]], "B": [[[-1.0, 0.0]]]})
    assert cli.main(["cohomology", cfg]) == 0
    msg = capsys.readouterr().out
    assert "t_max: 1.09861229" in msg
    evals = [float(line.split("=")[1]) for line in msg.splitlines()
             if line.strip().startswith("E(")]
    assert len(evals) == 3
    assert evals[0] >= evals[1] >= evals[2]
    assert "very regular:" in msg


def test_cohomology_constant_family(tmp_path, capsys):
    cfg = _write_cfg(tmp_path, grid={"n": 1, "m": 16})
    assert cli.main(["cohomology", cfg]) == 0
    msg = capsys.readouterr().out
    assert "t_max: undefined" in msg
    assert "very regular: PASS" in msg
