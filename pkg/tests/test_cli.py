"""Tests for swarmpath CLI commands."""

import dataclasses
import json
from unittest.mock import patch

import pytest
from typer.testing import CliRunner

from swarmpath.cli import EXIT_CONFIG, EXIT_DIVERGED, EXIT_NO_PATH, _parse_betas, app
from swarmpath.planning import pso
from swarmpath.sim import SimulationDivergedError

runner = CliRunner()

TINY_CONFIG = """
[spline]
sample_count_N = 40
path_time_T = 10.0

[pso]
iter_max = 5
pop_max = 4
n_control_points = 2
seed = 1

[controller]
control_dt = 1.0

[sim]
settle_time = 1.0

[montecarlo]
runs = 2
"""

OPEN_FIELD = """
[workspace]
start = [0.5, 0.5]
target = [1.5, 1.5]
obstacles = []
"""


# ---------------------------------------------------------------------------
# Helper fixtures
# ---------------------------------------------------------------------------


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "tiny.toml"
    path.write_text(TINY_CONFIG + OPEN_FIELD, encoding="utf-8")
    return path


@pytest.fixture
def planned(tmp_path, config_file):
    """Output directory of a successful plan run."""
    directory = tmp_path / "plan"
    result = runner.invoke(app, ["plan", "-c", str(config_file), "-o", str(directory)])
    assert result.exit_code == 0, result.output
    return directory


# ---------------------------------------------------------------------------
# Unit tests – helper functions
# ---------------------------------------------------------------------------


class TestParseBetas:
    def test_values(self):
        assert _parse_betas("0, 50,150") == [0.0, 50.0, 150.0]

    def test_blank_parts_ignored(self):
        assert _parse_betas(" ,") == []

    def test_non_numeric(self):
        with pytest.raises(ValueError):
            _parse_betas("10,abc")


# ---------------------------------------------------------------------------
# validate-config
# ---------------------------------------------------------------------------


class TestValidateConfig:
    def test_valid(self, config_file):
        result = runner.invoke(app, ["validate-config", str(config_file)])
        assert result.exit_code == 0
        assert "Config valid" in result.output

    def test_shipped_workspace(self, tmp_path):
        path = tmp_path / "c.toml"
        path.write_text('[workspace]\nname = "C"\n', encoding="utf-8")
        result = runner.invoke(app, ["validate-config", str(path)])
        assert result.exit_code == 0
        assert "Workspace C" in result.output

    def test_no_workspace_section(self, tmp_path):
        path = tmp_path / "c.toml"
        path.write_text("[pso]\nseed = 2\n", encoding="utf-8")
        result = runner.invoke(app, ["validate-config", str(path)])
        assert result.exit_code == 0
        assert "random workspaces" in result.output

    def test_unknown_key(self, tmp_path):
        path = tmp_path / "c.toml"
        path.write_text("[pso]\nparticles = 3\n", encoding="utf-8")
        result = runner.invoke(app, ["validate-config", str(path)])
        assert result.exit_code == EXIT_CONFIG
        assert "Config error" in result.output

    def test_missing_file(self, tmp_path):
        result = runner.invoke(app, ["validate-config", str(tmp_path / "absent.toml")])
        assert result.exit_code == EXIT_CONFIG

    def test_bad_workspace(self, tmp_path):
        path = tmp_path / "c.toml"
        path.write_text('[workspace]\nname = "Z"\n', encoding="utf-8")
        result = runner.invoke(app, ["validate-config", str(path)])
        assert result.exit_code == EXIT_CONFIG
        assert "Workspace error" in result.output


# ---------------------------------------------------------------------------
# plan
# ---------------------------------------------------------------------------


class TestPlanCommand:
    def test_outputs(self, planned):
        names = {p.name for p in planned.iterdir()}
        assert {
            "path.csv",
            "history.csv",
            "plan.json",
            "workspace.json",
            "plan.svg",
            "convergence.svg",
            "manifest.json",
        } <= names

    def test_manifest(self, planned):
        manifest = json.loads((planned / "manifest.json").read_text(encoding="utf-8"))
        assert manifest["command"] == "plan"
        assert manifest["seeds"]["pso"] == 1
        assert "path.csv" in manifest["outputs"]
        assert manifest["finished_at"] is not None

    def test_seed_flag(self, tmp_path, config_file):
        directory = tmp_path / "seeded"
        args = ["plan", "-c", str(config_file), "-o", str(directory), "--seed", "42"]
        assert runner.invoke(app, args).exit_code == 0
        summary = json.loads((directory / "plan.json").read_text(encoding="utf-8"))
        assert summary["seed"] == 42

    def test_same_seed_same_path(self, tmp_path, config_file, planned):
        again = tmp_path / "again"
        runner.invoke(app, ["plan", "-c", str(config_file), "-o", str(again)])
        first = (planned / "path.csv").read_text(encoding="utf-8")
        assert (again / "path.csv").read_text(encoding="utf-8") == first

    def test_no_collision_free_path(self, tmp_path, config_file):
        real_plan = pso.plan

        def failing_plan(*args, **kwargs):
            return dataclasses.replace(real_plan(*args, **kwargs), success=False)

        directory = tmp_path / "fail"
        with patch("swarmpath.planning.pso.plan", side_effect=failing_plan):
            result = runner.invoke(app, ["plan", "-c", str(config_file), "-o", str(directory)])
        assert result.exit_code == EXIT_NO_PATH
        assert (directory / "path.csv").exists()

    def test_missing_config(self, tmp_path):
        result = runner.invoke(app, ["plan", "-c", str(tmp_path / "absent.toml")])
        assert result.exit_code == EXIT_CONFIG

    def test_unreadable_workspace_file(self, tmp_path, config_file):
        args = ["plan", "-c", str(config_file), "-w", str(tmp_path / "absent.json")]
        result = runner.invoke(app, args + ["-o", str(tmp_path / "out")])
        assert result.exit_code == EXIT_CONFIG
        assert "Planning failed" in result.output

    def test_unexpected_error(self, tmp_path, config_file):
        directory = tmp_path / "plan"
        with patch("swarmpath.planning.pso.plan", side_effect=RuntimeError("swarm exploded")):
            result = runner.invoke(app, ["plan", "-c", str(config_file), "-o", str(directory)])
        assert result.exit_code == EXIT_CONFIG
        assert "Planning failed: swarm exploded" in result.output
        assert not (directory / "manifest.json").exists()


# ---------------------------------------------------------------------------
# track
# ---------------------------------------------------------------------------


class TestTrackCommand:
    def test_outputs(self, tmp_path, config_file, planned):
        directory = tmp_path / "track"
        args = ["track", str(planned / "path.csv"), "-c", str(config_file), "-o", str(directory)]
        result = runner.invoke(app, args)
        assert result.exit_code == 0, result.output
        names = {p.name for p in directory.iterdir()}
        assert {"trace.csv", "duty.csv", "track.json", "track.svg", "duty.svg"} <= names
        manifest = json.loads((directory / "manifest.json").read_text(encoding="utf-8"))
        assert manifest["arguments"]["path_file"].endswith("path.csv")
        assert "path_file" not in manifest["config"]

    def test_sibling_workspace_used(self, tmp_path, planned):
        config = tmp_path / "no_ws.toml"
        config.write_text(TINY_CONFIG, encoding="utf-8")
        directory = tmp_path / "track"
        args = ["track", str(planned / "path.csv"), "-c", str(config), "-o", str(directory)]
        assert runner.invoke(app, args).exit_code == 0

    def test_offset_start(self, tmp_path, config_file, planned):
        directory = tmp_path / "track"
        args = [
            "track",
            str(planned / "path.csv"),
            "-c",
            str(config_file),
            "-o",
            str(directory),
            "--offset-x=-0.1",
        ]
        assert runner.invoke(app, args).exit_code == 0
        manifest = json.loads((directory / "manifest.json").read_text(encoding="utf-8"))
        assert manifest["config"]["sim"]["start_offset"] == [-0.1, 0.0]

    def test_missing_path_file(self, tmp_path, config_file):
        args = ["track", str(tmp_path / "absent.csv"), "-c", str(config_file)]
        result = runner.invoke(app, args)
        assert result.exit_code == EXIT_CONFIG
        assert "Input error" in result.output

    def test_no_workspace_anywhere(self, tmp_path, planned):
        lonely = tmp_path / "lonely"
        lonely.mkdir()
        (lonely / "path.csv").write_text(
            (planned / "path.csv").read_text(encoding="utf-8"), encoding="utf-8"
        )
        config = tmp_path / "no_ws.toml"
        config.write_text(TINY_CONFIG, encoding="utf-8")
        result = runner.invoke(app, ["track", str(lonely / "path.csv"), "-c", str(config)])
        assert result.exit_code == EXIT_CONFIG

    def test_divergence(self, tmp_path, config_file, planned):
        args = ["track", str(planned / "path.csv"), "-c", str(config_file)]
        with patch(
            "swarmpath.sim.closed_loop.closed_loop_sim",
            side_effect=SimulationDivergedError("state became non-finite at t=1.000s"),
        ):
            result = runner.invoke(app, args + ["-o", str(tmp_path / "track")])
        assert result.exit_code == EXIT_DIVERGED
        assert "Simulation failed" in result.output

    def test_unexpected_error(self, tmp_path, config_file, planned):
        args = ["track", str(planned / "path.csv"), "-c", str(config_file)]
        with patch(
            "swarmpath.sim.closed_loop.closed_loop_sim", side_effect=RuntimeError("bad state")
        ):
            result = runner.invoke(app, args + ["-o", str(tmp_path / "track")])
        assert result.exit_code == EXIT_CONFIG
        assert "Simulation failed: bad state" in result.output


# ---------------------------------------------------------------------------
# montecarlo and sweep
# ---------------------------------------------------------------------------


class TestMontecarloCommand:
    def test_outputs(self, tmp_path, config_file):
        directory = tmp_path / "mc"
        random_config = tmp_path / "random.toml"
        random_config.write_text(TINY_CONFIG, encoding="utf-8")
        result = runner.invoke(app, ["montecarlo", "-c", str(random_config), "-o", str(directory)])
        assert result.exit_code == 0, result.output
        report = json.loads((directory / "report.json").read_text(encoding="utf-8"))
        assert report["runs"] == 2
        names = {p.name for p in directory.iterdir()}
        assert {"runs.csv", "report.deterministic.json", "summary.svg", "manifest.json"} <= names

    def test_runs_flag(self, tmp_path, config_file):
        directory = tmp_path / "mc"
        args = ["montecarlo", "-c", str(config_file), "-o", str(directory), "-n", "1"]
        assert runner.invoke(app, args).exit_code == 0
        report = json.loads((directory / "report.json").read_text(encoding="utf-8"))
        assert report["runs"] == 1

    def test_fixed_mode_without_workspace(self, tmp_path):
        config = tmp_path / "fixed.toml"
        config.write_text(TINY_CONFIG.replace("runs = 2", 'runs = 2\nmode = "fixed"'))
        result = runner.invoke(app, ["montecarlo", "-c", str(config), "-o", str(tmp_path / "mc")])
        assert result.exit_code == EXIT_CONFIG

    def test_invalid_runs(self, tmp_path, config_file):
        result = runner.invoke(app, ["montecarlo", "-c", str(config_file), "-n", "0"])
        assert result.exit_code == EXIT_CONFIG

    def test_deterministic_report_repeats(self, tmp_path, config_file):
        texts = []
        for name in ("first", "second"):
            directory = tmp_path / name
            args = ["montecarlo", "-c", str(config_file), "-o", str(directory), "--seed", "5"]
            assert runner.invoke(app, args).exit_code == 0
            texts.append((directory / "report.deterministic.json").read_bytes())
        assert texts[0] == texts[1]
        report = json.loads(texts[0])
        assert "avg_cpu_time" not in report
        assert all("wall_time" not in record for record in report["records"])

    def test_unexpected_error(self, tmp_path, config_file):
        args = ["montecarlo", "-c", str(config_file), "-o", str(tmp_path / "mc")]
        with patch("swarmpath.sim.montecarlo.monte_carlo", side_effect=RuntimeError("pool died")):
            result = runner.invoke(app, args)
        assert result.exit_code == EXIT_CONFIG
        assert "Campaign failed: pool died" in result.output


class TestSweepCommand:
    def test_outputs(self, tmp_path, config_file):
        directory = tmp_path / "sweep"
        args = ["sweep", "-c", str(config_file), "-o", str(directory), "--betas", "0,150"]
        result = runner.invoke(app, args)
        assert result.exit_code == 0, result.output
        entries = json.loads((directory / "sweep.json").read_text(encoding="utf-8"))
        assert [entry["beta"] for entry in entries] == [0.0, 150.0]
        names = {p.name for p in directory.iterdir()}
        assert {"sweep.csv", "sweep_success.svg", "sweep_length.svg"} <= names

    @pytest.mark.parametrize("betas", ["abc", " , ", "10,-5"])
    def test_invalid_betas(self, tmp_path, config_file, betas):
        args = ["sweep", "-c", str(config_file), "-o", str(tmp_path / "s"), "--betas", betas]
        assert runner.invoke(app, args).exit_code == EXIT_CONFIG

    def test_unexpected_error(self, tmp_path, config_file):
        args = ["sweep", "-c", str(config_file), "-o", str(tmp_path / "s"), "--betas", "0"]
        with patch("swarmpath.sim.montecarlo.beta_sweep", side_effect=RuntimeError("pool died")):
            result = runner.invoke(app, args)
        assert result.exit_code == EXIT_CONFIG
        assert "Sweep failed: pool died" in result.output


# ---------------------------------------------------------------------------
# manifest replay
# ---------------------------------------------------------------------------


def _manifest_of(directory):
    return json.loads((directory / "manifest.json").read_text(encoding="utf-8"))


class TestManifestReplay:
    def test_plan(self, tmp_path, planned):
        again = tmp_path / "again"
        args = ["plan", "-c", str(planned / "manifest.json"), "-o", str(again)]
        result = runner.invoke(app, args)
        assert result.exit_code == 0, result.output
        first = (planned / "path.csv").read_text(encoding="utf-8")
        assert (again / "path.csv").read_text(encoding="utf-8") == first
        assert _manifest_of(again)["arguments"] == {}

    def test_track(self, tmp_path, config_file, planned):
        path_file = str(planned / "path.csv")
        first = tmp_path / "track"
        args = ["track", path_file, "-c", str(config_file), "-o", str(first), "--control-dt", "2"]
        assert runner.invoke(app, args).exit_code == 0
        again = tmp_path / "again"
        args = ["track", path_file, "-c", str(first / "manifest.json"), "-o", str(again)]
        result = runner.invoke(app, args)
        assert result.exit_code == 0, result.output
        manifest = _manifest_of(again)
        assert manifest["config"]["controller"]["control_dt"] == 2.0
        assert manifest["arguments"] == _manifest_of(first)["arguments"]

    def test_montecarlo(self, tmp_path, config_file):
        first = tmp_path / "mc"
        args = ["montecarlo", "-c", str(config_file), "-o", str(first)]
        assert runner.invoke(app, args).exit_code == 0
        again = tmp_path / "again"
        args = ["montecarlo", "-c", str(first / "manifest.json"), "-o", str(again)]
        result = runner.invoke(app, args)
        assert result.exit_code == 0, result.output
        name = "report.deterministic.json"
        assert (again / name).read_bytes() == (first / name).read_bytes()

    def test_sweep(self, tmp_path, config_file):
        first = tmp_path / "sweep"
        args = ["sweep", "-c", str(config_file), "-o", str(first), "--betas", "0,150"]
        assert runner.invoke(app, args).exit_code == 0
        manifest = _manifest_of(first)
        assert manifest["arguments"] == {"betas": [0.0, 150.0]}
        assert "betas" not in manifest["config"]
        again = tmp_path / "again"
        args = ["sweep", "-c", str(first / "manifest.json"), "-o", str(again), "--betas", "0,150"]
        result = runner.invoke(app, args)
        assert result.exit_code == 0, result.output
