"""Test the crss command line."""

import json
import math

import pandas as pd
import pytest

from src.crss import cli
from src.crss import main as server
from src.crss.config import config
from src.crss.models.reports import DeficitReport
from src.crss.services.grid import GridFunction, build_grid


@pytest.fixture(autouse=True)
def no_ledger(monkeypatch):
    """Keep CLI tests away from the run ledger."""
    monkeypatch.setattr(config, "RECORD_RUNS", False)


def test_constants_command(capsys):
    """Constants print as JSON."""
    assert cli.main(["constants", "--s", "2"]) == cli.EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data["sharp_constant"] == pytest.approx(math.pi / 2)
    assert data["Q"] == 4


def test_eigen_command(capsys):
    """The eigen table has one row per (j, k)."""
    assert cli.main(["eigen", "--s", "2", "--jmax", "1"]) == cli.EXIT_OK
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0].split() == ["j", "k", "eigenvalue", "dimension"]
    assert len(lines) == 5


def test_geometry_command(capsys):
    """Cayley image of the origin."""
    assert cli.main(["geometry"]) == cli.EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data["zeta"] == [[0.0, 0.0], [1.0, 0.0]]
    assert data["jacobian"] == pytest.approx(8.0)


def test_bad_arguments_exit_with_error():
    """Usage errors map to exit code 1."""
    assert cli.main(["verify", "nonexistent"]) == cli.EXIT_ERROR
    assert cli.main(["constants"]) == cli.EXIT_ERROR


def test_invalid_exponent_exits_with_error():
    """Validation failures inside a command map to exit code 1."""
    assert cli.main(["constants", "--s", "7"]) == cli.EXIT_ERROR


def test_verify_constants_writes_report(tmp_path, capsys):
    """A passing run exits 0 and leaves report.json behind."""
    code = cli.main(["verify", "constants", "--band", "6", "--output", str(tmp_path)])
    assert code == cli.EXIT_OK
    report = json.loads((tmp_path / "constant-identities" / "report.json").read_text())
    assert report["passed"] is True
    assert "0 violations" in capsys.readouterr().out


def test_violations_exit_with_code_two(tmp_path, monkeypatch):
    """A report with a failed check maps to exit code 2."""

    def failing(cfg, inequality):
        report = DeficitReport(experiment=f"verify-{inequality}", config=cfg.model_dump(mode="json"))
        report.add_check("deficit >= 0", -1.0, 0.0, 1e-8)
        return report

    monkeypatch.setattr(cli, "run_verification", failing)
    assert cli.main(["verify", "fs", "--output", str(tmp_path)]) == cli.EXIT_VIOLATION
    assert (tmp_path / "verify-fs" / "tables" / "checks.csv").exists()


def test_distance_command_on_a_constant(tmp_path, capsys):
    """Constants lie on the FS manifold."""
    path = tmp_path / "one.csv"
    GridFunction.constant(build_grid(6), 2.0).to_csv(str(path))
    assert cli.main(["distance", "--input", str(path), "--metric", "sobolev", "--starts", "1"]) == cli.EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data["metric"] == "sobolev"
    assert data["distance"] < 1e-4


def test_distance_command_writes_trace(tmp_path, capsys):
    """--trace dumps one row per objective evaluation."""
    path = tmp_path / "one.csv"
    trace = tmp_path / "trace.csv"
    GridFunction.constant(build_grid(6), 1.0).to_csv(str(path))
    code = cli.main(["distance", "--input", str(path), "--starts", "1", "--trace", str(trace)])
    assert code == cli.EXIT_OK
    assert json.loads(capsys.readouterr().out)["trace"] == str(trace)
    frame = pd.read_csv(trace)
    assert list(frame.columns) == ["start", "evaluation", "value"]
    assert len(frame) > 0


def test_all_command_reports_every_suite(tmp_path, monkeypatch):
    """`crss all` writes a report per suite and exits 2 when any of them fails."""

    def suites(cfg):
        good = DeficitReport(experiment="constant-identities", config=cfg.model_dump(mode="json"))
        good.add_check("C = pi/2", math.pi / 2, math.pi / 2, 1e-12)
        bad = DeficitReport(experiment="dual-ratio", config=cfg.model_dump(mode="json"))
        bad.add_check("i1 - C i2 >= 0", -1.0, 0.0, 1e-8)
        return [good, bad]

    monkeypatch.setattr(cli, "run_all", suites)
    assert cli.main(["all", "--output", str(tmp_path)]) == cli.EXIT_VIOLATION
    assert (tmp_path / "constant-identities" / "report.json").exists()
    assert (tmp_path / "dual-ratio" / "report.json").exists()


def test_serve_command_passes_bind_address(monkeypatch):
    """--port overrides API_PORT and the host falls back to API_HOST."""
    calls = {}
    monkeypatch.setattr(server.uvicorn, "run", lambda app, **kwargs: calls.update(kwargs))
    assert cli.main(["serve", "--port", "9001"]) == cli.EXIT_OK
    assert calls["port"] == 9001
    assert calls["host"] == config.API_HOST
