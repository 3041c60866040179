"""Test report emission and the run ledger."""

import json
import os

import pandas as pd
import pytest

from src.crss.exceptions import ReportWriteError
from src.crss.models.reports import DeficitReport
from src.crss.models.run import ExperimentRun
from src.crss.services.reporting import TABLE_COLUMNS, ReportWriter, config_hash


def _report(passed: bool = True) -> DeficitReport:
    report = DeficitReport(experiment="dual-ratio", config={"seed": 1, "band_limit": 8})
    report.add_check("i1 - C i2 >= 0", 0.25, 0.0, 1e-8, passed=True)
    report.add_check("completion of squares", 1e-13 if passed else 1e-3, 0.0, 1e-8)
    report.tables["dual_global"] = [
        {"s": 2.0, "sample": 0, "i1": 0.5, "i2": 0.1, "margin": 0.34, "square_error": 1e-13},
    ]
    report.tables["dual_limits"] = [{"s": 2.0, "j": 2, "k": 0, "limit": 2.618, "expected": 2.617993877991494}]
    return report


def test_add_check_absolute_tolerance():
    """Checks without an explicit verdict compare |value - expected| <= tolerance."""
    report = _report(passed=False)
    assert not report.passed
    assert [c.name for c in report.violations] == ["completion of squares"]


def test_emit_report_writes_json_and_tables(tmp_path):
    """report.json plus one CSV per table with the documented header."""
    path = ReportWriter.emit_report(_report(), str(tmp_path))
    with open(path, "r", encoding="utf-8") as handle:
        payload = json.load(handle)
    assert payload["passed"] is True
    assert payload["experiment"] == "dual-ratio"
    for name in ["checks", "dual_global", "dual_limits"]:
        frame = pd.read_csv(tmp_path / "tables" / f"{name}.csv")
        assert list(frame.columns) == TABLE_COLUMNS[name]
    # Missing columns are written empty, not dropped.
    limits = pd.read_csv(tmp_path / "tables" / "dual_limits.csv")
    assert limits["order"].isna().all()


def test_emit_report_is_byte_identical_on_rerun(tmp_path):
    """Same report, same bytes."""
    first = ReportWriter.emit_report(_report(), str(tmp_path / "a"))
    second = ReportWriter.emit_report(_report(), str(tmp_path / "b"))
    with open(first, "rb") as a, open(second, "rb") as b:
        assert a.read() == b.read()
    for name in os.listdir(tmp_path / "a" / "tables"):
        assert (tmp_path / "a" / "tables" / name).read_bytes() == (tmp_path / "b" / "tables" / name).read_bytes()


def test_emit_report_rejects_unwritable_directory(tmp_path):
    """Filesystem failures surface as ReportWriteError."""
    blocker = tmp_path / "blocker"
    blocker.write_text("not a directory")
    with pytest.raises(ReportWriteError):
        ReportWriter.emit_report(_report(), str(blocker / "out"))


def test_table_frame_rejects_undocumented_table():
    """Only tables with a documented schema are written."""
    report = _report()
    report.tables["scratch"] = [{"x": 1}]
    with pytest.raises(ReportWriteError):
        ReportWriter.table_frame(report, "scratch")


def test_record_run(test_db):
    """Ledger rows carry status, counts and the config digest."""
    run = ReportWriter.record_run(test_db, _report(passed=False), "dual-ratio", 1, 8, "results/report.json")
    test_db.commit()
    stored = test_db.query(ExperimentRun).filter(ExperimentRun.id == run.id).first()
    assert stored.status == "violation"
    assert stored.checks == 2
    assert stored.violations == 1
    assert stored.config_hash == config_hash({"seed": 1, "band_limit": 8})


def test_record_failed_run(test_db):
    """A run without a report is recorded as failed with its error."""
    run = ReportWriter.record_run(test_db, None, "fs-stability", 1, 12, error_message="NonConvergence")
    assert run.status == "failed"
    assert run.error_message == "NonConvergence"
    assert run.checks == 0
