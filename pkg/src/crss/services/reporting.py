"""Report emission (JSON + CSV tables) and the run ledger."""

import hashlib
import json
import logging
import os
import subprocess
from typing import Dict, List, Optional

import pandas as pd
from sqlalchemy.orm import Session

from ..exceptions import ReportWriteError
from ..models.reports import DeficitReport
from ..models.run import ExperimentRun

logger = logging.getLogger(__name__)

# Documented header of every plot-ready table.
TABLE_COLUMNS: Dict[str, List[str]] = {
    "checks": ["name", "value", "expected", "tolerance", "passed", "detail"],
    "fs_ratios": ["s", "j", "k", "eps", "deficit", "distance", "ratio"],
    "fs_limits": ["s", "j", "k", "limit", "expected", "order"],
    "dual_ratios": ["s", "j", "k", "eps", "i1", "i2", "ratio"],
    "dual_limits": ["s", "j", "k", "limit", "expected", "order"],
    "dual_global": ["s", "sample", "i1", "i2", "margin", "square_error"],
    "bo_ratios": ["j", "eps", "deficit", "dual_rhs", "ratio"],
    "bo_limits": ["j", "limit", "expected", "order"],
    "bo_global": ["sample", "deficit", "dual_rhs", "margin"],
    "bridge": ["j", "gap", "value", "target", "error", "order"],
    "bridge_functional": ["gap", "value", "target"],
    "invariance": ["word", "s", "quantity", "deviation"],
    "hls_probe": ["s", "eps", "normalized_deficit", "distance_p", "norm_p", "ratio", "christ_phi"],
    "extremizers": ["inequality", "s", "c", "xi_abs", "deficit"],
    "constants": ["s", "identity", "value", "expected", "error"],
    "infrastructure": ["quantity", "value", "tolerance"],
}


def git_describe() -> str:
    """Provenance string of the working tree, or 'unknown' outside a repository."""
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty", "--tags"],
            capture_output=True,
            text=True,
            timeout=5,
            check=False,
        )
        return out.stdout.strip() or "unknown"
    except Exception:
        return "unknown"


def config_hash(config_echo: Dict) -> str:
    return hashlib.sha256(json.dumps(config_echo, sort_keys=True).encode("utf-8")).hexdigest()[:16]


class ReportWriter:
    """Write DeficitReports to disk and record them in the ledger."""

    @staticmethod
    def table_frame(report: DeficitReport, name: str) -> pd.DataFrame:
        """
        Build a table with its documented column order.

        Args:
            report: Report holding the rows
            name: Table name, a key of TABLE_COLUMNS

        Returns:
            DataFrame with exactly the documented columns
        """
        columns = TABLE_COLUMNS.get(name)
        if columns is None:
            raise ReportWriteError(f"table {name!r} has no documented schema")
        if name == "checks":
            rows = [check.model_dump() for check in report.checks]
        else:
            rows = report.tables.get(name, [])
        return pd.DataFrame(rows, columns=columns)

    @staticmethod
    def emit_report(report: DeficitReport, output_dir: str) -> str:
        """
        Write report.json and tables/*.csv under output_dir.

        Output bytes depend only on the report contents (sorted keys, fixed float format,
        no timestamps), so identical runs produce identical files.

        Returns:
            Path of report.json
        """
        tables_dir = os.path.join(output_dir, "tables")
        path = os.path.join(output_dir, "report.json")
        try:
            os.makedirs(tables_dir, exist_ok=True)
            payload = report.model_dump()
            payload["passed"] = report.passed
            with open(path, "w", encoding="utf-8") as handle:
                json.dump(payload, handle, indent=2, sort_keys=True, default=float)
                handle.write("\n")

            names = ["checks"] + sorted(report.tables)
            for name in names:
                frame = ReportWriter.table_frame(report, name)
                frame.to_csv(
                    os.path.join(tables_dir, f"{name}.csv"), index=False, float_format="%.12g"
                )
            logger.info(f"Wrote {report.experiment} report to {path} ({len(names)} tables)")
            return path
        except ReportWriteError:
            raise
        except Exception as e:
            logger.error(f"Error writing report to {output_dir}: {e}")
            raise ReportWriteError(f"{output_dir}: {e}") from e

    @staticmethod
    def record_run(
        db: Session,
        report: Optional[DeficitReport],
        experiment: str,
        seed: int,
        band_limit: int,
        report_path: Optional[str] = None,
        error_message: Optional[str] = None,
    ) -> ExperimentRun:
        """Insert a ledger row; a missing report marks the run as failed."""
        if report is None:
            status, checks, violations, digest = "failed", 0, 0, config_hash({})
        else:
            violations = len(report.violations)
            status = "success" if violations == 0 else "violation"
            checks = len(report.checks)
            digest = config_hash(report.config)
        run = ExperimentRun(
            experiment=experiment,
            config_hash=digest,
            seed=seed,
            band_limit=band_limit,
            status=status,
            checks=checks,
            violations=violations,
            report_path=report_path,
            error_message=error_message,
        )
        db.add(run)
        db.flush()
        logger.info(f"Recorded run {run.id}: {experiment} -> {status}")
        return run
