"""Command-line entry point: `crss <command>`."""

import argparse
import json
import logging
import os
import sys
from typing import List, Optional

import numpy as np
import pandas as pd

from . import __version__
from .config import config
from .models.database import get_db, init_db
from .models.params import ExperimentConfig, InequalityParams
from .models.reports import DeficitReport
from .services.constants import eigenvalue, sharp_constant, subspace_dimension, theorem_constants
from .services.experiments import SUITES, VERIFIERS, run_all, run_suite, run_verification
from .services.grid import read_grid_function
from .services.harmonics import analyze, load_basis
from .services.heisenberg import GroupPoint, cayley, cayley_jacobian, homogeneous_norm
from .services.manifold import DistanceOptions, distance_fs, distance_hls
from .services.reporting import ReportWriter

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VIOLATION = 2

SCANS = ["fs-stability", "dual-ratio", "limit-case", "hls-stability"]
AUDITS = ["invariance"]
INEQUALITIES = sorted(VERIFIERS) + ["constants", "infrastructure"]


def _load_config(args: argparse.Namespace) -> ExperimentConfig:
    """ExperimentConfig from --config JSON, with command-line overrides applied."""
    data = {}
    if getattr(args, "config", None):
        with open(args.config, "r", encoding="utf-8") as handle:
            data = json.load(handle)
    for key in ("seed", "band_limit", "output_dir", "starts"):
        value = getattr(args, key, None)
        if value is not None:
            data[key] = value
    return ExperimentConfig.model_validate(data)


def _record(report: Optional[DeficitReport], name: str, cfg: ExperimentConfig, path=None, error=None) -> None:
    if not config.RECORD_RUNS:
        return
    try:
        init_db()
        with get_db() as db:
            ReportWriter.record_run(db, report, name, cfg.seed, cfg.band_limit, path, error)
    except Exception as e:
        # The ledger is bookkeeping; a failed insert does not change the verdict.
        logger.error(f"Could not record run {name}: {e}")


def _run(name: str, cfg: ExperimentConfig, runner):
    try:
        return runner()
    except Exception as e:
        logger.error(f"{name} failed: {e}")
        _record(None, name, cfg, error=str(e))
        raise


def _emit(report: DeficitReport, name: str, cfg: ExperimentConfig) -> int:
    path = ReportWriter.emit_report(report, os.path.join(cfg.output_dir, report.experiment))
    _record(report, name, cfg, path)
    for check in report.violations:
        logger.warning(f"Violation: {check.name} value={check.value} expected={check.expected} tol={check.tolerance}")
    print(f"{report.experiment}: {len(report.checks)} checks, {len(report.violations)} violations -> {path}")
    return EXIT_OK if report.passed else EXIT_VIOLATION


def _finish(name: str, cfg: ExperimentConfig, runner) -> int:
    return _emit(_run(name, cfg, runner), name, cfg)


def cmd_constants(args: argparse.Namespace) -> int:
    params = InequalityParams(n=args.n, s=args.s)
    payload = {
        "n": params.n,
        "s": params.s,
        "Q": params.Q,
        "q": params.q,
        "p": params.p,
        "sharp_constant": sharp_constant(params),
        "lambda00": eigenvalue(params, (0, 0)),
        "lambda10": eigenvalue(params, (1, 0)),
        "lambda20": eigenvalue(params, (2, 0)),
        **theorem_constants(params).model_dump(),
    }
    print(json.dumps(payload, indent=2))
    return EXIT_OK


def cmd_eigen(args: argparse.Namespace) -> int:
    params = InequalityParams(n=args.n, s=args.s)
    rows = [
        {
            "j": j,
            "k": k,
            "eigenvalue": eigenvalue(params, (j, k)),
            "dimension": subspace_dimension(args.n, (j, k)) if args.n == 1 else None,
        }
        for j in range(args.jmax + 1)
        for k in range(args.jmax + 1)
    ]
    print(pd.DataFrame(rows).to_string(index=False, float_format=lambda v: f"{v:.15g}"))
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    return _finish(f"verify-{args.inequality}", cfg, lambda: run_verification(cfg, args.inequality))


def cmd_scan(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    return _finish(args.suite, cfg, lambda: run_suite(args.suite, cfg))


def cmd_audit(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    return _finish(args.audit, cfg, lambda: run_suite(args.audit, cfg))


def cmd_all(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    reports = _run("all", cfg, lambda: run_all(cfg))
    return max(_emit(report, report.experiment, cfg) for report in reports)


def cmd_distance(args: argparse.Namespace) -> int:
    f = read_grid_function(args.input)
    params = InequalityParams(n=1, s=args.s)
    options = DistanceOptions(
        starts=args.starts or config.STARTS, require_convergence=False, trace=args.trace is not None
    )
    if args.metric == "sobolev":
        basis = load_basis(f.grid.band_limit)
        result = distance_fs(analyze(f, basis), params, options)
    else:
        result = distance_hls(f, params, options)
    payload = {
        "metric": args.metric,
        "s": args.s,
        "distance": result.distance,
        "converged": result.converged,
        "starts_tried": result.starts_tried,
        "residual_gradient_norm": result.residual_gradient_norm,
        "zero_limit": result.zero_limit,
    }
    if result.argmin is not None:
        payload["c"] = result.argmin.c
        payload["xi"] = [[float(v.real), float(v.imag)] for v in result.argmin.xi]
    if args.trace:
        result.trace_frame().to_csv(args.trace, index=False)
        payload["trace"] = args.trace
    print(json.dumps(payload, indent=2))
    return EXIT_OK


def cmd_geometry(args: argparse.Namespace) -> int:
    u = GroupPoint(np.array([complex(args.x, args.y)]), args.t)
    zeta = cayley(u).zeta
    payload = {
        "zeta": [[float(v.real), float(v.imag)] for v in zeta],
        "jacobian": cayley_jacobian(u),
        "homogeneous_norm": homogeneous_norm(u),
    }
    print(json.dumps(payload, indent=2))
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    from .main import main as serve

    serve(host=args.host, port=args.port)
    return EXIT_OK


def _add_run_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="ExperimentConfig JSON file")
    parser.add_argument("--seed", type=int, help="Override the configured seed")
    parser.add_argument("--band", dest="band_limit", type=int, help="Override the band limit")
    parser.add_argument("--starts", type=int, help="Override the number of optimizer starts")
    parser.add_argument("--output", dest="output_dir", help="Report directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crss",
        description="Stability of sharp fractional Sobolev, HLS and Beckner-Onofri inequalities on the CR sphere.",
    )
    parser.add_argument("--version", action="version", version=f"crss {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("constants", help="Sharp constant and theorem constants")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--s", type=float, required=True)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("eigen", help="Eigenvalue table of A_s")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--jmax", type=int, default=6)
    p.set_defaults(func=cmd_eigen)

    p = sub.add_parser("verify", help="Check one inequality on random inputs and extremizers")
    p.add_argument("inequality", choices=INEQUALITIES)
    _add_run_options(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("scan", help="Local stability scans")
    p.add_argument("suite", choices=SCANS)
    _add_run_options(p)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("audit", help="Conformal invariance audit")
    p.add_argument("audit", choices=AUDITS)
    _add_run_options(p)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("all", help="Run every suite and write one report per suite")
    _add_run_options(p)
    p.set_defaults(func=cmd_all)

    p = sub.add_parser("distance", help="Distance of a grid function to an extremizer manifold")
    p.add_argument("--input", required=True, help="CSV written by GridFunction.to_csv")
    p.add_argument("--metric", choices=["sobolev", "lp"], default="sobolev")
    p.add_argument("--s", type=float, default=2.0)
    p.add_argument("--starts", type=int)
    p.add_argument("--trace", metavar="PATH", help="Write the optimizer trace (start, evaluation, value) as CSV")
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("geometry", help="Cayley image of a point of H^1")
    p.add_argument("--x", type=float, default=0.0)
    p.add_argument("--y", type=float, default=0.0)
    p.add_argument("--t", type=float, default=0.0)
    p.set_defaults(func=cmd_geometry)

    p = sub.add_parser("serve", help="Start the read-only API server")
    p.add_argument("--host", help="Bind address (default: API_HOST)")
    p.add_argument("--port", type=int, help="Port (default: API_PORT)")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, dispatch, and map the outcome to an exit code."""
    logging.basicConfig(
        level=config.LOG_LEVEL,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_ERROR
    try:
        return args.func(args)
    except Exception as e:
        logger.error(f"crss {args.command} failed: {e}")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
