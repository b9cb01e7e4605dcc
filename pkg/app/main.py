"""Command-line front end: parse flags, validate the job, run it and write its artifacts"""
import argparse
import json
import os
import sys
import tempfile
from typing import Any, Dict, List, Optional

import numpy as np
import structlog

from app.commands.registry import COMMANDS
from app.commands.router import JobOutcome
from app.config.settings import settings
from app.models.jobs import JobConfig, load_job_config
from app.models.responses import failed_report
from app.utils.error_handlers import ConfigError, QuasiTodaError, handle_job_errors
from app.utils.logging import configure_logging, get_logger

logger = structlog.get_logger()
compute_logger = get_logger("app.main")

FRONT_END_FLAGS = ("config", "log_level")


class JobArgumentParser(argparse.ArgumentParser):
    """Argument parser that reports usage errors as ConfigError"""

    def error(self, message: str):
        raise ConfigError("invalid command line", errors=[{"loc": self.prog, "msg": message}])


def add_common_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON job configuration; flags override its values")
    parser.add_argument("--seed", type=int, help="Seed of the instance generator")
    parser.add_argument("--dim", type=int, help="Size d of the matrices in A = Mat_d(Q)")
    parser.add_argument("--orders", help="Truncation orders, e.g. 6,6")
    parser.add_argument("--report", help="Write the JSON report to this path")
    parser.add_argument("--dump", help="Write the exact series dump to this path")
    parser.add_argument("--csv", help="Write the sampled grid to this path")
    parser.add_argument("--log-level", dest="log_level", help="Override QUASITODA_LOG_LEVEL")


def build_parser() -> argparse.ArgumentParser:
    parser = JobArgumentParser(prog="quasitoda", description=f"{settings.app_name} {settings.app_version}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name, spec in COMMANDS.items():
        sub = subparsers.add_parser(name, help=spec.summary, allow_abbrev=False)
        add_common_arguments(sub)
        for argument in spec.arguments:
            sub.add_argument(*argument.flags, **argument.options)
    return parser


def read_config_file(path: str) -> Dict[str, Any]:
    """
    Load a JSON job configuration.

    Raises:
        ConfigError: the file is missing, unreadable or not a JSON object
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            values = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError("cannot read config file", path=path, reason=str(e)) from e
    if not isinstance(values, dict):
        raise ConfigError("config file must hold a JSON object", path=path)
    return values


def run(config: JobConfig) -> JobOutcome:
    """Run one validated job; structured errors become a failed report"""
    spec = COMMANDS[config.command]
    summary = config.summary()

    def failed(error: QuasiTodaError) -> JobOutcome:
        return JobOutcome(report=failed_report(config.command, summary, error))

    job = handle_job_errors(spec.summary, on_error=failed)(spec.handler)
    compute_logger.operation_started(spec.summary, command=config.command, seed=config.seed)
    outcome = job(config)
    compute_logger.operation_success(
        f"ran {config.command}", status=outcome.report.status, exit_code=int(outcome.report.exit_code)
    )
    return outcome


def write_atomic(path: str, text: str) -> None:
    """Write through a temporary file in the target directory, then rename"""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    compute_logger.artifact_written("text", path, size=len(text))


def emit_grid(grid: Optional[np.ndarray], header: List[str], path: str) -> None:
    """
    Write a sampled grid as CSV: header row, then one row per grid point.

    Args:
        grid: Rows x, t, u entries; None or no rows gives a header-only file
        header: Column names
        path: Target path, replaced atomically
    """
    rows = np.zeros((0, len(header))) if grid is None else grid
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".csv")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            np.savetxt(f, rows, fmt="%.17g", delimiter=",", header=",".join(header), comments="")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    compute_logger.artifact_written("csv", path, rows=len(rows))


def write_artifacts(outcome: JobOutcome, report_path: Optional[str], dump_path: Optional[str], csv_path: Optional[str]) -> None:
    text = outcome.report.to_json()
    if report_path:
        write_atomic(report_path, text)
    if dump_path and outcome.dump is not None:
        write_atomic(dump_path, outcome.dump)
    if csv_path:
        if outcome.grid is None and not outcome.grid_header:
            logger.warning("Job produced no grid; CSV not written", path=csv_path)
        else:
            emit_grid(outcome.grid, outcome.grid_header, csv_path)
    sys.stdout.write(text)


def reject(command: str, error: ConfigError, report_path: Optional[str]) -> int:
    """Write the config-error report and return its exit code"""
    compute_logger.operation_failed("validate job configuration", error, command=command)
    outcome = JobOutcome(report=failed_report(command, {}, error))
    write_artifacts(outcome, report_path, None, None)
    return int(outcome.report.exit_code)


def main(argv: Optional[List[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = build_parser().parse_args(argv)
    except ConfigError as e:
        configure_logging(settings.log_level, settings.log_format)
        return reject(argv[0] if argv else "", e, None)
    configure_logging(args.log_level or settings.log_level, settings.log_format)
    flags = {k: v for k, v in vars(args).items() if k not in FRONT_END_FLAGS}
    try:
        file_values = read_config_file(args.config) if args.config else {}
        config = load_job_config(file_values, flags)
    except ConfigError as e:
        return reject(args.command, e, args.report)

    outcome = run(config)
    write_artifacts(outcome, config.report, config.dump, config.csv)
    return int(outcome.report.exit_code)


if __name__ == "__main__":
    sys.exit(main())
