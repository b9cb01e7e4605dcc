"""Structured logging for jobs and certificates"""
import logging
import sys
from typing import Any, Optional

import structlog


def configure_logging(level: str = "INFO", fmt: str = "json") -> None:
    """
    Configure stdlib logging and structlog for the command-line front end.

    Logs go to stderr; stdout is reserved for the job report.

    Args:
        level: Log level name
        fmt: "json" for machine-readable lines, "console" for humans
    """
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format="%(message)s",
        handlers=[logging.StreamHandler(sys.stderr)],
        force=True,
    )

    renderer = structlog.processors.JSONRenderer() if fmt == "json" else structlog.dev.ConsoleRenderer()
    structlog.configure(
        processors=[
            structlog.stdlib.filter_by_level,
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.stdlib.add_log_level,
            structlog.processors.StackInfoRenderer(),
            structlog.processors.format_exc_info,
            renderer,
        ],
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=True,
    )


class ComputeLogger:
    """Job logger: operations, certificates, degenerate instances and artifacts"""

    def __init__(self, name: Optional[str] = None):
        self.logger = structlog.get_logger(name) if name else structlog.get_logger()

    def error_with_context(self, message: str, error: Exception, **context: Any) -> None:
        """Log an exception with its type and the job context (seed, certificate)"""
        self.logger.error(message, error=str(error), error_type=type(error).__name__, **context)

    def operation_failed(self, operation: str, error: Exception, **context: Any) -> None:
        self.error_with_context(f"Failed to {operation}", error, **context)

    def operation_success(self, operation: str, **context: Any) -> None:
        self.logger.info(f"Successfully {operation}", **context)

    def operation_started(self, operation: str, **context: Any) -> None:
        self.logger.info(f"Starting {operation}", **context)

    def certificate_result(self, name: str, paper_tag: str, passed: bool, **context: Any) -> None:
        """
        Log the outcome of one certificate.

        Args:
            name: Certificate name
            paper_tag: Equation or statement the certificate checks
            passed: Whether the certificate holds
            **context: Additional context
        """
        log_method = self.logger.info if passed else self.logger.warning
        log_method(
            "Certificate checked",
            certificate=name,
            paper_tag=paper_tag,
            status="pass" if passed else "fail",
            **context
        )

    def degenerate_instance(self, operation: str, error: Exception, **context: Any) -> None:
        """Log an instance rejected by a genericity or shape check"""
        self.logger.warning(
            "Degenerate instance",
            operation=operation,
            error=str(error),
            error_type=type(error).__name__,
            **context
        )

    def performance_warning(self, operation: str, duration_ms: float, threshold_ms: float = 1000, **context: Any) -> None:
        """Warn when an operation took longer than threshold_ms"""
        if duration_ms > threshold_ms:
            self.logger.warning(
                "Slow operation detected",
                operation=operation,
                duration_ms=duration_ms,
                threshold_ms=threshold_ms,
                **context
            )

    def artifact_written(self, kind: str, path: str, **context: Any) -> None:
        self.logger.info("Artifact written", kind=kind, path=path, **context)


def get_logger(name: str) -> ComputeLogger:
    """Named ComputeLogger"""
    return ComputeLogger(name)
