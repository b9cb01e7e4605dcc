"""Centralized error handling utilities"""
import functools
from enum import IntEnum
from typing import Any, Callable, Optional

import structlog

logger = structlog.get_logger()


class ExitCode(IntEnum):
    """Process exit codes of the command-line front end"""
    OK = 0
    CERTIFICATE_FAILED = 1
    DEGENERATE_INSTANCE = 2
    CONFIG_ERROR = 3


class QuasiTodaError(Exception):
    """Base class of every structured error raised by the library"""

    exit_code: ExitCode = ExitCode.DEGENERATE_INSTANCE

    def __init__(self, message: str, **context: Any):
        super().__init__(message)
        self.message = message
        self.context = context

    def to_dict(self) -> dict:
        return {"error": type(self).__name__, "message": self.message, **self.context}


class InstanceError(QuasiTodaError):
    """Input is degenerate or has the wrong shape for the requested construction"""


class NotInvertible(InstanceError):
    pass


class NotDefined(InstanceError):
    """Quasideterminant requested where the complementary submatrix is singular"""


class DegenerateKernel(InstanceError):
    pass


class DegeneratePrefix(InstanceError):
    """A prefix f_1..f_m (or x_1..x_m) is degenerate; `prefix` names the first one"""

    def __init__(self, prefix: int, message: Optional[str] = None, **context: Any):
        super().__init__(message or f"prefix of length {prefix} is degenerate", prefix=prefix, **context)
        self.prefix = prefix


class DegenerateData(InstanceError):
    pass


class DegenerateGenerators(InstanceError):
    pass


class ConstantTermNotOne(InstanceError):
    pass


class NonzeroConstantTerm(InstanceError):
    pass


class ShapeError(InstanceError):
    pass


class SymmetryViolated(InstanceError):
    pass


class VariableMismatch(InstanceError):
    pass


class TruncationExhausted(InstanceError):
    """No reliable coefficient is left in a direction the computation needs"""


class FloorTooShallow(InstanceError):
    pass


class InvariantError(QuasiTodaError):
    """An identity that holds by construction failed: an arithmetic bug"""

    exit_code = ExitCode.CERTIFICATE_FAILED


class TangencyViolation(InvariantError):
    pass


class IdentityViolation(InvariantError):
    pass


class ConfigError(QuasiTodaError):
    exit_code = ExitCode.CONFIG_ERROR


def handle_job_errors(operation_name: str, on_error: Optional[Callable[[QuasiTodaError], Any]] = None):
    """
    Decorator to handle structured errors of a job consistently.

    Args:
        operation_name: Description of the operation for log messages
        on_error: Converts the error into the job's return value. Without it
            the error is logged and re-raised.

    Usage:
        @handle_job_errors("solve toda system", on_error=failed_report)
        def run_toda(config):
            # Your logic here without try/except
            return report
    """
    def decorator(func: Callable) -> Callable:
        @functools.wraps(func)
        def wrapper(*args, **kwargs) -> Any:
            try:
                return func(*args, **kwargs)
            except QuasiTodaError as e:
                logger.error(f"Failed to {operation_name}", exit_code=int(e.exit_code), **e.to_dict())
                if on_error is None:
                    raise
                return on_error(e)
        return wrapper
    return decorator
