from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field

from app.utils.error_handlers import ExitCode, QuasiTodaError

CertificateStatus = Literal["pass", "fail", "degenerate"]


class Certificate(BaseModel):
    """One machine-checked statement of a job"""
    certificate: str
    paper_tag: str = Field(description="Equation or statement the check refers to")
    status: CertificateStatus
    detail: Dict[str, Any] = Field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == "pass"


class ErrorDetail(BaseModel):
    """Structured error that aborted a job before its certificates ran"""
    code: int
    error: str
    message: str
    context: Optional[Dict[str, Any]] = None


class JobReport(BaseModel):
    """Report written for every job; carries no timestamps so reruns are byte-identical"""
    command: str
    config: Dict[str, Any] = Field(default_factory=dict)
    status: Literal["pass", "fail", "degenerate", "config-error"]
    certificates: List[Certificate] = Field(default_factory=list)
    error: Optional[ErrorDetail] = None

    @property
    def exit_code(self) -> ExitCode:
        if self.error is not None:
            return ExitCode(self.error.code)
        if any(c.status == "fail" for c in self.certificates):
            return ExitCode.CERTIFICATE_FAILED
        if any(c.status == "degenerate" for c in self.certificates):
            return ExitCode.DEGENERATE_INSTANCE
        return ExitCode.OK

    def to_json(self) -> str:
        return self.model_dump_json(indent=2) + "\n"


def status_for(certificates: List[Certificate]) -> str:
    if any(c.status == "fail" for c in certificates):
        return "fail"
    if any(c.status == "degenerate" for c in certificates):
        return "degenerate"
    return "pass"


def failed_report(command: str, config: Dict[str, Any], error: QuasiTodaError) -> JobReport:
    """Report for a job aborted by a structured error"""
    code = ExitCode(error.exit_code)
    status = {
        ExitCode.CONFIG_ERROR: "config-error",
        ExitCode.CERTIFICATE_FAILED: "fail",
    }.get(code, "degenerate")
    detail = ErrorDetail(code=int(code), error=type(error).__name__, message=error.message, context=error.context or None)
    return JobReport(command=command, config=config, status=status, error=detail)
