"""Base service class for certificate-producing jobs"""
import time
from typing import Any, Callable, Dict, Iterable, List, Tuple

import numpy as np

from app.config.settings import settings
from app.models.responses import Certificate, JobReport, status_for
from app.utils.error_handlers import InstanceError, InvariantError
from app.utils.logging import get_logger

CheckResult = Tuple[bool, Dict[str, Any]]


def seeded_generators(seed: int, count: int) -> List[np.random.Generator]:
    """Independent generators for instances 0..count-1 of a job"""
    return [np.random.default_rng([seed, i]) for i in range(count)]


def _is_reliable(value: Any) -> bool:
    reliable = getattr(value, "is_reliable", None)
    return reliable() if callable(reliable) else True


def _digits(value: Any) -> int:
    digits = getattr(value, "max_numerator_digits", None)
    return digits() if callable(digits) else 0


def vanishes(residuals: Iterable[Any]) -> CheckResult:
    """
    Check that every reliable residual is exactly zero.

    Residuals with no reliable coefficient are skipped; if nothing at all was
    checked the result is a failure.

    Args:
        residuals: Series, algebra elements or anything with `is_zero()`

    Returns:
        (passed, detail) where detail reports counts and the largest
        numerator size seen among nonzero residuals
    """
    checked = skipped = nonzero = 0
    max_digits = 0
    for r in residuals:
        if not _is_reliable(r):
            skipped += 1
            continue
        checked += 1
        if not r.is_zero():
            nonzero += 1
            max_digits = max(max_digits, _digits(r))
    detail = {"checked": checked, "skipped": skipped, "nonzero": nonzero, "max_numerator_digits": max_digits}
    if checked == 0:
        detail["reason"] = "no reliable coefficients"
        return False, detail
    return nonzero == 0, detail


def agree(pairs: Iterable[Tuple[Any, Any]]) -> CheckResult:
    """Check `a.agrees_with(b)` for each pair whose members are both reliable"""
    checked = skipped = mismatched = 0
    for a, b in pairs:
        if not (_is_reliable(a) and _is_reliable(b)):
            skipped += 1
            continue
        checked += 1
        if not a.agrees_with(b):
            mismatched += 1
    detail = {"checked": checked, "skipped": skipped, "mismatched": mismatched}
    if checked == 0:
        detail["reason"] = "no reliable coefficients"
        return False, detail
    return mismatched == 0, detail


class CertificateService:
    """Collects the certificates of one job with timing and logging"""

    def __init__(self, service_name: str):
        """
        Initialize the certificate collector.

        Args:
            service_name: Name of the job for logging purposes
        """
        self.service_name = service_name
        self.logger = get_logger(service_name)
        self.certificates: List[Certificate] = []

    def certify(self, name: str, paper_tag: str, check: Callable[[], CheckResult]) -> Certificate:
        """
        Run one check and record its certificate.

        Args:
            name: Certificate name, unique within the job
            paper_tag: Equation or statement the check refers to
            check: Callable returning (passed, detail)

        Returns:
            The recorded certificate
        """
        start_time = time.perf_counter()
        self.logger.operation_started(f"certificate {name}")
        try:
            passed, detail = check()
            status = "pass" if passed else "fail"
        except InvariantError as e:
            self.logger.operation_failed(f"certificate {name}", e)
            status, detail = "fail", e.to_dict()
        except InstanceError as e:
            self.logger.degenerate_instance(name, e)
            status, detail = "degenerate", e.to_dict()

        duration_ms = (time.perf_counter() - start_time) * 1000
        self.logger.certificate_result(name, paper_tag, status == "pass", duration_ms=duration_ms)
        self.logger.performance_warning(name, duration_ms, threshold_ms=settings.slow_operation_ms)

        certificate = Certificate(certificate=name, paper_tag=paper_tag, status=status, detail=detail)
        self.certificates.append(certificate)
        return certificate

    def record(self, name: str, paper_tag: str, passed: bool, **detail: Any) -> Certificate:
        """Record a certificate whose check already ran"""
        return self.certify(name, paper_tag, lambda: (passed, detail))

    def report(self, command: str, config: Dict[str, Any]) -> JobReport:
        certificates = sorted(self.certificates, key=lambda c: c.certificate)
        return JobReport(command=command, config=config, status=status_for(certificates), certificates=certificates)
