#!/usr/bin/env python3
"""
Error Handling System
=====================

Centralized exception hierarchy and error bookkeeping for the DELTA selection
pipeline. Every error carries a category, a severity and a context dictionary
so that failures deep inside a seed of an experiment can be reported with the
information needed to reproduce them.

Version: 1.0
"""

import logging
import time
import traceback
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from src.utils.atomic_io import atomic_write_json


class ErrorSeverity(Enum):
    """Error severity levels"""
    CRITICAL = "critical"        # Pipeline cannot continue
    HIGH = "high"               # A stage failed
    MEDIUM = "medium"           # Recoverable input problem
    LOW = "low"


class ErrorCategory(Enum):
    """Error categories used for classification and exit codes"""
    CONFIGURATION = "configuration"       # Bad config keys or values
    CONTRACT = "contract"                 # Shape or precondition violation
    DATA_FORMAT = "data_format"           # Malformed graph files
    NUMERICAL = "numerical"               # NaN / Inf produced
    TRAINING = "training"                 # Training loop failure
    SELECTION = "selection"               # Budget / pool problems
    FILE_SYSTEM = "file_system"
    INTERNAL = "internal"                 # Broken invariants of our own code


@dataclass
class ErrorRecord:
    """Structured information about one handled error"""
    error_id: str
    category: ErrorCategory
    severity: ErrorSeverity
    message: str
    component: str
    timestamp: float = field(default_factory=time.time)
    exception_type: str = ""
    stack_trace: str = ""
    context: Dict[str, Any] = field(default_factory=dict)
    suggested_resolution: str = ""
    is_validation: bool = False


class DeltaFrameworkError(Exception):
    """Base class of every error raised by the pipeline"""

    category = ErrorCategory.INTERNAL
    severity = ErrorSeverity.HIGH
    is_validation = False

    def __init__(self, message: str, context: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.context: Dict[str, Any] = dict(context or {})

    def with_context(self, **extra: Any) -> "DeltaFrameworkError":
        """Attach more context (e.g. the seed) and return self for re-raising."""
        self.context.update(extra)
        return self

    def __str__(self) -> str:
        base = super().__str__()
        if not self.context:
            return base
        details = ", ".join(f"{key}={value}" for key, value in sorted(self.context.items()))
        return f"{base} [{details}]"


class ConfigurationError(DeltaFrameworkError):
    """Invalid configuration file, key, or value"""
    category = ErrorCategory.CONFIGURATION
    severity = ErrorSeverity.MEDIUM
    is_validation = True


class ContractViolationError(DeltaFrameworkError, ValueError):
    """A precondition of a public operation does not hold (shapes, ranges)"""
    category = ErrorCategory.CONTRACT
    severity = ErrorSeverity.HIGH


class GraphFormatError(DeltaFrameworkError):
    """Graph input files do not follow the documented formats"""
    category = ErrorCategory.DATA_FORMAT
    severity = ErrorSeverity.MEDIUM
    is_validation = True


class NumericalError(DeltaFrameworkError):
    """A computation produced non-finite values"""
    category = ErrorCategory.NUMERICAL
    severity = ErrorSeverity.HIGH


class TrainingError(DeltaFrameworkError):
    """The training loop cannot proceed"""
    category = ErrorCategory.TRAINING
    severity = ErrorSeverity.HIGH

    def __init__(self, message: str, context: Optional[Dict[str, Any]] = None,
                 trace: Optional[List[Tuple[int, float, float, float]]] = None):
        super().__init__(message, context)
        self.trace = list(trace or [])


class SelectionError(DeltaFrameworkError):
    """Node selection cannot satisfy the request"""
    category = ErrorCategory.SELECTION
    severity = ErrorSeverity.MEDIUM

    def __init__(self, message: str, context: Optional[Dict[str, Any]] = None,
                 is_validation: bool = False):
        super().__init__(message, context)
        self.is_validation = is_validation


class TapeIntegrityError(DeltaFrameworkError):
    """The gradient tape is not in recording order"""
    category = ErrorCategory.INTERNAL
    severity = ErrorSeverity.CRITICAL


_RESOLUTIONS = {
    ErrorCategory.CONFIGURATION: "Check the config keys against config/delta_config.yaml",
    ErrorCategory.CONTRACT: "Check matrix shapes and argument ranges passed to the operation",
    ErrorCategory.DATA_FORMAT: "Verify edge, feature, label and mask files follow the documented formats",
    ErrorCategory.NUMERICAL: "Lower the learning rate or inspect the input features for extreme values",
    ErrorCategory.TRAINING: "Inspect the training trace; make sure the source graph has labeled nodes",
    ErrorCategory.SELECTION: "Lower the budget or provide more unlabeled target nodes",
    ErrorCategory.FILE_SYSTEM: "Check that paths exist and are writable",
    ErrorCategory.INTERNAL: "Report the stack trace; this indicates a bug",
}


class ErrorHandler:
    """
    Central error processing: classification, logging, bookkeeping and
    exit-code mapping for the command line.
    """

    VALIDATION_EXIT_CODE = 2
    RUNTIME_EXIT_CODE = 1

    def __init__(self):
        self.logger = logging.getLogger("delta.error_handler")
        self.errors: List[ErrorRecord] = []
        self.error_counts: Dict[ErrorCategory, int] = {}

    def handle_exception(
        self,
        exception: BaseException,
        component: str,
        context: Optional[Dict[str, Any]] = None,
    ) -> ErrorRecord:
        """
        Classify, log and record an exception.

        Args:
            exception: The exception that occurred
            component: Pipeline component where it occurred
            context: Additional context information

        Returns:
            ErrorRecord describing the failure
        """
        category, severity = self._classify_error(exception)
        merged_context = dict(getattr(exception, "context", {}) or {})
        merged_context.update(context or {})

        record = ErrorRecord(
            error_id=f"ERR_{len(self.errors):04d}",
            category=category,
            severity=severity,
            message=str(exception),
            component=component,
            exception_type=type(exception).__name__,
            stack_trace="".join(traceback.format_exception(type(exception), exception, exception.__traceback__)),
            context=merged_context,
            suggested_resolution=_RESOLUTIONS.get(category, ""),
            is_validation=self.is_validation_error(exception),
        )

        self._log_error(record)
        self.errors.append(record)
        self.error_counts[category] = self.error_counts.get(category, 0) + 1
        return record

    def _classify_error(self, exception: BaseException) -> Tuple[ErrorCategory, ErrorSeverity]:
        if isinstance(exception, DeltaFrameworkError):
            return exception.category, exception.severity
        if isinstance(exception, (FileNotFoundError, PermissionError, IsADirectoryError)):
            return ErrorCategory.FILE_SYSTEM, ErrorSeverity.MEDIUM
        if isinstance(exception, FloatingPointError):
            return ErrorCategory.NUMERICAL, ErrorSeverity.HIGH
        return ErrorCategory.INTERNAL, ErrorSeverity.HIGH

    @staticmethod
    def is_validation_error(exception: BaseException) -> bool:
        return bool(getattr(exception, "is_validation", False))

    def exit_code_for(self, exception: BaseException) -> int:
        """2 for validation failures, 1 for runtime failures."""
        if self.is_validation_error(exception):
            return self.VALIDATION_EXIT_CODE
        return self.RUNTIME_EXIT_CODE

    def _log_error(self, record: ErrorRecord) -> None:
        log_level_map = {
            ErrorSeverity.CRITICAL: logging.CRITICAL,
            ErrorSeverity.HIGH: logging.ERROR,
            ErrorSeverity.MEDIUM: logging.WARNING,
            ErrorSeverity.LOW: logging.INFO,
        }
        self.logger.log(
            log_level_map[record.severity],
            f"🚨 {record.severity.value.upper()} [{record.error_id}] in {record.component}: {record.message}",
        )
        if record.severity in (ErrorSeverity.CRITICAL, ErrorSeverity.HIGH) and record.stack_trace:
            self.logger.debug(f"📚 Stack trace for {record.error_id}:\n{record.stack_trace}")

    def get_error_summary(self) -> Dict[str, Any]:
        """Summary of all errors handled so far"""
        return {
            "total_errors": len(self.errors),
            "validation_errors": sum(1 for e in self.errors if e.is_validation),
            "critical_errors": sum(1 for e in self.errors if e.severity == ErrorSeverity.CRITICAL),
            "error_categories": {category.value: count for category, count in self.error_counts.items()},
        }

    def export_error_report(self, file_path: Path) -> Path:
        """Write every handled error to a JSON file"""
        report = {
            "summary": self.get_error_summary(),
            "errors": [
                {
                    "error_id": error.error_id,
                    "category": error.category.value,
                    "severity": error.severity.value,
                    "message": error.message,
                    "component": error.component,
                    "exception_type": error.exception_type,
                    "context": {key: repr(value) for key, value in error.context.items()},
                    "suggested_resolution": error.suggested_resolution,
                }
                for error in self.errors
            ],
        }
        path = atomic_write_json(file_path, report)
        self.logger.info(f"📄 Error report exported to {path}")
        return path


_global_error_handler: Optional[ErrorHandler] = None


def get_error_handler() -> ErrorHandler:
    """Get the process-wide error handler"""
    global _global_error_handler
    if _global_error_handler is None:
        _global_error_handler = ErrorHandler()
    return _global_error_handler


def handle_framework_error(
    exception: BaseException,
    component: str,
    context: Optional[Dict[str, Any]] = None,
) -> ErrorRecord:
    """Convenience wrapper around the global handler."""
    return get_error_handler().handle_exception(exception, component, context)


__all__ = [
    "ErrorSeverity",
    "ErrorCategory",
    "ErrorRecord",
    "DeltaFrameworkError",
    "ConfigurationError",
    "ContractViolationError",
    "GraphFormatError",
    "NumericalError",
    "TrainingError",
    "SelectionError",
    "TapeIntegrityError",
    "ErrorHandler",
    "get_error_handler",
    "handle_framework_error",
]
