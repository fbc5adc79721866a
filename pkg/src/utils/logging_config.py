#!/usr/bin/env python3
"""
Logging Configuration
=====================

Centralized logging for the DELTA selection pipeline. Console output goes
through rich, optional rotating log files capture DEBUG detail, and structlog
renders key/value event lines for training and selection progress.

Version: 1.0
"""

import logging
import logging.handlers
import sys
import time
from pathlib import Path
from typing import Any, Dict, Optional

import psutil
import structlog
from rich.console import Console
from rich.logging import RichHandler

ROOT_LOGGER_NAME = "delta"


def setup_logging(
    log_level: str = "INFO",
    log_dir: Optional[Path] = None,
    enable_rich_formatting: bool = True,
) -> logging.Logger:
    """
    Configure console and file logging for a command-line run.

    Args:
        log_level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        log_dir: Directory for rotating log files; no files when None
        enable_rich_formatting: Use rich console formatting

    Returns:
        The pipeline's root logger
    """
    numeric_level = getattr(logging, log_level.upper(), logging.INFO)

    detailed_formatter = logging.Formatter(
        fmt='%(asctime)s - %(name)s - %(levelname)s - [%(filename)s:%(lineno)d] - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )
    simple_formatter = logging.Formatter(fmt='%(message)s')

    if enable_rich_formatting:
        console_handler: logging.Handler = RichHandler(
            console=Console(stderr=True),
            rich_tracebacks=True,
            markup=False,
            show_path=False,
            show_time=True,
        )
    else:
        console_handler = logging.StreamHandler(sys.stderr)
        simple_formatter = logging.Formatter(fmt='%(asctime)s - %(levelname)s - %(message)s', datefmt='%H:%M:%S')
    console_handler.setFormatter(simple_formatter)
    console_handler.setLevel(numeric_level)

    logger = logging.getLogger(ROOT_LOGGER_NAME)
    for old_handler in list(logger.handlers):
        old_handler.close()
        logger.removeHandler(old_handler)
    logger.setLevel(min(numeric_level, logging.DEBUG) if log_dir else numeric_level)
    logger.addHandler(console_handler)
    logger.propagate = False

    if log_dir is not None:
        log_dir = Path(log_dir)
        log_dir.mkdir(parents=True, exist_ok=True)

        file_handler = logging.handlers.RotatingFileHandler(
            filename=log_dir / "delta_execution.log",
            maxBytes=10 * 1024 * 1024,  # 10MB
            backupCount=5,
            encoding='utf-8'
        )
        file_handler.setFormatter(detailed_formatter)
        file_handler.setLevel(logging.DEBUG)
        logger.addHandler(file_handler)

        error_handler = logging.handlers.RotatingFileHandler(
            filename=log_dir / "delta_errors.log",
            maxBytes=5 * 1024 * 1024,  # 5MB
            backupCount=3,
            encoding='utf-8'
        )
        error_handler.setFormatter(detailed_formatter)
        error_handler.setLevel(logging.ERROR)
        logger.addHandler(error_handler)

    logger.debug(f"🔧 Logging initialized (level={log_level}, files={log_dir})")
    return logger


def get_component_logger(component_name: str) -> logging.Logger:
    """
    Get logger for a pipeline component.

    Args:
        component_name: Name of the component (e.g. "subnet.training")

    Returns:
        Component-specific logger under the "delta" hierarchy
    """
    return logging.getLogger(f"{ROOT_LOGGER_NAME}.{component_name}")


def get_event_logger(component_name: str, **bound_values: Any) -> Any:
    """
    Structured key/value event logger for a component.

    Events are rendered as ``event key=value ...`` lines and routed through the
    component's stdlib logger, so they honour the handlers set up above.
    """
    return structlog.wrap_logger(
        get_component_logger(component_name),
        processors=[
            structlog.stdlib.filter_by_level,
            structlog.processors.KeyValueRenderer(key_order=["event"], sort_keys=True),
        ],
        wrapper_class=structlog.stdlib.BoundLogger,
    ).bind(**bound_values)


class ComponentLoggerMixin:
    """
    Mixin giving classes a component logger named after the class.
    """

    logger: logging.Logger

    def __init_subclass__(cls, **kwargs):
        super().__init_subclass__(**kwargs)
        cls.logger = get_component_logger(cls.__name__.lower())

    def log_execution_start(self, operation_name: str) -> None:
        self.logger.info(f"🚀 Starting {operation_name}")

    def log_execution_end(self, operation_name: str, execution_time: Optional[float] = None) -> None:
        time_msg = f" ({execution_time:.2f}s)" if execution_time is not None else ""
        self.logger.info(f"✅ Completed {operation_name}{time_msg}")


class PerformanceLogger:
    """
    Wall-clock timers and memory reporting.
    """

    def __init__(self, logger_name: str = "performance"):
        self.logger = get_component_logger(logger_name)
        self.start_times: Dict[str, float] = {}

    def start_timer(self, operation_id: str) -> None:
        self.start_times[operation_id] = time.perf_counter()
        self.logger.debug(f"⏱️ Started timer for: {operation_id}")

    def end_timer(self, operation_id: str) -> float:
        """End timing an operation and return its duration in seconds"""
        if operation_id not in self.start_times:
            self.logger.warning(f"⚠️ No start time found for: {operation_id}")
            return 0.0
        duration = time.perf_counter() - self.start_times.pop(operation_id)
        self.logger.debug(f"⏱️ {operation_id}: {duration:.4f}s")
        return duration

    def log_memory_usage(self, context: str = "") -> float:
        """Log and return the resident memory of this process in MB"""
        memory_mb = psutil.Process().memory_info().rss / 1024 / 1024
        context_msg = f" [{context}]" if context else ""
        self.logger.debug(f"💾 Memory usage{context_msg}: {memory_mb:.1f} MB")
        return memory_mb


__all__ = [
    'setup_logging',
    'get_component_logger',
    'get_event_logger',
    'ComponentLoggerMixin',
    'PerformanceLogger',
]
