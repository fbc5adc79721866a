"""
Harness
=======

Configuration, experiment protocol, metrics, reports and benchmarks.
"""

from src.harness.experiment import (
    STRATEGIES,
    DatasetSpec,
    ExperimentRunner,
    ExperimentSpec,
    run_comparison,
    run_experiment,
    run_sweep,
)
from src.harness.config_loader import load_experiment_spec, parse_overrides
from src.harness.metrics import macro_micro_f1
from src.harness.reporting import EvalReport, summary_table
from src.harness.benchmark import bench_uncertainty, growth_ratios

__all__ = [
    "STRATEGIES",
    "DatasetSpec",
    "ExperimentRunner",
    "ExperimentSpec",
    "run_comparison",
    "run_experiment",
    "run_sweep",
    "load_experiment_spec",
    "parse_overrides",
    "macro_micro_f1",
    "EvalReport",
    "summary_table",
    "bench_uncertainty",
    "growth_ratios",
]
