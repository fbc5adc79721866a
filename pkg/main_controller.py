#!/usr/bin/env python3
"""
DELTA Active Selection - Main Controller
========================================

Command-line entry point for the selection pipeline on a pair of graphs:

    synth              write a generated source/target pair as dataset files
    train              train the two subnetworks and write a checkpoint
    select             rank target nodes and write the selection report
    evaluate           retrain on a selection and score Macro/Micro-F1
    run                full multi-seed experiment for one strategy
    compare            several strategies against the same initial training
    sweep              one selection parameter varied over a list of values
    bench-uncertainty  timing of the K-hop uncertainty at growing graph sizes

Exit codes: 0 on success, 2 on validation errors (bad configuration, bad
input files, impossible budgets, usage errors), 1 on runtime failures.
"""

import argparse
import dataclasses
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from rich.console import Console
from rich.table import Table

from src.graph.ingestion import write_graph
from src.graph.synthetic import generate_shifted_pair
from src.harness.benchmark import DEFAULT_SIZES, bench_uncertainty, results_document
from src.harness.config_loader import load_experiment_spec, parse_overrides
from src.harness.experiment import (
    STRATEGIES,
    SWEEP_PARAMETERS,
    ExperimentSpec,
    build_graphs,
    report_path,
    retrain_and_evaluate,
    run_comparison,
    run_experiment,
    run_sweep,
)
from src.harness.reporting import EvalReport, summary_table
from src.selection.delta_selector import SelectionResult, check_budget, select
from src.selection.selection_report import read_selected_nodes, write_selection_report
from src.subnet.checkpoint import load_checkpoint, save_checkpoint
from src.subnet.training import DualNetworks, TrainConfig, target_logits, train_dual
from src.utils.atomic_io import atomic_write_json
from src.utils.error_handling import (
    ConfigurationError,
    DeltaFrameworkError,
    get_error_handler,
    handle_framework_error,
)
from src.utils.logging_config import ComponentLoggerMixin, PerformanceLogger, setup_logging

CHECKPOINT_FILE = "checkpoint.npz"
SELECTION_FILE = "selection.json"
BENCH_FILE = "bench_uncertainty.json"
ERROR_REPORT_FILE = "delta_error_report.json"
SOURCE_NAME = "source"
TARGET_NAME = "target"


class DeltaPipelineController(ComponentLoggerMixin):
    """
    Orchestrates the pipeline phases for one validated ``ExperimentSpec``.

    Single-seed phases (synth, train, select, evaluate) use ``base_seed``;
    experiment phases cover ``num_seeds`` seeds starting at ``base_seed``.
    """

    def __init__(self, spec: ExperimentSpec):
        self.spec = spec.validate()
        self.output_dir = Path(spec.output_dir)
        self.performance = PerformanceLogger("controller.performance")

    @property
    def seed(self) -> int:
        return self.spec.base_seed

    def _train_config(self) -> TrainConfig:
        return dataclasses.replace(self.spec.train, seed=self.seed)

    def _output(self, name: str) -> Path:
        self.output_dir.mkdir(parents=True, exist_ok=True)
        return self.output_dir / name

    @staticmethod
    def _existing(path: Optional[Path], what: str) -> Path:
        if path is None or not Path(path).exists():
            raise ConfigurationError(f"{what} file not found", {"path": str(path)})
        return Path(path)

    # =========================================================================
    # Single-seed phases
    # =========================================================================

    def synthesize(self) -> Dict[str, Dict[str, Path]]:
        if self.spec.dataset.kind != "synthetic":
            raise ConfigurationError("synth needs dataset: synthetic", {"dataset": self.spec.dataset.kind})
        source, target = generate_shifted_pair(self.spec.dataset.synthetic, self.seed)
        written = {
            SOURCE_NAME: write_graph(source, self.output_dir, SOURCE_NAME),
            TARGET_NAME: write_graph(target, self.output_dir, TARGET_NAME),
        }
        self.logger.info(f"🧪 Wrote generated pair ({source.num_nodes} + {target.num_nodes} nodes) to {self.output_dir}")
        return written

    def train(self) -> Path:
        source, target = build_graphs(self.spec, self.seed)
        cfg = self._train_config()
        nets = train_dual(source, target, cfg, self.spec.architecture)
        checkpoint = save_checkpoint(self._output(CHECKPOINT_FILE), nets, cfg)
        nets.first.trace.write_csv(self._output(f"trace_first_{nets.first.kind.value}.csv"))
        nets.second.trace.write_csv(self._output(f"trace_second_{nets.second.kind.value}.csv"))
        self.logger.info(f"💾 Checkpoint written to {checkpoint}")
        return checkpoint

    def select(self, checkpoint: Optional[Path] = None) -> SelectionResult:
        source, target = build_graphs(self.spec, self.seed)
        # fail before training when the budget cannot be met
        check_budget(target, self.spec.select.budget)
        nets: DualNetworks
        if checkpoint is not None:
            nets, _ = load_checkpoint(self._existing(checkpoint, "checkpoint"))
        else:
            nets = train_dual(source, target, self._train_config(), self.spec.architecture)
        self.performance.start_timer("select")
        result = select(source, target, target_logits(nets, target), self.spec.select)
        seconds = self.performance.end_timer("select")
        path = write_selection_report(self._output(SELECTION_FILE), result)
        self.logger.info(f"🎯 Selected {result.selected.size} nodes in {seconds:.3f}s, report at {path}")
        return result

    def evaluate(self, selection: Path) -> EvalReport:
        selected = read_selected_nodes(self._existing(selection, "selection"))
        source, target = build_graphs(self.spec, self.seed)
        macro, micro = retrain_and_evaluate(source, target, selected, self._train_config())
        report = EvalReport(strategy="selection", config={**self.spec.to_dict(), "selection": str(selection)})
        report.add_seed(self.seed, macro, micro, 0.0, selected)
        report.write(report_path(str(self.output_dir), "evaluate"))
        self.logger.info(f"📊 Macro-F1 {macro:.4f}, Micro-F1 {micro:.4f}")
        return report

    # =========================================================================
    # Experiments
    # =========================================================================

    def run(self) -> EvalReport:
        report = run_experiment(self.spec)
        report.write(report_path(str(self.output_dir), self.spec.strategy))
        return report

    def compare(self, strategies: Sequence[str]) -> Dict[str, EvalReport]:
        reports = run_comparison(self.spec, strategies)
        for name, report in reports.items():
            report.write(report_path(str(self.output_dir), name))
        return reports

    def sweep(self, parameter: str, values: Sequence[str]) -> Dict[str, EvalReport]:
        reports = run_sweep(self.spec, parameter, values)
        named = {f"{parameter}={value}": report for value, report in reports.items()}
        for value, report in reports.items():
            report.write(report_path(str(self.output_dir), f"sweep_{parameter}_{value}"))
        return named

    def bench(self, sizes: Sequence[int]) -> Path:
        results = bench_uncertainty(sizes, hops=self.spec.select.hops, seed=self.seed)
        return atomic_write_json(self._output(BENCH_FILE), results_document(results))


def print_summary(reports: Dict[str, EvalReport], console: Console) -> None:
    table = Table(title="Macro/Micro-F1 over seeds")
    for column in ("name", "macro-F1", "micro-F1", "select s"):
        table.add_column(column)
    for row in summary_table(reports):
        table.add_row(
            row["name"],
            f"{row['macro_f1_mean']:.4f} ± {row['macro_f1_std']:.4f}",
            f"{row['micro_f1_mean']:.4f} ± {row['micro_f1_std']:.4f}",
            f"{row['selection_seconds']:.3f}",
        )
    console.print(table)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="Flat YAML configuration file")
    common.add_argument("--seed", type=int, help="Base seed (overrides base_seed)")
    common.add_argument("--out", type=Path, help="Output directory (overrides output_dir)")
    common.add_argument(
        "--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
        help="Override one documented configuration key (repeatable)",
    )
    common.add_argument("--log-level", default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    common.add_argument("--log-dir", type=Path, help="Directory for rotating log files")

    parser = argparse.ArgumentParser(
        prog="delta-select",
        description="DELTA active node selection for graph domain adaptation",
    )
    commands = parser.add_subparsers(dest="command", metavar="COMMAND")
    commands.required = True

    commands.add_parser("synth", parents=[common], help="Write a generated source/target pair")
    commands.add_parser("train", parents=[common], help="Train both subnetworks and write a checkpoint")
    select_parser = commands.add_parser("select", parents=[common], help="Select target nodes for annotation")
    select_parser.add_argument("--checkpoint", type=Path, help="Checkpoint from 'train' (trains when omitted)")
    evaluate_parser = commands.add_parser("evaluate", parents=[common], help="Retrain on a selection and score it")
    evaluate_parser.add_argument("--selection", type=Path, required=True, help="Selection report from 'select'")
    commands.add_parser("run", parents=[common], help="Full experiment for the configured strategy")
    compare_parser = commands.add_parser("compare", parents=[common], help="Compare strategies")
    compare_parser.add_argument("--strategies", nargs="+", choices=STRATEGIES, default=list(STRATEGIES))
    sweep_parser = commands.add_parser("sweep", parents=[common], help="Vary one selection parameter")
    sweep_parser.add_argument("--param", choices=SWEEP_PARAMETERS, required=True)
    sweep_parser.add_argument("--values", nargs="+", required=True)
    bench_parser = commands.add_parser("bench-uncertainty", parents=[common], help="Time the uncertainty scoring")
    bench_parser.add_argument("--sizes", nargs="+", type=int, default=list(DEFAULT_SIZES))
    return parser


def load_spec(args: argparse.Namespace) -> ExperimentSpec:
    overrides = parse_overrides(args.overrides)
    if args.seed is not None:
        overrides["base_seed"] = args.seed
    if args.out is not None:
        overrides["output_dir"] = str(args.out)
    return load_experiment_spec(args.config, overrides)


def dispatch(args: argparse.Namespace, console: Console) -> None:
    controller = DeltaPipelineController(load_spec(args))
    command = args.command
    if command == "synth":
        controller.synthesize()
        console.print(f"✅ Generated pair written to {controller.output_dir}")
    elif command == "train":
        console.print(f"✅ Checkpoint: {controller.train()}")
    elif command == "select":
        result = controller.select(args.checkpoint)
        console.print(f"✅ Selected: {' '.join(str(node) for node in result.selected)}")
    elif command == "evaluate":
        report = controller.evaluate(args.selection)
        console.print(f"✅ Macro-F1 {report.macro_mean:.4f}, Micro-F1 {report.micro_mean:.4f}")
    elif command == "run":
        print_summary({controller.spec.strategy: controller.run()}, console)
    elif command == "compare":
        print_summary(controller.compare(args.strategies), console)
    elif command == "sweep":
        print_summary(controller.sweep(args.param, args.values), console)
    elif command == "bench-uncertainty":
        console.print(f"✅ Timings: {controller.bench(args.sizes)}")


def main(argv: Optional[List[str]] = None) -> int:
    """Main execution function with command-line interface"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 for --help
        return exc.code if isinstance(exc.code, int) else 2

    setup_logging(args.log_level, args.log_dir)
    console = Console()
    handler = get_error_handler()
    try:
        dispatch(args, console)
        return 0
    except DeltaFrameworkError as exc:
        handle_framework_error(exc, f"cli.{args.command}")
        print(f"❌ {exc}", file=sys.stderr)
        code = handler.exit_code_for(exc)
    except Exception as exc:
        handle_framework_error(exc, f"cli.{args.command}")
        print(f"❌ Unexpected Error: {exc}", file=sys.stderr)
        code = handler.RUNTIME_EXIT_CODE
    if args.log_dir is not None:
        handler.export_error_report(args.log_dir / ERROR_REPORT_FILE)
    return code


if __name__ == "__main__":
    sys.exit(main())
