#!/usr/bin/env python3
"""
Experiment Runner
=================

End-to-end protocol per seed:

    build graphs -> train dual subnetworks -> target logits -> select k nodes
    -> annotate them with ground truth -> retrain the edge subnetwork from a
    fresh seeded initialization -> score Macro/Micro-F1 on the remaining
    unlabeled target nodes

Seeds are independent and may run in parallel through joblib; aggregation
is sequential and ordered by seed, so reports do not depend on scheduling.
"""

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed
from tqdm import tqdm

from src.graph.graph_model import UNLABELED, Graph
from src.graph.ingestion import load_dataset_dir
from src.graph.synthetic import ShiftedPairParams, generate_shifted_pair
from src.harness.metrics import macro_micro_f1
from src.harness.reporting import EvalReport
from src.selection.baselines import BaselineKind, baseline_select
from src.selection.delta_selector import SelectConfig, SelectionResult, select
from src.subnet.networks import SubnetKind
from src.subnet.training import (
    Architecture,
    DualNetworks,
    TrainConfig,
    TrainedSubnet,
    evaluate_subnet,
    target_logits,
    train_dual,
    train_subnet,
)
from src.utils.error_handling import ConfigurationError, DeltaFrameworkError
from src.utils.logging_config import ComponentLoggerMixin, PerformanceLogger

DELTA_STRATEGY = "delta"
STRATEGIES = (DELTA_STRATEGY,) + tuple(kind.value for kind in BaselineKind)
SWEEP_PARAMETERS = ("gamma", "hops", "budget")

# Initialization stream of the retrained evaluation backbone (0 and 1 are the dual pair).
RETRAIN_STREAM = 2
# Stream of the edge network trained for baselines when the pair has none.
BASELINE_STREAM = 3


@dataclass
class DatasetSpec:
    """Either the synthetic generator or a pair of four-file datasets."""

    kind: str = "synthetic"
    synthetic: ShiftedPairParams = field(default_factory=ShiftedPairParams)
    source_dir: Optional[str] = None
    source_name: Optional[str] = None
    target_dir: Optional[str] = None
    target_name: Optional[str] = None
    num_classes: Optional[int] = None

    def validate(self) -> "DatasetSpec":
        if self.kind == "synthetic":
            self.synthetic.validate()
        elif self.kind == "files":
            missing = [key for key in ("source_dir", "source_name", "target_dir", "target_name") if not getattr(self, key)]
            if missing:
                raise ConfigurationError("file datasets need directories and names", {"missing": missing})
        else:
            raise ConfigurationError("dataset must be 'synthetic' or 'files'", {"dataset": self.kind})
        return self


@dataclass
class ExperimentSpec:
    dataset: DatasetSpec = field(default_factory=DatasetSpec)
    train: TrainConfig = field(default_factory=TrainConfig)
    select: SelectConfig = field(default_factory=SelectConfig)
    strategy: str = DELTA_STRATEGY
    num_seeds: int = 5
    base_seed: int = 0
    output_dir: str = "results"
    n_jobs: int = 1
    architecture: str = Architecture.DUAL.value

    def validate(self) -> "ExperimentSpec":
        if self.strategy not in STRATEGIES:
            raise ConfigurationError("unknown strategy", {"strategy": self.strategy, "known": list(STRATEGIES)})
        if self.num_seeds < 1:
            raise ConfigurationError("num_seeds must be at least 1", {"num_seeds": self.num_seeds})
        if self.base_seed < 0:
            raise ConfigurationError("base_seed must be nonnegative", {"base_seed": self.base_seed})
        if self.n_jobs == 0:
            raise ConfigurationError("n_jobs must be nonzero", {"n_jobs": self.n_jobs})
        try:
            Architecture(self.architecture)
        except ValueError:
            raise ConfigurationError("unknown architecture", {"architecture": self.architecture}) from None
        self.dataset.validate()
        self.train.validate()
        self.select.validate()
        return self

    def seeds(self) -> List[int]:
        return [self.base_seed + offset for offset in range(self.num_seeds)]

    def to_dict(self) -> Dict[str, Any]:
        """Plain JSON-ready description (array-valued generator overrides omitted)."""
        synthetic = {
            key: value for key, value in dataclasses.asdict(self.dataset.synthetic).items()
            if not isinstance(value, np.ndarray) and value is not None
        }
        dataset = {key: value for key, value in dataclasses.asdict(self.dataset).items() if key != "synthetic"}
        dataset["synthetic"] = synthetic
        return {
            "dataset": dataset,
            "train": dataclasses.asdict(self.train),
            "select": dataclasses.asdict(self.select),
            "strategy": self.strategy,
            "num_seeds": self.num_seeds,
            "base_seed": self.base_seed,
            "architecture": self.architecture,
        }


@dataclass
class SeedOutcome:
    seed: int
    macro_f1: float
    micro_f1: float
    selection_seconds: float
    selected: np.ndarray
    selection: Optional[SelectionResult] = None


def build_graphs(spec: ExperimentSpec, seed: int) -> Tuple[Graph, Graph]:
    dataset = spec.dataset
    if dataset.kind == "synthetic":
        return generate_shifted_pair(dataset.synthetic, seed)
    source = load_dataset_dir(dataset.source_dir, dataset.source_name, dataset.num_classes)
    target = load_dataset_dir(dataset.target_dir, dataset.target_name, dataset.num_classes)
    return source, target


def baseline_network(source: Graph, target: Graph, nets: DualNetworks, cfg: TrainConfig) -> TrainedSubnet:
    """
    Edge network whose target logits and embeddings feed the baselines: the
    pair's own edge subnetwork, or a fresh one on ``BASELINE_STREAM`` when
    the pair is ``path_path``.
    """
    edge = nets.edge_view()
    if edge is not None:
        return edge
    return train_subnet(SubnetKind.EDGE, source, target, cfg, stream=BASELINE_STREAM)


def select_nodes(
    strategy: str,
    source: Graph,
    target: Graph,
    nets: DualNetworks,
    select_cfg: SelectConfig,
    seed: int,
    baseline: Optional[TrainedSubnet] = None,
) -> Tuple[np.ndarray, Optional[SelectionResult]]:
    """
    Run one strategy against trained networks; DELTA also returns its score
    table. Baselines read ``baseline`` if given, else the pair's edge
    subnetwork.

    Raises:
        ConfigurationError: a baseline on a ``path_path`` pair without ``baseline``
    """
    if strategy == DELTA_STRATEGY:
        result = select(source, target, target_logits(nets, target), select_cfg)
        return result.selected, result
    network = baseline if baseline is not None else nets.edge_view()
    if network is None:
        raise ConfigurationError(
            "baselines need an edge subnetwork; pass one from baseline_network",
            {"strategy": strategy, "architecture": nets.architecture.value},
        )
    embeddings, logits = evaluate_subnet(network, target)
    chosen = baseline_select(
        strategy, target, select_cfg.budget, seed=seed, edge_logits=logits, edge_embeddings=embeddings,
    )
    return chosen, None


def retrain_and_evaluate(
    source: Graph,
    target: Graph,
    selected: Sequence[int],
    cfg: TrainConfig,
) -> Tuple[float, float]:
    """
    Annotate ``selected`` target nodes, retrain the edge backbone from scratch
    and score it on the unlabeled target nodes that were not annotated.
    """
    annotated = target.with_annotations(selected)
    backbone = train_subnet(SubnetKind.EDGE, source, annotated, cfg, stream=RETRAIN_STREAM)
    _, logits = evaluate_subnet(backbone, annotated)
    evaluation_mask = ~annotated.labeled_mask & (annotated.labels != UNLABELED)
    return macro_micro_f1(np.argmax(logits, axis=1), annotated.labels, evaluation_mask, target.num_classes)


class ExperimentRunner(ComponentLoggerMixin):
    """Runs strategies over the seeds of an ``ExperimentSpec``."""

    def __init__(self, spec: ExperimentSpec):
        self.spec = spec.validate()
        self.performance = PerformanceLogger("harness.performance")

    def run_seed(self, seed: int, strategies: Sequence[str]) -> Dict[str, SeedOutcome]:
        spec = self.spec
        try:
            source, target = build_graphs(spec, seed)
            train_cfg = dataclasses.replace(spec.train, seed=seed)
            nets = train_dual(source, target, train_cfg, spec.architecture)
            baseline = None
            if any(strategy != DELTA_STRATEGY for strategy in strategies):
                if nets.edge_view() is None:
                    self.logger.info(f"🔧 seed={seed}: training an edge network for the baselines")
                baseline = baseline_network(source, target, nets, train_cfg)
            outcomes: Dict[str, SeedOutcome] = {}
            for strategy in strategies:
                timer = f"select.{strategy}.{seed}"
                self.performance.start_timer(timer)
                selected, result = select_nodes(strategy, source, target, nets, spec.select, seed, baseline)
                seconds = self.performance.end_timer(timer)
                macro, micro = retrain_and_evaluate(source, target, selected, train_cfg)
                self.logger.info(f"📊 seed={seed} {strategy}: macro-F1={macro:.4f} micro-F1={micro:.4f}")
                outcomes[strategy] = SeedOutcome(seed, macro, micro, seconds, selected, result)
            return outcomes
        except DeltaFrameworkError as exc:
            raise exc.with_context(seed=seed)

    def run(self, strategies: Sequence[str]) -> Dict[str, EvalReport]:
        for strategy in strategies:
            if strategy not in STRATEGIES:
                raise ConfigurationError("unknown strategy", {"strategy": strategy, "known": list(STRATEGIES)})
        seeds = self.spec.seeds()
        self.log_execution_start(f"{len(seeds)} seeds x {list(strategies)}")
        progress = tqdm(seeds, desc="seeds", unit="seed", leave=False, disable=None)
        if self.spec.n_jobs == 1:
            per_seed = [self.run_seed(seed, strategies) for seed in progress]
        else:
            per_seed = Parallel(n_jobs=self.spec.n_jobs)(delayed(self.run_seed)(seed, strategies) for seed in progress)

        config = self.spec.to_dict()
        reports: Dict[str, EvalReport] = {}
        for strategy in strategies:
            report = EvalReport(strategy=strategy, config={**config, "strategy": strategy})
            for outcomes in per_seed:
                outcome = outcomes[strategy]
                report.add_seed(outcome.seed, outcome.macro_f1, outcome.micro_f1, outcome.selection_seconds, outcome.selected)
            reports[strategy] = report
            self.logger.info(
                f"🏁 {strategy}: macro-F1 {report.macro_mean:.4f} ± {report.macro_std:.4f}, "
                f"micro-F1 {report.micro_mean:.4f} ± {report.micro_std:.4f}"
            )
        self.log_execution_end("experiment")
        return reports


def run_experiment(spec: ExperimentSpec) -> EvalReport:
    return ExperimentRunner(spec).run([spec.strategy])[spec.strategy]


def run_comparison(spec: ExperimentSpec, strategies: Sequence[str]) -> Dict[str, EvalReport]:
    """Every strategy against the same initial training of each seed."""
    return ExperimentRunner(spec).run(list(strategies))


def run_sweep(spec: ExperimentSpec, parameter: str, values: Sequence[Any]) -> Dict[Any, EvalReport]:
    """Repeat ``run_experiment`` with one selection parameter varied."""
    if parameter not in SWEEP_PARAMETERS:
        raise ConfigurationError("unsupported sweep parameter", {"parameter": parameter, "known": list(SWEEP_PARAMETERS)})
    cast = float if parameter == "gamma" else int
    reports: Dict[Any, EvalReport] = {}
    for value in values:
        varied = dataclasses.replace(spec, select=dataclasses.replace(spec.select, **{parameter: cast(value)}))
        reports[cast(value)] = run_experiment(varied)
    return reports


def report_path(output_dir: str, name: str) -> Path:
    return Path(output_dir) / f"report_{name}.json"


__all__ = [
    "DELTA_STRATEGY",
    "STRATEGIES",
    "SWEEP_PARAMETERS",
    "RETRAIN_STREAM",
    "BASELINE_STREAM",
    "DatasetSpec",
    "ExperimentSpec",
    "SeedOutcome",
    "build_graphs",
    "baseline_network",
    "select_nodes",
    "retrain_and_evaluate",
    "ExperimentRunner",
    "run_experiment",
    "run_comparison",
    "run_sweep",
    "report_path",
]
