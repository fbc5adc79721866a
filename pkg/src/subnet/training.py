#!/usr/bin/env python3
"""
Adversarial Subnetwork Training
===============================

Full-batch training of one subnetwork against the objective

    L = L_sup + lambda * L_da

where L_sup is the cross-entropy over labeled source nodes (plus labeled
target nodes after annotation) and L_da is the domain-classification loss of a
discriminator on concatenated source/target embeddings. The min-max is
realized with a gradient-reversal layer of scale lambda: backpropagating
``L_sup + L_da`` trains the discriminator to separate domains while the
extractor receives ``-lambda * dL_da``.

``train_dual`` trains the two subnetworks independently, each with its own
discriminator.
"""

import csv
import io
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import List, NamedTuple, Optional, Tuple, Union

import numpy as np

from src.graph.graph_model import Graph
from src.numerics import ops
from src.numerics.optim import AdamW
from src.numerics.tape import GradTape, Variable
from src.subnet.networks import (
    Discriminator,
    DropoutContext,
    EdgeSubnet,
    PathSubnet,
    SubnetKind,
    build_subnet,
)
from src.utils.atomic_io import atomic_write_text
from src.utils.error_handling import (
    ConfigurationError,
    ContractViolationError,
    NumericalError,
    TrainingError,
)
from src.utils.logging_config import get_component_logger, get_event_logger

logger = get_component_logger("subnet.training")

SOURCE_DOMAIN = 0
TARGET_DOMAIN = 1


@dataclass
class TrainConfig:
    """Training hyperparameters; defaults follow the published setup."""

    epochs: int = 200
    learning_rate: float = 0.001
    weight_decay: float = 1e-4
    hidden: int = 512
    out: int = 256
    dropout: float = 0.1
    da_weight: float = 1.0
    seed: int = 0
    max_path_length: int = 3
    temperature: float = 1.0
    log_every: int = 50

    def validate(self) -> "TrainConfig":
        positive = {"epochs": self.epochs, "hidden": self.hidden, "out": self.out,
                    "temperature": self.temperature, "log_every": self.log_every}
        for key, value in positive.items():
            if value <= 0:
                raise ConfigurationError(f"{key} must be positive", {key: value})
        nonnegative = {"learning_rate": self.learning_rate, "weight_decay": self.weight_decay,
                       "da_weight": self.da_weight, "seed": self.seed, "max_path_length": self.max_path_length}
        for key, value in nonnegative.items():
            if value < 0:
                raise ConfigurationError(f"{key} must be nonnegative", {key: value})
        if not 0.0 <= self.dropout < 1.0:
            raise ConfigurationError("dropout must lie in [0, 1)", {"dropout": self.dropout})
        return self


class TraceRow(NamedTuple):
    epoch: int
    sup_loss: float
    da_loss: float
    total_loss: float


@dataclass
class TrainingTrace:
    rows: List[TraceRow] = field(default_factory=list)

    def append(self, epoch: int, sup_loss: float, da_loss: float, da_weight: float) -> None:
        self.rows.append(TraceRow(epoch, sup_loss, da_loss, sup_loss + da_weight * da_loss))

    def totals(self) -> np.ndarray:
        return np.array([row.total_loss for row in self.rows])

    def sup_losses(self) -> np.ndarray:
        return np.array([row.sup_loss for row in self.rows])

    def to_csv_text(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(TraceRow._fields)
        for row in self.rows:
            writer.writerow([row.epoch, repr(row.sup_loss), repr(row.da_loss), repr(row.total_loss)])
        return buffer.getvalue()

    def write_csv(self, path: Union[str, Path]) -> Path:
        return atomic_write_text(path, self.to_csv_text())

    @classmethod
    def read_csv(cls, path: Union[str, Path]) -> "TrainingTrace":
        with open(path, "r", encoding="utf-8", newline="") as handle:
            reader = csv.DictReader(handle)
            rows = [
                TraceRow(int(r["epoch"]), float(r["sup_loss"]), float(r["da_loss"]), float(r["total_loss"]))
                for r in reader
            ]
        return cls(rows)


@dataclass
class TrainedSubnet:
    kind: SubnetKind
    network: Union[EdgeSubnet, PathSubnet]
    discriminator: Discriminator
    trace: TrainingTrace
    stream: int = 0


class Architecture(str, Enum):
    """Which pair of subnetworks supplies the two logit views."""

    DUAL = "dual"
    EDGE_EDGE = "edge_edge"
    PATH_PATH = "path_path"

    @property
    def kinds(self) -> Tuple[SubnetKind, SubnetKind]:
        return {
            Architecture.DUAL: (SubnetKind.EDGE, SubnetKind.PATH),
            Architecture.EDGE_EDGE: (SubnetKind.EDGE, SubnetKind.EDGE),
            Architecture.PATH_PATH: (SubnetKind.PATH, SubnetKind.PATH),
        }[self]


@dataclass
class DualNetworks:
    first: TrainedSubnet
    second: TrainedSubnet
    architecture: Architecture = Architecture.DUAL

    def edge_view(self) -> Optional[TrainedSubnet]:
        """The first edge-kind subnetwork of the pair, or ``None`` for ``path_path``."""
        return next((net for net in (self.first, self.second) if net.kind == SubnetKind.EDGE), None)


@dataclass(frozen=True, eq=False)
class DualLogits:
    """Target-graph logits of the two subnetworks (V x C each)."""

    edge: np.ndarray
    path: np.ndarray

    def __post_init__(self):
        if self.edge.shape != self.path.shape or self.edge.ndim != 2:
            raise ContractViolationError(
                "dual logits must be two V x C matrices of equal shape",
                {"edge": self.edge.shape, "path": self.path.shape},
            )

    @property
    def num_nodes(self) -> int:
        return self.edge.shape[0]

    @property
    def num_classes(self) -> int:
        return self.edge.shape[1]


# =============================================================================
# Loss assembly
# =============================================================================

def _check_compatible(source: Graph, target: Graph) -> None:
    if source.num_features != target.num_features or source.num_classes != target.num_classes:
        raise ContractViolationError(
            "source and target must share feature width and label space",
            {"source": (source.num_features, source.num_classes), "target": (target.num_features, target.num_classes)},
        )


def compute_losses(
    network: Union[EdgeSubnet, PathSubnet],
    discriminator: Discriminator,
    source: Graph,
    target: Graph,
    source_operator,
    target_operator,
    da_weight: float,
    *,
    training: bool = False,
    seed: int = 0,
    stream: int = 0,
    epoch: int = 0,
    tape: Optional[GradTape] = None,
) -> Tuple[Variable, Variable, Variable]:
    """
    Returns:
        (sup, da, root) with root = sup + da, the quantity to backpropagate.
    """
    out_s = network.forward(
        source_operator, source.features, training=training,
        dropout_context=DropoutContext(seed, stream, SOURCE_DOMAIN, epoch), tape=tape,
    )
    out_t = network.forward(
        target_operator, target.features, training=training,
        dropout_context=DropoutContext(seed, stream, TARGET_DOMAIN, epoch), tape=tape,
    )
    sup = ops.softmax_cross_entropy(out_s.logits, source.labels, source.labeled_mask, tape)
    if target.labeled_mask.any():
        sup = ops.add(sup, ops.softmax_cross_entropy(out_t.logits, target.labels, target.labeled_mask, tape), tape)
    da = discriminator.loss(out_s.embeddings, out_t.embeddings, da_weight, tape)
    return sup, da, ops.add(sup, da, tape)


def train_subnet(
    kind: SubnetKind,
    source: Graph,
    target: Graph,
    cfg: TrainConfig,
    stream: int = 0,
) -> TrainedSubnet:
    """
    Train one subnetwork (and its discriminator) from a fresh initialization
    drawn from ``(cfg.seed, stream)``.

    Raises:
        TrainingError: no labeled source nodes, or a non-finite loss (the
            exception carries the trace up to the failing epoch)
    """
    cfg.validate()
    _check_compatible(source, target)
    if not source.labeled_mask.any():
        raise TrainingError("no labeled source nodes", {"graph": source.name})

    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, stream]))
    network = build_subnet(
        kind, rng, source.num_features, cfg.hidden, cfg.out, source.num_classes,
        cfg.dropout, cfg.max_path_length, cfg.temperature,
    )
    discriminator = Discriminator.initialize(rng, cfg.out)
    params = network.parameters() + discriminator.parameters()
    optimizer = AdamW(params, cfg.learning_rate, cfg.weight_decay)
    source_operator = network.prepare(source)
    target_operator = network.prepare(target)

    events = get_event_logger("subnet.training", kind=kind.value, seed=cfg.seed, stream=stream)
    trace = TrainingTrace()
    tape = GradTape()
    for epoch in range(cfg.epochs):
        try:
            sup, da, root = compute_losses(
                network, discriminator, source, target, source_operator, target_operator,
                cfg.da_weight, training=True, seed=cfg.seed, stream=stream, epoch=epoch, tape=tape,
            )
            gradients = tape.backward(root, params)
            optimizer.step(gradients)
        except NumericalError as exc:
            raise TrainingError(
                f"non-finite values during training at epoch {epoch}",
                {"kind": kind.value, "seed": cfg.seed, "epoch": epoch},
                trace=trace.rows,
            ) from exc
        finally:
            tape.clear()
        trace.append(epoch, float(sup.value), float(da.value), cfg.da_weight)
        if (epoch + 1) % cfg.log_every == 0 or epoch + 1 == cfg.epochs:
            last = trace.rows[-1]
            events.info("epoch", epoch=epoch, sup_loss=round(last.sup_loss, 6),
                        da_loss=round(last.da_loss, 6), total_loss=round(last.total_loss, 6))

    return TrainedSubnet(kind, network, discriminator, trace, stream)


def train_dual(
    source: Graph,
    target: Graph,
    cfg: TrainConfig,
    architecture: Union[Architecture, str] = Architecture.DUAL,
) -> DualNetworks:
    """Train the two logit sources independently (streams 0 and 1)."""
    architecture = Architecture(architecture)
    first_kind, second_kind = architecture.kinds
    logger.info(f"🚀 Training {architecture.value} subnetworks for {cfg.epochs} epochs (seed={cfg.seed})")
    first = train_subnet(first_kind, source, target, cfg, stream=0)
    second = train_subnet(second_kind, source, target, cfg, stream=1)
    logger.info(
        f"✅ Training finished: final losses {first.trace.rows[-1].total_loss:.4f} / "
        f"{second.trace.rows[-1].total_loss:.4f}"
    )
    return DualNetworks(first, second, architecture)


def evaluate_subnet(trained: TrainedSubnet, g: Graph) -> Tuple[np.ndarray, np.ndarray]:
    """Evaluation-mode (embeddings, logits), no dropout."""
    network = trained.network
    output = network.forward(network.prepare(g), g.features)
    return output.embeddings.value, output.logits.value


def target_logits(nets: DualNetworks, target: Graph) -> DualLogits:
    _, first = evaluate_subnet(nets.first, target)
    _, second = evaluate_subnet(nets.second, target)
    return DualLogits(first, second)


__all__ = [
    "TrainConfig",
    "TraceRow",
    "TrainingTrace",
    "TrainedSubnet",
    "Architecture",
    "DualNetworks",
    "DualLogits",
    "compute_losses",
    "train_subnet",
    "train_dual",
    "evaluate_subnet",
    "target_logits",
]
