#!/usr/bin/env python3
"""
Dual Graph Subnetworks
======================

- ``EdgeSubnet``: two-layer GCN over the renormalized adjacency
- ``PathSubnet``: two-layer path-aggregation network whose operator is a
  learnable, energy-weighted sum of adjacency powers
- ``Discriminator``: linear domain classifier behind a gradient-reversal layer

Both subnetworks expose the same ``forward`` contract and return node
embeddings plus class logits as tape ``Variable`` objects.
"""

from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Tuple, Union

import numpy as np

from src.graph.graph_model import Graph
from src.graph.operators import PathPowers, normalized_gcn_operator, path_powers
from src.numerics import ops
from src.numerics.sparse import SparseCsr
from src.numerics.tape import GradTape, Variable
from src.utils.error_handling import ContractViolationError


class SubnetKind(str, Enum):
    EDGE = "edge"
    PATH = "path"


@dataclass
class SubnetOutput:
    embeddings: Variable
    logits: Variable


@dataclass(frozen=True)
class DropoutContext:
    """Identifies a dropout mask: seed, stream of the network, domain, epoch."""

    seed: int
    stream: int
    domain: int
    epoch: int

    def layer_key(self, layer: int) -> int:
        return (self.stream * 4 + self.domain) * 4 + layer


def glorot_uniform(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


def _check_features(features: np.ndarray, w0: Variable) -> None:
    if features.shape[1] != w0.value.shape[0]:
        raise ContractViolationError(
            "feature width does not match the first layer",
            {"features": features.shape, "w0": w0.shape},
        )


class EdgeSubnet:
    """H1 = dropout(relu(A_hat X W0)); Z = A_hat H1 W1; logits = Z beta."""

    kind = SubnetKind.EDGE

    def __init__(self, w0: np.ndarray, w1: np.ndarray, beta: np.ndarray, dropout: float = 0.0):
        self.w0 = Variable.parameter(w0, "edge.w0")
        self.w1 = Variable.parameter(w1, "edge.w1")
        self.beta = Variable.parameter(beta, "edge.beta")
        self.dropout = float(dropout)

    @classmethod
    def initialize(cls, rng: np.random.Generator, num_features: int, hidden: int, out: int,
                   num_classes: int, dropout: float) -> "EdgeSubnet":
        return cls(
            glorot_uniform(rng, num_features, hidden),
            glorot_uniform(rng, hidden, out),
            glorot_uniform(rng, out, num_classes),
            dropout,
        )

    def parameters(self) -> List[Variable]:
        return [self.w0, self.w1, self.beta]

    def prepare(self, g: Graph) -> SparseCsr:
        return normalized_gcn_operator(g)

    def forward(
        self,
        operator: SparseCsr,
        features: np.ndarray,
        *,
        training: bool = False,
        dropout_context: Optional[DropoutContext] = None,
        tape: Optional[GradTape] = None,
    ) -> SubnetOutput:
        _check_features(features, self.w0)
        x = Variable.constant(features)
        hidden = ops.relu(ops.spmm(operator, ops.matmul(x, self.w0, tape), tape), tape)
        if training and dropout_context is not None:
            hidden = ops.dropout(
                hidden, self.dropout, seed=dropout_context.seed, layer=dropout_context.layer_key(0),
                epoch=dropout_context.epoch, training=True, tape=tape,
            )
        embeddings = ops.spmm(operator, ops.matmul(hidden, self.w1, tape), tape)
        return SubnetOutput(embeddings, ops.matmul(embeddings, self.beta, tape))


class PathSubnet:
    """
    Two layers of H = relu(P H W) with P the normalized path operator built
    from w_n = exp(-E_n / T); logits = Z beta.
    """

    kind = SubnetKind.PATH

    def __init__(self, w0: np.ndarray, w1: np.ndarray, beta: np.ndarray, energies: np.ndarray,
                 temperature: float = 1.0, dropout: float = 0.0):
        if temperature <= 0:
            raise ContractViolationError("temperature must be positive", {"temperature": temperature})
        self.w0 = Variable.parameter(w0, "path.w0")
        self.w1 = Variable.parameter(w1, "path.w1")
        self.beta = Variable.parameter(beta, "path.beta")
        self.energies = Variable.parameter(np.asarray(energies, dtype=np.float64).ravel(), "path.energies")
        self.temperature = float(temperature)
        self.dropout = float(dropout)

    @classmethod
    def initialize(cls, rng: np.random.Generator, num_features: int, hidden: int, out: int,
                   num_classes: int, dropout: float, max_path_length: int = 3,
                   temperature: float = 1.0) -> "PathSubnet":
        return cls(
            glorot_uniform(rng, num_features, hidden),
            glorot_uniform(rng, hidden, out),
            glorot_uniform(rng, out, num_classes),
            np.zeros(max_path_length + 1),
            temperature,
            dropout,
        )

    @property
    def max_path_length(self) -> int:
        return self.energies.value.size - 1

    def path_weights(self) -> np.ndarray:
        return np.exp(-self.energies.value / self.temperature)

    def parameters(self) -> List[Variable]:
        return [self.w0, self.w1, self.beta, self.energies]

    def prepare(self, g: Graph) -> PathPowers:
        return path_powers(g, self.max_path_length)

    def forward(
        self,
        powers: PathPowers,
        features: np.ndarray,
        *,
        training: bool = False,
        dropout_context: Optional[DropoutContext] = None,
        tape: Optional[GradTape] = None,
    ) -> SubnetOutput:
        _check_features(features, self.w0)
        if powers.max_path_length != self.max_path_length:
            raise ContractViolationError(
                "path powers do not match the network's path length",
                {"powers": powers.max_path_length, "network": self.max_path_length},
            )
        x = Variable.constant(features)
        weights = ops.path_weights(self.energies, self.temperature, tape)
        hidden = ops.relu(ops.pan_propagate(powers.matrices, weights, ops.matmul(x, self.w0, tape), tape), tape)
        if training and dropout_context is not None:
            hidden = ops.dropout(
                hidden, self.dropout, seed=dropout_context.seed, layer=dropout_context.layer_key(0),
                epoch=dropout_context.epoch, training=True, tape=tape,
            )
        embeddings = ops.relu(
            ops.pan_propagate(powers.matrices, weights, ops.matmul(hidden, self.w1, tape), tape), tape
        )
        return SubnetOutput(embeddings, ops.matmul(embeddings, self.beta, tape))


class Discriminator:
    """Linear domain classifier on embeddings (source = 1, target = 0)."""

    def __init__(self, weight: np.ndarray):
        self.weight = Variable.parameter(weight, "discriminator.weight")

    @classmethod
    def initialize(cls, rng: np.random.Generator, out: int) -> "Discriminator":
        return cls(glorot_uniform(rng, out, 1))

    def parameters(self) -> List[Variable]:
        return [self.weight]

    def domain_logits(self, source_embeddings: Variable, target_embeddings: Variable,
                      reversal: float, tape: Optional[GradTape] = None) -> Variable:
        joined = ops.vstack(source_embeddings, target_embeddings, tape)
        return ops.matmul(ops.grad_reverse(joined, reversal, tape), self.weight, tape)

    def loss(self, source_embeddings: Variable, target_embeddings: Variable,
             reversal: float, tape: Optional[GradTape] = None) -> Variable:
        logits = self.domain_logits(source_embeddings, target_embeddings, reversal, tape)
        targets = np.concatenate([
            np.ones(source_embeddings.value.shape[0]),
            np.zeros(target_embeddings.value.shape[0]),
        ])
        return ops.sigmoid_bce(logits, targets, tape)


Subnet = Union[EdgeSubnet, PathSubnet]


def forward_edge(net: EdgeSubnet, g: Graph) -> Tuple[np.ndarray, np.ndarray]:
    """Evaluation-mode (embeddings, logits) of the edge subnetwork."""
    output = net.forward(net.prepare(g), g.features)
    return output.embeddings.value, output.logits.value


def forward_path(net: PathSubnet, g: Graph) -> Tuple[np.ndarray, np.ndarray]:
    """Evaluation-mode (embeddings, logits) of the path subnetwork."""
    output = net.forward(net.prepare(g), g.features)
    return output.embeddings.value, output.logits.value


def build_subnet(kind: SubnetKind, rng: np.random.Generator, num_features: int, hidden: int, out: int,
                 num_classes: int, dropout: float, max_path_length: int = 3, temperature: float = 1.0) -> Subnet:
    if kind == SubnetKind.EDGE:
        return EdgeSubnet.initialize(rng, num_features, hidden, out, num_classes, dropout)
    return PathSubnet.initialize(rng, num_features, hidden, out, num_classes, dropout, max_path_length, temperature)


__all__ = [
    "SubnetKind",
    "SubnetOutput",
    "DropoutContext",
    "glorot_uniform",
    "EdgeSubnet",
    "PathSubnet",
    "Discriminator",
    "forward_edge",
    "forward_path",
    "build_subnet",
]
