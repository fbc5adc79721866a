#!/usr/bin/env python3
"""
Propagation Operators
=====================

Normalized operators for the two subnetworks:

- the renormalized GCN operator D~^{-1/2} (A + I) D~^{-1/2}
- the path operator M^{-1/2} (sum_n w_n A^n) M^{-1/2}, with M the row sums
  of the weighted path sum and A^0 = I

Adjacency powers depend only on structure, so ``PathPowers`` computes them
once per graph; training then only reweights them.
"""

from dataclasses import dataclass
from typing import List, Sequence, Union

import numpy as np
import scipy.sparse as sp

from src.graph.graph_model import Graph
from src.numerics.sparse import SparseCsr, from_dense, from_scipy
from src.utils.error_handling import ContractViolationError
from src.utils.logging_config import get_component_logger

logger = get_component_logger("graph.operators")

# Graphs up to this many nodes keep A^n as dense arrays for fast BLAS products.
DENSE_POWER_LIMIT = 2048

PathMatrix = Union[np.ndarray, SparseCsr]


def normalized_gcn_operator(g: Graph) -> SparseCsr:
    """Symmetric renormalized adjacency with self-loops."""
    with_loops = g.adjacency.to_scipy() + sp.identity(g.num_nodes, format="csr")
    inv_sqrt = 1.0 / np.sqrt(np.asarray(with_loops.sum(axis=1)).ravel())
    scaling = sp.diags(inv_sqrt)
    return from_scipy(scaling @ with_loops @ scaling)


@dataclass(frozen=True, eq=False)
class PathPowers:
    """A^0 .. A^L of one graph (walk counts)."""

    max_path_length: int
    matrices: tuple

    @property
    def is_dense(self) -> bool:
        return isinstance(self.matrices[0], np.ndarray)

    @property
    def num_nodes(self) -> int:
        return self.matrices[0].shape[0]


def path_powers(g: Graph, max_path_length: int, dense_limit: int = DENSE_POWER_LIMIT) -> PathPowers:
    if max_path_length < 0:
        raise ContractViolationError("max path length must be nonnegative", {"L": max_path_length})
    n = g.num_nodes
    matrices: List[PathMatrix] = []
    if n <= dense_limit:
        adjacency = g.adjacency.to_scipy().toarray()
        current = np.eye(n)
        for _ in range(max_path_length + 1):
            matrices.append(current)
            current = current @ adjacency
        for matrix in matrices:
            matrix.setflags(write=False)
    else:
        adjacency = g.adjacency.to_scipy()
        current = sp.identity(n, format="csr")
        for _ in range(max_path_length + 1):
            matrices.append(from_scipy(current))
            current = current @ adjacency
    logger.debug(f"🧮 Path powers for {g.name}: L={max_path_length}, dense={n <= dense_limit}")
    return PathPowers(max_path_length, tuple(matrices))


def _check_weights(max_path_length: int, weights: Sequence[float]) -> np.ndarray:
    weights = np.asarray(weights, dtype=np.float64)
    if weights.shape != (max_path_length + 1,):
        raise ContractViolationError(
            "expected one weight per path length 0..L",
            {"L": max_path_length, "weights": weights.shape},
        )
    if np.any(weights <= 0) or not np.all(np.isfinite(weights)):
        raise ContractViolationError("path weights must be positive and finite", {"weights": weights.tolist()})
    return weights


def weighted_path_operator(powers: PathPowers, weights: Sequence[float]) -> SparseCsr:
    """Normalized weighted path sum from precomputed powers."""
    weights = _check_weights(powers.max_path_length, weights)
    if powers.is_dense:
        summed = powers.matrices[0] * weights[0]
        for weight, matrix in zip(weights[1:], powers.matrices[1:]):
            summed = summed + matrix * weight
        row_sums = summed.sum(axis=1)
    else:
        summed = powers.matrices[0].to_scipy() * weights[0]
        for weight, matrix in zip(weights[1:], powers.matrices[1:]):
            summed = summed + matrix.to_scipy() * weight
        row_sums = np.asarray(summed.sum(axis=1)).ravel()
    # w_0 > 0 puts a positive entry on every diagonal
    assert np.all(row_sums > 0), "path operator row sum must be positive"
    inv_sqrt = row_sums ** -0.5
    if powers.is_dense:
        return from_dense(inv_sqrt[:, None] * summed * inv_sqrt[None, :])
    scaling = sp.diags(inv_sqrt)
    return from_scipy(scaling @ summed @ scaling)


def pan_operator(g: Graph, max_path_length: int, weights: Sequence[float]) -> SparseCsr:
    _check_weights(max_path_length, weights)
    return weighted_path_operator(path_powers(g, max_path_length), weights)


__all__ = [
    "DENSE_POWER_LIMIT",
    "PathPowers",
    "normalized_gcn_operator",
    "path_powers",
    "weighted_path_operator",
    "pan_operator",
]
