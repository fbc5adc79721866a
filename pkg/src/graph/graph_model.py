#!/usr/bin/env python3
"""
Graph Data Model
================

Immutable attributed graph shared by the source and target domains, plus
degree statistics and node relabeling.

The label vector may carry ground truth for nodes that are not in the
labeled mask (the hidden target labels used for annotation and evaluation);
``-1`` marks a node without any known class.
"""

import dataclasses
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp

from src.numerics.sparse import SparseCsr, from_scipy
from src.utils.error_handling import ContractViolationError

UNLABELED = -1


def _readonly(array: np.ndarray, dtype) -> np.ndarray:
    out = np.array(array, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class Graph:
    """
    Undirected attributed graph.

    Attributes:
        adjacency: Symmetric 0/1 CSR adjacency without self-loops
        features: Node feature matrix (V x F)
        labels: Class index per node, or -1 when unknown
        labeled_mask: True for nodes whose label may be used for training
        num_classes: Size of the label space C
        name: Free-form identifier used in logs and reports
    """

    adjacency: SparseCsr
    features: np.ndarray
    labels: np.ndarray
    labeled_mask: np.ndarray
    num_classes: int
    name: str = "graph"

    def __post_init__(self):
        object.__setattr__(self, "features", _readonly(self.features, np.float64))
        object.__setattr__(self, "labels", _readonly(self.labels, np.int64))
        object.__setattr__(self, "labeled_mask", _readonly(self.labeled_mask, bool))
        self._validate()

    def _validate(self) -> None:
        v = self.adjacency.rows
        context = {"graph": self.name, "num_nodes": v}
        if self.adjacency.cols != v:
            raise ContractViolationError("adjacency must be square", context)
        if self.features.ndim != 2 or self.features.shape[0] != v:
            raise ContractViolationError("feature matrix must have one row per node", {**context, "features": self.features.shape})
        if not np.all(np.isfinite(self.features)):
            raise ContractViolationError("features must be finite", context)
        if self.labels.shape != (v,) or self.labeled_mask.shape != (v,):
            raise ContractViolationError("label and mask vectors must have one entry per node", context)
        if self.num_classes < 1:
            raise ContractViolationError("num_classes must be positive", context)
        if v and (self.labels.min() < UNLABELED or self.labels.max() >= self.num_classes):
            raise ContractViolationError("label out of range", {**context, "num_classes": self.num_classes})
        if np.any(self.labels[self.labeled_mask] == UNLABELED):
            raise ContractViolationError("labeled node without a class", context)

        matrix = self.adjacency.to_scipy()
        if matrix.diagonal().any():
            raise ContractViolationError("adjacency must not store self-loops", context)
        if (matrix != matrix.T).nnz:
            raise ContractViolationError("adjacency must be symmetric", context)

    # ------------------------------------------------------------------
    # Construction
    # ------------------------------------------------------------------

    @classmethod
    def from_edges(
        cls,
        num_nodes: int,
        edges: np.ndarray,
        features: np.ndarray,
        labels: Optional[np.ndarray] = None,
        labeled_mask: Optional[np.ndarray] = None,
        num_classes: Optional[int] = None,
        name: str = "graph",
    ) -> "Graph":
        """Build a graph from an edge list, treating every edge as undirected."""
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if edges.size and (edges.min() < 0 or edges.max() >= num_nodes):
            raise ContractViolationError("edge endpoint out of range", {"num_nodes": num_nodes, "graph": name})
        labels = np.full(num_nodes, UNLABELED, dtype=np.int64) if labels is None else np.asarray(labels)
        labeled_mask = np.zeros(num_nodes, dtype=bool) if labeled_mask is None else np.asarray(labeled_mask)
        if num_classes is None:
            num_classes = max(int(labels.max(initial=UNLABELED)) + 1, 1)
        return cls(symmetric_adjacency(num_nodes, edges), features, labels, labeled_mask, num_classes, name)

    def with_annotations(self, nodes: Sequence[int]) -> "Graph":
        """Copy whose labeled mask is exactly ``nodes``; their labels must be known."""
        nodes = np.asarray(nodes, dtype=np.int64)
        if nodes.size and (nodes.min() < 0 or nodes.max() >= self.num_nodes):
            raise ContractViolationError("annotated node out of range", {"graph": self.name})
        if np.any(self.labels[nodes] == UNLABELED):
            raise ContractViolationError("cannot annotate a node without ground truth", {"graph": self.name})
        mask = np.zeros(self.num_nodes, dtype=bool)
        mask[nodes] = True
        return dataclasses.replace(self, labeled_mask=mask)

    # ------------------------------------------------------------------
    # Accessors
    # ------------------------------------------------------------------

    @property
    def num_nodes(self) -> int:
        return self.adjacency.rows

    @property
    def num_features(self) -> int:
        return self.features.shape[1]

    @property
    def num_edges(self) -> int:
        """Undirected edge count."""
        return self.adjacency.nnz // 2

    def labeled_nodes(self) -> np.ndarray:
        return np.flatnonzero(self.labeled_mask)

    def unlabeled_nodes(self) -> np.ndarray:
        return np.flatnonzero(~self.labeled_mask)

    def edge_list(self) -> np.ndarray:
        """Undirected edges as (i, j) rows with i < j, sorted."""
        upper = sp.triu(self.adjacency.to_scipy(), k=1).tocoo()
        order = np.lexsort((upper.col, upper.row))
        return np.column_stack([upper.row[order], upper.col[order]]).astype(np.int64)


def symmetric_adjacency(num_nodes: int, edges: np.ndarray) -> SparseCsr:
    """0/1 symmetric adjacency: duplicates collapsed, self-loops dropped."""
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    edges = edges[edges[:, 0] != edges[:, 1]]
    rows = np.concatenate([edges[:, 0], edges[:, 1]])
    cols = np.concatenate([edges[:, 1], edges[:, 0]])
    matrix = sp.coo_matrix((np.ones(rows.size), (rows, cols)), shape=(num_nodes, num_nodes)).tocsr()
    matrix.sum_duplicates()
    matrix.data[:] = 1.0
    return from_scipy(matrix)


def degrees(g: Graph) -> np.ndarray:
    """Neighbor counts on the raw adjacency (no self-loops)."""
    return np.diff(g.adjacency.indptr).astype(np.int64)


def clamped_degrees(g: Graph) -> np.ndarray:
    """Degrees with isolated nodes counted as degree one, for reciprocal weights."""
    return np.maximum(degrees(g), 1)


def permute_graph(g: Graph, perm: Sequence[int]) -> Graph:
    """
    Relabel nodes so that old node ``i`` becomes ``perm[i]``.

    Adjacency, features, labels and mask move together.
    """
    perm = np.asarray(perm, dtype=np.int64)
    if perm.shape != (g.num_nodes,) or not np.array_equal(np.sort(perm), np.arange(g.num_nodes)):
        raise ContractViolationError("perm must be a permutation of the node ids", {"graph": g.name})
    inverse = np.argsort(perm)
    coo = g.adjacency.to_scipy().tocoo()
    moved = sp.coo_matrix((coo.data, (perm[coo.row], perm[coo.col])), shape=coo.shape)
    return Graph(
        adjacency=from_scipy(moved),
        features=g.features[inverse],
        labels=g.labels[inverse],
        labeled_mask=g.labeled_mask[inverse],
        num_classes=g.num_classes,
        name=g.name,
    )


__all__ = [
    "UNLABELED",
    "Graph",
    "symmetric_adjacency",
    "degrees",
    "clamped_degrees",
    "permute_graph",
]
