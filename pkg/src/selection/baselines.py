#!/usr/bin/env python3
"""
Baseline Selectors
==================

Reference strategies for the same annotation budget:

- random: seeded uniform sample without replacement
- degree: highest degree first
- uncertainty: highest entropy of the edge subnetwork's softmax
- density: k-means on edge-subnetwork embeddings, nodes closest to their
  centroid first

All selectors draw from unlabeled target nodes only and break ties by
ascending node id.
"""

from enum import Enum
from typing import Optional

import numpy as np
from sklearn.cluster import KMeans

from src.graph.graph_model import Graph, degrees
from src.numerics.ops import row_entropy
from src.selection.delta_selector import check_budget, rank_descending
from src.utils.error_handling import ContractViolationError
from src.utils.logging_config import get_component_logger

logger = get_component_logger("selection.baselines")

KMEANS_ITERATIONS = 50


class BaselineKind(str, Enum):
    RANDOM = "random"
    DEGREE = "degree"
    UNCERTAINTY = "uncertainty"
    DENSITY = "density"


def density_scores(embeddings: np.ndarray, num_clusters: int, seed: int) -> np.ndarray:
    """1 / (1 + distance to the assigned k-means centroid) for every row."""
    num_clusters = max(1, min(num_clusters, embeddings.shape[0]))
    model = KMeans(n_clusters=num_clusters, max_iter=KMEANS_ITERATIONS, n_init=1, random_state=seed)
    assignment = model.fit_predict(embeddings)
    distance = np.linalg.norm(embeddings - model.cluster_centers_[assignment], axis=1)
    return 1.0 / (1.0 + distance)


def _require(value: Optional[np.ndarray], name: str, kind: BaselineKind, target: Graph) -> np.ndarray:
    if value is None:
        raise ContractViolationError(f"{kind.value} baseline needs {name}")
    value = np.asarray(value, dtype=np.float64)
    if value.ndim != 2 or value.shape[0] != target.num_nodes:
        raise ContractViolationError(f"{name} must have one row per target node", {"shape": value.shape})
    return value


def baseline_select(
    kind,
    target: Graph,
    k: int,
    seed: int = 0,
    edge_logits: Optional[np.ndarray] = None,
    edge_embeddings: Optional[np.ndarray] = None,
) -> np.ndarray:
    """
    Args:
        kind: Baseline name or ``BaselineKind``
        target: Target graph; labeled target nodes are never selected
        k: Budget
        seed: Seed for the random sample and the k-means initialization
        edge_logits: Edge-subnetwork target logits (uncertainty)
        edge_embeddings: Edge-subnetwork target embeddings (density)

    Returns:
        k distinct unlabeled target node ids in selection order
    """
    kind = BaselineKind(kind)
    pool = check_budget(target, k)

    if kind == BaselineKind.RANDOM:
        selected = np.random.default_rng(seed).choice(pool, size=k, replace=False)
    elif kind == BaselineKind.DEGREE:
        selected = rank_descending(pool, degrees(target)[pool].astype(np.float64))[:k]
    elif kind == BaselineKind.UNCERTAINTY:
        logits = _require(edge_logits, "edge logits", kind, target)
        selected = rank_descending(pool, row_entropy(logits[pool]))[:k]
    else:
        embeddings = _require(edge_embeddings, "edge embeddings", kind, target)
        scores = density_scores(embeddings, target.num_classes, seed)
        selected = rank_descending(pool, scores[pool])[:k]

    logger.debug(f"🎯 {kind.value} baseline selected {k} of {pool.size} nodes")
    return np.asarray(selected, dtype=np.int64)


__all__ = ["BaselineKind", "KMEANS_ITERATIONS", "density_scores", "baseline_select"]
