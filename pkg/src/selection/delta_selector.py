#!/usr/bin/env python3
"""
DELTA Node Selection
====================

One-shot ranking of target nodes for annotation:

1. consistency delving: nodes whose edge- and path-subnetwork logits are
   farther apart than gamma (Euclidean) become candidates
2. topological uncertainty U: entropy of the softmax of degree-weighted K-hop
   aggregated logits, summed over both subnetworks
3. domain discrepancy D: degree-weighted feature distance to every labeled
   source node, divided by the number of labeled source nodes
4. composite I = U + D; top-k by descending I, ties by ascending node id

When fewer than k candidates pass the threshold, the remaining slots are
filled by ranking all other unlabeled nodes with the same score.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.spatial.distance import cdist

from src.graph.graph_model import Graph, clamped_degrees, degrees
from src.graph.khop import khop
from src.numerics.ops import row_entropy
from src.subnet.training import DualLogits
from src.utils.error_handling import ConfigurationError, ContractViolationError, SelectionError
from src.utils.logging_config import get_component_logger, get_event_logger

logger = get_component_logger("selection.delta")


class ScoringMode(str, Enum):
    COMPOSITE = "composite"
    UNCERTAINTY_ONLY = "uncertainty_only"
    DISCREPANCY_ONLY = "discrepancy_only"


@dataclass
class SelectConfig:
    """
    Attributes:
        gamma: Consistency threshold (strict ``>``)
        hops: K-hop radius for the uncertainty aggregation
        budget: Number of target nodes to annotate (k)
        normalize: Min-max normalize U and D within each scored set before summing
        scoring: Which terms form the composite score
    """

    gamma: float = 0.3
    hops: int = 2
    budget: int = 25
    normalize: bool = False
    scoring: str = ScoringMode.COMPOSITE.value

    def validate(self) -> "SelectConfig":
        if self.budget < 1:
            raise ConfigurationError("budget must be at least 1", {"budget": self.budget})
        if self.hops < 0:
            raise ConfigurationError("hops must be nonnegative", {"hops": self.hops})
        if self.gamma < 0:
            raise ConfigurationError("gamma must be nonnegative", {"gamma": self.gamma})
        try:
            ScoringMode(self.scoring)
        except ValueError:
            raise ConfigurationError(
                "unknown scoring mode", {"scoring": self.scoring, "known": [m.value for m in ScoringMode]}
            ) from None
        return self


@dataclass(frozen=True, eq=False)
class CandidateSet:
    """Candidate node ids (sorted) and the inconsistency distance of every node."""

    nodes: np.ndarray
    distances: np.ndarray
    gamma: float

    def __len__(self) -> int:
        return int(self.nodes.size)


@dataclass
class ScoreTable:
    """
    Per-node scores; ``origin`` is ``candidate`` for nodes from the consistency
    threshold and ``fallback`` for nodes scored to fill the budget.
    """

    nodes: np.ndarray
    uncertainty: np.ndarray
    discrepancy: np.ndarray
    composite: np.ndarray
    origin: List[str]
    provenance: Dict[str, str] = field(default_factory=dict)

    def __len__(self) -> int:
        return int(self.nodes.size)

    def rows(self) -> List[Dict]:
        return [
            {
                "node": int(node),
                "uncertainty": float(u),
                "discrepancy": float(d),
                "composite": float(i),
                "origin": origin,
            }
            for node, u, d, i, origin in zip(self.nodes, self.uncertainty, self.discrepancy, self.composite, self.origin)
        ]


@dataclass
class SelectionResult:
    selected: np.ndarray
    table: ScoreTable
    candidates: CandidateSet
    config: SelectConfig


# =============================================================================
# Scoring terms
# =============================================================================

def inconsistency(dual: DualLogits) -> np.ndarray:
    """Euclidean distance between the two logit rows of every node."""
    return np.linalg.norm(dual.edge - dual.path, axis=1)


def candidates(distances: np.ndarray, gamma: float, unlabeled_mask: np.ndarray) -> CandidateSet:
    if gamma < 0:
        raise ContractViolationError("gamma must be nonnegative", {"gamma": gamma})
    distances = np.asarray(distances, dtype=np.float64)
    unlabeled_mask = np.asarray(unlabeled_mask, dtype=bool)
    if distances.shape != unlabeled_mask.shape:
        raise ContractViolationError("distance and mask lengths differ", {"distances": distances.shape})
    return CandidateSet(np.flatnonzero((distances > gamma) & unlabeled_mask), distances, float(gamma))


def khop_weight_matrix(g: Graph, centers: Sequence[int], hops: int) -> sp.csr_matrix:
    """
    Row r holds 1 / max(d_m, 1) at every member m of the K-hop subgraph of
    ``centers[r]`` (center included), so ``W @ logits`` gives the weighted
    K-hop logits of all centers at once.
    """
    weights = 1.0 / clamped_degrees(g)
    members = [khop(g, int(center), hops).members for center in centers]
    indptr = np.concatenate([[0], np.cumsum([m.size for m in members])]).astype(np.int64)
    indices = np.concatenate(members) if members else np.zeros(0, dtype=np.int64)
    return sp.csr_matrix((weights[indices], indices, indptr), shape=(len(members), g.num_nodes))


def weighted_khop_logits(g: Graph, logits: np.ndarray, center: int, hops: int) -> np.ndarray:
    """Degree-weighted sum of the logits of every node within ``hops`` of ``center``."""
    members = khop(g, center, hops).members
    weights = 1.0 / clamped_degrees(g)[members]
    return weights @ np.asarray(logits)[members]


def topo_uncertainty(g: Graph, dual: DualLogits, nodes: Sequence[int], hops: int) -> np.ndarray:
    """U_j = H(softmax(s_edge_hat_j)) + H(softmax(s_path_hat_j)) in nats."""
    nodes = np.asarray(nodes, dtype=np.int64)
    if nodes.size == 0:
        return np.zeros(0)
    if dual.num_nodes != g.num_nodes:
        raise ContractViolationError("logits do not cover the target graph", {"logits": dual.num_nodes, "nodes": g.num_nodes})
    weight_matrix = khop_weight_matrix(g, nodes, hops)
    return row_entropy(weight_matrix @ dual.edge) + row_entropy(weight_matrix @ dual.path)


def domain_discrepancy(source: Graph, target: Graph, nodes: Sequence[int]) -> np.ndarray:
    """D_j = sum_i d_i * ||x_j - x_i|| / |S| over labeled source nodes i."""
    labeled = source.labeled_nodes()
    if labeled.size == 0:
        raise SelectionError("domain discrepancy needs labeled source nodes", {"graph": source.name})
    if source.num_features != target.num_features:
        raise ContractViolationError(
            "source and target feature widths differ",
            {"source": source.num_features, "target": target.num_features},
        )
    nodes = np.asarray(nodes, dtype=np.int64)
    if nodes.size == 0:
        return np.zeros(0)
    distances = cdist(target.features[nodes], source.features[labeled])
    return distances @ degrees(source)[labeled].astype(np.float64) / labeled.size


def _min_max(values: np.ndarray) -> np.ndarray:
    if values.size == 0:
        return values
    span = values.max() - values.min()
    if span == 0:
        return np.zeros_like(values)
    return (values - values.min()) / span


def composite_scores(uncertainty: np.ndarray, discrepancy: np.ndarray, mode: ScoringMode, normalize: bool) -> np.ndarray:
    if normalize:
        uncertainty, discrepancy = _min_max(uncertainty), _min_max(discrepancy)
    if mode == ScoringMode.UNCERTAINTY_ONLY:
        return uncertainty.copy()
    if mode == ScoringMode.DISCREPANCY_ONLY:
        return discrepancy.copy()
    return uncertainty + discrepancy


def rank_descending(nodes: np.ndarray, scores: np.ndarray) -> np.ndarray:
    """Node ids by descending score, ties broken by ascending id."""
    order = np.lexsort((nodes, -scores))
    return nodes[order]


# =============================================================================
# Selection
# =============================================================================

def _score(source: Graph, target: Graph, dual: DualLogits, nodes: np.ndarray, cfg: SelectConfig):
    u = topo_uncertainty(target, dual, nodes, cfg.hops)
    d = domain_discrepancy(source, target, nodes)
    return u, d, composite_scores(u, d, ScoringMode(cfg.scoring), cfg.normalize)


def check_budget(target: Graph, budget: int) -> np.ndarray:
    """Unlabeled target pool; raises when the budget cannot be met."""
    pool = target.unlabeled_nodes()
    if budget > pool.size:
        raise SelectionError(
            f"budget k={budget} exceeds the unlabeled target pool of {pool.size} nodes",
            {"budget": budget, "pool": int(pool.size)},
            is_validation=True,
        )
    return pool


def select(source: Graph, target: Graph, dual: DualLogits, cfg: SelectConfig) -> SelectionResult:
    """
    Rank target nodes and return exactly ``cfg.budget`` distinct unlabeled ids.

    Raises:
        SelectionError: budget exceeds the unlabeled pool, or no labeled source nodes
    """
    cfg.validate()
    if dual.num_nodes != target.num_nodes:
        raise ContractViolationError("logits do not cover the target graph", {"logits": dual.num_nodes, "nodes": target.num_nodes})
    pool = check_budget(target, cfg.budget)
    events = get_event_logger("selection.delta", budget=cfg.budget, gamma=cfg.gamma, hops=cfg.hops)

    cand = candidates(inconsistency(dual), cfg.gamma, ~target.labeled_mask)
    events.info("candidates", count=len(cand), pool=int(pool.size))

    u, d, scores = _score(source, target, dual, cand.nodes, cfg)
    selected = rank_descending(cand.nodes, scores)[: cfg.budget]
    table_nodes, table_u, table_d, table_i = [cand.nodes], [u], [d], [scores]
    origin = ["candidate"] * len(cand)

    shortfall = cfg.budget - selected.size
    if shortfall > 0:
        rest = np.setdiff1d(pool, cand.nodes)
        fu, fd, fscores = _score(source, target, dual, rest, cfg)
        selected = np.concatenate([selected, rank_descending(rest, fscores)[:shortfall]])
        table_nodes.append(rest)
        table_u.append(fu)
        table_d.append(fd)
        table_i.append(fscores)
        origin += ["fallback"] * rest.size
        events.info("fallback", shortfall=shortfall, scored=int(rest.size))

    table = ScoreTable(
        nodes=np.concatenate(table_nodes),
        uncertainty=np.concatenate(table_u),
        discrepancy=np.concatenate(table_d),
        composite=np.concatenate(table_i),
        origin=origin,
        provenance={
            "uncertainty": f"entropy of softmax of degree-weighted {cfg.hops}-hop logits, edge + path",
            "discrepancy": "sum over labeled source nodes of degree * feature distance, divided by their count",
            "composite": f"{cfg.scoring}{' (min-max normalized)' if cfg.normalize else ''}",
        },
    )
    events.info("selected", count=int(selected.size))
    return SelectionResult(selected.astype(np.int64), table, cand, cfg)


__all__ = [
    "ScoringMode",
    "SelectConfig",
    "CandidateSet",
    "ScoreTable",
    "SelectionResult",
    "inconsistency",
    "candidates",
    "khop_weight_matrix",
    "weighted_khop_logits",
    "topo_uncertainty",
    "domain_discrepancy",
    "composite_scores",
    "rank_descending",
    "check_budget",
    "select",
]
