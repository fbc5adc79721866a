#!/usr/bin/env python3
"""
K-hop Subgraph Extraction
=========================

Level-synchronous breadth-first search truncated at K hops.
"""

from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from src.graph.graph_model import Graph
from src.utils.error_handling import ContractViolationError


@dataclass(frozen=True, eq=False)
class KHopSubgraph:
    """Nodes within ``radius`` hops of ``center`` (sorted, center included)."""

    center: int
    radius: int
    members: np.ndarray

    def __contains__(self, node: int) -> bool:
        position = np.searchsorted(self.members, node)
        return bool(position < self.members.size and self.members[position] == node)

    def __len__(self) -> int:
        return int(self.members.size)


def khop(g: Graph, center: int, hops: int) -> KHopSubgraph:
    """
    Args:
        g: Graph to search
        center: Start node
        hops: Radius K (0 returns just the center)
    """
    if not 0 <= center < g.num_nodes:
        raise ContractViolationError("center node out of range", {"center": center, "num_nodes": g.num_nodes})
    if hops < 0:
        raise ContractViolationError("hop count must be nonnegative", {"hops": hops})

    indptr, indices = g.adjacency.indptr, g.adjacency.indices
    visited = np.zeros(g.num_nodes, dtype=bool)
    visited[center] = True
    frontier = np.array([center], dtype=np.int64)
    for _ in range(hops):
        if frontier.size == 0:
            break
        neighbors = np.concatenate([indices[indptr[node]:indptr[node + 1]] for node in frontier])
        neighbors = np.unique(neighbors)
        frontier = neighbors[~visited[neighbors]]
        visited[frontier] = True
    return KHopSubgraph(center, hops, np.flatnonzero(visited))


def khop_many(g: Graph, centers: Sequence[int], hops: int) -> List[KHopSubgraph]:
    return [khop(g, int(center), hops) for center in centers]


__all__ = ["KHopSubgraph", "khop", "khop_many"]
