"""
Graph Core
==========

Graph data model, degree statistics, propagation operators, K-hop
extraction, dataset ingestion and the synthetic shifted-pair generator.
"""

from src.graph.graph_model import Graph, clamped_degrees, degrees, permute_graph
from src.graph.khop import KHopSubgraph, khop
from src.graph.operators import PathPowers, normalized_gcn_operator, pan_operator, path_powers
from src.graph.ingestion import (
    REFERENCE_DATASETS,
    DatasetStatistics,
    load_dataset_dir,
    load_graph,
    summarize,
    write_graph,
)
from src.graph.synthetic import ShiftedPairParams, generate_shifted_pair

__all__ = [
    "Graph",
    "degrees",
    "clamped_degrees",
    "permute_graph",
    "KHopSubgraph",
    "khop",
    "PathPowers",
    "normalized_gcn_operator",
    "pan_operator",
    "path_powers",
    "REFERENCE_DATASETS",
    "DatasetStatistics",
    "load_dataset_dir",
    "load_graph",
    "summarize",
    "write_graph",
    "ShiftedPairParams",
    "generate_shifted_pair",
]
