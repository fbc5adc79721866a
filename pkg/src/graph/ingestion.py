#!/usr/bin/env python3
"""
Dataset Ingestion
=================

Reads and writes graphs in the four-file text format:

- ``<name>_edges.txt``     one edge per line, two whitespace-separated node ids,
                           ``#`` comment lines ignored
- ``<name>_features.csv``  comma-separated reals, row i = node i
- ``<name>_labels.txt``    one class index per line, ``-1`` = unknown
- ``<name>_mask.txt``      one ``0``/``1`` per line, 1 = labeled

Also carries the published summary statistics of the citation benchmarks so
supplied fixtures can be checked against them.
"""

import io
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Union

import numpy as np

from src.graph.graph_model import UNLABELED, Graph, symmetric_adjacency
from src.utils.atomic_io import atomic_write_text
from src.utils.error_handling import GraphFormatError
from src.utils.logging_config import get_component_logger

logger = get_component_logger("graph.ingestion")

PathLike = Union[str, Path]


@dataclass(frozen=True)
class DatasetStatistics:
    """Summary statistics; average degree follows the published E / V convention."""

    nodes: int
    edges: int
    classes: int
    average_degree: float


REFERENCE_DATASETS: Dict[str, DatasetStatistics] = {
    "ACMv9": DatasetStatistics(9360, 15602, 5, 1.667),
    "Citationv1": DatasetStatistics(8935, 15113, 5, 1.691),
    "DBLPv7": DatasetStatistics(5484, 8130, 5, 1.482),
}


def summarize(g: Graph) -> DatasetStatistics:
    nodes = g.num_nodes
    return DatasetStatistics(
        nodes=nodes,
        edges=g.num_edges,
        classes=g.num_classes,
        average_degree=g.num_edges / nodes if nodes else 0.0,
    )


# =============================================================================
# Parsing
# =============================================================================

def _content_lines(path: Path):
    with open(path, "r", encoding="utf-8") as handle:
        for number, raw in enumerate(handle, start=1):
            line = raw.strip()
            if line and not line.startswith("#"):
                yield number, line


def _parse_int(token: str, path: Path, number: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise GraphFormatError(f"expected an integer, found '{token}'", {"file": str(path), "line": number}) from None


def read_edges(path: PathLike) -> np.ndarray:
    path = Path(path)
    pairs: List[List[int]] = []
    for number, line in _content_lines(path):
        tokens = line.split()
        if len(tokens) != 2:
            raise GraphFormatError("edge line must hold exactly two node ids", {"file": str(path), "line": number})
        pairs.append([_parse_int(tokens[0], path, number), _parse_int(tokens[1], path, number)])
    return np.array(pairs, dtype=np.int64).reshape(-1, 2)


def read_features(path: PathLike) -> np.ndarray:
    path = Path(path)
    text = "\n".join(line for _, line in _content_lines(path))
    if not text:
        raise GraphFormatError("feature file is empty", {"file": str(path)})
    try:
        features = np.loadtxt(io.StringIO(text), delimiter=",", ndmin=2, dtype=np.float64)
    except ValueError as exc:
        raise GraphFormatError(f"feature rows are not rectangular numeric CSV: {exc}", {"file": str(path)}) from exc
    if not np.all(np.isfinite(features)):
        raise GraphFormatError("features must be finite", {"file": str(path)})
    return features


def read_int_column(path: PathLike) -> np.ndarray:
    path = Path(path)
    return np.array([_parse_int(line, path, number) for number, line in _content_lines(path)], dtype=np.int64)


def load_graph(
    edge_path: PathLike,
    feature_path: PathLike,
    label_path: PathLike,
    mask_path: PathLike,
    num_classes: Optional[int] = None,
    name: Optional[str] = None,
) -> Graph:
    """
    Load a graph from the four-file format.

    Edges are symmetrized, duplicates collapsed and self-loops dropped. The
    class count defaults to the largest label plus one.

    Raises:
        GraphFormatError: out-of-range node id, ragged feature rows, label or
            mask length mismatch, bad mask values, labeled node without class
    """
    features = read_features(feature_path)
    num_nodes = features.shape[0]
    edges = read_edges(edge_path)
    labels = read_int_column(label_path)
    mask_values = read_int_column(mask_path)
    graph_name = name or Path(edge_path).stem.replace("_edges", "")
    context = {"graph": graph_name, "num_nodes": num_nodes}

    if edges.size and (edges.min() < 0 or edges.max() >= num_nodes):
        bad = int(edges.max()) if edges.max() >= num_nodes else int(edges.min())
        raise GraphFormatError("edge references an out-of-range node id", {**context, "node": bad})
    if labels.shape != (num_nodes,):
        raise GraphFormatError("label count does not match node count", {**context, "labels": labels.size})
    if mask_values.shape != (num_nodes,):
        raise GraphFormatError("mask count does not match node count", {**context, "mask": mask_values.size})
    if not np.all(np.isin(mask_values, (0, 1))):
        raise GraphFormatError("mask entries must be 0 or 1", context)
    mask = mask_values.astype(bool)
    if np.any(labels[mask] == UNLABELED):
        raise GraphFormatError("a labeled node carries label -1", {**context, "node": int(np.flatnonzero(mask & (labels == UNLABELED))[0])})

    if num_classes is None:
        num_classes = max(int(labels.max(initial=UNLABELED)) + 1, 1)
    if labels.min(initial=UNLABELED) < UNLABELED or labels.max(initial=UNLABELED) >= num_classes:
        raise GraphFormatError("label outside the class range", {**context, "num_classes": num_classes})

    graph = Graph(symmetric_adjacency(num_nodes, edges), features, labels, mask, num_classes, graph_name)
    logger.info(f"📥 Loaded {graph_name}: {graph.num_nodes} nodes, {graph.num_edges} edges, {num_classes} classes")
    return graph


def dataset_paths(directory: PathLike, name: str) -> Dict[str, Path]:
    directory = Path(directory)
    return {
        "edges": directory / f"{name}_edges.txt",
        "features": directory / f"{name}_features.csv",
        "labels": directory / f"{name}_labels.txt",
        "mask": directory / f"{name}_mask.txt",
    }


def load_dataset_dir(directory: PathLike, name: str, num_classes: Optional[int] = None) -> Graph:
    paths = dataset_paths(directory, name)
    missing = [str(path) for path in paths.values() if not path.exists()]
    if missing:
        raise GraphFormatError("dataset files missing", {"missing": missing})
    return load_graph(paths["edges"], paths["features"], paths["labels"], paths["mask"], num_classes, name)


def write_graph(g: Graph, directory: PathLike, name: str) -> Dict[str, Path]:
    """Write ``g`` in the four-file format; each file is written atomically."""
    paths = dataset_paths(directory, name)
    edges = g.edge_list()
    edge_lines = [f"# {name}: {g.num_nodes} nodes, {g.num_edges} undirected edges"]
    edge_lines += [f"{i} {j}" for i, j in edges]
    atomic_write_text(paths["edges"], "\n".join(edge_lines) + "\n")

    buffer = io.StringIO()
    np.savetxt(buffer, g.features, delimiter=",", fmt="%.17g")
    atomic_write_text(paths["features"], buffer.getvalue())
    atomic_write_text(paths["labels"], "".join(f"{label}\n" for label in g.labels))
    atomic_write_text(paths["mask"], "".join(f"{int(flag)}\n" for flag in g.labeled_mask))
    logger.info(f"💾 Wrote {name} to {Path(directory)}")
    return paths


__all__ = [
    "DatasetStatistics",
    "REFERENCE_DATASETS",
    "summarize",
    "read_edges",
    "read_features",
    "read_int_column",
    "load_graph",
    "dataset_paths",
    "load_dataset_dir",
    "write_graph",
]
