#!/usr/bin/env python3
"""
Uncertainty Scoring Benchmark
=============================

Times the degree-weighted K-hop uncertainty over every node of random graphs
whose edge count grows proportionally with the node count, to check that the
cost grows roughly linearly in V for bounded degree.
"""

from dataclasses import asdict, dataclass
from typing import Dict, List, Sequence

import networkx as nx
import numpy as np
from tqdm import tqdm

from src.graph.graph_model import Graph
from src.selection.delta_selector import topo_uncertainty
from src.subnet.training import DualLogits
from src.utils.logging_config import PerformanceLogger, get_component_logger

logger = get_component_logger("harness.benchmark")

DEFAULT_SIZES = (200, 400, 800)


@dataclass
class BenchResult:
    num_nodes: int
    num_edges: int
    seconds: float


def benchmark_graph(num_nodes: int, edges_per_node: float, num_features: int, seed: int) -> Graph:
    sampled = nx.gnm_random_graph(num_nodes, int(round(edges_per_node * num_nodes)), seed=seed)
    features = np.random.default_rng(seed).standard_normal((num_nodes, num_features))
    return Graph.from_edges(num_nodes, np.array(list(sampled.edges()), dtype=np.int64), features, name=f"bench-{num_nodes}")


def bench_uncertainty(
    sizes: Sequence[int] = DEFAULT_SIZES,
    edges_per_node: float = 2.0,
    num_classes: int = 5,
    hops: int = 2,
    repeats: int = 3,
    seed: int = 0,
) -> List[BenchResult]:
    """Best-of-``repeats`` wall-clock of scoring all nodes, per graph size."""
    timer = PerformanceLogger("harness.benchmark")
    results: List[BenchResult] = []
    for num_nodes in tqdm(sizes, desc="bench-uncertainty", leave=False, disable=None):
        g = benchmark_graph(num_nodes, edges_per_node, 4, seed)
        rng = np.random.default_rng(seed + num_nodes)
        dual = DualLogits(rng.standard_normal((num_nodes, num_classes)), rng.standard_normal((num_nodes, num_classes)))
        nodes = np.arange(num_nodes)
        best = float("inf")
        for repeat in range(repeats):
            timer.start_timer(f"uncertainty.{num_nodes}.{repeat}")
            topo_uncertainty(g, dual, nodes, hops)
            best = min(best, timer.end_timer(f"uncertainty.{num_nodes}.{repeat}"))
        results.append(BenchResult(num_nodes, g.num_edges, best))
        logger.info(f"⏱️ V={num_nodes} E={g.num_edges}: {best:.4f}s")
    timer.log_memory_usage("bench-uncertainty")
    return results


def growth_ratios(results: Sequence[BenchResult]) -> List[float]:
    return [later.seconds / max(earlier.seconds, 1e-9) for earlier, later in zip(results, results[1:])]


def results_document(results: Sequence[BenchResult]) -> Dict:
    return {"results": [asdict(result) for result in results], "growth_ratios": growth_ratios(results)}


__all__ = ["DEFAULT_SIZES", "BenchResult", "benchmark_graph", "bench_uncertainty", "growth_ratios", "results_document"]
