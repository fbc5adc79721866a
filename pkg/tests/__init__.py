"""
DELTA Graph Active Selection - Test Package

Test Categories:
- Unit Tests: one module per subpackage (test_numerics.py, test_graph_core.py,
  test_subnet.py, test_selection.py, test_harness.py)
- Integration Tests: end-to-end runs and the command line (test_integration.py)
- Performance Tests: timing and scaling (test_performance.py)

Oracles (dense products, all-pairs shortest paths, explicit sums, finite
differences) live here and in the test modules, never in src/.

Usage:
    # Run the default suite (desk-scale acceptance experiments deselected)
    pytest

    # Run specific test categories
    pytest -m unit
    pytest -m property
    pytest -m "integration and not slow"

    # Run the acceptance experiments
    pytest -m slow
"""

import shutil
import tempfile
import unittest
from pathlib import Path
from typing import Callable, Dict, Sequence

import numpy as np

from src.graph.graph_model import Graph

__version__ = "1.0.0"

TEST_MARKERS = {
    "unit": "Unit tests for individual components",
    "integration": "Integration tests for complete workflows",
    "performance": "Timing and scaling tests",
    "slow": "Desk-scale acceptance experiments",
    "property": "Property-based tests (hypothesis)",
}


def get_test_markers() -> Dict[str, str]:
    return TEST_MARKERS.copy()


class TestConstants:
    """Constants used across test modules."""

    __test__ = False

    # Tolerances
    GRADIENT_RTOL = 1e-4
    FD_STEP = 1e-6
    ORACLE_ATOL = 1e-9

    # Desk-scale values mirrored from config/delta_config.yaml
    DESK_NODES_PER_CLASS = 120
    DESK_NUM_CLASSES = 5
    DESK_BUDGET = 25

    # Small values for fast training in unit and integration tests
    TINY_HIDDEN = 8
    TINY_OUT = 4
    TINY_EPOCHS = 5
    TINY_NODES_PER_CLASS = 12
    TINY_FEATURES = 6

    PROPERTY_EXAMPLES = 250
    BENCH_SIZES = (200, 400, 800)
    MAX_GROWTH_PER_DOUBLING = 6.0


class TestUtilities:
    """Graph builders and numerical oracles shared by the test modules."""

    __test__ = False

    @staticmethod
    def path_graph(num_nodes: int, num_features: int = 1, name: str = "path") -> Graph:
        edges = np.array([[i, i + 1] for i in range(num_nodes - 1)], dtype=np.int64).reshape(-1, 2)
        return Graph.from_edges(num_nodes, edges, np.ones((num_nodes, num_features)), name=name)

    @staticmethod
    def random_graph(num_nodes: int, edge_probability: float, seed: int, num_features: int = 3,
                     num_classes: int = 2, labeled_fraction: float = 0.0, name: str = "random") -> Graph:
        """Erdos-Renyi style graph with random features, labels and mask."""
        rng = np.random.default_rng(seed)
        upper = np.triu(rng.random((num_nodes, num_nodes)) < edge_probability, k=1)
        edges = np.argwhere(upper)
        features = rng.standard_normal((num_nodes, num_features))
        labels = rng.integers(0, num_classes, size=num_nodes)
        mask = rng.random(num_nodes) < labeled_fraction
        return Graph.from_edges(num_nodes, edges, features, labels, mask, num_classes, name=name)

    @staticmethod
    def six_node_pair(seed: int = 0, num_features: int = 3, num_classes: int = 2):
        """Source/target pair of 6-node graphs; three labeled source nodes."""
        rng = np.random.default_rng(seed)
        source_edges = np.array([[0, 1], [1, 2], [2, 3], [3, 4], [4, 5], [0, 2], [3, 5]])
        target_edges = np.array([[0, 1], [1, 2], [2, 3], [3, 4], [4, 5], [1, 4]])
        labels = np.array([0, 0, 1, 1, 0, 1])
        source_mask = np.array([True, False, True, True, False, False])
        source = Graph.from_edges(6, source_edges, rng.standard_normal((6, num_features)), labels,
                                  source_mask, num_classes, name="source")
        target = Graph.from_edges(6, target_edges, rng.standard_normal((6, num_features)) + 0.5, labels,
                                  None, num_classes, name="target")
        return source, target

    @staticmethod
    def dense_adjacency(g: Graph) -> np.ndarray:
        return g.adjacency.to_scipy().toarray()

    @staticmethod
    def all_pairs_hops(g: Graph) -> np.ndarray:
        """Floyd-Warshall hop distances (inf when unreachable)."""
        n = g.num_nodes
        dist = np.full((n, n), np.inf)
        np.fill_diagonal(dist, 0.0)
        dist[TestUtilities.dense_adjacency(g) > 0] = 1.0
        for k in range(n):
            dist = np.minimum(dist, dist[:, k:k + 1] + dist[k:k + 1, :])
        return dist

    @staticmethod
    def central_difference(loss: Callable[[], float], array: np.ndarray, step: float = 1e-6) -> np.ndarray:
        """Numerical gradient of ``loss`` with respect to ``array`` (perturbed in place)."""
        grad = np.zeros_like(array)
        for index in np.ndindex(array.shape):
            original = array[index]
            array[index] = original + step
            plus = loss()
            array[index] = original - step
            minus = loss()
            array[index] = original
            grad[index] = (plus - minus) / (2.0 * step)
        return grad

    @staticmethod
    def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
        scale = max(np.max(np.abs(analytic)), np.max(np.abs(numeric)), 1e-8)
        return float(np.max(np.abs(analytic - numeric)) / scale)

    @staticmethod
    def softmax_entropy(vector: Sequence[float]) -> float:
        """Entropy of softmax(vector), computed one element at a time."""
        values = [float(v) for v in vector]
        peak = max(values)
        exps = [np.exp(v - peak) for v in values]
        norm = sum(exps)
        return -sum((e / norm) * np.log(e / norm) for e in exps if e > 0)


class DeltaTestCase(unittest.TestCase):
    """Base test case: a seeded generator and a scratch directory per test."""

    seed = 1234

    def setUp(self):
        self.rng = np.random.default_rng(self.seed)
        self.temp_dir = Path(tempfile.mkdtemp(prefix="delta_unit_"))

    def tearDown(self):
        shutil.rmtree(self.temp_dir, ignore_errors=True)

    def assertAllClose(self, actual, expected, atol: float = 1e-12, rtol: float = 1e-10):
        np.testing.assert_allclose(actual, expected, atol=atol, rtol=rtol)

    def assertGradientMatches(self, analytic: np.ndarray, numeric: np.ndarray,
                              rtol: float = TestConstants.GRADIENT_RTOL):
        error = TestUtilities.relative_error(analytic, numeric)
        self.assertLess(error, rtol, f"relative gradient error {error:.2e}")


__all__ = ["TEST_MARKERS", "get_test_markers", "TestConstants", "TestUtilities", "DeltaTestCase"]
