#!/usr/bin/env python3
"""
Selection Tests
===============

Consistency candidates, topological uncertainty, domain discrepancy, the
composite ranking, baselines and the selection report. Oracles enumerate
K-hop sets through all-pairs shortest paths and sum explicitly.
"""

import json
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from src.graph.graph_model import Graph, degrees, permute_graph
from src.harness.config_loader import load_experiment_spec
from src.harness.experiment import build_graphs
from src.selection.baselines import BaselineKind, baseline_select, density_scores
from src.selection.delta_selector import (
    ScoringMode,
    SelectConfig,
    candidates,
    check_budget,
    composite_scores,
    domain_discrepancy,
    inconsistency,
    khop_weight_matrix,
    rank_descending,
    select,
    topo_uncertainty,
    weighted_khop_logits,
)
from src.selection.selection_report import read_selected_nodes, selection_report, write_selection_report
from src.subnet.training import DualLogits
from src.utils.error_handling import ConfigurationError, ContractViolationError, SelectionError
from tests import DeltaTestCase, TestConstants, TestUtilities

CONFIG_FILE = Path(__file__).resolve().parent.parent / "config" / "delta_config.yaml"


# =============================================================================
# Oracles and fixtures
# =============================================================================

def oracle_khop_logits(g: Graph, logits: np.ndarray, center: int, hops: int) -> np.ndarray:
    hop_distance = TestUtilities.all_pairs_hops(g)[center]
    deg = degrees(g)
    total = np.zeros(logits.shape[1])
    for m in range(g.num_nodes):
        if hop_distance[m] <= hops:
            total += logits[m] / max(deg[m], 1)
    return total


def oracle_uncertainty(g: Graph, dual: DualLogits, center: int, hops: int) -> float:
    return (TestUtilities.softmax_entropy(oracle_khop_logits(g, dual.edge, center, hops))
            + TestUtilities.softmax_entropy(oracle_khop_logits(g, dual.path, center, hops)))


def oracle_discrepancy(source: Graph, target: Graph, j: int) -> float:
    deg = degrees(source)
    labeled = [i for i in range(source.num_nodes) if source.labeled_mask[i]]
    total = 0.0
    for i in labeled:
        total += deg[i] * math.sqrt(sum((a - b) ** 2 for a, b in zip(target.features[j], source.features[i])))
    return total / len(labeled)


def scored_fixture(seed: int, num_target: int = 20, num_classes: int = 4, labeled_source: int = 7):
    source = TestUtilities.random_graph(15, 0.3, seed=seed, num_classes=num_classes)
    source = source.with_annotations(np.arange(labeled_source))
    target = TestUtilities.random_graph(num_target, 0.2, seed=seed + 100, num_classes=num_classes)
    rng = np.random.default_rng(seed)
    dual = DualLogits(rng.normal(scale=2.0, size=(num_target, num_classes)),
                      rng.normal(scale=2.0, size=(num_target, num_classes)))
    return source, target, dual


class TestInconsistencyAndCandidates(DeltaTestCase):
    """Cross-subnetwork distance and the gamma threshold"""

    def test_identical_rows(self):
        logits = self.rng.normal(size=(4, 3))
        np.testing.assert_array_equal(inconsistency(DualLogits(logits, logits.copy())), np.zeros(4))

    def test_unit_vectors(self):
        dual = DualLogits(np.array([[1.0, 0, 0, 0, 0]]), np.array([[0.0, 1, 0, 0, 0]]))
        self.assertAlmostEqual(float(inconsistency(dual)[0]), math.sqrt(2.0), places=15)

    def test_matches_row_norm_oracle(self):
        edge, path = self.rng.normal(size=(10, 5)), self.rng.normal(size=(10, 5))
        expected = [math.sqrt(sum((a - b) ** 2 for a, b in zip(edge[j], path[j]))) for j in range(10)]
        self.assertAllClose(inconsistency(DualLogits(edge, path)), expected)

    def test_threshold_is_strict(self):
        cand = candidates(np.array([0.1, 0.3, 0.31, 2.0]), 0.3, np.ones(4, dtype=bool))
        np.testing.assert_array_equal(cand.nodes, [2, 3])

    def test_zero_threshold_and_maximum_threshold(self):
        distances = np.array([0.5, 0.2, 0.9])
        unlabeled = np.array([True, False, True])
        np.testing.assert_array_equal(candidates(distances, 0.0, unlabeled).nodes, [0, 2])
        self.assertEqual(len(candidates(distances, 0.9, unlabeled)), 0)

    def test_negative_gamma(self):
        with self.assertRaises(ContractViolationError):
            candidates(np.zeros(2), -0.1, np.ones(2, dtype=bool))

    def test_dual_logits_shapes(self):
        with self.assertRaises(ContractViolationError):
            DualLogits(np.zeros((3, 2)), np.zeros((3, 3)))


class TestTopologicalUncertainty(DeltaTestCase):
    """Degree-weighted K-hop logits and their entropy"""

    def test_path_center_with_constant_logits(self):
        g = TestUtilities.path_graph(3)
        v = np.array([0.2, -1.0, 3.0])
        logits = np.tile(v, (3, 1))
        self.assertAllClose(weighted_khop_logits(g, logits, 1, 1), 2.5 * v)

    def test_isolated_center_uses_clamped_degree(self):
        g = Graph.from_edges(3, np.array([[1, 2]]), np.zeros((3, 1)))
        logits = self.rng.normal(size=(3, 4))
        self.assertAllClose(weighted_khop_logits(g, logits, 0, 2), logits[0])

    def test_weight_matrix_matches_oracle_on_sbm(self):
        params_graph = TestUtilities.random_graph(24, 0.15, seed=17)
        logits = self.rng.normal(size=(24, 3))
        weights = khop_weight_matrix(params_graph, range(24), 2)
        batched = weights @ logits
        for center in range(24):
            expected = oracle_khop_logits(params_graph, logits, center, 2)
            self.assertAllClose(batched[center], expected)
            self.assertAllClose(weighted_khop_logits(params_graph, logits, center, 2), expected)

    def test_uniform_logits_reach_the_maximum(self):
        g = TestUtilities.random_graph(6, 0.4, seed=1)
        dual = DualLogits(np.zeros((6, 5)), np.zeros((6, 5)))
        self.assertAllClose(topo_uncertainty(g, dual, [0, 3], 2), np.full(2, 2.0 * math.log(5.0)))

    def test_peaked_logits_are_certain(self):
        g = Graph.from_edges(4, np.zeros((0, 2)), np.zeros((4, 1)))
        peaked = np.zeros((4, 5))
        peaked[:, 2] = 50.0
        u = topo_uncertainty(g, DualLogits(peaked, peaked.copy()), [0, 1, 2, 3], 2)
        self.assertTrue(np.all(u < 1e-6))

    def test_matches_scalar_entropy_oracle(self):
        source, target, dual = scored_fixture(seed=4)
        nodes = [0, 5, 11, 19]
        u = topo_uncertainty(target, dual, nodes, 2)
        for value, j in zip(u, nodes):
            self.assertAlmostEqual(float(value), oracle_uncertainty(target, dual, j, 2), places=9)

    def test_empty_node_list(self):
        _, target, dual = scored_fixture(seed=0)
        self.assertEqual(topo_uncertainty(target, dual, [], 2).size, 0)


class TestDomainDiscrepancy(DeltaTestCase):
    """Degree-weighted feature distance to labeled source nodes"""

    def test_single_source_node(self):
        source = Graph.from_edges(3, np.array([[0, 1], [0, 2]]), np.array([[0.0, 0.0], [9.0, 9.0], [9.0, 9.0]]),
                                  np.array([0, 1, 1]), np.array([True, False, False]), 2)
        target = Graph.from_edges(1, np.zeros((0, 2)), np.array([[3.0, 4.0]]), num_classes=2)
        self.assertAlmostEqual(float(domain_discrepancy(source, target, [0])[0]), 10.0, places=12)

    def test_identical_features(self):
        features = np.tile([1.5, -2.0], (4, 1))
        source = Graph.from_edges(4, np.array([[0, 1], [2, 3]]), features, np.zeros(4, dtype=int),
                                  np.array([True, True, True, False]), 1)
        target = Graph.from_edges(2, np.zeros((0, 2)), features[:2], num_classes=1)
        np.testing.assert_array_equal(domain_discrepancy(source, target, [0, 1]), [0.0, 0.0])

    def test_matches_double_loop_oracle(self):
        source, target, _ = scored_fixture(seed=9, labeled_source=7)
        self.assertEqual(source.labeled_nodes().size, 7)
        d = domain_discrepancy(source, target, range(20))
        for j in range(20):
            self.assertAlmostEqual(float(d[j]), oracle_discrepancy(source, target, j), places=9)

    def test_scaling_features_scales_discrepancy(self):
        source, target, _ = scored_fixture(seed=2)
        scaled_source = Graph(source.adjacency, 3.0 * source.features, source.labels, source.labeled_mask,
                              source.num_classes, source.name)
        scaled_target = Graph(target.adjacency, 3.0 * target.features, target.labels, target.labeled_mask,
                              target.num_classes, target.name)
        plain = domain_discrepancy(source, target, range(20))
        scaled = domain_discrepancy(scaled_source, scaled_target, range(20))
        np.testing.assert_allclose(scaled, 3.0 * plain, rtol=1e-12)
        np.testing.assert_array_equal(np.argsort(scaled), np.argsort(plain))

    def test_needs_labeled_source(self):
        source, target, _ = scored_fixture(seed=0)
        with self.assertRaises(SelectionError):
            domain_discrepancy(source.with_annotations([]), target, [0])

    def test_desk_scale_spread_leaves_room_for_uncertainty(self):
        spec = load_experiment_spec(CONFIG_FILE)
        for seed in range(3):
            source, target = build_graphs(spec, seed)
            d = domain_discrepancy(source, target, np.arange(target.num_nodes))
            self.assertLess(float(d.max() - d.min()), math.log(spec.dataset.synthetic.num_classes))


class TestSelect(DeltaTestCase):
    """Composite ranking and the budget"""

    def test_matches_exhaustive_sort(self):
        source, target, dual = scored_fixture(seed=6)
        distances = inconsistency(dual)
        gamma = float(np.median(distances))
        cfg = SelectConfig(gamma=gamma, hops=2, budget=5)
        result = select(source, target, dual, cfg)

        rows = []
        for j in range(20):
            if distances[j] > gamma:
                u, d = oracle_uncertainty(target, dual, j, 2), oracle_discrepancy(source, target, j)
                rows.append((-(u + d), j))
        expected = [j for _, j in sorted(rows)][:5]
        self.assertEqual(result.selected.tolist(), expected)
        self.assertTrue(all(origin == "candidate" for origin in result.table.origin))
        np.testing.assert_array_equal(result.table.composite, result.table.uncertainty + result.table.discrepancy)

    def test_budget_equal_to_candidates(self):
        source, target, dual = scored_fixture(seed=3)
        cand = candidates(inconsistency(dual), 2.0, np.ones(20, dtype=bool))
        result = select(source, target, dual, SelectConfig(gamma=2.0, budget=len(cand)))
        self.assertEqual(sorted(result.selected.tolist()), cand.nodes.tolist())
        scores = dict(zip(result.table.nodes.tolist(), result.table.composite.tolist()))
        ordered = [scores[j] for j in result.selected]
        self.assertEqual(ordered, sorted(ordered, reverse=True))

    def test_equal_scores_pick_lowest_ids(self):
        g = Graph.from_edges(8, np.zeros((0, 2)), np.zeros((8, 2)), np.zeros(8, dtype=int), None, 3)
        source = Graph.from_edges(2, np.array([[0, 1]]), np.ones((2, 2)), np.zeros(2, dtype=int),
                                  np.array([True, True]), 3)
        dual = DualLogits(np.zeros((8, 3)), np.ones((8, 3)))
        result = select(source, g, dual, SelectConfig(gamma=0.3, budget=3))
        self.assertEqual(result.selected.tolist(), [0, 1, 2])

    def test_fallback_fills_the_budget(self):
        source, target, dual = scored_fixture(seed=5)
        result = select(source, target, dual, SelectConfig(gamma=1e9, budget=4))
        self.assertEqual(len(result.candidates), 0)
        self.assertEqual(set(result.table.origin), {"fallback"})
        expected = rank_descending(result.table.nodes, result.table.composite)[:4]
        np.testing.assert_array_equal(result.selected, expected)

    def test_partial_fallback_keeps_candidates_first(self):
        source, target, dual = scored_fixture(seed=8)
        distances = inconsistency(dual)
        gamma = float(np.sort(distances)[-3])
        result = select(source, target, dual, SelectConfig(gamma=gamma, budget=6))
        self.assertEqual(len(result.candidates), 2)
        self.assertEqual(set(result.selected[:2].tolist()), set(result.candidates.nodes.tolist()))
        self.assertEqual(len(set(result.selected.tolist())), 6)

    def test_labeled_target_nodes_are_never_selected(self):
        source, target, dual = scored_fixture(seed=1)
        annotated = target.with_annotations([0, 1, 2, 3, 4])
        result = select(source, annotated, dual, SelectConfig(gamma=0.0, budget=15))
        self.assertFalse(set(result.selected.tolist()) & {0, 1, 2, 3, 4})

    def test_budget_exceeding_pool(self):
        source, target = TestUtilities.six_node_pair()
        with self.assertRaises(SelectionError) as caught:
            check_budget(target, 7)
        self.assertTrue(caught.exception.is_validation)
        self.assertEqual(caught.exception.context["pool"], 6)

    def test_scoring_modes(self):
        u, d = np.array([1.0, 3.0, 2.0]), np.array([10.0, 0.0, 5.0])
        np.testing.assert_array_equal(composite_scores(u, d, ScoringMode.COMPOSITE, False), [11.0, 3.0, 7.0])
        np.testing.assert_array_equal(composite_scores(u, d, ScoringMode.UNCERTAINTY_ONLY, False), u)
        np.testing.assert_array_equal(composite_scores(u, d, ScoringMode.DISCREPANCY_ONLY, False), d)
        self.assertAllClose(composite_scores(u, d, ScoringMode.COMPOSITE, True), [1.0, 1.0, 1.0])

    def test_normalized_scores_stay_in_unit_sum_range(self):
        source, target, dual = scored_fixture(seed=7)
        result = select(source, target, dual, SelectConfig(gamma=0.0, budget=5, normalize=True))
        self.assertTrue(np.all(result.table.composite >= 0.0))
        self.assertTrue(np.all(result.table.composite <= 2.0))

    def test_invalid_config(self):
        with self.assertRaises(ConfigurationError):
            SelectConfig(budget=0).validate()
        with self.assertRaises(ConfigurationError):
            SelectConfig(scoring="bogus").validate()

    def test_logits_must_cover_target(self):
        source, target, _ = scored_fixture(seed=0)
        with self.assertRaises(ContractViolationError):
            select(source, target, DualLogits(np.zeros((5, 4)), np.zeros((5, 4))), SelectConfig(budget=2))


class TestBaselines(DeltaTestCase):
    """Random, degree, uncertainty and density selectors"""

    def test_degree_on_path(self):
        self.assertEqual(baseline_select("degree", TestUtilities.path_graph(3), 1).tolist(), [1])

    def test_random_is_seeded(self):
        _, target, _ = scored_fixture(seed=0)
        first = baseline_select(BaselineKind.RANDOM, target, 6, seed=3)
        second = baseline_select(BaselineKind.RANDOM, target, 6, seed=3)
        np.testing.assert_array_equal(first, second)
        self.assertEqual(len(set(first.tolist())), 6)

    def test_uncertainty_picks_entropy_argmax(self):
        _, target, dual = scored_fixture(seed=2)
        entropies = [TestUtilities.softmax_entropy(row) for row in dual.edge]
        chosen = baseline_select("uncertainty", target, 1, edge_logits=dual.edge)
        self.assertEqual(int(chosen[0]), int(np.argmax(entropies)))

    def test_density_scores(self):
        embeddings = self.rng.normal(size=(30, 4))
        scores = density_scores(embeddings, 3, seed=0)
        self.assertTrue(np.all((scores > 0.0) & (scores <= 1.0)))
        np.testing.assert_array_equal(scores, density_scores(embeddings, 3, seed=0))

    def test_baselines_skip_labeled_nodes(self):
        _, target, dual = scored_fixture(seed=4)
        annotated = target.with_annotations(np.arange(10))
        embeddings = self.rng.normal(size=(20, 3))
        for kind in BaselineKind:
            chosen = baseline_select(kind, annotated, 10, seed=1, edge_logits=dual.edge, edge_embeddings=embeddings)
            self.assertEqual(sorted(chosen.tolist()), list(range(10, 20)), kind.value)

    def test_missing_inputs(self):
        _, target, _ = scored_fixture(seed=0)
        with self.assertRaises(ContractViolationError):
            baseline_select("uncertainty", target, 2)
        with self.assertRaises(ContractViolationError):
            baseline_select("density", target, 2, edge_embeddings=np.zeros((3, 2)))

    def test_budget_exceeding_pool(self):
        with self.assertRaises(SelectionError):
            baseline_select("random", TestUtilities.path_graph(3), 4)


class TestSelectionReport(DeltaTestCase):
    def test_report_document(self):
        source, target, dual = scored_fixture(seed=6)
        result = select(source, target, dual, SelectConfig(gamma=1.0, budget=4))
        document = selection_report(result)
        self.assertEqual(document["kind"], "delta-selection")
        self.assertEqual(document["num_candidates"], len(result.candidates))
        self.assertEqual(document["config"]["budget"], 4)
        self.assertEqual(document["selected"], result.selected.tolist())
        distances = inconsistency(dual)
        for row in document["scores"]:
            self.assertEqual(row["distance"], float(distances[row["node"]]))
            self.assertEqual(set(row), {"node", "uncertainty", "discrepancy", "composite", "origin", "distance"})

    def test_written_selection_reads_back(self):
        source, target, dual = scored_fixture(seed=6)
        result = select(source, target, dual, SelectConfig(gamma=1.0, budget=4))
        path = write_selection_report(self.temp_dir / "selection.json", result)
        self.assertEqual(read_selected_nodes(path), result.selected.tolist())
        json.loads(path.read_text(encoding="utf-8"))


# =============================================================================
# Properties
# =============================================================================

@pytest.mark.property
class TestSelectionProperties:
    """Invariants over generated graphs and logits"""

    @settings(max_examples=TestConstants.PROPERTY_EXAMPLES)
    @given(seed=st.integers(0, 10_000), scale=st.floats(0.01, 100.0), hops=st.integers(0, 3))
    def test_uncertainty_bounds(self, seed, scale, hops):
        _, target, dual = scored_fixture(seed)
        scaled = DualLogits(scale * dual.edge, scale * dual.path)
        u = topo_uncertainty(target, scaled, range(target.num_nodes), hops)
        assert np.all(u >= -1e-9)
        assert np.all(u <= 2.0 * math.log(target.num_classes) + 1e-9)

    @settings(max_examples=TestConstants.PROPERTY_EXAMPLES)
    @given(seed=st.integers(0, 10_000), gamma=st.floats(0.0, 8.0), data=st.data())
    def test_budget_exactness(self, seed, gamma, data):
        source, target, dual = scored_fixture(seed)
        labeled = data.draw(st.sets(st.integers(0, 19), max_size=10))
        target = target.with_annotations(sorted(labeled))
        k = data.draw(st.integers(1, 20 - len(labeled)))
        result = select(source, target, dual, SelectConfig(gamma=gamma, budget=k))
        chosen = result.selected.tolist()
        assert len(chosen) == k
        assert len(set(chosen)) == k
        assert not set(chosen) & labeled

    @settings(max_examples=TestConstants.PROPERTY_EXAMPLES)
    @given(distances=st.lists(st.floats(0.0, 10.0), min_size=1, max_size=30),
           low=st.floats(0.0, 5.0), extra=st.floats(0.0, 5.0))
    def test_threshold_monotonicity(self, distances, low, extra):
        distances = np.array(distances)
        unlabeled = np.ones(distances.size, dtype=bool)
        loose = set(candidates(distances, low, unlabeled).nodes.tolist())
        strict = set(candidates(distances, low + extra, unlabeled).nodes.tolist())
        assert strict <= loose

    @settings(max_examples=TestConstants.PROPERTY_EXAMPLES)
    @given(seed=st.integers(0, 10_000), perm_seed=st.integers(0, 10_000), k=st.integers(1, 8))
    def test_permutation_equivariance(self, seed, perm_seed, k):
        source, target, dual = scored_fixture(seed)
        cfg = SelectConfig(gamma=1.0, hops=2, budget=k)
        result = select(source, target, dual, cfg)
        composite = np.sort(result.table.composite)
        assume(composite.size < 2 or np.min(np.diff(composite)) > 1e-9)

        perm = np.random.default_rng(perm_seed).permutation(target.num_nodes)
        edge, path = np.empty_like(dual.edge), np.empty_like(dual.path)
        edge[perm], path[perm] = dual.edge, dual.path
        moved = select(source, permute_graph(target, perm), DualLogits(edge, path), cfg)
        assert moved.selected.tolist() == perm[result.selected].tolist()
