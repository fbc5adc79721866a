"""
PyTest Configuration for DELTA Graph Active Selection

Shared fixtures, marker registration and hypothesis profiles.
"""

import dataclasses
import logging
import shutil
import tempfile
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

from src.graph.synthetic import ShiftedPairParams, generate_shifted_pair
from src.harness.experiment import ExperimentSpec
from src.selection.delta_selector import SelectConfig
from src.subnet.training import TrainConfig
from tests import TestConstants, TestUtilities, get_test_markers

settings.register_profile("delta", deadline=None, derandomize=True, print_blob=True)
settings.load_profile("delta")


# =============================================================================
# Pytest Configuration and Hooks
# =============================================================================

def pytest_configure(config):
    """Register custom markers."""
    for name, description in get_test_markers().items():
        config.addinivalue_line("markers", f"{name}: {description}")


def pytest_collection_modifyitems(config, items):
    """Tag unmarked tests in the unit modules as unit tests."""
    unit_modules = {"test_numerics", "test_graph_core", "test_subnet", "test_selection", "test_harness", "test_utils"}
    for item in items:
        module = item.module.__name__.rsplit(".", 1)[-1]
        if module in unit_modules and item.get_closest_marker("unit") is None:
            item.add_marker(pytest.mark.unit)


# =============================================================================
# Function-Scoped Fixtures
# =============================================================================

@pytest.fixture
def temp_dir():
    """Temporary directory for one test."""
    path = Path(tempfile.mkdtemp(prefix="delta_test_"))
    yield path
    shutil.rmtree(path, ignore_errors=True)


@pytest.fixture
def six_node_pair():
    return TestUtilities.six_node_pair()


@pytest.fixture
def tiny_params():
    """Small, well-separated shifted pair."""
    return ShiftedPairParams(
        num_classes=3,
        nodes_per_class=TestConstants.TINY_NODES_PER_CLASS,
        num_features=TestConstants.TINY_FEATURES,
        p_intra=0.3,
        p_inter=0.02,
        class_separation=2.0,
        shift_scale=0.3,
        noise_scale=0.5,
        source_label_fraction=0.25,
    )


@pytest.fixture
def tiny_pair(tiny_params):
    return generate_shifted_pair(tiny_params, seed=0)


@pytest.fixture
def tiny_train_config():
    return TrainConfig(
        epochs=TestConstants.TINY_EPOCHS,
        learning_rate=0.01,
        hidden=TestConstants.TINY_HIDDEN,
        out=TestConstants.TINY_OUT,
        dropout=0.1,
        seed=0,
    )


@pytest.fixture
def tiny_spec(tiny_params, tiny_train_config, temp_dir):
    """Two-seed experiment on the tiny pair, writing into ``temp_dir``."""
    spec = ExperimentSpec(
        train=dataclasses.replace(tiny_train_config),
        select=SelectConfig(gamma=0.1, hops=2, budget=5),
        num_seeds=2,
        output_dir=str(temp_dir),
    )
    spec.dataset.synthetic = dataclasses.replace(tiny_params)
    spec.dataset.num_classes = tiny_params.num_classes
    return spec


@pytest.fixture
def tiny_config_file(temp_dir):
    """Flat YAML configuration matching ``tiny_spec``."""
    path = temp_dir / "tiny.yaml"
    path.write_text(
        "\n".join([
            "num_seeds: 1",
            f"epochs: {TestConstants.TINY_EPOCHS}",
            "learning_rate: 0.01",
            f"hidden: {TestConstants.TINY_HIDDEN}",
            f"out: {TestConstants.TINY_OUT}",
            "gamma: 0.1",
            "budget: 5",
            "num_classes: 3",
            f"nodes_per_class: {TestConstants.TINY_NODES_PER_CLASS}",
            f"num_features: {TestConstants.TINY_FEATURES}",
            "p_intra: 0.3",
            "p_inter: 0.02",
            "class_separation: 2.0",
            "source_label_fraction: 0.25",
        ]) + "\n",
        encoding="utf-8",
    )
    return path


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(autouse=True)
def quiet_delta_logs():
    """Keep component loggers from spilling into captured output."""
    logger = logging.getLogger("delta")
    previous = logger.level
    logger.setLevel(logging.WARNING)
    yield
    logger.setLevel(previous)
