#!/usr/bin/env python3
"""
Checkpoints
===========

Versioned ``.npz`` dump of both trained subnetworks (parameters,
discriminators, traces) plus the TrainConfig as JSON. Arrays are stored
losslessly, so a load reproduces every parameter bit for bit.
"""

import dataclasses
import io
import json
from pathlib import Path
from typing import Dict, Tuple, Union

import numpy as np

from src.subnet.networks import Discriminator, EdgeSubnet, PathSubnet, SubnetKind
from src.subnet.training import (
    Architecture,
    DualNetworks,
    TraceRow,
    TrainConfig,
    TrainedSubnet,
    TrainingTrace,
)
from src.utils.atomic_io import atomic_write_bytes
from src.utils.error_handling import ConfigurationError
from src.utils.logging_config import get_component_logger

logger = get_component_logger("subnet.checkpoint")

CHECKPOINT_VERSION = 1


def _subnet_arrays(prefix: str, trained: TrainedSubnet) -> Dict[str, np.ndarray]:
    arrays = {f"{prefix}.{param.name.split('.', 1)[1]}": param.value for param in trained.network.parameters()}
    arrays[f"{prefix}.discriminator"] = trained.discriminator.weight.value
    arrays[f"{prefix}.trace"] = np.array(trained.trace.rows, dtype=np.float64).reshape(-1, 4)
    return arrays


def _subnet_meta(trained: TrainedSubnet) -> Dict:
    meta = {"kind": trained.kind.value, "stream": trained.stream, "dropout": trained.network.dropout}
    if isinstance(trained.network, PathSubnet):
        meta["temperature"] = trained.network.temperature
    return meta


def save_checkpoint(path: Union[str, Path], nets: DualNetworks, cfg: TrainConfig) -> Path:
    meta = {
        "version": CHECKPOINT_VERSION,
        "architecture": nets.architecture.value,
        "config": dataclasses.asdict(cfg),
        "first": _subnet_meta(nets.first),
        "second": _subnet_meta(nets.second),
    }
    arrays = {**_subnet_arrays("first", nets.first), **_subnet_arrays("second", nets.second)}
    buffer = io.BytesIO()
    np.savez(buffer, meta=np.array(json.dumps(meta, sort_keys=True)), **arrays)
    target = atomic_write_bytes(path, buffer.getvalue())
    logger.info(f"💾 Checkpoint written to {target}")
    return target


def _restore_subnet(prefix: str, meta: Dict, archive) -> TrainedSubnet:
    kind = SubnetKind(meta["kind"])
    if kind == SubnetKind.EDGE:
        network = EdgeSubnet(archive[f"{prefix}.w0"], archive[f"{prefix}.w1"], archive[f"{prefix}.beta"], meta["dropout"])
    else:
        network = PathSubnet(
            archive[f"{prefix}.w0"], archive[f"{prefix}.w1"], archive[f"{prefix}.beta"],
            archive[f"{prefix}.energies"], meta["temperature"], meta["dropout"],
        )
    rows = [TraceRow(int(r[0]), float(r[1]), float(r[2]), float(r[3])) for r in archive[f"{prefix}.trace"]]
    return TrainedSubnet(kind, network, Discriminator(archive[f"{prefix}.discriminator"]), TrainingTrace(rows), meta["stream"])


def load_checkpoint(path: Union[str, Path]) -> Tuple[DualNetworks, TrainConfig]:
    with np.load(path, allow_pickle=False) as archive:
        meta = json.loads(str(archive["meta"]))
        if meta.get("version") != CHECKPOINT_VERSION:
            raise ConfigurationError("unsupported checkpoint version", {"version": meta.get("version"), "path": str(path)})
        nets = DualNetworks(
            _restore_subnet("first", meta["first"], archive),
            _restore_subnet("second", meta["second"], archive),
            Architecture(meta["architecture"]),
        )
    return nets, TrainConfig(**meta["config"])


__all__ = ["CHECKPOINT_VERSION", "save_checkpoint", "load_checkpoint"]
