"""
Subnetworks
===========

Edge- and path-oriented graph subnetworks, the domain discriminator and the
adversarial training loop.
"""

from src.subnet.networks import Discriminator, EdgeSubnet, PathSubnet, SubnetKind, forward_edge, forward_path
from src.subnet.training import (
    Architecture,
    DualLogits,
    DualNetworks,
    TrainConfig,
    TrainedSubnet,
    TrainingTrace,
    evaluate_subnet,
    target_logits,
    train_dual,
    train_subnet,
)
from src.subnet.checkpoint import load_checkpoint, save_checkpoint

__all__ = [
    "Discriminator",
    "EdgeSubnet",
    "PathSubnet",
    "SubnetKind",
    "forward_edge",
    "forward_path",
    "Architecture",
    "DualLogits",
    "DualNetworks",
    "TrainConfig",
    "TrainedSubnet",
    "TrainingTrace",
    "evaluate_subnet",
    "target_logits",
    "train_dual",
    "train_subnet",
    "load_checkpoint",
    "save_checkpoint",
]
