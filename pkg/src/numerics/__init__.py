"""
Numerics
========

Dense/sparse linear algebra with reverse-mode gradients for the exact
primitive set used by the graph subnetworks.
"""

from src.numerics.sparse import DenseMatrix, SparseCsr, densify, from_dense, from_scipy, identity, spmm
from src.numerics.tape import GradTape, Variable
from src.numerics.optim import AdamW

__all__ = [
    "DenseMatrix",
    "SparseCsr",
    "densify",
    "from_dense",
    "from_scipy",
    "identity",
    "spmm",
    "GradTape",
    "Variable",
    "AdamW",
]
