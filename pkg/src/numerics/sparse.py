#!/usr/bin/env python3
"""
Sparse CSR Storage
==================

Immutable compressed-sparse-row matrices used for adjacency, adjacency powers
and the normalized propagation operators. Storage is validated on
construction; products are delegated to ``scipy.sparse``.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.sparse as sp

from src.utils.error_handling import ContractViolationError

DenseMatrix = np.ndarray


def _frozen(array: np.ndarray, dtype) -> np.ndarray:
    out = np.array(array, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class SparseCsr:
    """
    CSR matrix with validated structure.

    Invariants:
        - ``indptr`` has length ``rows + 1``, is nondecreasing and ends at nnz
        - column indices inside each row are strictly increasing and < ``cols``
        - every stored value is finite
    """

    rows: int
    cols: int
    indptr: np.ndarray
    indices: np.ndarray
    data: np.ndarray
    _scipy: Optional[sp.csr_matrix] = field(default=None, init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "indptr", _frozen(self.indptr, np.int64))
        object.__setattr__(self, "indices", _frozen(self.indices, np.int64))
        object.__setattr__(self, "data", _frozen(self.data, np.float64))
        self._validate()

    def _validate(self) -> None:
        shape = {"rows": self.rows, "cols": self.cols}
        if self.rows < 0 or self.cols < 0:
            raise ContractViolationError("CSR dimensions must be nonnegative", shape)
        if self.indptr.shape != (self.rows + 1,):
            raise ContractViolationError("row pointer must have length rows + 1", shape)
        nnz = self.indices.shape[0]
        if self.data.shape != (nnz,):
            raise ContractViolationError("value and column-index arrays differ in length", shape)
        if self.indptr[0] != 0 or self.indptr[-1] != nnz:
            raise ContractViolationError("row pointer must start at 0 and end at nnz", shape)
        if np.any(np.diff(self.indptr) < 0):
            raise ContractViolationError("row pointer must be nondecreasing", shape)
        if nnz:
            if self.indices.min() < 0 or self.indices.max() >= self.cols:
                raise ContractViolationError("column index out of range", shape)
            row_ids = np.repeat(np.arange(self.rows), np.diff(self.indptr))
            same_row = row_ids[1:] == row_ids[:-1]
            if np.any(self.indices[1:][same_row] <= self.indices[:-1][same_row]):
                raise ContractViolationError("column indices must be strictly increasing within a row", shape)
        if not np.all(np.isfinite(self.data)):
            raise ContractViolationError("CSR values must be finite", shape)

    @property
    def shape(self):
        return (self.rows, self.cols)

    @property
    def nnz(self) -> int:
        return int(self.indices.shape[0])

    def to_scipy(self) -> sp.csr_matrix:
        """Cached scipy view of the same storage."""
        if self._scipy is None:
            matrix = sp.csr_matrix((self.data, self.indices, self.indptr), shape=self.shape)
            object.__setattr__(self, "_scipy", matrix)
        return self._scipy

    def transpose(self) -> "SparseCsr":
        return from_scipy(self.to_scipy().T)

    def row_sums(self) -> np.ndarray:
        return np.asarray(self.to_scipy().sum(axis=1)).ravel()


def from_scipy(matrix) -> SparseCsr:
    """Canonicalize any scipy sparse matrix (sorted, deduplicated) into a SparseCsr."""
    csr = sp.csr_matrix(matrix, dtype=np.float64, copy=True)
    csr.sum_duplicates()
    csr.sort_indices()
    return SparseCsr(csr.shape[0], csr.shape[1], csr.indptr, csr.indices, csr.data)


def from_dense(dense: DenseMatrix) -> SparseCsr:
    return from_scipy(sp.csr_matrix(np.asarray(dense, dtype=np.float64)))


def identity(n: int) -> SparseCsr:
    return from_scipy(sp.identity(n, dtype=np.float64, format="csr"))


def zeros(rows: int, cols: int) -> SparseCsr:
    return SparseCsr(rows, cols, np.zeros(rows + 1, dtype=np.int64), np.zeros(0, dtype=np.int64), np.zeros(0))


def densify(a: SparseCsr) -> DenseMatrix:
    return a.to_scipy().toarray()


def spmm(a: SparseCsr, b: DenseMatrix) -> DenseMatrix:
    """Exact sparse-dense product ``a @ b``."""
    b = np.asarray(b, dtype=np.float64)
    if b.ndim != 2 or a.cols != b.shape[0]:
        raise ContractViolationError(
            "spmm dimension mismatch",
            {"sparse_shape": a.shape, "dense_shape": b.shape},
        )
    return np.asarray(a.to_scipy() @ b)


__all__ = [
    "DenseMatrix",
    "SparseCsr",
    "from_scipy",
    "from_dense",
    "identity",
    "zeros",
    "densify",
    "spmm",
]
