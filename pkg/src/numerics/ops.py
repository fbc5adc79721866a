#!/usr/bin/env python3
"""
Differentiable Primitives
=========================

The primitive set the two graph subnetworks are built from. Every primitive
takes ``Variable`` operands and an optional ``GradTape``; with a tape the
operation is recorded together with its backward rule, without one it is a
plain forward evaluation (inference mode).

Pure helpers (``row_softmax``, ``row_log_softmax``, ``row_entropy``) work on
bare arrays and are shared with the selection code.
"""

from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import expit

from src.numerics.sparse import DenseMatrix, SparseCsr, from_scipy, spmm as sparse_dense_product
from src.numerics.tape import BackwardFn, GradTape, Variable
from src.utils.error_handling import ContractViolationError, NumericalError, TrainingError

PathMatrix = Union[np.ndarray, SparseCsr]


def _checked(op: str, value: np.ndarray) -> np.ndarray:
    if not np.all(np.isfinite(value)):
        raise NumericalError(f"{op} produced non-finite values", {"op": op, "shape": np.shape(value)})
    return value


def _emit(
    op: str,
    value: np.ndarray,
    inputs: Sequence[Variable],
    backward_fn: BackwardFn,
    tape: Optional[GradTape],
) -> Variable:
    out = Variable(_checked(op, value), requires_grad=any(v.requires_grad for v in inputs), name=op)
    if tape is not None and out.requires_grad:
        tape.record(op, out, inputs, backward_fn)
    return out


def _wide_sum(values: np.ndarray) -> float:
    return float(np.sum(values, dtype=np.longdouble))


# =============================================================================
# Linear algebra
# =============================================================================

def matmul(a: Variable, b: Variable, tape: Optional[GradTape] = None) -> Variable:
    if a.value.ndim != 2 or b.value.ndim != 2 or a.value.shape[1] != b.value.shape[0]:
        raise ContractViolationError("matmul dimension mismatch", {"left": a.shape, "right": b.shape})
    av, bv = a.value, b.value

    def backward(g):
        return g @ bv.T, av.T @ g

    return _emit("matmul", av @ bv, (a, b), backward, tape)


def spmm(a: SparseCsr, b: Variable, tape: Optional[GradTape] = None) -> Variable:
    """Sparse constant times a differentiable dense matrix."""
    value = sparse_dense_product(a, b.value)

    def backward(g):
        return (np.asarray(a.to_scipy().T @ g),)

    return _emit("spmm", value, (b,), backward, tape)


def add(a: Variable, b: Variable, tape: Optional[GradTape] = None) -> Variable:
    if a.shape != b.shape:
        raise ContractViolationError("add shape mismatch", {"left": a.shape, "right": b.shape})
    return _emit("add", a.value + b.value, (a, b), lambda g: (g, g), tape)


def scale(a: Variable, factor: float, tape: Optional[GradTape] = None) -> Variable:
    factor = float(factor)
    return _emit("scale", a.value * factor, (a,), lambda g: (g * factor,), tape)


def total(a: Variable, tape: Optional[GradTape] = None) -> Variable:
    shape = a.shape
    return _emit(
        "sum",
        np.asarray(_wide_sum(a.value)),
        (a,),
        lambda g: (np.full(shape, float(g)),),
        tape,
    )


def vstack(top: Variable, bottom: Variable, tape: Optional[GradTape] = None) -> Variable:
    if top.value.shape[1:] != bottom.value.shape[1:]:
        raise ContractViolationError("vstack column mismatch", {"top": top.shape, "bottom": bottom.shape})
    split = top.value.shape[0]
    return _emit(
        "vstack",
        np.vstack([top.value, bottom.value]),
        (top, bottom),
        lambda g: (g[:split], g[split:]),
        tape,
    )


# =============================================================================
# Activations and regularization
# =============================================================================

def relu(a: Variable, tape: Optional[GradTape] = None) -> Variable:
    active = a.value > 0.0
    return _emit("relu", np.where(active, a.value, 0.0), (a,), lambda g: (g * active,), tape)


def dropout_mask(shape: Tuple[int, ...], p: float, seed: int, layer: int, epoch: int) -> np.ndarray:
    """
    Keep-mask from a counter-based generator keyed by the whole
    (seed, layer, epoch) triple. The counter always starts at zero, so any
    triple yields the same mask regardless of what ran before, and distinct
    triples never share a stream.
    """
    key = np.random.SeedSequence([seed, layer, epoch]).generate_state(2, dtype=np.uint64)
    generator = np.random.Generator(np.random.Philox(key=key))
    return generator.random(shape) >= p


def dropout(
    a: Variable,
    p: float,
    *,
    seed: int,
    layer: int,
    epoch: int,
    training: bool,
    tape: Optional[GradTape] = None,
) -> Variable:
    if not 0.0 <= p < 1.0:
        raise ContractViolationError("dropout probability must lie in [0, 1)", {"p": p})
    if not training or p == 0.0:
        return a
    keep = dropout_mask(a.shape, p, seed, layer, epoch) / (1.0 - p)
    return _emit("dropout", a.value * keep, (a,), lambda g: (g * keep,), tape)


def grad_reverse(a: Variable, factor: float, tape: Optional[GradTape] = None) -> Variable:
    """Identity forward; multiplies the incoming gradient by ``-factor``."""
    factor = float(factor)
    return _emit("grad_reverse", a.value.copy(), (a,), lambda g: (-factor * g,), tape)


def path_weights(energies: Variable, temperature: float, tape: Optional[GradTape] = None) -> Variable:
    """w_n = exp(-E_n / T)."""
    if temperature <= 0:
        raise ContractViolationError("temperature must be positive", {"temperature": temperature})
    weights = np.exp(-energies.value / temperature)
    return _emit("path_weights", weights, (energies,), lambda g: (-g * weights / temperature,), tape)


# =============================================================================
# Path-weighted propagation
# =============================================================================

def _product(matrix: PathMatrix, dense: np.ndarray) -> np.ndarray:
    if isinstance(matrix, SparseCsr):
        return sparse_dense_product(matrix, dense)
    return matrix @ dense


def _transpose_product(matrix: PathMatrix, dense: np.ndarray) -> np.ndarray:
    if isinstance(matrix, SparseCsr):
        return np.asarray(matrix.to_scipy().T @ dense)
    return matrix.T @ dense


def _weighted_sum(powers: Sequence[PathMatrix], weights: np.ndarray) -> PathMatrix:
    if isinstance(powers[0], SparseCsr):
        summed = powers[0].to_scipy() * float(weights[0])
        for matrix, weight in zip(powers[1:], weights[1:]):
            summed = summed + matrix.to_scipy() * float(weight)
        return from_scipy(summed)
    summed = powers[0] * weights[0]
    for matrix, weight in zip(powers[1:], weights[1:]):
        summed = summed + matrix * weight
    return summed


def _row_sums(matrix: PathMatrix) -> np.ndarray:
    if isinstance(matrix, SparseCsr):
        return matrix.row_sums()
    return matrix.sum(axis=1)


def pan_propagate(
    powers: Sequence[PathMatrix],
    weights: Variable,
    h: Variable,
    tape: Optional[GradTape] = None,
) -> Variable:
    """
    Y = M^{-1/2} (sum_n w_n S_n) M^{-1/2} H with M the row sums of the weighted
    path sum. Differentiable in both the path weights and H.
    """
    w = weights.value
    if w.shape != (len(powers),):
        raise ContractViolationError(
            "one path weight per adjacency power is required",
            {"weights": w.shape, "powers": len(powers)},
        )
    if h.value.shape[0] != powers[0].shape[1]:
        raise ContractViolationError("propagation dimension mismatch", {"operator": powers[0].shape, "h": h.shape})

    summed = _weighted_sum(powers, w)
    row_sums = _row_sums(summed)
    if np.any(row_sums <= 0.0):
        raise ContractViolationError("path operator has a row with zero weight", {"weights": w.tolist()})
    q = row_sums ** -0.5
    qh = q[:, None] * h.value
    u = _product(summed, qh)
    value = q[:, None] * u
    power_row_sums = [_row_sums(matrix) for matrix in powers]

    def backward(g):
        qg = q[:, None] * g
        transposed = _transpose_product(summed, qg)
        grad_h = q[:, None] * transposed
        grad_q = np.sum(g * u, axis=1) + np.sum(h.value * transposed, axis=1)
        grad_r = grad_q * (-0.5 * row_sums ** -1.5)
        grad_w = np.array([
            _wide_sum(grad_r * counts) + _wide_sum(qg * _product(matrix, qh))
            for matrix, counts in zip(powers, power_row_sums)
        ])
        return grad_w, grad_h

    return _emit("pan_propagate", value, (weights, h), backward, tape)


# =============================================================================
# Losses and probability maps
# =============================================================================

def row_log_softmax(m: DenseMatrix) -> DenseMatrix:
    m = np.asarray(m, dtype=np.float64)
    shifted = m - m.max(axis=1, keepdims=True)
    return shifted - np.log(np.sum(np.exp(shifted), axis=1, keepdims=True))


def row_softmax(m: DenseMatrix) -> DenseMatrix:
    """Rows sum to one; numerically stable for large logits."""
    return np.exp(row_log_softmax(m))


def row_entropy(m: DenseMatrix) -> np.ndarray:
    """Shannon entropy (nats) of softmax of each row."""
    log_p = row_log_softmax(m)
    return -np.sum(np.exp(log_p) * log_p, axis=1)


def _supervised_rows(logits: np.ndarray, labels: np.ndarray, mask: np.ndarray) -> np.ndarray:
    labels = np.asarray(labels)
    mask = np.asarray(mask, dtype=bool)
    rows = logits.shape[0]
    if logits.ndim != 2 or labels.shape != (rows,) or mask.shape != (rows,):
        raise ContractViolationError(
            "logits, labels and mask must agree in length",
            {"logits": logits.shape, "labels": labels.shape, "mask": mask.shape},
        )
    selected = np.flatnonzero(mask)
    if selected.size == 0:
        raise TrainingError("no supervised rows")
    picked = labels[selected]
    if picked.min() < 0 or picked.max() >= logits.shape[1]:
        raise ContractViolationError("class index out of range", {"num_classes": logits.shape[1]})
    return selected


def softmax_cross_entropy_value_and_grad(
    logits: DenseMatrix, labels: np.ndarray, mask: np.ndarray
) -> Tuple[float, DenseMatrix]:
    """Mean negative log-likelihood over masked rows and its gradient."""
    logits = np.asarray(logits, dtype=np.float64)
    selected = _supervised_rows(logits, labels, mask)
    targets = np.asarray(labels)[selected]
    log_p = row_log_softmax(logits[selected])
    count = selected.size
    loss = -_wide_sum(log_p[np.arange(count), targets]) / count

    grad = np.zeros_like(logits)
    local = np.exp(log_p)
    local[np.arange(count), targets] -= 1.0
    grad[selected] = local / count
    return loss, grad


def softmax_cross_entropy(
    logits: Variable, labels: np.ndarray, mask: np.ndarray, tape: Optional[GradTape] = None
) -> Variable:
    loss, grad = softmax_cross_entropy_value_and_grad(logits.value, labels, mask)
    return _emit("softmax_cross_entropy", np.asarray(loss), (logits,), lambda g: (float(g) * grad,), tape)


def sigmoid_bce(logits: Variable, targets: np.ndarray, tape: Optional[GradTape] = None) -> Variable:
    """Mean binary cross-entropy of a column of logits against 0/1 targets."""
    x = logits.value
    y = np.asarray(targets, dtype=np.float64).reshape(x.shape)
    count = x.size
    loss = _wide_sum(np.logaddexp(0.0, x) - y * x) / count
    grad = (expit(x) - y) / count
    return _emit("sigmoid_bce", np.asarray(loss), (logits,), lambda g: (float(g) * grad,), tape)


__all__ = [
    "matmul",
    "spmm",
    "add",
    "scale",
    "total",
    "vstack",
    "relu",
    "dropout",
    "dropout_mask",
    "grad_reverse",
    "path_weights",
    "pan_propagate",
    "row_softmax",
    "row_log_softmax",
    "row_entropy",
    "softmax_cross_entropy",
    "softmax_cross_entropy_value_and_grad",
    "sigmoid_bce",
]
