#!/usr/bin/env python3
"""
Gradient Tape
=============

A Wengert list for reverse-mode differentiation. Each primitive in
``src.numerics.ops`` appends one entry holding its output, its inputs and a
closure mapping the output gradient to input gradients. ``backward`` replays
the list in reverse, accumulating adjoints per variable.

A tape belongs to a single training step on a single thread; clear it (or
create a new one) before the next step.
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.utils.error_handling import ContractViolationError, TapeIntegrityError

BackwardFn = Callable[[np.ndarray], Tuple[Optional[np.ndarray], ...]]


@dataclass(eq=False)
class Variable:
    """A matrix value participating in differentiation."""

    value: np.ndarray
    requires_grad: bool = False
    name: str = ""
    grad: Optional[np.ndarray] = None
    producer: int = field(default=-1, repr=False)

    @classmethod
    def parameter(cls, value: np.ndarray, name: str) -> "Variable":
        return cls(np.array(value, dtype=np.float64), requires_grad=True, name=name)

    @classmethod
    def constant(cls, value: np.ndarray, name: str = "") -> "Variable":
        return cls(np.asarray(value, dtype=np.float64), requires_grad=False, name=name)

    @property
    def shape(self):
        return self.value.shape


@dataclass(eq=False)
class TapeEntry:
    op: str
    output: Variable
    inputs: Tuple[Variable, ...]
    backward_fn: BackwardFn


class GradTape:
    """Ordered record of primitive operations for one training step."""

    def __init__(self):
        self.entries: List[TapeEntry] = []

    def __len__(self) -> int:
        return len(self.entries)

    def record(self, op: str, output: Variable, inputs: Sequence[Variable], backward_fn: BackwardFn) -> None:
        output.producer = len(self.entries)
        self.entries.append(TapeEntry(op, output, tuple(inputs), backward_fn))

    def clear(self) -> None:
        for entry in self.entries:
            entry.output.producer = -1
        self.entries = []

    def backward(self, root: Variable, params: Sequence[Variable]) -> List[np.ndarray]:
        """
        Propagate d(root)/d(.) back through the tape.

        Args:
            root: Scalar loss produced by an operation on this tape
            params: Parameters whose gradients are wanted

        Returns:
            Gradients in the order of ``params``; parameters the loss does not
            depend on receive zeros. Each parameter's ``grad`` is also set.
        """
        if not self.entries:
            raise ContractViolationError("cannot run backward on an empty tape")
        if root.value.size != 1:
            raise ContractViolationError("loss root must be a scalar", {"shape": root.value.shape})

        adjoints: Dict[int, np.ndarray] = {id(root): np.ones_like(root.value)}
        for position in range(len(self.entries) - 1, -1, -1):
            entry = self.entries[position]
            upstream = adjoints.pop(id(entry.output), None)
            if upstream is None:
                continue
            input_grads = entry.backward_fn(upstream)
            for source, grad in zip(entry.inputs, input_grads):
                if grad is None or not source.requires_grad:
                    continue
                if source.producer >= position:
                    raise TapeIntegrityError(
                        "tape entry consumes a value recorded after it",
                        {"op": entry.op, "position": position, "producer": source.producer},
                    )
                if id(source) in adjoints:
                    adjoints[id(source)] = adjoints[id(source)] + grad
                else:
                    adjoints[id(source)] = grad

        gradients = []
        for param in params:
            grad = adjoints.get(id(param))
            if grad is None:
                grad = np.zeros_like(param.value)
            param.grad = np.asarray(grad, dtype=np.float64).reshape(param.value.shape)
            gradients.append(param.grad)
        return gradients


__all__ = ["Variable", "TapeEntry", "GradTape", "BackwardFn"]
