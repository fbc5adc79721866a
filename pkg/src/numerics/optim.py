#!/usr/bin/env python3
"""
Adam with Decoupled Weight Decay
================================

Full-batch optimizer for the subnetwork parameters.
"""

from typing import List, Sequence, Tuple

import numpy as np

from src.numerics.tape import Variable
from src.utils.error_handling import ContractViolationError, NumericalError


class AdamW:
    """
    Adam update with decoupled weight decay:

        p <- p * (1 - lr * wd) - lr * m_hat / (sqrt(v_hat) + eps)
    """

    def __init__(
        self,
        params: Sequence[Variable],
        learning_rate: float,
        weight_decay: float = 1e-4,
        betas: Tuple[float, float] = (0.9, 0.999),
        eps: float = 1e-8,
    ):
        if learning_rate < 0 or weight_decay < 0:
            raise ContractViolationError(
                "learning rate and weight decay must be nonnegative",
                {"learning_rate": learning_rate, "weight_decay": weight_decay},
            )
        self.params = list(params)
        self.learning_rate = float(learning_rate)
        self.weight_decay = float(weight_decay)
        self.beta1, self.beta2 = betas
        self.eps = eps
        self.step_count = 0
        self.first_moments: List[np.ndarray] = [np.zeros_like(p.value) for p in self.params]
        self.second_moments: List[np.ndarray] = [np.zeros_like(p.value) for p in self.params]

    def step(self, gradients: Sequence[np.ndarray]) -> None:
        if len(gradients) != len(self.params):
            raise ContractViolationError(
                "one gradient per parameter is required",
                {"gradients": len(gradients), "params": len(self.params)},
            )
        self.step_count += 1
        bias1 = 1.0 - self.beta1 ** self.step_count
        bias2 = 1.0 - self.beta2 ** self.step_count
        decay = 1.0 - self.learning_rate * self.weight_decay

        for index, (param, grad) in enumerate(zip(self.params, gradients)):
            m = self.first_moments[index] = self.beta1 * self.first_moments[index] + (1.0 - self.beta1) * grad
            v = self.second_moments[index] = self.beta2 * self.second_moments[index] + (1.0 - self.beta2) * grad * grad
            update = (m / bias1) / (np.sqrt(v / bias2) + self.eps)
            updated = param.value * decay - self.learning_rate * update
            if not np.all(np.isfinite(updated)):
                raise NumericalError("optimizer produced non-finite parameters", {"param": param.name})
            param.value = updated


__all__ = ["AdamW"]
