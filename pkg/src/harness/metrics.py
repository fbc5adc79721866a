#!/usr/bin/env python3
"""
Classification Metrics
======================

Macro- and Micro-F1 for single-label multiclass node classification.
"""

from typing import Optional, Tuple

import numpy as np
from sklearn.metrics import accuracy_score, f1_score

from src.utils.error_handling import ContractViolationError


def macro_micro_f1(
    predictions: np.ndarray,
    truths: np.ndarray,
    mask: np.ndarray,
    num_classes: Optional[int] = None,
) -> Tuple[float, float]:
    """
    Args:
        predictions: Predicted class per node
        truths: True class per node
        mask: Nodes to score
        num_classes: Label space size; classes missing from both predictions
            and truths count with F1 = 0. Defaults to the largest seen class + 1.

    Returns:
        (macro_f1, micro_f1); micro-F1 equals accuracy for single-label data
    """
    predictions = np.asarray(predictions, dtype=np.int64)
    truths = np.asarray(truths, dtype=np.int64)
    mask = np.asarray(mask, dtype=bool)
    if not (predictions.shape == truths.shape == mask.shape):
        raise ContractViolationError(
            "predictions, truths and mask must have equal length",
            {"predictions": predictions.shape, "truths": truths.shape, "mask": mask.shape},
        )
    if not mask.any():
        raise ContractViolationError("cannot score an empty evaluation mask")

    y_pred, y_true = predictions[mask], truths[mask]
    if num_classes is None:
        num_classes = int(max(y_pred.max(), y_true.max())) + 1
    labels = list(range(num_classes))
    macro = float(f1_score(y_true, y_pred, labels=labels, average="macro", zero_division=0))
    micro = float(accuracy_score(y_true, y_pred))
    return macro, micro


__all__ = ["macro_micro_f1"]
