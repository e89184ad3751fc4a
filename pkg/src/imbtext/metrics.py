"""Confusion-matrix accuracy and macro/weighted F1."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


def confusion(preds: Sequence[int], golds: Sequence[int], num_classes: int) -> np.ndarray:
    """K x K count matrix; rows are gold classes, columns predictions."""
    preds = np.asarray(preds, dtype=np.int64)
    golds = np.asarray(golds, dtype=np.int64)
    if preds.shape != golds.shape:
        raise ValueError(f"length mismatch: {preds.shape[0]} predictions, {golds.shape[0]} golds")
    if preds.size and (preds.min() < 0 or preds.max() >= num_classes):
        raise ValueError(f"prediction id outside [0, {num_classes})")
    if golds.size and (golds.min() < 0 or golds.max() >= num_classes):
        raise ValueError(f"gold id outside [0, {num_classes})")
    matrix = np.zeros((num_classes, num_classes), dtype=np.int64)
    np.add.at(matrix, (golds, preds), 1)
    return matrix


@dataclass(frozen=True)
class ScoreReport:
    accuracy: float
    f1_macro: float
    f1_weighted: float
    per_class_f1: tuple[float, ...]

    def as_dict(self) -> dict[str, float]:
        flat = {
            "accuracy": self.accuracy,
            "f1_macro": self.f1_macro,
            "f1_weighted": self.f1_weighted,
        }
        for i, f1 in enumerate(self.per_class_f1):
            flat[f"f1_class_{i}"] = f1
        return flat

    def as_row(self, method: str) -> str:
        """One delimiter-separated line in the method/accuracy/macro/weighted order."""
        return f"{method},{self.accuracy:.6f},{self.f1_macro:.6f},{self.f1_weighted:.6f}"


def scores(matrix: np.ndarray, *, present_only: bool = False) -> ScoreReport:
    """Accuracy, per-class F1, macro F1, and support-weighted F1.

    Every 0/0 (precision, recall, or F1 of an empty class) resolves to 0.
    The macro mean divides by all K classes unless ``present_only``, which
    restricts it to classes with gold support.
    """
    matrix = np.asarray(matrix)
    total = matrix.sum()
    if total < 1:
        raise ValueError("cannot score an empty confusion matrix")
    tp = np.diag(matrix).astype(float)
    support = matrix.sum(axis=1).astype(float)
    predicted = matrix.sum(axis=0).astype(float)
    precision = np.divide(tp, predicted, out=np.zeros_like(tp), where=predicted > 0)
    recall = np.divide(tp, support, out=np.zeros_like(tp), where=support > 0)
    pr = precision + recall
    f1 = np.divide(2 * precision * recall, pr, out=np.zeros_like(tp), where=pr > 0)
    if present_only:
        mask = support > 0
        f1_macro = float(f1[mask].mean()) if mask.any() else 0.0
    else:
        f1_macro = float(f1.mean())
    f1_weighted = float((f1 * support).sum() / total)
    accuracy = float(tp.sum() / total)
    return ScoreReport(
        accuracy=accuracy,
        f1_macro=f1_macro,
        f1_weighted=f1_weighted,
        per_class_f1=tuple(float(x) for x in f1),
    )
