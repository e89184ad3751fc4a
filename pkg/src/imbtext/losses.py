"""Cross-entropy and focal loss over probability rows, with logit gradients."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# floor for p_t inside logs; keeps losses finite without visibly moving
# gradients at realistic probabilities
EPS = 1e-12

REDUCTIONS = ("mean", "sum", "none")


@dataclass(frozen=True)
class FocalParams:
    alpha: float = 1.0
    gamma: float = 2.0
    reduction: str = "mean"

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError(f"alpha must be nonnegative, got {self.alpha}")
        if self.gamma < 0:
            raise ValueError(f"gamma must be nonnegative, got {self.gamma}")
        if self.reduction not in REDUCTIONS:
            raise ValueError(f"reduction must be one of {REDUCTIONS}, got {self.reduction!r}")


def _target_probs(prob_rows: np.ndarray, targets: np.ndarray) -> np.ndarray:
    prob_rows = np.asarray(prob_rows, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.int64)
    if prob_rows.ndim != 2:
        raise ValueError("prob_rows must be a 2-D array of row distributions")
    if targets.shape != (prob_rows.shape[0],):
        raise ValueError("targets must have one class id per probability row")
    if targets.size and (targets.min() < 0 or targets.max() >= prob_rows.shape[1]):
        raise ValueError(f"target id outside [0, {prob_rows.shape[1]})")
    return prob_rows[np.arange(len(targets)), targets]


def _reduce(per_item: np.ndarray, reduction: str):
    if reduction == "mean":
        return float(per_item.mean())
    if reduction == "sum":
        return float(per_item.sum())
    if reduction == "none":
        return per_item
    raise ValueError(f"reduction must be one of {REDUCTIONS}, got {reduction!r}")


def cross_entropy(prob_rows, targets, reduction: str = "mean"):
    """Per item -log p_t, aggregated per ``reduction``; p_t floored at EPS."""
    p_t = np.clip(_target_probs(prob_rows, targets), EPS, None)
    return _reduce(-np.log(p_t), reduction)


def focal_loss(prob_rows, targets, fp: FocalParams = FocalParams()):
    """Per item -alpha * (1 - p_t)^gamma * log p_t, aggregated per fp.reduction.

    With gamma=0 and alpha=1 this equals cross_entropy exactly.
    """
    p_t = np.clip(_target_probs(prob_rows, targets), EPS, 1.0)
    per_item = -fp.alpha * (1.0 - p_t) ** fp.gamma * np.log(p_t)
    return _reduce(per_item, fp.reduction)


def dloss_dlogits(prob_rows, targets, loss: str, fp: FocalParams | None = None) -> np.ndarray:
    """Per-item gradient of the selected loss w.r.t. softmax logits.

    Returns an unreduced (B, K) array; mean/sum scaling is the caller's
    concern. For cross-entropy this is the classic p - onehot; the focal
    gradient chains dL/dp_t through dp_t/dz = p_t (onehot - p).
    """
    probs = np.asarray(prob_rows, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.int64)
    n, k = probs.shape
    onehot = np.zeros((n, k), dtype=np.float64)
    onehot[np.arange(n), targets] = 1.0
    if loss == "cross_entropy":
        return probs - onehot
    if loss != "focal":
        raise ValueError(f"loss must be 'cross_entropy' or 'focal', got {loss!r}")
    fp = fp or FocalParams()
    p_t = np.clip(probs[np.arange(n), targets], EPS, 1.0)
    if fp.gamma == 0.0:
        dl_dpt = -fp.alpha / p_t
    else:
        one_minus = 1.0 - p_t
        log_pt = np.log(p_t)
        with np.errstate(divide="ignore", invalid="ignore"):
            focusing = fp.gamma * one_minus ** (fp.gamma - 1.0) * log_pt
        # the focusing term has a 0 limit as p_t -> 1 for every gamma > 0
        focusing = np.where(one_minus > 0.0, focusing, 0.0)
        dl_dpt = fp.alpha * (focusing - one_minus ** fp.gamma / p_t)
    return dl_dpt[:, None] * p_t[:, None] * (onehot - probs)
