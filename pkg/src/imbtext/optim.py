"""Decoupled-weight-decay Adam and the warmup-then-cosine learning-rate curve."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass
class AdamWState:
    m: dict[str, np.ndarray]
    v: dict[str, np.ndarray]
    t: int = 0


def init_adamw_state(params: dict[str, np.ndarray]) -> AdamWState:
    return AdamWState(
        m={name: np.zeros_like(p) for name, p in params.items()},
        v={name: np.zeros_like(p) for name, p in params.items()},
        t=0,
    )


def adamw_step(
    params: dict[str, np.ndarray],
    grads: dict[str, np.ndarray],
    state: AdamWState,
    *,
    lr: float,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
    weight_decay: float = 0.0,
) -> tuple[dict[str, np.ndarray], AdamWState]:
    """One bias-corrected moment update with decoupled weight decay.

    Decay is applied to the incoming parameter value separately from the
    gradient step: theta -= lr*wd*theta_old + lr*mhat/(sqrt(vhat)+eps).
    Pure: returns fresh params and state.
    """
    for name, p in params.items():
        if name not in grads:
            raise ValueError(f"missing gradient for parameter {name!r}")
        if grads[name].shape != p.shape or state.m[name].shape != p.shape:
            raise ValueError(f"shape mismatch for parameter {name!r}")
    t = state.t + 1
    new_params: dict[str, np.ndarray] = {}
    new_m: dict[str, np.ndarray] = {}
    new_v: dict[str, np.ndarray] = {}
    bias1 = 1.0 - beta1 ** t
    bias2 = 1.0 - beta2 ** t
    for name, p in params.items():
        g = grads[name]
        m = beta1 * state.m[name] + (1.0 - beta1) * g
        v = beta2 * state.v[name] + (1.0 - beta2) * g * g
        m_hat = m / bias1
        v_hat = v / bias2
        new_params[name] = p - lr * weight_decay * p - lr * m_hat / (np.sqrt(v_hat) + eps)
        new_m[name] = m
        new_v[name] = v
    return new_params, AdamWState(m=new_m, v=new_v, t=t)


def lr_at(step: int, total_steps: int, cfg) -> float:
    """Learning rate at ``step`` of ``total_steps``.

    Linear warmup over w = round(warmup_fraction * total_steps) steps up to
    peak_lr, then a half-cosine from peak to zero over the remaining steps.
    Both branches evaluate to peak_lr at step w, so the curve is continuous
    at the boundary.
    """
    if total_steps < 1:
        raise ValueError("total_steps must be at least 1")
    if not 0 <= step <= total_steps:
        raise ValueError(f"step {step} outside [0, {total_steps}]")
    w = round(cfg.warmup_fraction * total_steps)
    if step < w:
        return cfg.peak_lr * step / w
    span = total_steps - w
    if span <= 0:
        return cfg.peak_lr
    return cfg.peak_lr * 0.5 * (1.0 + math.cos(math.pi * (step - w) / span))
