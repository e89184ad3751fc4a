"""Mean-pooled embedding classifier: forward, exact backward, checkpoint I/O.

The backbone embeds token ids, mean-pools over non-pad positions, runs the
pooled vector through tanh hidden layers, and finishes with a linear head and
softmax. It stands behind the same interface a heavier encoder would use, and
all arithmetic is float64 so finite-difference checks stay tight.
"""

from __future__ import annotations

import base64
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .wordpiece import TokenSeq

CHECKPOINT_FORMAT = "imbtext-checkpoint"
CHECKPOINT_VERSION = 1


@dataclass(frozen=True)
class BackboneConfig:
    vocab_size: int
    num_classes: int
    embedding_dim: int = 64
    hidden: tuple[int, ...] = (128,)
    dropout_rate: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.vocab_size < 1:
            raise ValueError("vocab_size must be positive")
        if self.num_classes < 1:
            raise ValueError("num_classes must be positive")
        if self.embedding_dim < 1:
            raise ValueError("embedding_dim must be positive")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ValueError(f"dropout_rate must be in [0, 1), got {self.dropout_rate}")
        object.__setattr__(self, "hidden", tuple(int(h) for h in self.hidden))


@dataclass
class ModelCheckpoint:
    """Named float64 parameter arrays plus the config and codec snapshot."""

    params: dict[str, np.ndarray]
    config: BackboneConfig
    classes: tuple[str, ...]
    step: int = 0


def init_params(cfg: BackboneConfig) -> dict[str, np.ndarray]:
    """Seeded initialization: N(0, 0.1) embeddings, Glorot-uniform dense
    layers, zero biases; everything float64."""
    rng = np.random.default_rng(cfg.seed)
    params: dict[str, np.ndarray] = {
        "embedding": rng.normal(0.0, 0.1, size=(cfg.vocab_size, cfg.embedding_dim))
    }
    dims = [cfg.embedding_dim, *cfg.hidden, cfg.num_classes]
    for i, (fan_in, fan_out) in enumerate(zip(dims, dims[1:])):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        params[f"w{i}"] = rng.uniform(-limit, limit, size=(fan_in, fan_out))
        params[f"b{i}"] = np.zeros(fan_out)
    return params


def batch_arrays(batch: Sequence[TokenSeq]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Stack a TokenSeq batch into (ids, non-pad mask, labels)."""
    if not batch:
        raise ValueError("batch must be non-empty")
    ids = np.array([seq.ids for seq in batch], dtype=np.int64)
    lengths = np.array([seq.length for seq in batch], dtype=np.int64)
    mask = (np.arange(ids.shape[1])[None, :] < lengths[:, None]).astype(np.float64)
    labels = np.array([seq.label_id for seq in batch], dtype=np.int64)
    return ids, mask, labels


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=1, keepdims=True)


def forward_pass(
    params: dict[str, np.ndarray],
    ids: np.ndarray,
    mask: np.ndarray,
    *,
    num_layers: int,
    dropout_rate: float = 0.0,
    dropout_rng: np.random.Generator | None = None,
):
    """Run the backbone; returns (probs, cache) with everything backward needs.

    Mean-pooling over an all-pad row is defined as the zero vector. Inverted
    dropout fires only when a rate and rng are supplied (training path).
    """
    emb = params["embedding"][ids]
    m = mask[:, :, None]
    denom = np.maximum(mask.sum(axis=1, keepdims=True), 1.0)
    pooled = (emb * m).sum(axis=1) / denom

    inputs = [pooled]  # what each dense layer consumed
    tanh_outs: list[np.ndarray] = []
    drop_masks: list[np.ndarray | None] = []
    h = pooled
    for i in range(num_layers - 1):
        z = h @ params[f"w{i}"] + params[f"b{i}"]
        a = np.tanh(z)
        tanh_outs.append(a)
        if dropout_rate > 0.0 and dropout_rng is not None:
            keep = (dropout_rng.random(a.shape) >= dropout_rate).astype(np.float64)
            keep /= 1.0 - dropout_rate
            h = a * keep
            drop_masks.append(keep)
        else:
            h = a
            drop_masks.append(None)
        inputs.append(h)
    logits = h @ params[f"w{num_layers - 1}"] + params[f"b{num_layers - 1}"]
    probs = softmax(logits)
    cache = {
        "ids": ids,
        "mask": mask,
        "denom": denom,
        "inputs": inputs,
        "tanh_outs": tanh_outs,
        "drop_masks": drop_masks,
        "probs": probs,
    }
    return probs, cache


def backward_pass(
    params: dict[str, np.ndarray],
    cache: dict,
    dlogits: np.ndarray,
    *,
    num_layers: int,
) -> dict[str, np.ndarray]:
    """Exact gradients for every parameter given d loss / d logits."""
    inputs = cache["inputs"]
    grads: dict[str, np.ndarray] = {}
    d = dlogits
    grads[f"w{num_layers - 1}"] = inputs[-1].T @ d
    grads[f"b{num_layers - 1}"] = d.sum(axis=0)
    d = d @ params[f"w{num_layers - 1}"].T
    for i in range(num_layers - 2, -1, -1):
        keep = cache["drop_masks"][i]
        if keep is not None:
            d = d * keep
        a = cache["tanh_outs"][i]
        dz = d * (1.0 - a * a)
        grads[f"w{i}"] = inputs[i].T @ dz
        grads[f"b{i}"] = dz.sum(axis=0)
        d = dz @ params[f"w{i}"].T

    ids, mask, denom = cache["ids"], cache["mask"], cache["denom"]
    demb_rows = (d[:, None, :] * mask[:, :, None]) / denom[:, :, None]
    grad_emb = np.zeros_like(params["embedding"])
    np.add.at(grad_emb, ids, demb_rows)
    grads["embedding"] = grad_emb
    return grads


def forward(model: ModelCheckpoint, batch: Sequence[TokenSeq]) -> np.ndarray:
    """Inference-mode class probability rows for a TokenSeq batch."""
    ids, mask, _ = batch_arrays(batch)
    if ids.size and ids.max() >= model.config.vocab_size:
        raise ValueError(f"token id {int(ids.max())} outside vocabulary of size {model.config.vocab_size}")
    if ids.size and ids.min() < 0:
        raise ValueError("negative token id")
    probs, _ = forward_pass(model.params, ids, mask, num_layers=len(model.config.hidden) + 1)
    return probs


def predict(model: ModelCheckpoint, items: Sequence[TokenSeq]) -> tuple[np.ndarray, np.ndarray]:
    """Argmax class ids (ties to the lowest id) plus the probability rows."""
    probs = forward(model, items)
    return probs.argmax(axis=1), probs


def save_checkpoint(ckpt: ModelCheckpoint, path) -> None:
    """Write the JSON checkpoint container.

    Layout: {"format", "version", "backbone", "classes", "step", "params"}
    where each params entry is {"shape", "dtype": "float64", "data"} and
    data is base64 of the C-order little-endian float64 bytes. The byte
    layout is fixed, so save/load round-trips are bit-stable.
    """
    doc = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "backbone": {
            "vocab_size": ckpt.config.vocab_size,
            "num_classes": ckpt.config.num_classes,
            "embedding_dim": ckpt.config.embedding_dim,
            "hidden": list(ckpt.config.hidden),
            "dropout_rate": ckpt.config.dropout_rate,
            "seed": ckpt.config.seed,
        },
        "classes": list(ckpt.classes),
        "step": ckpt.step,
        "params": {
            name: {
                "shape": list(array.shape),
                "dtype": "float64",
                "data": base64.b64encode(np.ascontiguousarray(array, dtype="<f8").tobytes()).decode("ascii"),
            }
            for name, array in ckpt.params.items()
        },
    }
    Path(path).write_text(json.dumps(doc, indent=1), encoding="utf-8")


def load_checkpoint(path) -> ModelCheckpoint:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if doc.get("format") != CHECKPOINT_FORMAT:
        raise ValueError(f"not a checkpoint file: format tag {doc.get('format')!r}")
    if doc.get("version") != CHECKPOINT_VERSION:
        raise ValueError(f"unsupported checkpoint version {doc.get('version')!r}")
    backbone = doc["backbone"]
    config = BackboneConfig(
        vocab_size=backbone["vocab_size"],
        num_classes=backbone["num_classes"],
        embedding_dim=backbone["embedding_dim"],
        hidden=tuple(backbone["hidden"]),
        dropout_rate=backbone["dropout_rate"],
        seed=backbone["seed"],
    )
    params = {}
    for name, entry in doc["params"].items():
        raw = base64.b64decode(entry["data"])
        params[name] = np.frombuffer(raw, dtype="<f8").reshape(entry["shape"]).astype(np.float64)
    ckpt = ModelCheckpoint(params=params, config=config, classes=tuple(doc["classes"]), step=doc["step"])
    _check_shapes(ckpt)
    return ckpt


def _check_shapes(ckpt: ModelCheckpoint) -> None:
    cfg = ckpt.config
    dims = [cfg.embedding_dim, *cfg.hidden, cfg.num_classes]
    expected = {"embedding": (cfg.vocab_size, cfg.embedding_dim)}
    for i, (fan_in, fan_out) in enumerate(zip(dims, dims[1:])):
        expected[f"w{i}"] = (fan_in, fan_out)
        expected[f"b{i}"] = (fan_out,)
    for name, shape in expected.items():
        if name not in ckpt.params:
            raise ValueError(f"checkpoint is missing parameter {name!r}")
        if tuple(ckpt.params[name].shape) != shape:
            raise ValueError(
                f"parameter {name!r} has shape {tuple(ckpt.params[name].shape)}, expected {shape}"
            )
