import math

import numpy as np
import pytest

from _gradcheck import check_model
from imbtext.losses import FocalParams
from imbtext.model import (
    BackboneConfig,
    ModelCheckpoint,
    forward,
    init_params,
    load_checkpoint,
    predict,
    save_checkpoint,
)
from imbtext.wordpiece import TokenSeq


def seqs_of(id_rows, capacity=6):
    out = []
    for row in id_rows:
        ids = list(row) + [0] * (capacity - len(row))
        out.append(TokenSeq(ids=tuple(ids), length=len(row), label_id=0))
    return out


@pytest.fixture
def small_model():
    cfg = BackboneConfig(vocab_size=12, num_classes=3, embedding_dim=5, hidden=(6,), seed=3)
    return ModelCheckpoint(params=init_params(cfg), config=cfg, classes=("a", "b", "c"))


def logit_model(bias, vocab_size=6, dim=4):
    """Zero weights, fixed output bias: softmax(bias) regardless of input."""
    k = len(bias)
    cfg = BackboneConfig(vocab_size=vocab_size, num_classes=k, embedding_dim=dim, hidden=())
    params = {
        "embedding": np.zeros((vocab_size, dim)),
        "w0": np.zeros((dim, k)),
        "b0": np.asarray(bias, dtype=np.float64),
    }
    return ModelCheckpoint(params=params, config=cfg, classes=tuple(map(str, range(k))))


class TestForward:
    def test_rows_sum_to_one(self, small_model):
        rng = np.random.default_rng(0)
        batch = seqs_of([[int(rng.integers(1, 12)) for _ in range(4)] for _ in range(20)])
        probs = forward(small_model, batch)
        assert np.abs(probs.sum(axis=1) - 1.0).max() < 1e-9
        assert (probs > 0).all() and (probs < 1).all()

    def test_purity(self, small_model):
        batch = seqs_of([[3, 4, 5], [3, 4, 5]])
        probs = forward(small_model, batch)
        assert (probs[0] == probs[1]).all()

    def test_all_pad_row_defined(self, small_model):
        batch = seqs_of([[]]) + seqs_of([[]])
        probs = forward(small_model, batch)
        assert np.isfinite(probs).all()
        assert (probs[0] == probs[1]).all()
        assert abs(probs[0].sum() - 1.0) < 1e-9

    def test_id_out_of_vocab_rejected(self, small_model):
        batch = seqs_of([[99]])
        with pytest.raises(ValueError, match="99"):
            forward(small_model, batch)


class TestPredict:
    def test_argmax(self):
        model = logit_model(np.log([0.1, 0.7, 0.2]))
        ids, probs = predict(model, seqs_of([[1, 2]]))
        assert ids.tolist() == [1]
        assert np.allclose(probs[0], [0.1, 0.7, 0.2], atol=1e-12)

    def test_exact_tie_takes_lowest_id(self):
        model = logit_model([0.0, 0.0])
        ids, probs = predict(model, seqs_of([[1]]))
        assert probs[0, 0] == probs[0, 1] == 0.5
        assert ids.tolist() == [0]

    def test_permutation_equivariant(self, small_model):
        rng = np.random.default_rng(5)
        rows = [[int(rng.integers(1, 12)) for _ in range(3)] for _ in range(10)]
        batch = seqs_of(rows)
        ids, _ = predict(small_model, batch)
        perm = rng.permutation(10)
        ids_perm, _ = predict(small_model, [batch[i] for i in perm])
        assert ids_perm.tolist() == [ids[i] for i in perm]


class TestCheckpointIO:
    def test_round_trip_bit_stable(self, small_model, tmp_path):
        p = tmp_path / "ckpt.json"
        save_checkpoint(small_model, p)
        again = load_checkpoint(p)
        assert again.config == small_model.config
        assert again.classes == small_model.classes
        assert again.step == small_model.step
        for name, array in small_model.params.items():
            assert np.array_equal(again.params[name], array)
        # a second save of the loaded model produces identical bytes
        p2 = tmp_path / "ckpt2.json"
        save_checkpoint(again, p2)
        assert p.read_bytes() == p2.read_bytes()

    def test_format_tag_checked(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text('{"format": "something-else"}', encoding="utf-8")
        with pytest.raises(ValueError, match="format"):
            load_checkpoint(p)

    def test_shape_validation(self, small_model, tmp_path):
        import json

        p = tmp_path / "ckpt.json"
        save_checkpoint(small_model, p)
        doc = json.loads(p.read_text())
        doc["backbone"]["embedding_dim"] = 7  # now inconsistent with arrays
        p.write_text(json.dumps(doc), encoding="utf-8")
        with pytest.raises(ValueError, match="shape"):
            load_checkpoint(p)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            BackboneConfig(vocab_size=0, num_classes=2)
        with pytest.raises(ValueError):
            BackboneConfig(vocab_size=2, num_classes=2, dropout_rate=1.0)


class TestGradients:
    def test_cross_entropy_gradcheck(self):
        rng = np.random.default_rng(21)
        for _ in range(3):
            assert check_model(rng, loss="cross_entropy") < 1e-4

    def test_focal_gradcheck(self):
        rng = np.random.default_rng(22)
        fp = FocalParams(alpha=1.0, gamma=2.0)
        for _ in range(3):
            assert check_model(rng, loss="focal", fp=fp) < 1e-4
