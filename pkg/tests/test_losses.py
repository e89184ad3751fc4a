import math

import numpy as np
import pytest

from imbtext.losses import EPS, FocalParams, cross_entropy, dloss_dlogits, focal_loss


def random_rows(rng, n, k):
    raw = rng.random((n, k)) + 1e-3
    return raw / raw.sum(axis=1, keepdims=True)


class TestCrossEntropy:
    def test_certain_prediction_is_zero(self):
        assert cross_entropy(np.array([[0.0, 1.0]]), [1]) == 0.0

    def test_uniform_row_k4(self):
        rows = np.full((1, 4), 0.25)
        assert cross_entropy(rows, [2]) == pytest.approx(math.log(4), abs=1e-12)

    def test_mean_of_two_items(self):
        rows = np.array([[1.0, 0.0, 0.0, 0.0], [0.25, 0.25, 0.25, 0.25]])
        expected = (0.0 + math.log(4)) / 2
        assert cross_entropy(rows, [0, 1]) == pytest.approx(expected, abs=1e-12)

    def test_sum_and_none_reductions(self):
        rows = np.array([[0.5, 0.5], [0.5, 0.5]])
        assert cross_entropy(rows, [0, 1], reduction="sum") == pytest.approx(2 * math.log(2))
        per = cross_entropy(rows, [0, 1], reduction="none")
        assert per.shape == (2,)

    def test_zero_probability_clamped_finite(self):
        value = cross_entropy(np.array([[0.0, 1.0]]), [0])
        assert value == pytest.approx(-math.log(EPS))
        assert math.isfinite(value)

    def test_target_validation(self):
        with pytest.raises(ValueError):
            cross_entropy(np.array([[0.5, 0.5]]), [2])


class TestFocalLoss:
    def test_certain_prediction_is_exactly_zero(self):
        rows = np.array([[0.0, 1.0]])
        for gamma in (0.0, 0.5, 2.0, 5.0):
            assert focal_loss(rows, [1], FocalParams(alpha=1.0, gamma=gamma)) == 0.0

    def test_reduces_to_cross_entropy_at_half(self):
        rows = np.array([[0.5, 0.5]])
        fp = FocalParams(alpha=1.0, gamma=0.0)
        assert focal_loss(rows, [0], fp) == pytest.approx(math.log(2), abs=1e-12)

    def test_point_value_quarter_ln2(self):
        rows = np.array([[0.5, 0.5]])
        fp = FocalParams(alpha=1.0, gamma=2.0)
        assert focal_loss(rows, [0], fp) == pytest.approx(0.25 * math.log(2), abs=1e-12)

    def test_identity_with_cross_entropy_over_random_rows(self):
        rng = np.random.default_rng(12)
        rows = random_rows(rng, 1000, 5)
        targets = rng.integers(0, 5, size=1000)
        fp = FocalParams(alpha=1.0, gamma=0.0, reduction="none")
        diff = np.abs(focal_loss(rows, targets, fp) - cross_entropy(rows, targets, "none"))
        assert diff.max() < 1e-9

    def test_monotone_in_gamma(self):
        rng = np.random.default_rng(3)
        rows = random_rows(rng, 50, 4)
        targets = rng.integers(0, 4, size=50)
        gammas = [0.0, 0.5, 1.0, 2.0, 4.0]
        values = [
            focal_loss(rows, targets, FocalParams(alpha=1.0, gamma=g)) for g in gammas
        ]
        assert all(a >= b - 1e-15 for a, b in zip(values, values[1:]))

    def test_linear_in_alpha(self):
        rng = np.random.default_rng(5)
        rows = random_rows(rng, 20, 3)
        targets = rng.integers(0, 3, size=20)
        base = focal_loss(rows, targets, FocalParams(alpha=1.0, gamma=2.0))
        for alpha in (0.0, 0.5, 2.0, 7.0):
            value = focal_loss(rows, targets, FocalParams(alpha=alpha, gamma=2.0))
            assert value == pytest.approx(alpha * base, rel=1e-12)

    def test_param_validation(self):
        with pytest.raises(ValueError):
            FocalParams(alpha=-1.0)
        with pytest.raises(ValueError):
            FocalParams(gamma=-0.5)
        with pytest.raises(ValueError):
            FocalParams(reduction="median")

    def test_finite_everywhere(self):
        rows = np.array([[1.0, 0.0], [0.0, 1.0], [0.5, 0.5]])
        value = focal_loss(rows, [1, 1, 0], FocalParams(alpha=2.0, gamma=3.0))
        assert math.isfinite(value)


class TestLogitGradients:
    def test_cross_entropy_grad_is_p_minus_onehot(self):
        rng = np.random.default_rng(8)
        rows = random_rows(rng, 10, 4)
        targets = rng.integers(0, 4, size=10)
        g = dloss_dlogits(rows, targets, "cross_entropy")
        onehot = np.zeros_like(rows)
        onehot[np.arange(10), targets] = 1.0
        assert np.allclose(g, rows - onehot, atol=1e-15)

    def test_focal_gamma_zero_matches_cross_entropy(self):
        rng = np.random.default_rng(9)
        rows = random_rows(rng, 200, 5)
        targets = rng.integers(0, 5, size=200)
        ce = dloss_dlogits(rows, targets, "cross_entropy")
        fo = dloss_dlogits(rows, targets, "focal", FocalParams(alpha=1.0, gamma=0.0))
        assert np.abs(ce - fo).max() < 1e-12

    def test_focal_grad_against_finite_differences_on_logits(self):
        rng = np.random.default_rng(10)
        for gamma in (0.5, 1.0, 2.0):
            logits = rng.normal(size=(6, 4))
            targets = rng.integers(0, 4, size=6)
            fp = FocalParams(alpha=1.3, gamma=gamma, reduction="sum")

            def loss_of(z):
                e = np.exp(z - z.max(axis=1, keepdims=True))
                p = e / e.sum(axis=1, keepdims=True)
                return focal_loss(p, targets, fp)

            e = np.exp(logits - logits.max(axis=1, keepdims=True))
            probs = e / e.sum(axis=1, keepdims=True)
            analytic = dloss_dlogits(probs, targets, "focal", fp)
            h = 1e-6
            numeric = np.zeros_like(logits)
            for i in range(logits.shape[0]):
                for j in range(logits.shape[1]):
                    up = logits.copy()
                    up[i, j] += h
                    down = logits.copy()
                    down[i, j] -= h
                    numeric[i, j] = (loss_of(up) - loss_of(down)) / (2 * h)
            assert np.abs(analytic - numeric).max() < 1e-7

    def test_grad_at_certain_prediction_is_zero_for_focal(self):
        rows = np.array([[0.0, 1.0]])
        g = dloss_dlogits(rows, [1], "focal", FocalParams(alpha=1.0, gamma=2.0))
        assert np.all(np.isfinite(g))
        assert np.abs(g).max() < 1e-9

    def test_unknown_loss_rejected(self):
        with pytest.raises(ValueError):
            dloss_dlogits(np.array([[1.0]]), [0], "hinge")
