import math

import numpy as np
import pytest

from imbtext.optim import adamw_step, init_adamw_state, lr_at
from imbtext.training import TrainConfig


def scalar_params(theta):
    return {"w": np.array([float(theta)])}


class TestAdamW:
    def test_zero_gradient_no_decay_is_identity(self):
        params = scalar_params(1.5)
        state = init_adamw_state(params)
        new, _ = adamw_step(params, {"w": np.zeros(1)}, state, lr=0.1, weight_decay=0.0)
        assert new["w"][0] == 1.5

    def test_first_step_hand_computed(self):
        # m_hat = v_hat = 1 after bias correction; update = lr / (1 + eps)
        params = scalar_params(0.0)
        state = init_adamw_state(params)
        new, state = adamw_step(params, {"w": np.ones(1)}, state, lr=0.1, weight_decay=0.0)
        assert new["w"][0] == pytest.approx(-0.1, abs=1e-8)
        assert state.t == 1

    def test_second_step_hand_computed(self):
        # with g=1 both steps, bias-corrected moments stay exactly 1
        params = scalar_params(0.0)
        state = init_adamw_state(params)
        for _ in range(2):
            params, state = adamw_step(params, {"w": np.ones(1)}, state, lr=0.1, weight_decay=0.0)
        assert params["w"][0] == pytest.approx(-0.2, abs=1e-7)
        assert state.t == 2

    def test_decoupled_decay(self):
        params = scalar_params(2.0)
        state = init_adamw_state(params)
        new, _ = adamw_step(params, {"w": np.zeros(1)}, state, lr=0.1, weight_decay=0.1)
        assert new["w"][0] == pytest.approx(2.0 * (1.0 - 0.01), abs=1e-12)

    def test_decay_uses_incoming_value(self):
        # decay term must be computed from theta_old, not the post-gradient value
        params = scalar_params(2.0)
        state = init_adamw_state(params)
        new, _ = adamw_step(params, {"w": np.ones(1)}, state, lr=0.1, weight_decay=0.1)
        expected = 2.0 - 0.1 * 0.1 * 2.0 - 0.1 * 1.0 / (1.0 + 1e-8)
        assert new["w"][0] == pytest.approx(expected, abs=1e-12)

    def test_shape_mismatch_rejected(self):
        params = {"w": np.zeros((2, 2))}
        state = init_adamw_state(params)
        with pytest.raises(ValueError, match="shape"):
            adamw_step(params, {"w": np.zeros(3)}, state, lr=0.1)

    def test_missing_gradient_rejected(self):
        params = {"w": np.zeros(2)}
        state = init_adamw_state(params)
        with pytest.raises(ValueError, match="missing"):
            adamw_step(params, {}, state, lr=0.1)

    def test_pure_inputs_untouched(self):
        params = scalar_params(1.0)
        state = init_adamw_state(params)
        adamw_step(params, {"w": np.ones(1)}, state, lr=0.1)
        assert params["w"][0] == 1.0
        assert state.t == 0 and state.m["w"][0] == 0.0


class TestSchedule:
    CFG = TrainConfig(epochs=1, peak_lr=5e-5, warmup_fraction=0.10)

    def test_step_zero_is_zero(self):
        assert lr_at(0, 100, self.CFG) == 0.0

    def test_warmup_end_hits_peak(self):
        # both one-sided formulas at the boundary evaluate to peak
        w, total = 10, 100
        linear = self.CFG.peak_lr * w / w
        cosine = self.CFG.peak_lr * 0.5 * (1 + math.cos(math.pi * 0.0))
        assert abs(linear - self.CFG.peak_lr) < 1e-12
        assert abs(cosine - self.CFG.peak_lr) < 1e-12
        assert abs(lr_at(w, total, self.CFG) - self.CFG.peak_lr) < 1e-12

    def test_cosine_midpoint_is_half_peak(self):
        # w=10, span 90: step 55 sits exactly halfway through the cosine
        assert abs(lr_at(55, 100, self.CFG) - self.CFG.peak_lr / 2) < 1e-12

    def test_final_step_is_zero(self):
        assert lr_at(100, 100, self.CFG) == 0.0

    def test_warmup_monotone_then_decay_monotone(self):
        values = [lr_at(s, 100, self.CFG) for s in range(101)]
        assert all(a < b for a, b in zip(values[:10], values[1:11]))
        assert all(a >= b for a, b in zip(values[10:], values[11:]))

    def test_no_warmup_starts_at_peak(self):
        cfg = TrainConfig(epochs=1, peak_lr=1.0, warmup_fraction=0.0)
        assert lr_at(0, 50, cfg) == 1.0

    def test_bounds_validation(self):
        with pytest.raises(ValueError):
            lr_at(-1, 100, self.CFG)
        with pytest.raises(ValueError):
            lr_at(101, 100, self.CFG)
        with pytest.raises(ValueError):
            lr_at(0, 0, self.CFG)
