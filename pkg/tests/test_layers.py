"""Tests for the Adam optimizer and loss functions."""

import math

import numpy as np
import pytest

from brainslice import autodiff as ad
from brainslice.layers import (AdamState, OptimizerConfig, adam_step, bce_loss,
                               mse_loss)


def make(params):
    return {k: np.asarray(v, dtype=np.float32) for k, v in params.items()}


class TestAdam:
    def test_zero_gradient_no_change(self):
        params = make({"w": [1.0, -2.0, 3.0]})
        grads = make({"w": [0.0, 0.0, 0.0]})
        state = AdamState(params)
        out, _ = adam_step(params, grads, state, OptimizerConfig(0.01))
        np.testing.assert_array_equal(out["w"], params["w"])

    def test_hand_first_step(self):
        # g=1, lr=1e-3, defaults: m_hat = v_hat = 1 -> update ~ -1e-3
        params = make({"w": [0.0]})
        grads = make({"w": [1.0]})
        cfg = OptimizerConfig(1e-3, beta1=0.9, beta2=0.999, eps=1e-8)
        out, state = adam_step(params, grads, AdamState(params), cfg)
        assert state.t == 1
        np.testing.assert_allclose(out["w"], [-1e-3], rtol=1e-5)

    def test_constant_gradient_monotone(self):
        params = make({"w": [0.5]})
        grads = make({"w": [1.0]})
        cfg = OptimizerConfig(1e-2)
        state = AdamState(params)
        values = [params["w"][0]]
        for _ in range(5):
            params, state = adam_step(params, grads, state, cfg)
            values.append(params["w"][0])
        assert all(b < a for a, b in zip(values, values[1:]))

    @pytest.mark.parametrize("scale", [1.0, 2.0, 0.25])
    @pytest.mark.parametrize("sign", [1.0, -1.0])
    def test_update_sign_is_minus_sign_of_gradient(self, scale, sign):
        # scale-awareness: constant gradients of any magnitude step against g
        params = make({"w": [0.1, -0.4]})
        grads = make({"w": [sign * scale, sign * scale]})
        cfg = OptimizerConfig(1e-3)
        state = AdamState(params)
        for _ in range(7):
            new_params, state = adam_step(params, grads, state, cfg)
            step = new_params["w"] - params["w"]
            assert np.all(np.sign(step) == -sign)
            params = new_params

    def test_pure_and_deterministic(self):
        rng = np.random.default_rng(5)
        params = make({"a": rng.standard_normal(4), "b": rng.standard_normal((2, 3))})
        grads = make({"a": rng.standard_normal(4), "b": rng.standard_normal((2, 3))})
        cfg = OptimizerConfig(3e-4, beta1=0.5)
        s0 = AdamState(params)
        p1, s1 = adam_step(params, grads, s0, cfg)
        p2, s2 = adam_step(params, grads, s0, cfg)
        assert s0.t == 0  # input state untouched
        for k in params:
            np.testing.assert_array_equal(p1[k], p2[k])
            np.testing.assert_array_equal(s1.m[k], s2.m[k])

    def test_shape_mismatch(self):
        params = make({"w": [1.0, 2.0]})
        grads = make({"w": [1.0]})
        with pytest.raises(ValueError, match="gradient shape"):
            adam_step(params, grads, AdamState(params), OptimizerConfig(1e-3))

    def test_config_validation(self):
        with pytest.raises(ValueError, match="learning_rate"):
            OptimizerConfig(0.0)
        with pytest.raises(ValueError, match="beta1"):
            OptimizerConfig(1e-3, beta1=1.0)


class TestBceLoss:
    def test_half_prediction(self):
        g = ad.Graph()
        loss = bce_loss(g.leaf([0.5]), np.array([1.0]))
        np.testing.assert_allclose(loss.data, math.log(2), rtol=1e-5)

    def test_perfect_prediction_near_zero(self):
        # clamped at 1e-7, so the floor is -ln(1-1e-7) ~ 1e-7 (float32 rounding on top)
        g = ad.Graph()
        loss = bce_loss(g.leaf([1.0, 0.0]), np.array([1.0, 0.0]))
        assert float(loss.data) < 2e-7

    def test_hand_mean(self):
        g = ad.Graph()
        loss = bce_loss(g.leaf([0.9, 0.1]), np.array([1.0, 0.0]))
        np.testing.assert_allclose(loss.data, -math.log(0.9), rtol=1e-5)

    def test_gradient(self):
        rng = np.random.default_rng(2)
        pred = rng.uniform(0.05, 0.95, size=8).astype(np.float32)
        target = (rng.random(8) > 0.5).astype(np.float32)
        err = ad.grad_check(lambda p: bce_loss(p, target), [pred])
        assert err < 1e-3

    def test_shape_mismatch(self):
        g = ad.Graph()
        with pytest.raises(ValueError, match="bce_loss"):
            bce_loss(g.leaf([0.5, 0.5]), np.array([1.0]))


class TestMseLoss:
    def test_equal_is_zero(self):
        g = ad.Graph()
        x = np.arange(5, dtype=np.float32)
        assert float(mse_loss(g.leaf(x), x).data) == 0.0

    def test_unit_difference(self):
        g = ad.Graph()
        loss = mse_loss(g.leaf([0.0, 0.0]), np.array([1.0, 1.0]))
        np.testing.assert_allclose(loss.data, 1.0)

    def test_hand_mean(self):
        g = ad.Graph()
        loss = mse_loss(g.leaf([1.0, 2.0, 3.0]), np.array([2.0, 2.0, 2.0]))
        np.testing.assert_allclose(loss.data, 2.0 / 3.0, rtol=1e-6)

    def test_gradient(self):
        rng = np.random.default_rng(3)
        pred = rng.standard_normal((2, 5)).astype(np.float32)
        target = rng.standard_normal((2, 5)).astype(np.float32)
        err = ad.grad_check(lambda p: mse_loss(p, target), [pred])
        assert err < 1e-3

    def test_shape_mismatch(self):
        g = ad.Graph()
        with pytest.raises(ValueError, match="mse_loss"):
            mse_loss(g.leaf(np.zeros((2, 2))), np.zeros(4))
