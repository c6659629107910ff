"""Tests for src/autodiff/optim.py."""

import math

import numpy as np
import pytest

from src.autodiff.optim import AdamState, adam_step
from src.autodiff.tensor import ShapeError


class TestAdam:
    def test_first_step_moves_by_lr(self):
        state = AdamState(lr=0.1)
        out = adam_step(state, {"w": np.array([[1.0, -1.0]])}, {"w": np.array([[3.0, -0.5]])})
        # bias-corrected first step is lr · sign(g) up to eps
        np.testing.assert_allclose(out["w"], [[0.9, -0.9]], atol=1e-6)
        assert state.step == 1

    def test_weight_decay_joins_gradient(self):
        state = AdamState(lr=0.1, weight_decay=1.0)
        out = adam_step(state, {"w": np.array([[2.0]])}, {"w": np.array([[0.0]])})
        assert out["w"][0, 0] == pytest.approx(1.9, abs=1e-6)

    def test_ten_step_trace(self):
        lr, lam, b1, b2, eps = 0.05, 0.1, 0.9, 0.999, 1e-8
        target = np.array([[0.5, -2.0, 3.0]])
        theta = np.array([[1.0, 1.0, -1.0]])
        state = AdamState(lr=lr, weight_decay=lam, beta1=b1, beta2=b2, eps=eps)

        expected = [float(x) for x in theta[0]]
        m = [0.0] * 3
        v = [0.0] * 3
        for t in range(1, 11):
            grad = theta - target
            theta = adam_step(state, {"w": theta}, {"w": grad})["w"]
            for i in range(3):
                g = (expected[i] - float(target[0, i])) + lam * expected[i]
                m[i] = b1 * m[i] + (1 - b1) * g
                v[i] = b2 * v[i] + (1 - b2) * g * g
                m_hat = m[i] / (1 - b1 ** t)
                v_hat = v[i] / (1 - b2 ** t)
                expected[i] -= lr * m_hat / (math.sqrt(v_hat) + eps)
            np.testing.assert_allclose(theta[0], expected, rtol=0, atol=1e-12)
        assert state.step == 10

    def test_zero_lr_is_identity(self):
        params = {"w": np.array([[1.0, 2.0]])}
        out = adam_step(AdamState(lr=0.0), params, {"w": np.ones((1, 2))})
        np.testing.assert_array_equal(out["w"], params["w"])

    def test_does_not_mutate_inputs(self):
        params = {"w": np.array([[1.0]])}
        adam_step(AdamState(lr=0.5), params, {"w": np.array([[1.0]])})
        assert params["w"][0, 0] == 1.0

    def test_minimizes_quadratic(self):
        state = AdamState(lr=0.05)
        params = {"w": np.array([[5.0, -3.0]])}
        for _ in range(500):
            params = adam_step(state, params, {"w": 2.0 * params["w"]})
        np.testing.assert_allclose(params["w"], 0.0, atol=5e-2)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            adam_step(AdamState(), {"w": np.ones((2, 2))}, {"w": np.ones((2, 1))})

    def test_missing_gradient(self):
        with pytest.raises(ShapeError):
            adam_step(AdamState(), {"w": np.ones((2, 2))}, {})
