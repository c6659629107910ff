"""Tests for src/autodiff/gradcheck.py."""

import numpy as np
import pytest

from src.autodiff.gradcheck import finite_diff_check, relative_error
from src.autodiff.loss import bce_loss
from src.autodiff.tensor import Tape


def _logistic_closure(x, y):
    def closure(p):
        tape = Tape()
        w, b = tape.param("w", p["w"]), tape.param("b", p["b"])
        return tape, bce_loss(tape.sigmoid(tape.constant(x) @ w.T + b), y)
    return closure


@pytest.fixture
def problem():
    rng = np.random.default_rng(1)
    x = rng.normal(size=(20, 4))
    y = (rng.uniform(size=20) < 0.5).astype(float)
    params = {"w": rng.normal(size=(1, 4)), "b": np.zeros((1, 1))}
    return _logistic_closure(x, y), params


class TestFiniteDiff:
    def test_correct_gradient_passes(self, problem):
        closure, params = problem
        report = finite_diff_check(closure, params)
        assert report.passed
        assert report.checked_entries == 5
        assert set(report.errors) == {"w", "b"}

    def test_wrong_gradient_fails(self, problem):
        closure, params = problem
        tape, loss = closure(params)
        grads = tape.backward(loss)
        grads["w"] = grads["w"] * 1.1
        report = finite_diff_check(closure, params, analytic=grads)
        assert not report.passed
        assert report.worst == "w"

    def test_sampling_limits_entries(self, problem):
        closure, params = problem
        report = finite_diff_check(closure, params, max_entries=2)
        assert report.checked_entries == 3

    def test_bad_step(self, problem):
        closure, params = problem
        with pytest.raises(ValueError):
            finite_diff_check(closure, params, h=0.0)

    def test_params_unchanged(self, problem):
        closure, params = problem
        before = params["w"].copy()
        finite_diff_check(closure, params)
        np.testing.assert_array_equal(params["w"], before)


def test_relative_error_floor():
    assert relative_error(0.0, 0.0) == 0.0
    assert relative_error(1e-12, 0.0) == pytest.approx(1e-4)
    assert relative_error(2.0, 1.0) == pytest.approx(0.5)
