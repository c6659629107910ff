"""Tests for src/autodiff/tensor.py."""

import numpy as np
import pytest

from src.autodiff.gradcheck import finite_diff_check
from src.autodiff.tensor import NumericError, ShapeError, Tape


def _check(build, params, tolerance=1e-5):
    """Finite-difference check of ``sum(build(tape, tensors) * weights)``."""
    weights = np.random.default_rng(99).normal(size=(64, 64))

    def closure(p):
        tape = Tape()
        tensors = {k: tape.param(k, v) for k, v in p.items()}
        out = build(tape, tensors)
        w = tape.constant(weights[: out.rows, : out.cols])
        return tape, tape.sum_all(out * w)

    report = finite_diff_check(closure, params, tolerance=tolerance)
    assert report.passed, report.errors


@pytest.fixture
def rng():
    return np.random.default_rng(0)


class TestForward:
    def test_matmul_and_broadcast_add(self):
        tape = Tape()
        a = tape.constant([[1.0, 2.0], [3.0, 4.0]])
        b = tape.constant([[1.0], [1.0]])
        bias = tape.constant([[10.0]])
        out = a @ b + bias
        assert out.data.tolist() == [[13.0], [17.0]]

    def test_shape_errors(self):
        tape = Tape()
        with pytest.raises(ShapeError):
            tape.constant(np.ones((2, 3))) @ tape.constant(np.ones((2, 3)))
        with pytest.raises(ShapeError):
            tape.constant(np.ones((2, 3))) + tape.constant(np.ones((3, 3)))
        with pytest.raises(ShapeError):
            tape.constant(np.ones((1, 2))).item()

    def test_segment_sum(self):
        tape = Tape()
        x = tape.constant([[1.0], [2.0], [4.0]])
        out = tape.segment_sum(x, np.array([0, 2, 2, 3]))
        assert out.data.reshape(-1).tolist() == [3.0, 0.0, 4.0]

    def test_edge_bilinear_matches_loop(self, rng):
        g, h = rng.normal(size=(4, 6)), rng.normal(size=(4, 3))
        tape = Tape()
        out = tape.edge_bilinear(tape.constant(g), tape.constant(h), d_out=2)
        expected = np.stack([g[e].reshape(2, 3) @ h[e] for e in range(4)])
        np.testing.assert_allclose(out.data, expected)

    def test_non_finite_raises(self):
        tape = Tape()
        big = tape.constant([[1e308]])
        with pytest.raises(NumericError):
            big * 10.0

    def test_cross_tape_rejected(self):
        a, b = Tape(), Tape()
        with pytest.raises(ValueError):
            a.constant([[1.0]]) + b.constant([[1.0]])

    def test_param_registered_once(self):
        tape = Tape()
        tape.param("w", np.ones((1, 1)))
        with pytest.raises(ValueError):
            tape.param("w", np.ones((1, 1)))


class TestBackward:
    def test_unreached_param_gets_zeros(self):
        tape = Tape()
        w = tape.param("w", np.ones((2, 2)))
        tape.param("unused", np.ones((3, 1)))
        grads = tape.backward(tape.sum_all(w))
        assert grads["unused"].tolist() == [[0.0], [0.0], [0.0]]
        assert grads["w"].tolist() == [[1.0, 1.0], [1.0, 1.0]]

    def test_shared_input_accumulates(self):
        tape = Tape()
        x = tape.param("x", np.array([[3.0]]))
        grads = tape.backward(x * x)
        assert grads["x"][0, 0] == pytest.approx(6.0)

    def test_loss_must_be_scalar(self):
        tape = Tape()
        x = tape.param("x", np.ones((2, 1)))
        with pytest.raises(ShapeError):
            tape.backward(x)

    def test_matmul_add_sigmoid(self, rng):
        _check(lambda t, p: t.sigmoid(p["a"] @ p["b"].T + p["c"]),
               {"a": rng.normal(size=(5, 3)), "b": rng.normal(size=(4, 3)), "c": rng.normal(size=(1, 4))})

    def test_mul_scale_concat(self, rng):
        _check(lambda t, p: t.concat_cols([p["a"] * p["b"], p["a"] * 0.5, p["c"]]),
               {"a": rng.normal(size=(3, 2)), "b": rng.normal(size=(3, 2)), "c": rng.normal(size=(3, 1))})

    def test_sum_rows_and_select(self, rng):
        _check(lambda t, p: t.sum_rows(t.select_rows(p["a"], np.array([0, 2, 2, 1]))),
               {"a": rng.normal(size=(3, 4))})

    def test_segment_sum(self, rng):
        _check(lambda t, p: t.segment_sum(p["x"], np.array([0, 1, 1, 4, 5])),
               {"x": rng.normal(size=(5, 3))})

    def test_edge_bilinear(self, rng):
        _check(lambda t, p: t.edge_bilinear(p["g"], p["h"], d_out=3),
               {"g": rng.normal(size=(4, 6)), "h": rng.normal(size=(4, 2))})
