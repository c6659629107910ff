"""
Dense reverse-mode differentiation on a tape.

Every op is a small class with ``forward`` (which saves what it needs) and ``backward``
(which maps the output gradient to one gradient per input). ``Tape.apply`` runs the forward,
checks the result is finite, and appends the op to the record; ``Tape.backward`` walks the
record in exact reverse order.

All values are 2-D float64 matrices.
"""

from __future__ import annotations

import logging
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.special import expit

logger = logging.getLogger(__name__)


class ShapeError(ValueError):
    """Raised when an op receives incompatible shapes."""


class NumericError(ArithmeticError):
    """Raised when a kernel op produces NaN or Inf, or training diverges."""


def _as_matrix(value: np.ndarray | float | Sequence) -> np.ndarray:
    arr = np.array(value, dtype=np.float64)
    if arr.ndim == 0:
        return arr.reshape(1, 1)
    if arr.ndim == 1:
        return arr.reshape(1, -1) if arr.size else arr.reshape(0, 0)
    if arr.ndim != 2:
        raise ShapeError(f"tensors are 2-D, got shape {arr.shape}")
    return arr


# ── Tensor ────────────────────────────────────────────────────────────────────

class Tensor:
    """A matrix recorded on a tape. Arithmetic operators dispatch to the tape."""

    __slots__ = ("data", "tape", "index", "name", "trainable")

    def __init__(self, data: np.ndarray, tape: "Tape", index: int,
                 name: Optional[str] = None, trainable: bool = False):
        self.data = data
        self.tape = tape
        self.index = index
        self.name = name
        self.trainable = trainable

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape  # type: ignore[return-value]

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    def item(self) -> float:
        if self.data.shape != (1, 1):
            raise ShapeError(f"item() needs a 1x1 tensor, got {self.data.shape}")
        return float(self.data[0, 0])

    def __repr__(self) -> str:
        label = f" {self.name!r}" if self.name else ""
        return f"<Tensor{label} {self.rows}x{self.cols}>"

    def __matmul__(self, other: "Tensor") -> "Tensor":
        return self.tape.matmul(self, other)

    def __add__(self, other: "Tensor") -> "Tensor":
        return self.tape.add(self, other)

    def __mul__(self, other: "Tensor | float") -> "Tensor":
        if isinstance(other, Tensor):
            return self.tape.mul(self, other)
        return self.tape.scale(self, float(other))

    __rmul__ = __mul__

    @property
    def T(self) -> "Tensor":
        return self.tape.transpose(self)


# ── Ops ───────────────────────────────────────────────────────────────────────

class Op:
    """Base class: subclasses save context in ``forward`` and use it in ``backward``."""

    name = "op"

    def forward(self, *xs: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def backward(self, grad: np.ndarray) -> tuple[Optional[np.ndarray], ...]:
        raise NotImplementedError


class MatMul(Op):
    name = "matmul"

    def forward(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if a.shape[1] != b.shape[0]:
            raise ShapeError(f"matmul: {a.shape} @ {b.shape}")
        self.a, self.b = a, b
        return a @ b

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return grad @ self.b.T, self.a.T @ grad


class Add(Op):
    """Elementwise sum; the second operand may be a single row broadcast over rows."""

    name = "add"

    def forward(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        self.broadcast = b.shape[0] == 1 and a.shape[0] != 1 and b.shape[1] == a.shape[1]
        if a.shape != b.shape and not self.broadcast:
            raise ShapeError(f"add: {a.shape} + {b.shape}")
        return a + b

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        if self.broadcast:
            return grad, grad.sum(axis=0, keepdims=True)
        return grad, grad


class Scale(Op):
    name = "scale"

    def __init__(self, k: float):
        self.k = k

    def forward(self, a: np.ndarray) -> np.ndarray:
        return a * self.k

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray]:
        return (grad * self.k,)


class Mul(Op):
    name = "mul"

    def forward(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if a.shape != b.shape:
            raise ShapeError(f"mul: {a.shape} * {b.shape}")
        self.a, self.b = a, b
        return a * b

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return grad * self.b, grad * self.a


class Sigmoid(Op):
    name = "sigmoid"

    def forward(self, a: np.ndarray) -> np.ndarray:
        self.out = expit(a)
        return self.out

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray]:
        return (grad * self.out * (1.0 - self.out),)


class Transpose(Op):
    name = "transpose"

    def forward(self, a: np.ndarray) -> np.ndarray:
        return np.ascontiguousarray(a.T)

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray]:
        return (np.ascontiguousarray(grad.T),)


class ConcatCols(Op):
    name = "concat_cols"

    def forward(self, *xs: np.ndarray) -> np.ndarray:
        rows = {x.shape[0] for x in xs}
        if len(rows) > 1:
            raise ShapeError(f"concat_cols: row counts differ {[x.shape for x in xs]}")
        self.widths = [x.shape[1] for x in xs]
        n = xs[0].shape[0] if xs else 0
        return np.concatenate(xs, axis=1) if xs else np.zeros((n, 0))

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray, ...]:
        cuts = np.cumsum(self.widths)[:-1]
        return tuple(np.split(grad, cuts, axis=1))


class SumRows(Op):
    """Column sums: (n × c) → (1 × c)."""

    name = "sum_rows"

    def forward(self, a: np.ndarray) -> np.ndarray:
        self.n = a.shape[0]
        return a.sum(axis=0, keepdims=True)

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray]:
        return (np.repeat(grad, self.n, axis=0),)


class SumAll(Op):
    name = "sum_all"

    def forward(self, a: np.ndarray) -> np.ndarray:
        self.shape = a.shape
        return np.array([[a.sum()]])

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray]:
        return (np.full(self.shape, grad[0, 0]),)


class SelectRows(Op):
    name = "select_rows"

    def __init__(self, idx: np.ndarray):
        self.idx = np.asarray(idx, dtype=np.int64)

    def forward(self, a: np.ndarray) -> np.ndarray:
        if self.idx.size and (self.idx.min() < 0 or self.idx.max() >= a.shape[0]):
            raise ShapeError(f"select_rows: index out of range for {a.shape}")
        self.shape = a.shape
        return a[self.idx]

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray]:
        out = np.zeros(self.shape)
        np.add.at(out, self.idx, grad)
        return (out,)


class SegmentSum(Op):
    """
    Sum contiguous row segments: row ``v`` of the output is the sum of input rows
    ``indptr[v]:indptr[v + 1]``. Reduction runs in storage order.
    """

    name = "segment_sum"

    def __init__(self, indptr: np.ndarray):
        self.indptr = np.asarray(indptr, dtype=np.int64)

    def forward(self, x: np.ndarray) -> np.ndarray:
        m = int(self.indptr[-1])
        if x.shape[0] != m:
            raise ShapeError(f"segment_sum: {x.shape[0]} rows for {m} segment entries")
        n = self.indptr.shape[0] - 1
        self.owner = np.repeat(np.arange(n), np.diff(self.indptr))
        incidence = sp.csr_matrix((np.ones(m), np.arange(m), self.indptr), shape=(n, m))
        return np.asarray(incidence @ x).reshape(n, x.shape[1])

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray]:
        return (grad[self.owner],)


class EdgeBilinear(Op):
    """
    Per-row matrix-vector product: row ``e`` of ``g`` is a row-major flattened
    (d_out × d_in) matrix applied to row ``e`` of ``h``.
    """

    name = "edge_bilinear"

    def __init__(self, d_out: int):
        self.d_out = d_out

    def forward(self, g: np.ndarray, h: np.ndarray) -> np.ndarray:
        m, d_in = h.shape
        if g.shape != (m, self.d_out * d_in):
            raise ShapeError(f"edge_bilinear: g {g.shape} vs h {h.shape} with d_out={self.d_out}")
        self.g3 = g.reshape(m, self.d_out, d_in)
        self.h = h
        return np.einsum("eoi,ei->eo", self.g3, h)

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        m = grad.shape[0]
        dg = np.einsum("eo,ei->eoi", grad, self.h).reshape(m, -1)
        dh = np.einsum("eo,eoi->ei", grad, self.g3)
        return dg, dh


# ── Tape ──────────────────────────────────────────────────────────────────────

class Tape:
    """Records ops in order and differentiates the recorded program."""

    def __init__(self) -> None:
        self._values: list[np.ndarray] = []
        self._records: list[tuple[Op, tuple[int, ...], int]] = []
        self.params: dict[str, Tensor] = {}

    def __len__(self) -> int:
        return len(self._records)

    def _new(self, data: np.ndarray, name: Optional[str] = None, trainable: bool = False) -> Tensor:
        self._values.append(data)
        return Tensor(data, self, len(self._values) - 1, name=name, trainable=trainable)

    def constant(self, value: np.ndarray | float | Sequence, name: Optional[str] = None) -> Tensor:
        return self._new(_as_matrix(value), name=name)

    def param(self, name: str, value: np.ndarray) -> Tensor:
        """Register a named trainable tensor (copied so the tape never aliases caller data)."""
        if name in self.params:
            raise ValueError(f"parameter {name!r} registered twice")
        tensor = self._new(_as_matrix(value).copy(), name=name, trainable=True)
        self.params[name] = tensor
        return tensor

    def apply(self, op: Op, *inputs: Tensor) -> Tensor:
        for t in inputs:
            if t.tape is not self:
                raise ValueError(f"{op.name}: input {t!r} belongs to another tape")
        out = op.forward(*(t.data for t in inputs))
        if not np.all(np.isfinite(out)):
            raise NumericError(f"{op.name} produced non-finite values")
        tensor = self._new(out)
        self._records.append((op, tuple(t.index for t in inputs), tensor.index))
        return tensor

    # ── Forward ops ──

    def matmul(self, a: Tensor, b: Tensor) -> Tensor:
        return self.apply(MatMul(), a, b)

    def add(self, a: Tensor, b: Tensor) -> Tensor:
        return self.apply(Add(), a, b)

    def scale(self, a: Tensor, k: float) -> Tensor:
        return self.apply(Scale(k), a)

    def mul(self, a: Tensor, b: Tensor) -> Tensor:
        return self.apply(Mul(), a, b)

    def sigmoid(self, a: Tensor) -> Tensor:
        return self.apply(Sigmoid(), a)

    def transpose(self, a: Tensor) -> Tensor:
        return self.apply(Transpose(), a)

    def concat_cols(self, tensors: Sequence[Tensor]) -> Tensor:
        if not tensors:
            raise ShapeError("concat_cols: empty argument list")
        return self.apply(ConcatCols(), *tensors)

    def sum_rows(self, a: Tensor) -> Tensor:
        return self.apply(SumRows(), a)

    def sum_all(self, a: Tensor) -> Tensor:
        return self.apply(SumAll(), a)

    def select_rows(self, a: Tensor, idx: np.ndarray) -> Tensor:
        return self.apply(SelectRows(idx), a)

    def segment_sum(self, x: Tensor, indptr: np.ndarray) -> Tensor:
        return self.apply(SegmentSum(indptr), x)

    def edge_bilinear(self, g: Tensor, h: Tensor, d_out: int) -> Tensor:
        return self.apply(EdgeBilinear(d_out), g, h)

    # ── Reverse pass ──

    def backward(self, loss: Tensor) -> dict[str, np.ndarray]:
        """Gradients of a scalar ``loss`` with respect to every registered parameter."""
        if loss.tape is not self:
            raise ValueError("loss belongs to another tape")
        if loss.shape != (1, 1):
            raise ShapeError(f"backward needs a scalar (1x1) loss, got {loss.shape}")

        grads: list[Optional[np.ndarray]] = [None] * len(self._values)
        grads[loss.index] = np.ones((1, 1))
        for op, inputs, output in reversed(self._records):
            g = grads[output]
            if g is None:
                continue
            for idx, gi in zip(inputs, op.backward(g)):
                if gi is None:
                    continue
                grads[idx] = gi if grads[idx] is None else grads[idx] + gi

        result: dict[str, np.ndarray] = {}
        for name, tensor in self.params.items():
            g = grads[tensor.index]
            result[name] = np.zeros_like(tensor.data) if g is None else g
        return result
