"""Binary cross-entropy as a tape op."""

from __future__ import annotations

import numpy as np

from .tensor import Op, ShapeError, Tape, Tensor

EPS = 1e-12


class BinaryCrossEntropy(Op):
    """Mean negative log-likelihood of 0/1 labels under scores clamped to [eps, 1 - eps]."""

    name = "bce_loss"

    def __init__(self, labels: np.ndarray, eps: float = EPS):
        self.labels = np.asarray(labels, dtype=np.float64).reshape(-1, 1)
        self.eps = eps

    def forward(self, scores: np.ndarray) -> np.ndarray:
        n = scores.shape[0]
        if n == 0:
            raise ShapeError("bce_loss: no scores")
        if scores.shape != (n, 1) or self.labels.shape[0] != n:
            raise ShapeError(f"bce_loss: scores {scores.shape} vs labels {self.labels.shape}")
        self.scores = scores
        p = np.clip(scores, self.eps, 1.0 - self.eps)
        self.p = p
        y = self.labels
        return np.array([[-np.mean(y * np.log(p) + (1.0 - y) * np.log(1.0 - p))]])

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray]:
        n = self.p.shape[0]
        y = self.labels
        d = (-(y / self.p) + (1.0 - y) / (1.0 - self.p)) / n
        # clamping is flat outside [eps, 1 - eps]
        inside = (self.scores >= self.eps) & (self.scores <= 1.0 - self.eps)
        return (grad[0, 0] * d * inside,)


def bce_loss(scores: Tensor, labels: np.ndarray | Tensor, eps: float = EPS) -> Tensor:
    """−(1/n) Σ [y·log ŷ + (1−y)·log(1−ŷ)] recorded on the scores' tape."""
    tape: Tape = scores.tape
    y = labels.data if isinstance(labels, Tensor) else labels
    return tape.apply(BinaryCrossEntropy(y, eps), scores)
