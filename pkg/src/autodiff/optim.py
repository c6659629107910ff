"""Adam with an L2 penalty folded into the gradient."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .tensor import ShapeError

logger = logging.getLogger(__name__)


@dataclass
class AdamState:
    lr: float = 1e-3
    weight_decay: float = 0.0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    first_moment: dict[str, np.ndarray] = field(default_factory=dict)
    second_moment: dict[str, np.ndarray] = field(default_factory=dict)


def adam_step(
    state: AdamState,
    params: dict[str, np.ndarray],
    grads: dict[str, np.ndarray],
) -> dict[str, np.ndarray]:
    """
    One bias-corrected Adam update. ``λθ`` is added to each gradient before the moment
    update. Returns new parameter arrays; ``state`` is advanced in place.
    """
    state.step += 1
    t = state.step
    b1, b2 = state.beta1, state.beta2
    updated: dict[str, np.ndarray] = {}
    for name, theta in params.items():
        g = grads.get(name)
        if g is None:
            raise ShapeError(f"adam_step: no gradient for {name!r}")
        if g.shape != theta.shape:
            raise ShapeError(f"adam_step: {name!r} parameter {theta.shape} vs gradient {g.shape}")
        g = g + state.weight_decay * theta
        m = state.first_moment.get(name)
        v = state.second_moment.get(name)
        if m is None:
            m = np.zeros_like(theta)
            v = np.zeros_like(theta)
        m = b1 * m + (1.0 - b1) * g
        v = b2 * v + (1.0 - b2) * g * g
        state.first_moment[name] = m
        state.second_moment[name] = v
        m_hat = m / (1.0 - b1 ** t)
        v_hat = v / (1.0 - b2 ** t)
        updated[name] = theta - state.lr * m_hat / (np.sqrt(v_hat) + state.eps)
    return updated
