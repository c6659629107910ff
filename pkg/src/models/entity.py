"""Entity baselines: logistic regression and the sigmoid MLP over the assembled feature table."""

from __future__ import annotations

from typing import Mapping

import numpy as np

from src.autodiff.tensor import ShapeError, Tape, Tensor

from .hetero import head


def entity_forward(
    tape: Tape,
    features: np.ndarray,
    params: Mapping[str, Tensor],
) -> Tensor:
    h = tape.constant(features, name="X/entity")
    expected = params["head/W"].cols if "hidden1/W" not in params else params["hidden1/W"].cols
    if h.cols != expected:
        raise ShapeError(f"entity model expects {expected} feature columns, got {h.cols}")
    k = 1
    while f"hidden{k}/W" in params:
        h = tape.sigmoid(tape.add(tape.matmul(h, params[f"hidden{k}/W"].T), params[f"hidden{k}/b"]))
        k += 1
    return head(tape, h, params)
