"""Tape-based reverse-mode differentiation, Adam and gradient checking."""

from .checkpoint import load_checkpoint, save_checkpoint
from .gradcheck import GradCheckReport, finite_diff_check, relative_error
from .loss import bce_loss
from .optim import AdamState, adam_step
from .tensor import NumericError, Op, ShapeError, Tape, Tensor

__all__ = [
    "AdamState", "GradCheckReport", "NumericError", "Op", "ShapeError", "Tape", "Tensor",
    "adam_step", "bce_loss", "finite_diff_check", "load_checkpoint", "relative_error",
    "save_checkpoint",
]
