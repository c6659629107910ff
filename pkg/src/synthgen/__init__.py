"""Synthetic labeled AML transaction graphs with planted motifs."""

from .config import GenConfig
from .generator import GeneratedGraph, GenerationError, MotifInstance, Provenance, generate
from .report import SignalReport, oracle_scores, signal_strength_report, without_amounts

__all__ = [
    "GenConfig", "GeneratedGraph", "GenerationError", "MotifInstance", "Provenance",
    "SignalReport", "generate", "oracle_scores", "signal_strength_report", "without_amounts",
]
