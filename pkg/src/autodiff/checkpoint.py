"""
Parameter checkpoints.

A checkpoint is one JSON object: parameter name → ``{rows, cols, data}`` with row-major
doubles, plus a ``meta`` object (model kind, layer count, seed, schema hash, ...).
Floats are written in their shortest round-trip form, so a reload is bit-exact.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any

import numpy as np

from src.graph.container import atomic_write_text

logger = logging.getLogger(__name__)

META_KEY = "meta"


def save_checkpoint(path: Path, params: dict[str, np.ndarray], meta: dict[str, Any]) -> Path:
    payload: dict[str, Any] = {META_KEY: meta}
    for name, value in params.items():
        if name == META_KEY:
            raise ValueError(f"parameter name {META_KEY!r} is reserved")
        matrix = np.atleast_2d(np.asarray(value, dtype=np.float64))
        payload[name] = {
            "rows": int(matrix.shape[0]),
            "cols": int(matrix.shape[1]),
            "data": [float(x) for x in matrix.reshape(-1)],
        }
    atomic_write_text(path, json.dumps(payload, indent=1) + "\n")
    logger.info("Saved checkpoint with %d tensors to %s", len(params), path)
    return path


def load_checkpoint(path: Path) -> tuple[dict[str, np.ndarray], dict[str, Any]]:
    if not path.exists():
        raise FileNotFoundError(f"Checkpoint not found: {path}")
    with open(path, encoding="utf-8") as f:
        payload = json.load(f)
    meta = payload.pop(META_KEY, {})
    params: dict[str, np.ndarray] = {}
    for name, entry in payload.items():
        rows, cols = int(entry["rows"]), int(entry["cols"])
        data = np.array(entry["data"], dtype=np.float64)
        if data.size != rows * cols:
            raise ValueError(f"{path.name}: {name!r} has {data.size} values for {rows}x{cols}")
        params[name] = data.reshape(rows, cols)
    return params, meta
