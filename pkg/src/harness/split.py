"""Stratified train/test splits and cross-validation folds over labeled nodes."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from sklearn.model_selection import StratifiedKFold

from .metrics import MetricError


@dataclass(frozen=True, eq=False)
class SplitSpec:
    train: np.ndarray
    test: np.ndarray
    ratio: float
    seed: int

    def prevalence(self, labels: np.ndarray) -> tuple[float, float]:
        y = np.asarray(labels)
        return float(y[self.train].mean()), float(y[self.test].mean())


def _class_members(labels: np.ndarray) -> list[np.ndarray]:
    y = np.asarray(labels).reshape(-1)
    members = [np.flatnonzero(y == c) for c in (0, 1)]
    for c, m in enumerate(members):
        if m.size == 0:
            raise MetricError(f"class {c} has no members")
    return members


def stratified_split(labels: np.ndarray, ratio: float = 0.7, seed: int = 0) -> SplitSpec:
    """Shuffle each class (seeded) and send round(ratio · class size) of it to train."""
    if not 0 < ratio < 1:
        raise MetricError(f"split ratio must be in (0, 1), got {ratio}")
    rng = np.random.default_rng(seed)
    train, test = [], []
    for members in _class_members(labels):
        perm = rng.permutation(members)
        k = int(math.floor(ratio * perm.shape[0] + 0.5))
        train.append(perm[:k])
        test.append(perm[k:])
    return SplitSpec(train=np.sort(np.concatenate(train)), test=np.sort(np.concatenate(test)),
                     ratio=ratio, seed=seed)


def kfold_stratified(labels: np.ndarray, k: int = 5, seed: int = 0) -> list[SplitSpec]:
    """
    ``k`` folds as SplitSpecs whose ``test`` part is the held-out fold. Indices refer to
    positions in ``labels``.
    """
    y = np.asarray(labels).reshape(-1)
    for c, members in enumerate(_class_members(y)):
        if members.size < k:
            raise MetricError(f"class {c} has {members.size} members, fewer than {k} folds")
    splitter = StratifiedKFold(n_splits=k, shuffle=True, random_state=seed)
    return [
        SplitSpec(train=np.sort(tr), test=np.sort(te), ratio=(k - 1) / k, seed=seed)
        for tr, te in splitter.split(np.zeros((y.shape[0], 1)), y)
    ]
