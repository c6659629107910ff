"""
Skip-gram with negative sampling over typed walk corpora.

Every typed node gets a centre and a context vector. Pairs come from windows of radius
``context_size`` around each walk position; each positive pair is matched with
``num_negative`` context nodes drawn uniformly from the true context node's type. Updates
are plain SGD applied in fixed-size batches in a seeded order; within a batch a node moves
by the learning rate times its mean gradient. The learning rate decays linearly to
``min_lr`` over all pairs of all epochs.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from pydantic import BaseModel, Field
from scipy.special import expit, log_expit

from .errors import FeatureError
from .walks import PAD, WalkCorpus

logger = logging.getLogger(__name__)

EpochCallback = Callable[[int, np.ndarray, np.ndarray], None]


class SkipGramConfig(BaseModel):
    dim: int = Field(default=8, ge=1)
    context_size: int = Field(default=10, ge=1)
    num_negative: int = Field(default=1, ge=0)
    epochs: int = Field(default=5, ge=1)
    lr: float = Field(default=0.025, gt=0)
    min_lr: float = Field(default=1e-4, ge=0)
    batch_size: int = Field(default=1024, ge=1)


@dataclass(frozen=True, eq=False)
class SkipGramVectors:
    """Trained tables over a vocabulary of typed nodes laid out type by type."""

    node_types: list[str]
    offsets: dict[str, int]
    counts: dict[str, int]
    center: np.ndarray
    context: np.ndarray
    visited: np.ndarray
    epoch_losses: list[float] = field(default_factory=list)

    def rows(self, node_type: str) -> np.ndarray:
        lo = self.offsets[node_type]
        return self.center[lo:lo + self.counts[node_type]]

    def visited_rows(self, node_type: str) -> np.ndarray:
        lo = self.offsets[node_type]
        return self.visited[lo:lo + self.counts[node_type]]


@dataclass(frozen=True, eq=False)
class EmbeddingTable:
    """Per (meta-path name, position ∈ {start, end}) an n_individual × dim matrix."""

    blocks: dict[tuple[str, str], np.ndarray] = field(default_factory=dict)
    coverage: dict[tuple[str, str], float] = field(default_factory=dict)

    def merged(self, other: "EmbeddingTable") -> "EmbeddingTable":
        return EmbeddingTable(blocks={**self.blocks, **other.blocks},
                              coverage={**self.coverage, **other.coverage})


def _global_walks(corpus: WalkCorpus, offsets: dict[str, int]) -> np.ndarray:
    shift = np.array([offsets[t] for t in corpus.position_types], dtype=np.int64)
    return np.where(corpus.walks == PAD, PAD, corpus.walks + shift)


def _pairs(walks: np.ndarray, context_size: int) -> tuple[np.ndarray, np.ndarray]:
    """(centre, context) global ids for every window pair in a block of walks."""
    centres: list[np.ndarray] = []
    contexts: list[np.ndarray] = []
    for d in range(1, min(context_size, walks.shape[1] - 1) + 1):
        left, right = walks[:, :-d], walks[:, d:]
        ok = (left != PAD) & (right != PAD)
        centres += [left[ok], right[ok]]
        contexts += [right[ok], left[ok]]
    if not centres:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty
    return np.concatenate(centres), np.concatenate(contexts)


def _pair_count(lengths: np.ndarray, context_size: int) -> int:
    total = 0
    for d in range(1, context_size + 1):
        total += 2 * int(np.clip(lengths - d, 0, None).sum())
    return total


def _mean_update(table: np.ndarray, ids: np.ndarray, grads: np.ndarray, lr: float) -> None:
    uniq, inverse = np.unique(ids, return_inverse=True)
    summed = np.zeros((uniq.shape[0], table.shape[1]))
    np.add.at(summed, inverse, grads)
    hits = np.bincount(inverse, minlength=uniq.shape[0]).reshape(-1, 1)
    table[uniq] -= lr * summed / hits


def fit_skipgram(
    corpus: WalkCorpus,
    node_counts: dict[str, int],
    config: SkipGramConfig = SkipGramConfig(),
    seed: int = 0,
    callback: Optional[EpochCallback] = None,
) -> SkipGramVectors:
    if corpus.num_walks == 0:
        raise FeatureError(f"empty walk corpus for {corpus.metapath.name}")
    node_types = list(node_counts)
    offsets: dict[str, int] = {}
    total = 0
    for t in node_types:
        offsets[t] = total
        total += node_counts[t]
    type_of = np.repeat(np.arange(len(node_types)), [node_counts[t] for t in node_types])
    type_lo = np.array([offsets[t] for t in node_types], dtype=np.int64)
    type_n = np.array([node_counts[t] for t in node_types], dtype=np.int64)

    rng = np.random.default_rng(seed)
    center = rng.uniform(-0.5 / config.dim, 0.5 / config.dim, size=(total, config.dim))
    context = np.zeros((total, config.dim))

    walks = _global_walks(corpus, offsets)
    multi = corpus.lengths >= 2
    visited = np.zeros(total, dtype=bool)
    visited[walks[multi][walks[multi] != PAD]] = True

    total_pairs = _pair_count(corpus.lengths, config.context_size) * config.epochs
    if total_pairs == 0:
        raise FeatureError(f"walk corpus for {corpus.metapath.name} has no context pairs")
    seen = 0
    losses: list[float] = []
    chunk = max(1, 200_000 // max(1, 2 * config.context_size * corpus.walk_length))

    for epoch in range(config.epochs):
        epoch_loss = 0.0
        epoch_pairs = 0
        for lo in range(0, corpus.num_walks, chunk):
            c_ids, o_ids = _pairs(walks[lo:lo + chunk], config.context_size)
            order = rng.permutation(c_ids.shape[0])
            c_ids, o_ids = c_ids[order], o_ids[order]
            for b in range(0, c_ids.shape[0], config.batch_size):
                c = c_ids[b:b + config.batch_size]
                o = o_ids[b:b + config.batch_size]
                lr = config.lr - (config.lr - config.min_lr) * (seen / total_pairs)
                seen += c.shape[0]

                ctx_type = type_of[o]
                neg = (type_lo[ctx_type][:, None]
                       + (rng.random((c.shape[0], config.num_negative))
                          * type_n[ctx_type][:, None]).astype(np.int64))

                v = center[c]
                u_pos = context[o]
                u_neg = context[neg]
                s_pos = np.einsum("bd,bd->b", v, u_pos)
                s_neg = np.einsum("bd,bkd->bk", v, u_neg)
                epoch_loss -= float(log_expit(s_pos).sum() + log_expit(-s_neg).sum())
                epoch_pairs += c.shape[0]

                g_pos = expit(s_pos) - 1.0
                g_neg = expit(s_neg)
                grad_v = g_pos[:, None] * u_pos + np.einsum("bk,bkd->bd", g_neg, u_neg)
                grad_u = np.concatenate([g_pos[:, None] * v,
                                         (g_neg[:, :, None] * v[:, None, :]).reshape(-1, config.dim)])
                _mean_update(center, c, grad_v, lr)
                _mean_update(context, np.concatenate([o, neg.reshape(-1)]), grad_u, lr)

        losses.append(epoch_loss / max(1, epoch_pairs))
        logger.debug("skip-gram %s epoch %d: mean pair loss %.4f",
                     corpus.metapath.name, epoch + 1, losses[-1])
        if callback is not None:
            callback(epoch, center, context)

    return SkipGramVectors(node_types=node_types, offsets=offsets, counts=dict(node_counts),
                           center=center, context=context, visited=visited, epoch_losses=losses)


def skipgram_train(
    corpus: WalkCorpus,
    node_counts: dict[str, int],
    position: str = "start",
    config: SkipGramConfig = SkipGramConfig(),
    seed: int = 0,
) -> EmbeddingTable:
    """
    Centre vectors of the corpus' start-type nodes as a one-block EmbeddingTable. Nodes
    that never appear in a walk with at least two nodes get zero rows.
    """
    vectors = fit_skipgram(corpus, node_counts, config=config, seed=seed)
    start_type = corpus.metapath.node_types[0]
    rows = vectors.rows(start_type).copy()
    visited = vectors.visited_rows(start_type)
    rows[~visited] = 0.0
    key = (corpus.metapath.name, position)
    coverage = float(visited.mean()) if visited.size else 0.0
    if visited.size and not visited.all():
        logger.warning("%s (%s): %d of %d %s nodes never visited; zero embeddings",
                       corpus.metapath.name, position, int((~visited).sum()), visited.size, start_type)
    return EmbeddingTable(blocks={key: rows}, coverage={key: coverage})
