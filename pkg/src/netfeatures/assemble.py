"""
Entity feature table for the individual node type.

Column order: intrinsic features, unweighted summary, weighted summary, then for every
feature meta-path its start embedding followed by its end embedding. With all blocks on
the AML schema that is 11 + 11 + 8 + 4·2·8 = 94 columns.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from pydantic import BaseModel, Field

from src.graph.container import atomic_write_csv
from src.graph.schema import IND, TXN_AMOUNT_INDEX
from src.graph.store import HeteroGraph

from .errors import FeatureError
from .skipgram import EmbeddingTable, SkipGramConfig, skipgram_train
from .summary import UNWEIGHTED_COLUMNS, WEIGHTED_COLUMNS, unweighted_summary, weighted_summary
from .walks import FEATURE_METAPATHS, MetaPath, metapath_walks

logger = logging.getLogger(__name__)

BLOCKS = ("intrinsic", "unweighted", "weighted", "metapath2vec")
POSITIONS = ("start", "end")


class EmbeddingConfig(BaseModel):
    walk_length: int = Field(default=20, ge=1)
    walks_per_node: int = Field(default=10, ge=1)
    skipgram: SkipGramConfig = Field(default_factory=SkipGramConfig)
    metapaths: list[str] = Field(default_factory=lambda: [m.name for m in FEATURE_METAPATHS])
    blocks: list[str] = Field(default_factory=lambda: list(BLOCKS))
    amount_feature_index: int = TXN_AMOUNT_INDEX

    def parsed_metapaths(self) -> list[MetaPath]:
        return [MetaPath.parse(m) for m in self.metapaths]


@dataclass(frozen=True, eq=False)
class FeatureTable:
    ids: np.ndarray
    values: np.ndarray
    columns: list[str]
    coverage: dict[str, float] = field(default_factory=dict)

    @property
    def width(self) -> int:
        return len(self.columns)


def derive_seed(seed: int, *keys: int) -> int:
    return int(np.random.SeedSequence([seed, *keys]).generate_state(1)[0])


def _embed(graph: HeteroGraph, metapath: MetaPath, position: str, config: EmbeddingConfig,
           seed: int) -> EmbeddingTable:
    walked = metapath if position == "start" else metapath.reversed()
    corpus = metapath_walks(graph, walked, walk_length=config.walk_length,
                            walks_per_node=config.walks_per_node, seed=seed)
    table = skipgram_train(corpus, graph.node_counts, position=position,
                           config=config.skipgram, seed=seed)
    # key by the feature meta-path, not the walked (possibly reversed) one
    (_, rows), = table.blocks.items()
    (_, cov), = table.coverage.items()
    key = (metapath.name, position)
    return EmbeddingTable(blocks={key: rows}, coverage={key: cov})


def embedding_table(graph: HeteroGraph, config: EmbeddingConfig, seed: int = 0,
                    jobs: int = 1) -> EmbeddingTable:
    """Start and end embeddings for every configured meta-path; one seeded job each."""
    tasks = []
    for i, metapath in enumerate(config.parsed_metapaths()):
        if metapath.node_types[0] != IND or metapath.node_types[-1] != IND:
            raise FeatureError(f"feature meta-path {metapath.name} must start and end at {IND!r}")
        for p, position in enumerate(POSITIONS):
            tasks.append((metapath, position, derive_seed(seed, i, p)))
    parts = Parallel(n_jobs=jobs)(
        delayed(_embed)(graph, metapath, position, config, s) for metapath, position, s in tasks
    )
    table = EmbeddingTable()
    for part in parts:
        table = table.merged(part)
    return table


def assemble_feature_table(
    graph: HeteroGraph,
    config: EmbeddingConfig = EmbeddingConfig(),
    seed: int = 0,
    jobs: int = 1,
) -> FeatureTable:
    unknown = set(config.blocks) - set(BLOCKS)
    if unknown:
        raise FeatureError(f"unknown feature blocks: {sorted(unknown)}")
    n = graph.num_nodes(IND)
    parts: list[np.ndarray] = []
    columns: list[str] = []
    coverage: dict[str, float] = {}

    if "intrinsic" in config.blocks:
        parts.append(graph.node_features[IND])
        columns += graph.schema.node_type(IND).feature_names
    if "unweighted" in config.blocks:
        parts.append(unweighted_summary(graph))
        columns += UNWEIGHTED_COLUMNS
    if "weighted" in config.blocks:
        parts.append(weighted_summary(graph, config.amount_feature_index))
        columns += WEIGHTED_COLUMNS
    if "metapath2vec" in config.blocks:
        embeddings = embedding_table(graph, config, seed=seed, jobs=jobs)
        dim = config.skipgram.dim
        for metapath in config.parsed_metapaths():
            for position in POSITIONS:
                key = (metapath.name, position)
                parts.append(embeddings.blocks[key])
                columns += [f"mp_{metapath.name}_{position}_{j}" for j in range(dim)]
                coverage[f"{metapath.name}:{position}"] = embeddings.coverage[key]

    values = np.hstack(parts) if parts else np.zeros((n, 0))
    if values.shape != (n, len(columns)):
        raise FeatureError(f"feature table is {values.shape}, expected ({n}, {len(columns)})")
    logger.info("Assembled feature table: %d individuals x %d columns", n, len(columns))
    return FeatureTable(ids=graph.node_ids[IND], values=values, columns=columns, coverage=coverage)


# ── Files ─────────────────────────────────────────────────────────────────────

def save_feature_table(path: Path, table: FeatureTable) -> Path:
    frame = pd.DataFrame(table.values, columns=table.columns)
    frame.insert(0, "id", table.ids)
    atomic_write_csv(path, frame)
    return path


def load_feature_table(path: Path) -> FeatureTable:
    if not path.exists():
        raise FileNotFoundError(f"Feature table not found: {path}")
    frame = pd.read_csv(path)
    if "id" not in frame.columns:
        raise FeatureError(f"{path.name}: missing 'id' column")
    return FeatureTable(
        ids=frame["id"].to_numpy(dtype=np.int64),
        values=frame.drop(columns=["id"]).to_numpy(dtype=np.float64),
        columns=[c for c in frame.columns if c != "id"],
    )


def align_to(table: FeatureTable, ids: np.ndarray) -> np.ndarray:
    """Feature rows reordered to match ``ids`` (the graph's dense individual order)."""
    order = pd.Series(np.arange(table.ids.shape[0]), index=table.ids).reindex(ids)
    if order.isna().any():
        raise FeatureError("feature table is missing individuals present in the graph")
    return table.values[order.to_numpy(dtype=np.int64)]


def save_embeddings(directory: Path, table: FeatureTable) -> list[Path]:
    """One ``embedding_<meta-path>.csv`` per meta-path holding its start and end columns."""
    written: list[Path] = []
    prefixes = sorted({c.rsplit("_", 2)[0] for c in table.columns if c.startswith("mp_")})
    for prefix in prefixes:
        cols = [i for i, c in enumerate(table.columns) if c.startswith(prefix + "_")]
        frame = pd.DataFrame(table.values[:, cols], columns=[table.columns[i] for i in cols])
        frame.insert(0, "id", table.ids)
        path = directory / f"embedding_{prefix[3:]}.csv"
        atomic_write_csv(path, frame)
        written.append(path)
    return written
