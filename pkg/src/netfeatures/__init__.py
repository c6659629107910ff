"""Network features for individuals: degree summaries and meta-path embeddings."""

from .assemble import (
    EmbeddingConfig,
    FeatureTable,
    assemble_feature_table,
    load_feature_table,
    save_feature_table,
)
from .errors import FeatureError
from .skipgram import EmbeddingTable, SkipGramConfig, fit_skipgram, skipgram_train
from .summary import extra_degree_features, unweighted_summary, weighted_summary
from .walks import FEATURE_METAPATHS, MetaPath, WalkCorpus, metapath_walks

__all__ = [
    "EmbeddingConfig", "EmbeddingTable", "FEATURE_METAPATHS", "FeatureError", "FeatureTable",
    "MetaPath", "SkipGramConfig", "WalkCorpus",
    "assemble_feature_table", "extra_degree_features", "fit_skipgram", "load_feature_table",
    "metapath_walks", "save_feature_table", "skipgram_train", "unweighted_summary",
    "weighted_summary",
]
