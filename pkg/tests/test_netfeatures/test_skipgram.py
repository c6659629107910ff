"""Tests for src/netfeatures/skipgram.py."""

import math

import numpy as np
import pytest

from src.graph.schema import IND, TXN, aml_schema
from src.graph.store import EdgeTable, build_graph
from src.netfeatures.errors import FeatureError
from src.netfeatures.skipgram import SkipGramConfig, fit_skipgram, skipgram_train
from src.netfeatures.walks import PAD, MetaPath, WalkCorpus, metapath_walks
from tests.conftest import step

COUNTS = {"ind": 1, "org": 1, "ext": 0}


def pair_corpus() -> WalkCorpus:
    """A single walk ind0 → org0."""
    return WalkCorpus(metapath=MetaPath.parse("ind-txn-org-txn-ind"),
                      walks=np.array([[0, 0]]), lengths=np.array([2]))


def two_block_graph(size: int = 20, seed: int = 0):
    """Two communities of individuals, dense inside, one bridge edge between them."""
    rng = np.random.default_rng(seed)
    rows = []
    for block in (0, 1):
        members = np.arange(size) + block * size
        for _ in range(size * 6):
            u, v = rng.choice(members, size=2, replace=False)
            rows.append((int(u), int(v), [1, 10.0]))
    rows.append((0, size, [1, 10.0]))
    return build_graph(aml_schema(), {IND: np.zeros((2 * size, 11))},
                       {step(IND, TXN, IND): EdgeTable.from_rows(rows, 2)})


def cosine(a, b):
    return float(a @ b / (np.linalg.norm(a) * np.linalg.norm(b)))


class TestObjective:
    def test_first_loss_is_two_ln2(self):
        # context vectors start at zero, so every pair scores σ(0) for positive and negative
        config = SkipGramConfig(dim=4, context_size=1, num_negative=1, epochs=1, batch_size=16)
        vectors = fit_skipgram(pair_corpus(), COUNTS, config, seed=0)
        assert vectors.epoch_losses[0] == pytest.approx(2 * math.log(2))

    def test_inner_product_increases(self):
        config = SkipGramConfig(dim=4, context_size=1, num_negative=0, epochs=30)
        trace = []
        fit_skipgram(pair_corpus(), COUNTS, config, seed=1,
                     callback=lambda epoch, center, context: trace.append(float(center[0] @ context[1])))
        assert len(trace) == 30
        assert all(b > a for a, b in zip(trace, trace[1:]))

    def test_seeded(self, make_graph):
        graph = make_graph(seed=1, edges_per_step=20)
        corpus = metapath_walks(graph, MetaPath.parse("ind-txn-org-txn-ind"), walk_length=6, walks_per_node=2)
        config = SkipGramConfig(epochs=2)
        a = fit_skipgram(corpus, graph.node_counts, config, seed=7)
        b = fit_skipgram(corpus, graph.node_counts, config, seed=7)
        np.testing.assert_array_equal(a.center, b.center)

    def test_empty_corpus(self):
        corpus = WalkCorpus(metapath=MetaPath.parse("ind-txn-ind"),
                            walks=np.zeros((0, 3), dtype=np.int64), lengths=np.zeros(0, dtype=np.int64))
        with pytest.raises(FeatureError):
            fit_skipgram(corpus, COUNTS)

    def test_no_pairs(self):
        corpus = WalkCorpus(metapath=MetaPath.parse("ind-txn-ind"),
                            walks=np.array([[0, PAD]]), lengths=np.array([1]))
        with pytest.raises(FeatureError):
            fit_skipgram(corpus, COUNTS)


class TestEmbeddingTable:
    def test_unvisited_rows_are_zero(self, tiny_graph, caplog):
        corpus = metapath_walks(tiny_graph, MetaPath.parse("ind-txn-ind-txn-ind"), walk_length=4, walks_per_node=2)
        table = skipgram_train(corpus, tiny_graph.node_counts, config=SkipGramConfig(epochs=1))
        rows = table.blocks[("ind-txn-ind-txn-ind", "start")]
        assert rows.shape == (3, 8)
        assert np.all(rows[2] == 0.0)
        assert np.any(rows[0] != 0.0)
        assert table.coverage[("ind-txn-ind-txn-ind", "start")] == pytest.approx(2 / 3)
        assert "never visited" in caplog.text

    def test_two_blocks_separate(self):
        config = SkipGramConfig(epochs=5, batch_size=64)
        gaps = []
        for seed in range(3):
            graph = two_block_graph(seed=seed)
            corpus = metapath_walks(graph, MetaPath.parse("ind-txn-ind-txn-ind"), walk_length=20,
                                    walks_per_node=10, seed=seed)
            vectors = fit_skipgram(corpus, graph.node_counts, config, seed=seed)
            x = vectors.rows(IND)
            intra, inter = [], []
            for i in range(40):
                for j in range(i + 1, 40):
                    (intra if (i < 20) == (j < 20) else inter).append(cosine(x[i], x[j]))
            gaps.append(np.mean(intra) - np.mean(inter))
        assert np.median(gaps) >= 0.2
