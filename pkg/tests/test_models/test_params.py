"""Tests for src/models/params.py."""

import numpy as np
import pytest

from src.models.config import MODEL_LABELS, ModelConfig, ModelKind
from src.models.params import count_parameters, init_params, param_shapes


class TestEntityCounts:
    @pytest.mark.parametrize("kind,layers,expected", [
        (ModelKind.LOGREG, 1, 95),
        (ModelKind.MLP, 1, 95),
        (ModelKind.MLP, 2, 9025),
        (ModelKind.MLP, 3, 17955),
    ])
    def test_known_counts(self, kind, layers, expected):
        assert count_parameters(None, ModelConfig(kind=kind, num_layers=layers), 94) == expected

    def test_logreg_has_two_tensors(self):
        params = init_params(None, ModelConfig(kind=ModelKind.LOGREG), 94)
        assert {k: v.shape for k, v in params.items()} == {"head/W": (1, 94), "head/b": (1, 1)}

    def test_needs_feature_count(self):
        with pytest.raises(ValueError):
            param_shapes(ModelConfig(kind=ModelKind.MLP))


class TestGraphShapes:
    def test_hmpnn_ct_layer_one(self, schema):
        shapes = param_shapes(ModelConfig(kind=ModelKind.HMPNN_CT, num_layers=1), schema)
        assert sum(n.endswith("/Wg") for n in shapes) == 9
        assert sum(n.endswith("/bg") for n in shapes) == 9
        assert sum(n.endswith("/B") for n in shapes) == 9
        assert sum(n.endswith("/Wct") for n in shapes) == 3
        assert len(shapes) == 9 * 3 + 3 + 2

    def test_dimension_rules(self, schema):
        shapes = param_shapes(ModelConfig(kind=ModelKind.HMPNN_CT, num_layers=2), schema)
        assert shapes["layer1/ind__txn__org/Wg"] == (8 * 11, 2)
        assert shapes["layer1/ind__txn__org/B"] == (8, 8)
        assert shapes["layer1/ext__txn__ind/B"] == (8, 11)
        assert shapes["layer2/ind__txn__org/Wg"] == (64, 2)
        # org has four incoming meta-steps, ext two
        assert shapes["layer1/org/Wct"] == (8, 32)
        assert shapes["layer1/ext/Wct"] == (8, 16)

    def test_hgraphsage_has_no_message_network(self, schema):
        shapes = param_shapes(ModelConfig(kind=ModelKind.HGRAPHSAGE), schema)
        assert not any(n.endswith("/Wg") for n in shapes)
        assert shapes["layer1/org__txn__ind/W"] == (8, 8)

    def test_needs_schema(self):
        with pytest.raises(ValueError):
            param_shapes(ModelConfig(kind=ModelKind.HMPNN_SUM))


class TestInit:
    @pytest.mark.parametrize("label", MODEL_LABELS)
    @pytest.mark.parametrize("layers", [1, 2, 3])
    def test_count_matches_allocation(self, schema, label, layers):
        config = ModelConfig.from_label(label, layers)
        params = init_params(schema, config, 94)
        assert sum(v.size for v in params.values()) == count_parameters(schema, config, 94)

    def test_seeded(self, schema):
        a = init_params(schema, ModelConfig(seed=4))
        b = init_params(schema, ModelConfig(seed=4))
        c = init_params(schema, ModelConfig(seed=5))
        assert all(np.array_equal(a[k], b[k]) for k in a)
        assert not np.array_equal(a["head/W"], c["head/W"])

    def test_biases_zero_weights_bounded(self, schema):
        params = init_params(schema, ModelConfig(kind=ModelKind.HMPNN_SUM))
        assert np.all(params["layer1/ind__txn__ind/bg"] == 0.0)
        W = params["layer1/ind__txn__ind/Wg"]
        assert np.abs(W).max() <= np.sqrt(6.0 / sum(W.shape))


class TestConfig:
    def test_labels(self):
        assert ModelConfig.from_label("hgraphsage-deg", 2).label == "hgraphsage-deg"
        assert ModelConfig.from_label("hgraphsage-deg", 2).use_extra_degree_features
        assert ModelConfig.from_label("hmpnn-ct", 1).kind == ModelKind.HMPNN_CT

    def test_unknown_label(self):
        with pytest.raises(ValueError):
            ModelConfig.from_label("gat", 1)

    def test_layers_at_least_one(self):
        with pytest.raises(ValueError):
            ModelConfig(num_layers=0)
