"""Tests for src/autodiff/checkpoint.py."""

import json

import numpy as np
import pytest

from src.autodiff.checkpoint import load_checkpoint, save_checkpoint


class TestCheckpoint:
    def test_bit_exact_reload(self, tmp_path):
        rng = np.random.default_rng(5)
        params = {"layer1/W": rng.normal(size=(3, 4)), "head/b": np.array([[np.pi]])}
        path = save_checkpoint(tmp_path / "ck.json", params, {"model": "mlp", "layers": 2})
        loaded, meta = load_checkpoint(path)
        assert meta == {"model": "mlp", "layers": 2}
        for name, value in params.items():
            assert np.array_equal(loaded[name], value)

    def test_file_layout(self, tmp_path):
        path = save_checkpoint(tmp_path / "ck.json", {"w": np.ones((2, 3))}, {})
        data = json.loads(path.read_text())
        assert data["w"]["rows"] == 2 and data["w"]["cols"] == 3
        assert len(data["w"]["data"]) == 6

    def test_reserved_name(self, tmp_path):
        with pytest.raises(ValueError):
            save_checkpoint(tmp_path / "ck.json", {"meta": np.ones((1, 1))}, {})

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_checkpoint(tmp_path / "nope.json")

    def test_corrupt_size(self, tmp_path):
        path = tmp_path / "ck.json"
        path.write_text(json.dumps({"meta": {}, "w": {"rows": 2, "cols": 2, "data": [1.0]}}))
        with pytest.raises(ValueError):
            load_checkpoint(path)
