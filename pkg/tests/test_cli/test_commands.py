"""End-to-end tests for the hmpnn CLI on small generated graphs."""

import json

import pandas as pd
import pytest
import typer
import yaml
from typer.testing import CliRunner

from src.autodiff.tensor import NumericError
from src.cli.common import cli_errors
from src.cli.main import app
from src.graph.store import GraphError
from src.harness.metrics import METRICS_COLUMNS

runner = CliRunner()

SMALL_GRAPH = ["--n-individual", "200", "--n-organization", "20", "--n-external", "60",
               "--prevalence", "0.02"]


def invoke(out, *args, config=None):
    prefix = ["--out", str(out), "--seed", "1"]
    if config is not None:
        prefix += ["--config", str(config)]
    return runner.invoke(app, [*prefix, *args])


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """Generated graph plus entity features, shared by the experiment commands."""
    out = tmp_path_factory.mktemp("run")
    config = out / "run.yaml"
    config.write_text(yaml.safe_dump({
        "embedding": {"walk_length": 5, "walks_per_node": 2, "skipgram": {"epochs": 1}},
        "grid": {"max_iter": 20, "eval_every": 5, "patience": 2, "folds": 2},
    }))
    assert invoke(out, "generate", *SMALL_GRAPH, config=config).exit_code == 0
    assert invoke(out, "features", config=config).exit_code == 0
    return out, config


class TestGenerate:
    def test_writes_container(self, tmp_path):
        result = invoke(tmp_path, "generate", *SMALL_GRAPH)
        assert result.exit_code == 0, result.output
        graph = tmp_path / "graph"
        for name in ("schema.json", "nodes_ind.csv", "labels_ind.csv", "genconfig.json",
                     "provenance.json"):
            assert (graph / name).exists()
        labels = pd.read_csv(graph / "labels_ind.csv")
        assert int(labels["label"].sum()) == 4
        assert json.loads((graph / "genconfig.json").read_text())["seed"] == 1

    def test_deterministic(self, tmp_path):
        invoke(tmp_path / "a", "generate", *SMALL_GRAPH)
        invoke(tmp_path / "b", "generate", *SMALL_GRAPH)
        files = sorted(p.name for p in (tmp_path / "a" / "graph").iterdir())
        assert files == sorted(p.name for p in (tmp_path / "b" / "graph").iterdir())
        for name in files:
            assert (tmp_path / "a" / "graph" / name).read_bytes() == \
                (tmp_path / "b" / "graph" / name).read_bytes()

    def test_bad_prevalence_exits_2(self, tmp_path):
        result = invoke(tmp_path, "generate", "--prevalence", "0.5")
        assert result.exit_code == 2
        assert not (tmp_path / "graph").exists()

    def test_missing_config_exits_2(self, tmp_path):
        result = invoke(tmp_path, "generate", config=tmp_path / "missing.yaml")
        assert result.exit_code == 2


class TestFeatures:
    def test_missing_graph_exits_2(self, tmp_path):
        result = invoke(tmp_path, "features", "--graph", str(tmp_path / "nowhere"))
        assert result.exit_code == 2

    def test_outputs(self, workspace):
        out, _ = workspace
        frame = pd.read_csv(out / "features_individual.csv")
        assert frame.shape == (200, 95)
        assert sorted(p.name for p in (out / "embeddings").glob("embedding_*.csv")) == [
            "embedding_ind-role-org-txn-ind.csv", "embedding_ind-txn-ext-txn-ind.csv",
            "embedding_ind-txn-ind-txn-ind.csv", "embedding_ind-txn-org-txn-ind.csv",
        ]
        assert (out / "embeddings" / "coverage.csv").exists()

    def test_block_selection(self, tmp_path, workspace):
        out, config = workspace
        result = invoke(tmp_path, "features", "--graph", str(out / "graph"),
                        "--block", "intrinsic", "--block", "unweighted", config=config)
        assert result.exit_code == 0, result.output
        assert pd.read_csv(tmp_path / "features_individual.csv").shape == (200, 23)


class TestDiagnose:
    def test_report_and_egonets(self, tmp_path, workspace):
        out, _ = workspace
        result = invoke(tmp_path, "diagnose", "--graph", str(out / "graph"), "--egonets", "2")
        assert result.exit_code == 0, result.output
        assert "Signal strength" in result.output
        assert (tmp_path / "diagnose" / "report.csv").exists()
        egonets = sorted((tmp_path / "diagnose" / "egonets").glob("egonet_*.csv"))
        assert len(egonets) == 4
        assert list(pd.read_csv(egonets[0]).columns) == ["meta_step", "src_id", "dst_id"]


class TestExperiments:
    def test_train_evaluate_report(self, workspace):
        out, config = workspace
        for model, layers in (("hmpnn-ct", "1"), ("mlp", "2")):
            result = invoke(out, "train", "--model", model, "--layers", layers,
                            "--lr", "0.01", "--iterations", "5", config=config)
            assert result.exit_code == 0, result.output
            assert (out / "logs" / f"{model}_K{layers}.json").exists()
            result = invoke(out, "evaluate", "--model", model, "--layers", layers, config=config)
            assert result.exit_code == 0, result.output

        metrics = pd.read_csv(out / "metrics.csv")
        assert list(metrics.columns) == METRICS_COLUMNS
        assert len(METRICS_COLUMNS) == 13
        assert list(metrics["model"]) == ["mlp", "hmpnn-ct"]

        result = invoke(out, "report", config=config)
        assert result.exit_code == 0, result.output
        assert "Test-set performance" in result.output
        assert "Number of model parameters" in result.output
        assert (out / "performance.csv").exists()

    def test_tune_then_train(self, workspace):
        out, config = workspace
        result = invoke(out, "tune", "--model", "logreg", "--layers", "1",
                        "--lr", "0.1", "--l2", "0.0001", config=config)
        assert result.exit_code == 0, result.output
        tuned = json.loads((out / "best_hypers.json").read_text())
        assert tuned["logreg:1"]["lr"] == 0.1
        cv = pd.read_csv(out / "cv_table.csv")
        assert len(cv[cv["model"] == "logreg"]) == 2

        result = invoke(out, "train", "--model", "logreg", "--layers", "1", config=config)
        assert result.exit_code == 0, result.output
        log = json.loads((out / "logs" / "logreg_K1.json").read_text())
        assert log["iterations_run"] == tuned["logreg:1"]["iterations"]

    def test_unknown_model_exits_2(self, workspace):
        out, config = workspace
        result = invoke(out, "train", "--model", "gat", config=config)
        assert result.exit_code == 2

    def test_evaluate_missing_checkpoint(self, workspace):
        out, config = workspace
        result = invoke(out, "evaluate", "--model", "hgraphsage", "--layers", "3", config=config)
        assert result.exit_code == 2


class TestGradcheck:
    def test_hmpnn_ct_two_layers(self, tmp_path):
        result = invoke(tmp_path, "gradcheck", "--model", "hmpnn-ct", "--layers", "2",
                        "--max-entries", "5")
        assert result.exit_code == 0, result.output
        assert "max rel err" in result.output

    def test_impossible_tolerance_exits_3(self, tmp_path):
        result = invoke(tmp_path, "gradcheck", "--model", "logreg", "--layers", "1",
                        "--max-entries", "3", "--tolerance", "0")
        assert result.exit_code == 3


class TestErrorMapping:
    def test_domain_errors_exit_2(self):
        with pytest.raises(typer.Exit) as exc:
            with cli_errors():
                raise GraphError("bad table")
        assert exc.value.exit_code == 2

    def test_numeric_errors_exit_3(self):
        with pytest.raises(typer.Exit) as exc:
            with cli_errors():
                raise NumericError("loss is nan")
        assert exc.value.exit_code == 3

    def test_internal_lookup_errors_propagate(self):
        with pytest.raises(KeyError):
            with cli_errors():
                raise KeyError("missing")

    def test_malformed_tuned_hypers_exit_2(self, tmp_path, workspace):
        out, _ = workspace
        config = tmp_path / "run.yaml"
        config.write_text(yaml.safe_dump({"paths": {"graph_dir": str(out / "graph")}}))
        (tmp_path / "best_hypers.json").write_text(json.dumps({"hmpnn-sum:1": {"lr": 0.1}}))
        result = invoke(tmp_path, "train", "--model", "hmpnn-sum", "--layers", "1", config=config)
        assert result.exit_code == 2


class TestDeterminism:
    def test_pipeline_twice_is_byte_identical(self, tmp_path):
        config = tmp_path / "run.yaml"
        config.write_text(yaml.safe_dump({
            "embedding": {"walk_length": 5, "walks_per_node": 2, "skipgram": {"epochs": 1}},
            "grid": {"max_iter": 10, "eval_every": 5, "patience": 2, "folds": 2},
        }))
        for run in ("a", "b"):
            out = tmp_path / run
            steps = [
                ["generate", *SMALL_GRAPH],
                ["features"],
                ["tune", "--model", "logreg", "--layers", "1", "--lr", "0.1", "--lr", "0.01"],
                ["tune", "--model", "hmpnn-sum", "--layers", "1", "--lr", "0.05"],
                ["train", "--model", "logreg", "--layers", "1"],
                ["train", "--model", "hmpnn-sum", "--layers", "1"],
                ["evaluate", "--model", "logreg", "--layers", "1"],
                ["evaluate", "--model", "hmpnn-sum", "--layers", "1"],
            ]
            for args in steps:
                result = invoke(out, *args, config=config)
                assert result.exit_code == 0, f"{args}: {result.output}"
        for name in ("metrics.csv", "cv_table.csv", "best_hypers.json"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
