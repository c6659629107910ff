"""Tests for src/harness/reporting.py."""

import pandas as pd
import pytest

from src.graph.schema import aml_schema
from src.harness.metrics import METRICS_COLUMNS, MetricsReport
from src.harness.reporting import (
    load_metrics,
    metrics_summary,
    parameter_table,
    performance_table,
    upsert_cv_table,
    upsert_metrics,
)
from src.harness.tuning import CV_COLUMNS, CVRow


def report(model: str, layers: int, seed: int = 0, pr: float = 0.5) -> MetricsReport:
    return MetricsReport(
        model=model, layers=layers, seed=seed, roc_auc=0.9, pr_auc=pr,
        precision_at={r: 0.4 for r in (1, 5, 10, 50)},
        lift_at={r: 20.0 for r in (1, 5, 10, 50)},
    )


class TestUpsert:
    def test_replaces_same_variant(self, tmp_path):
        path = tmp_path / "metrics.csv"
        upsert_metrics(path, [report("hmpnn-ct", 1, pr=0.1)])
        upsert_metrics(path, [report("hmpnn-ct", 1, pr=0.7)])
        frame = load_metrics(path)
        assert len(frame) == 1
        assert frame["pr_auc"].iloc[0] == pytest.approx(0.7)
        assert list(frame.columns) == METRICS_COLUMNS

    def test_sorted_by_model_then_layers(self, tmp_path):
        path = tmp_path / "metrics.csv"
        upsert_metrics(path, [report("hmpnn-ct", 2), report("logreg", 1)])
        frame = upsert_metrics(path, [report("hmpnn-ct", 1), report("mlp", 3)])
        assert list(zip(frame["model"], frame["layers"])) == [
            ("logreg", 1), ("mlp", 3), ("hmpnn-ct", 1), ("hmpnn-ct", 2),
        ]

    def test_rerun_is_byte_identical(self, tmp_path):
        path = tmp_path / "metrics.csv"
        upsert_metrics(path, [report("mlp", 2), report("hgraphsage", 1)])
        first = path.read_bytes()
        upsert_metrics(path, [report("hgraphsage", 1)])
        assert path.read_bytes() == first

    def test_cv_table(self, tmp_path):
        path = tmp_path / "cv_table.csv"
        rows = [CVRow(model="mlp", layers=2, lr=lr, l2=1e-4, fold=f, val_pr_auc=0.3, stop_iter=10)
                for lr in (0.1, 0.01) for f in (1, 0)]
        frame = upsert_cv_table(path, rows)
        assert list(frame.columns) == CV_COLUMNS
        assert list(zip(frame["lr"], frame["fold"])) == [(0.01, 0), (0.01, 1), (0.1, 0), (0.1, 1)]
        frame = upsert_cv_table(path, rows[:1])
        assert len(frame) == 1

    def test_missing_metrics(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_metrics(tmp_path / "metrics.csv")


class TestTables:
    def test_performance_table_shape(self):
        metrics = pd.DataFrame([report("logreg", 1).row(), report("hmpnn-sum", 2).row()])
        table = performance_table(metrics)
        assert table.row_count == 15
        assert len(table.columns) == 8

    def test_performance_table_mlp_falls_back_to_logreg(self):
        metrics = pd.DataFrame([report("logreg", 1, pr=0.25).row()])
        cells = list(performance_table(metrics).columns[2].cells)
        assert cells[0] == "25.00"
        assert cells[1] == "-"

    def test_summary_averages_seeds(self):
        metrics = pd.DataFrame([report("mlp", 2, seed=0, pr=0.2).row(),
                                report("mlp", 2, seed=1, pr=0.4).row()])
        summary = metrics_summary(metrics)
        assert len(summary) == 1
        assert summary["pr_auc"].iloc[0] == pytest.approx(0.3)

    def test_parameter_table(self):
        table = parameter_table(aml_schema(), 94)
        assert table.row_count == 5
        assert list(table.columns[1].cells)[0] == "95"
