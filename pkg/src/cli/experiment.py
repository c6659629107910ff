"""CLI experiment commands: train, tune, evaluate, report, gradcheck."""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any, Optional

import numpy as np
import pandas as pd
import typer
from rich.table import Table

from config.settings import RunConfig
from src.cli.common import EXIT_NUMERIC, cli_errors, console, err_console, state
from src.graph.container import atomic_write_csv, atomic_write_json, load_schema
from src.graph.schema import aml_schema
from src.harness.pipeline import (
    Experiment,
    check_gradients,
    checkpoint_path,
    evaluate_variant,
    load_experiment,
    load_model,
    save_model,
    tune_variant,
    variant_key,
)
from src.harness.reporting import (
    load_metrics,
    metrics_summary,
    parameter_table,
    performance_table,
    upsert_cv_table,
    upsert_metrics,
)
from src.harness.split import SplitSpec, stratified_split
from src.harness.train import TrainConfig, TrainResult, train
from src.harness.tuning import BestHypers
from src.models.config import MODEL_LABELS, ModelConfig
from src.netfeatures.assemble import EmbeddingConfig, assemble_feature_table
from src.netfeatures.skipgram import SkipGramConfig
from src.synthgen.config import GenConfig
from src.synthgen.generator import generate

logger = logging.getLogger(__name__)

DEFAULT_FEATURE_COUNT = 94
# internal train/validation split when training without tuned hyperparameters
VALIDATION_RATIO = 0.8


# ── Shared helpers ────────────────────────────────────────────────────────────

def _model(run: RunConfig, label: Optional[str], layers: Optional[int]) -> ModelConfig:
    base = run.seeded_model()
    if label is None and layers is None:
        return base
    label = label or base.label
    if label not in MODEL_LABELS:
        raise ValueError(f"unknown model {label!r}; choose from {', '.join(MODEL_LABELS)}")
    return ModelConfig.from_label(label, layers or base.num_layers, hidden_dim=base.hidden_dim,
                                  mlp_hidden_dim=base.mlp_hidden_dim, seed=run.seed)


def _experiment(run: RunConfig) -> Experiment:
    return load_experiment(run.paths.graph(), run.paths.features(), ratio=run.split_ratio, seed=run.seed)


def _hypers_file(run: RunConfig) -> Path:
    return run.paths.out_dir / "best_hypers.json"


def _hypers_key(config: ModelConfig) -> str:
    return f"{config.label}:{config.num_layers}"


def _load_hypers(run: RunConfig) -> dict[str, Any]:
    path = _hypers_file(run)
    if not path.exists():
        return {}
    return json.loads(path.read_text(encoding="utf-8"))


def _write_log(run: RunConfig, config: ModelConfig, result: TrainResult) -> Path:
    path = run.paths.out_dir / "logs" / f"{variant_key(config)}.json"
    atomic_write_json(path, result.log.model_dump(mode="json"))
    return path


# ── train ─────────────────────────────────────────────────────────────────────

def train_cmd(
    ctx: typer.Context,
    model: Optional[str] = typer.Option(None, "--model", "-m", help=f"One of: {', '.join(MODEL_LABELS)}"),
    layers: Optional[int] = typer.Option(None, "--layers", "-k", min=1, max=3),
    lr: Optional[float] = typer.Option(None, "--lr", help="Learning rate (skips tuned values)"),
    l2: Optional[float] = typer.Option(None, "--l2", help="L2 strength (with --lr)"),
    iterations: Optional[int] = typer.Option(None, "--iterations", min=0),
) -> None:
    """
    Train one model variant and write its checkpoint and training log.

    With --lr, or tuned values in best_hypers.json, training runs a fixed number of
    iterations on the whole training split. Otherwise it early-stops on an internal
    validation split of the training rows.
    """
    with cli_errors():
        run = state(ctx).run_config("train")
        config = _model(run, model, layers)
        experiment = _experiment(run)
        inputs = experiment.inputs_for(config)
        stored = _load_hypers(run).get(_hypers_key(config))
        tuned = None if stored is None else BestHypers.model_validate(stored)
        train_rows = experiment.split.train

        fixed: Optional[TrainConfig] = None
        if lr is not None:
            fixed = TrainConfig(lr=lr, l2=l2 or 0.0,
                                max_iter=run.grid.max_iter if iterations is None else iterations)
        elif tuned is not None:
            fixed = TrainConfig(lr=tuned.lr, l2=tuned.l2,
                                max_iter=tuned.iterations if iterations is None else iterations)

        if fixed is not None:
            result = train(config, inputs, experiment.y, train_rows, fixed)
        else:
            inner = stratified_split(experiment.y[train_rows], ratio=VALIDATION_RATIO, seed=run.seed)
            hypers = TrainConfig(max_iter=iterations if iterations is not None else run.grid.max_iter,
                                 eval_every=run.grid.eval_every, patience=run.grid.patience)
            result = train(config, inputs, experiment.y, train_rows[inner.train], hypers,
                           val_rows=train_rows[inner.test])

        path = save_model(run.paths.checkpoint or checkpoint_path(run.paths.out_dir, config),
                          result.params, config, experiment)
        log_path = _write_log(run, config, result)

    if not run.quiet:
        console.print(f"[green]✓[/green] {config.label} K={config.num_layers}: "
                      f"{result.log.iterations_run} iterations → [cyan]{path}[/cyan] "
                      f"[dim](log {log_path})[/dim]")


# ── tune ──────────────────────────────────────────────────────────────────────

def tune_cmd(
    ctx: typer.Context,
    model: Optional[str] = typer.Option(None, "--model", "-m", help=f"One of: {', '.join(MODEL_LABELS)}"),
    layers: Optional[int] = typer.Option(None, "--layers", "-k", min=1, max=3),
    lrs: Optional[list[float]] = typer.Option(None, "--lr", help="Grid learning rate (repeatable)"),
    l2s: Optional[list[float]] = typer.Option(None, "--l2", help="Grid L2 strength (repeatable)"),
    max_iter: Optional[int] = typer.Option(None, "--max-iter", min=0),
    folds: Optional[int] = typer.Option(None, "--folds", min=2),
) -> None:
    """Cross-validated grid search; writes cv_table.csv, best_hypers.json and a checkpoint."""
    with cli_errors():
        run = state(ctx).run_config("tune", {"grid": {
            "learning_rates": lrs or None, "l2_strengths": l2s or None,
            "max_iter": max_iter, "folds": folds,
        }})
        config = _model(run, model, layers)
        experiment = _experiment(run)
        result = tune_variant(config, experiment, run.grid, seed=run.seed, jobs=run.jobs)

        out = run.paths.out_dir
        upsert_cv_table(out / "cv_table.csv", result.cv_rows)
        tuned = _load_hypers(run)
        tuned[_hypers_key(config)] = result.best.model_dump(mode="json")
        atomic_write_json(_hypers_file(run), dict(sorted(tuned.items())))
        path = save_model(run.paths.checkpoint or checkpoint_path(out, config),
                          result.final.params, config, experiment, hypers=result.best)
        _write_log(run, config, result.final)

    if not run.quiet:
        best: BestHypers = result.best
        console.print(f"[green]✓[/green] {config.label} K={config.num_layers}: lr={best.lr:g} "
                      f"l2={best.l2:g} iterations={best.iterations} "
                      f"mean val PR AUC={best.mean_val_pr_auc:.4f} → [cyan]{path}[/cyan]")


# ── evaluate ──────────────────────────────────────────────────────────────────

def evaluate_cmd(
    ctx: typer.Context,
    model: Optional[str] = typer.Option(None, "--model", "-m", help=f"One of: {', '.join(MODEL_LABELS)}"),
    layers: Optional[int] = typer.Option(None, "--layers", "-k", min=1, max=3),
    checkpoint: Optional[Path] = typer.Option(None, "--checkpoint", help="Checkpoint to evaluate"),
) -> None:
    """Score the held-out test split and upsert the row into metrics.csv."""
    with cli_errors():
        run = state(ctx).run_config("evaluate", {"paths": {"checkpoint": checkpoint}})
        experiment = _experiment(run)
        path = run.paths.checkpoint or checkpoint_path(run.paths.out_dir, _model(run, model, layers))
        if not path.exists():
            raise FileNotFoundError(f"Checkpoint not found: {path}")
        params, config = load_model(path, experiment)
        report = evaluate_variant(config, params, experiment, seed=run.seed)
        upsert_metrics(run.paths.out_dir / "metrics.csv", [report])

    if not run.quiet:
        console.print(f"[green]✓[/green] {config.label} K={config.num_layers}: "
                      f"PR AUC {report.pr_auc:.4f}, ROC AUC {report.roc_auc:.4f}")


# ── report ────────────────────────────────────────────────────────────────────

def report_cmd(ctx: typer.Context) -> None:
    """Render the test-set performance table and the parameter-count table."""
    with cli_errors():
        run = state(ctx).run_config("report")
        out = run.paths.out_dir
        metrics = load_metrics(out / "metrics.csv")
        summary = metrics_summary(metrics)
        atomic_write_csv(out / "performance.csv", summary)

        graph_dir = run.paths.graph()
        schema = load_schema(graph_dir) if (graph_dir / "schema.json").exists() else aml_schema()
        num_features = DEFAULT_FEATURE_COUNT
        if run.paths.features().exists():
            num_features = len(pd.read_csv(run.paths.features(), nrows=0).columns) - 1

    console.print(performance_table(metrics))
    console.print(parameter_table(schema, num_features, hidden_dim=run.model.hidden_dim))


# ── gradcheck ─────────────────────────────────────────────────────────────────

def _gradcheck_experiment(num_nodes: int, seed: int) -> Experiment:
    """A small generated graph with entity features, every individual a loss row."""
    n_ind = num_nodes * 3 // 5
    n_org = num_nodes * 4 // 25
    generated = generate(GenConfig(
        n_individual=n_ind, n_organization=n_org, n_external=num_nodes - n_ind - n_org,
        prevalence=0.02, decoy_ratio=1.0, seed=seed,
    ))
    embedding = EmbeddingConfig(walk_length=5, walks_per_node=2, skipgram=SkipGramConfig(epochs=1))
    table = assemble_feature_table(generated.graph, embedding, seed=seed)
    rows = np.arange(n_ind)
    return Experiment(
        graph=generated.graph, labels=generated.labels, features=table.values,
        split=SplitSpec(train=rows, test=np.zeros(0, dtype=np.int64), ratio=1.0, seed=seed),
    )


def gradcheck_cmd(
    ctx: typer.Context,
    model: Optional[str] = typer.Option(None, "--model", "-m", help=f"One of: {', '.join(MODEL_LABELS)}"),
    layers: Optional[int] = typer.Option(None, "--layers", "-k", min=1, max=3),
    nodes: int = typer.Option(50, "--nodes", min=25, help="Nodes in the generated check graph"),
    h: float = typer.Option(1e-6, "--h", help="Finite-difference step"),
    tolerance: float = typer.Option(1e-4, "--tolerance"),
    max_entries: Optional[int] = typer.Option(None, "--max-entries", min=1,
                                              help="Sample this many entries per parameter"),
) -> None:
    """Compare tape gradients with central differences; exits 3 above tolerance."""
    with cli_errors():
        run = state(ctx).run_config("gradcheck")
        config = _model(run, model, layers)
        experiment = _gradcheck_experiment(nodes, run.seed)
        report = check_gradients(config, experiment, h=h, tolerance=tolerance, max_entries=max_entries)

    if not run.quiet:
        table = Table(title=f"Gradient check: {config.label} K={config.num_layers}")
        table.add_column("Parameter", style="cyan")
        table.add_column("Max rel. error", justify="right")
        for name, err in report.errors.items():
            style = "green" if err < tolerance else "red"
            table.add_row(name, f"[{style}]{err:.3e}[/{style}]")
        console.print(table)
    console.print(f"max rel err {report.max_error:.3e} over {report.checked_entries} entries "
                  f"(tolerance {tolerance:g})")
    if not report.passed:
        err_console.print(f"[red]✗ Gradient check failed at {report.worst}[/red]")
        raise typer.Exit(EXIT_NUMERIC)
