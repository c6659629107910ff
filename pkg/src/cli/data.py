"""CLI data commands: generate a synthetic graph, build entity features, diagnose the signal."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd
import typer
from rich.table import Table

from src.cli.common import EXIT_CONFIG, cli_errors, console, err_console, state
from src.graph.container import atomic_write_csv, atomic_write_json, load_graph, load_labels, save_graph
from src.graph.egonet import egonet
from src.graph.schema import IND, ROLE, TXN
from src.graph.store import HeteroGraph
from src.graph.validator import validate_graph
from src.netfeatures.assemble import assemble_feature_table, save_embeddings, save_feature_table
from src.synthgen.generator import Provenance, generate
from src.synthgen.report import save_signal_report, signal_strength_report

logger = logging.getLogger(__name__)

EGONET_HOPS = {TXN: 3, ROLE: 9}


# ── generate ──────────────────────────────────────────────────────────────────

def generate_cmd(
    ctx: typer.Context,
    n_individual: Optional[int] = typer.Option(None, "--n-individual", help="Individuals to generate"),
    n_organization: Optional[int] = typer.Option(None, "--n-organization"),
    n_external: Optional[int] = typer.Option(None, "--n-external"),
    prevalence: Optional[float] = typer.Option(None, "--prevalence", help="Fraction of suspicious individuals"),
    decoy_ratio: Optional[float] = typer.Option(None, "--decoy-ratio"),
) -> None:
    """Generate a synthetic AML graph container with labels and motif provenance."""
    with cli_errors():
        run = state(ctx).run_config("generate", {"gen": {
            "n_individual": n_individual, "n_organization": n_organization,
            "n_external": n_external, "prevalence": prevalence, "decoy_ratio": decoy_ratio,
        }})
        gen = run.gen.model_copy(update={"seed": run.seed})
        result = generate(gen)
        out = run.paths.graph()
        report = validate_graph(result.graph, result.labels)
        if not report.is_valid:
            for r in report.tables_with_errors:
                err_console.print(f"[red]✗ {r.table}:[/red] {'; '.join(r.errors)}")
            raise typer.Exit(EXIT_CONFIG)
        save_graph(result.graph, out, labels=result.labels)
        atomic_write_json(out / "genconfig.json", gen.model_dump(mode="json"))
        atomic_write_json(out / "provenance.json", result.provenance.model_dump(mode="json"))

    if not run.quiet:
        console.print(f"[green]✓[/green] Graph written to [cyan]{out}[/cyan]: "
                      f"{result.graph.num_nodes()} nodes, {result.graph.num_edges()} edges, "
                      f"{result.provenance.num_positive} suspicious, {result.provenance.num_decoys} decoys")


# ── features ──────────────────────────────────────────────────────────────────

def features_cmd(
    ctx: typer.Context,
    graph_dir: Optional[Path] = typer.Option(None, "--graph", "-g", help="Graph container directory"),
    blocks: Optional[list[str]] = typer.Option(None, "--block", "-b",
                                               help="Feature block to compute (repeatable)"),
    walk_length: Optional[int] = typer.Option(None, "--walk-length"),
    walks_per_node: Optional[int] = typer.Option(None, "--walks-per-node"),
) -> None:
    """Build features_individual.csv and the per-meta-path embedding tables."""
    with cli_errors():
        run = state(ctx).run_config("features", {
            "paths": {"graph_dir": graph_dir},
            "embedding": {"blocks": blocks or None, "walk_length": walk_length,
                          "walks_per_node": walks_per_node},
        })
        graph = _load_graph_dir(run.paths.graph())
        table = assemble_feature_table(graph, run.embedding, seed=run.seed, jobs=run.jobs)
        path = save_feature_table(run.paths.features(), table)
        written = save_embeddings(run.paths.out_dir / "embeddings", table)
        if table.coverage:
            coverage = pd.DataFrame(sorted(table.coverage.items()), columns=["embedding", "coverage"])
            atomic_write_csv(run.paths.out_dir / "embeddings" / "coverage.csv", coverage)

    if not run.quiet:
        console.print(f"[green]✓[/green] {table.width} features for {table.ids.shape[0]} individuals "
                      f"→ [cyan]{path}[/cyan] ({len(written)} embedding tables)")


# ── diagnose ──────────────────────────────────────────────────────────────────

def diagnose_cmd(
    ctx: typer.Context,
    graph_dir: Optional[Path] = typer.Option(None, "--graph", "-g", help="Graph container directory"),
    egonets: int = typer.Option(3, "--egonets", min=0, help="Random individuals to cut egonets around"),
    bins: int = typer.Option(20, "--bins", min=1, help="Degree histogram bins"),
) -> None:
    """Signal-strength report, degree histograms and egonets of seeded random individuals."""
    with cli_errors():
        run = state(ctx).run_config("diagnose", {"paths": {"graph_dir": graph_dir}})
        source = run.paths.graph()
        graph = _load_graph_dir(source)
        labels = load_labels(source, graph)
        provenance = None
        if (source / "provenance.json").exists():
            provenance = Provenance.model_validate_json((source / "provenance.json").read_text(encoding="utf-8"))
        report = signal_strength_report(graph, labels, provenance, bins=bins,
                                        structuring_threshold=run.gen.structuring_threshold)
        out = run.paths.out_dir / "diagnose"
        written = save_signal_report(out, report)
        written += _write_egonets(graph, out / "egonets", egonets, run.seed)

    if run.quiet:
        return
    table = Table(title="Signal strength", show_lines=False)
    table.add_column("Statistic", style="cyan")
    table.add_column("Regular", justify="right")
    table.add_column("Suspicious", justify="right")
    for row in report.rows:
        table.add_row(row.statistic, _fmt(row.regular), _fmt(row.suspicious))
    table.add_row("oracle PR AUC", "", _fmt(report.oracle_pr_auc))
    table.add_row("oracle PR AUC without amounts", "", _fmt(report.oracle_pr_auc_without_amounts))
    table.add_row("motif recall", "", _fmt(report.motif_recall))
    console.print(table)
    console.print(f"[dim]{len(written)} files written to {out}[/dim]")


def _fmt(value: Optional[float]) -> str:
    return "-" if value is None else f"{value:,.4g}"


def _load_graph_dir(path: Path) -> HeteroGraph:
    if not path.is_dir():
        raise FileNotFoundError(f"Graph directory not found: {path}")
    return load_graph(path)


def _write_egonets(graph: HeteroGraph, directory: Path, count: int, seed: int) -> list[Path]:
    n = graph.num_nodes(IND)
    if count == 0 or n == 0:
        return []
    rng = np.random.default_rng(seed)
    centres = np.sort(rng.choice(n, size=min(count, n), replace=False))
    written: list[Path] = []
    for v in centres:
        ego_id = int(graph.node_ids[IND][v])
        for edge_type, hops in EGONET_HOPS.items():
            sub = egonet(graph, (IND, int(v)), hops, edge_type)
            frames = [
                pd.DataFrame({
                    "meta_step": step.key,
                    "src_id": sub.node_ids[step.source_type][block.src],
                    "dst_id": sub.node_ids[step.target_type][block.dst],
                })
                for step, block in sub.edges.items()
            ]
            frame = pd.concat(frames, ignore_index=True) if frames else \
                pd.DataFrame(columns=["meta_step", "src_id", "dst_id"])
            path = directory / f"egonet_{ego_id}_{edge_type}.csv"
            atomic_write_csv(path, frame)
            written.append(path)
    logger.info("Wrote %d egonets around %d individuals", len(written), centres.shape[0])
    return written
