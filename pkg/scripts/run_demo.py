#!/usr/bin/env python3
"""
run_demo.py
End-to-end experiment: generate → features → tune → train → evaluate → report for all
fifteen model variants.
Usage: uv run python scripts/run_demo.py [--config config/runs/smoke.json] [--seed 0]
"""

import sys
from pathlib import Path
from typing import Optional

# Ensure project root is in path
sys.path.insert(0, str(Path(__file__).parent.parent))

import typer
from rich.console import Console

from config.settings import settings
from src.cli.main import app

console = Console()

# (model label, layer counts); logreg has no hidden layers, the mlp starts at two
VARIANTS: list[tuple[str, tuple[int, ...]]] = [
    ("logreg", (1,)),
    ("mlp", (2, 3)),
    ("hgraphsage", (1, 2, 3)),
    ("hgraphsage-deg", (1, 2, 3)),
    ("hmpnn-sum", (1, 2, 3)),
    ("hmpnn-ct", (1, 2, 3)),
]


def _run(global_args: list[str], *args: str) -> None:
    command = typer.main.get_command(app)
    code = command.main([*global_args, *args], standalone_mode=False)
    if code:
        console.print(f"[red]✗ {' '.join(args)} exited with {code}[/red]")
        raise SystemExit(code)


def main(
    config: Path = typer.Option(settings.runs_dir / "smoke.json", "--config", "-c"),
    seed: int = typer.Option(0, "--seed"),
    out: Optional[Path] = typer.Option(None, "--out", "-o"),
) -> None:
    global_args = ["--config", str(config), "--seed", str(seed)]
    if out is not None:
        global_args += ["--out", str(out)]

    console.print("\n[bold]Generating graph and features[/bold]")
    _run(global_args, "generate")
    _run(global_args, "diagnose")
    _run(global_args, "features")

    for label, layer_counts in VARIANTS:
        for k in layer_counts:
            console.print(f"\n[bold]{label} K={k}[/bold]")
            _run(global_args, "tune", "--model", label, "--layers", str(k))
            _run(global_args, "train", "--model", label, "--layers", str(k))
            _run(global_args, "evaluate", "--model", label, "--layers", str(k))

    _run(global_args, "report")


if __name__ == "__main__":
    typer.run(main)
