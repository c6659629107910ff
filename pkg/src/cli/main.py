"""
Main CLI entry point.
Usage: uv run hmpnn [GLOBAL FLAGS] COMMAND [OPTIONS]
"""

from pathlib import Path
from typing import Optional

import typer

from src.cli.common import CLIState, setup_logging
from src.cli.data import diagnose_cmd, features_cmd, generate_cmd
from src.cli.experiment import evaluate_cmd, gradcheck_cmd, report_cmd, train_cmd, tune_cmd

app = typer.Typer(
    name="hmpnn",
    help="Heterogeneous message passing for anti-money-laundering on synthetic transaction graphs",
    no_args_is_help=True,
    rich_markup_mode="rich",
    pretty_exceptions_show_locals=False,
)


@app.callback()
def main(
    ctx: typer.Context,
    config: Optional[Path] = typer.Option(None, "--config", "-c", help="Run config (JSON or YAML)"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Global seed for every stochastic step"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Output directory"),
    jobs: Optional[int] = typer.Option(None, "--jobs", "-j", min=1, help="Parallel workers"),
    quiet: bool = typer.Option(False, "--quiet", "-q", help="Only warnings and errors"),
) -> None:
    setup_logging(quiet)
    ctx.obj = CLIState(config_path=config, seed=seed, out=out, jobs=jobs, quiet=quiet)


# Data
app.command(name="generate")(generate_cmd)
app.command(name="features")(features_cmd)
app.command(name="diagnose")(diagnose_cmd)

# Experiments
app.command(name="train")(train_cmd)
app.command(name="tune")(tune_cmd)
app.command(name="evaluate")(evaluate_cmd)
app.command(name="report")(report_cmd)
app.command(name="gradcheck")(gradcheck_cmd)


if __name__ == "__main__":
    app()
