"""Shared CLI state, logging setup and error-to-exit-code mapping."""

from __future__ import annotations

import logging
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterator, Optional

import typer
import yaml
from rich.console import Console
from rich.logging import RichHandler

from config.settings import RunConfig, load_run_config, settings
from src.autodiff.tensor import NumericError

console = Console()
err_console = Console(stderr=True)

EXIT_CONFIG = 2
EXIT_NUMERIC = 3


@dataclass
class CLIState:
    config_path: Optional[Path] = None
    seed: Optional[int] = None
    out: Optional[Path] = None
    jobs: Optional[int] = None
    quiet: bool = False

    def run_config(self, command: str, overrides: Optional[dict[str, Any]] = None) -> RunConfig:
        merged: dict[str, Any] = {
            "command": command,
            "seed": self.seed,
            "jobs": self.jobs,
            "quiet": self.quiet or None,
            "paths": {"out_dir": self.out},
        }
        for key, value in (overrides or {}).items():
            if isinstance(value, dict) and isinstance(merged.get(key), dict):
                merged[key] = {**merged[key], **value}
            else:
                merged[key] = value
        return load_run_config(self.config_path, merged)


def setup_logging(quiet: bool) -> None:
    level = logging.WARNING if quiet else getattr(logging, settings.log_level.upper(), logging.INFO)
    logging.basicConfig(
        level=level,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=err_console, show_path=False, rich_tracebacks=False)],
        force=True,
    )


def state(ctx: typer.Context) -> CLIState:
    obj = ctx.find_root().obj
    return obj if isinstance(obj, CLIState) else CLIState()


@contextmanager
def cli_errors() -> Iterator[None]:
    """
    Map library failures to exit codes: 3 for numeric failures, 2 for bad input or config.
    Domain errors all derive from ValueError; anything else propagates as a crash.
    """
    try:
        yield
    except NumericError as exc:
        err_console.print(f"[red]✗ Numeric failure:[/red] {exc}")
        raise typer.Exit(EXIT_NUMERIC) from exc
    except (ValueError, FileNotFoundError, yaml.YAMLError) as exc:
        err_console.print(f"[red]✗ {type(exc).__name__}:[/red] {exc}")
        raise typer.Exit(EXIT_CONFIG) from exc
