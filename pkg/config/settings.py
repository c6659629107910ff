from pathlib import Path
from typing import Any, Optional

import yaml
from pydantic import BaseModel, Field
from pydantic_settings import BaseSettings, PydanticBaseSettingsSource, SettingsConfigDict

from src.harness.tuning import HyperGrid
from src.models.config import ModelConfig
from src.netfeatures.assemble import EmbeddingConfig
from src.synthgen.config import GenConfig


class _InitOnly(BaseSettings):
    """Settings read only from constructor arguments; the CLI takes no environment variables."""

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> tuple[PydanticBaseSettingsSource, ...]:
        return (init_settings,)


class Settings(_InitOnly):
    model_config = SettingsConfigDict(case_sensitive=False, extra="ignore")

    log_level: str = "INFO"

    @property
    def runs_dir(self) -> Path:
        return Path(__file__).parent / "runs"


settings = Settings()


# ── Run configuration ─────────────────────────────────────────

class PathsConfig(BaseModel):
    graph_dir: Optional[Path] = None
    features_file: Optional[Path] = None
    out_dir: Path = Path("output")
    checkpoint: Optional[Path] = None

    def graph(self) -> Path:
        return self.graph_dir or self.out_dir / "graph"

    def features(self) -> Path:
        return self.features_file or self.out_dir / "features_individual.csv"


class RunConfig(_InitOnly):
    model_config = SettingsConfigDict(extra="forbid")

    command: str = ""
    paths: PathsConfig = Field(default_factory=PathsConfig)
    model: ModelConfig = Field(default_factory=ModelConfig)
    grid: HyperGrid = Field(default_factory=HyperGrid)
    gen: GenConfig = Field(default_factory=GenConfig)
    embedding: EmbeddingConfig = Field(default_factory=EmbeddingConfig)
    split_ratio: float = Field(default=0.7, gt=0, lt=1)
    seed: int = 0
    jobs: int = Field(default=1, ge=1)
    quiet: bool = False

    def seeded_model(self) -> ModelConfig:
        return self.model.model_copy(update={"seed": self.seed})


def _merge(base: dict[str, Any], overrides: dict[str, Any]) -> dict[str, Any]:
    merged = dict(base)
    for key, value in overrides.items():
        if value is None:
            continue
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_run_config(path: Optional[Path] = None, overrides: Optional[dict[str, Any]] = None) -> RunConfig:
    """
    Build a RunConfig from a JSON or YAML file, then apply ``overrides`` (CLI flags).
    ``None`` overrides are ignored so that unset flags never mask file values.
    """
    data: dict[str, Any] = {}
    if path is not None:
        if not path.exists():
            raise FileNotFoundError(f"Config file not found: {path}")
        with open(path, encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}
        if not isinstance(data, dict):
            raise ValueError(f"{path}: config must be a mapping")
    return RunConfig(**_merge(data, overrides or {}))
