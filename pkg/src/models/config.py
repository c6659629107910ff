"""Model configuration."""

from __future__ import annotations

from enum import Enum
from typing import Optional

from pydantic import BaseModel, Field


class ModelKind(str, Enum):
    LOGREG = "logreg"
    MLP = "mlp"
    HGRAPHSAGE = "hgraphsage"
    HMPNN_SUM = "hmpnn-sum"
    HMPNN_CT = "hmpnn-ct"

    @property
    def is_graph_model(self) -> bool:
        return self in (ModelKind.HGRAPHSAGE, ModelKind.HMPNN_SUM, ModelKind.HMPNN_CT)

    @property
    def is_edge_conditioned(self) -> bool:
        return self in (ModelKind.HMPNN_SUM, ModelKind.HMPNN_CT)


class ModelConfig(BaseModel):
    kind: ModelKind = ModelKind.HMPNN_CT
    num_layers: int = Field(default=1, ge=1)
    hidden_dim: int = Field(default=8, ge=1)
    use_extra_degree_features: bool = False
    # None: the mlp's hidden width equals its input width
    mlp_hidden_dim: Optional[int] = Field(default=None, ge=1)
    labeled_type: str = "ind"
    seed: int = 0

    @property
    def label(self) -> str:
        """Row label used in metrics files ('hgraphsage-deg' for the extra-degree variant)."""
        if self.kind == ModelKind.HGRAPHSAGE and self.use_extra_degree_features:
            return "hgraphsage-deg"
        return self.kind.value

    @classmethod
    def from_label(cls, label: str, num_layers: int, **kwargs: object) -> "ModelConfig":
        if label == "hgraphsage-deg":
            return cls(kind=ModelKind.HGRAPHSAGE, num_layers=num_layers,
                       use_extra_degree_features=True, **kwargs)  # type: ignore[arg-type]
        return cls(kind=ModelKind(label), num_layers=num_layers, **kwargs)  # type: ignore[arg-type]


MODEL_LABELS = ["logreg", "mlp", "hgraphsage", "hgraphsage-deg", "hmpnn-sum", "hmpnn-ct"]
