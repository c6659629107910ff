"""Recipe for a synthetic AML transaction graph."""

from __future__ import annotations

from pydantic import BaseModel, Field, field_validator

DEFAULT_EDGE_RATES: dict[str, float] = {
    "ind__txn__ind": 1.0,
    "ind__txn__org": 0.8,
    "ind__txn__ext": 1.0,
    "org__txn__ind": 2.0,
    "org__txn__org": 0.5,
    "org__txn__ext": 2.0,
    "ext__txn__ind": 1.5,
    "ext__txn__org": 1.0,
    "ind__role__org": 0.1,
}

MOTIF_KINDS = ("smurfing", "circular", "role_abuse")


class GenConfig(BaseModel):
    n_individual: int = Field(default=20_000, ge=0)
    n_organization: int = Field(default=2_000, ge=0)
    n_external: int = Field(default=10_000, ge=0)

    # expected background edges per source node, keyed by meta-step
    edge_rates: dict[str, float] = Field(default_factory=lambda: dict(DEFAULT_EDGE_RATES))
    # incoming txn edges every individual receives on top of the rate-driven draws
    min_txn_in: int = Field(default=1, ge=0)

    prevalence: float = 0.005
    motif_weights: dict[str, float] = Field(
        default_factory=lambda: {kind: 1.0 for kind in MOTIF_KINDS}
    )
    # structurally identical motifs with unstructured amounts, per suspicious individual
    decoy_ratio: float = Field(default=2.0, ge=0)

    amount_mu: float = 6.0
    amount_sigma: float = Field(default=1.0, gt=0)
    count_p: float = Field(default=0.4, gt=0, le=1)
    structuring_threshold: float = Field(default=1_000.0, gt=0)
    # log-scale jitter applied to every planted amount
    noise: float = Field(default=0.02, ge=0)

    seed: int = 0

    @field_validator("prevalence")
    @classmethod
    def _prevalence_range(cls, v: float) -> float:
        if not 0 < v <= 0.02:
            raise ValueError(f"prevalence must be in (0, 0.02], got {v}")
        return v

    @field_validator("edge_rates", "motif_weights")
    @classmethod
    def _non_negative(cls, v: dict[str, float]) -> dict[str, float]:
        bad = {k: x for k, x in v.items() if x < 0}
        if bad:
            raise ValueError(f"rates and weights must be >= 0: {bad}")
        return v

    @field_validator("motif_weights")
    @classmethod
    def _known_motifs(cls, v: dict[str, float]) -> dict[str, float]:
        unknown = set(v) - set(MOTIF_KINDS)
        if unknown:
            raise ValueError(f"unknown motif kinds: {sorted(unknown)}")
        return v

    @property
    def num_positive(self) -> int:
        return int(round(self.prevalence * self.n_individual))
