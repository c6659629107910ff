"""
Synthetic AML transaction graphs.

Background: node features are noise, transaction edges are drawn uniformly per meta-step
with geometric counts and log-normal amounts, every individual receives at least
``min_txn_in`` incoming transactions, and a few role edges link individuals to
organizations. Suspicious individuals are then wrapped in one planted motif each:

  smurfing     several just-below-threshold deposits in, one matching transfer out
  circular     money leaves to an external, passes through a mule and returns, minus a haircut
  role_abuse   an owned organization forwards most of its external inflow to its owner

Decoys give regular individuals the same motif structure with unrelated amounts, so the
label is recoverable from edge amounts and not from structure alone.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, Field

from src.graph.schema import EXT, IND, ORG, ROLE, TXN, MetaStep, aml_schema
from src.graph.store import EdgeTable, HeteroGraph, LabelTable, build_graph

from .config import MOTIF_KINDS, GenConfig

logger = logging.getLogger(__name__)

SMURF_MIN, SMURF_MAX = 5, 9
ROLE_MIN, ROLE_MAX = 3, 6
OWNER = 1.0


class GenerationError(ValueError):
    """Raised when a configuration cannot be realized (e.g. motifs need more nodes)."""


# ── Provenance ────────────────────────────────────────────────────────────────

class InjectedEdge(BaseModel):
    step: str
    src: int
    dst: int
    features: list[float]


class MotifInstance(BaseModel):
    kind: str
    center: int
    decoy: bool = False
    nodes: list[tuple[str, int]] = Field(default_factory=list)
    edges: list[InjectedEdge] = Field(default_factory=list)


class Provenance(BaseModel):
    config: GenConfig
    num_positive: int
    num_decoys: int
    motifs: list[MotifInstance] = Field(default_factory=list)


@dataclass
class GeneratedGraph:
    graph: HeteroGraph
    labels: LabelTable
    provenance: Provenance


# ── Edge accumulation ─────────────────────────────────────────────────────────

class _EdgeBuffer:
    def __init__(self, n_org: int):
        self._parts: dict[str, list[tuple[np.ndarray, np.ndarray, np.ndarray]]] = {}
        self.org_ext_inflow = np.zeros(n_org)

    def add(self, key: str, src: np.ndarray, dst: np.ndarray, feats: np.ndarray) -> None:
        src = np.atleast_1d(np.asarray(src, dtype=np.int64))
        dst = np.atleast_1d(np.asarray(dst, dtype=np.int64))
        feats = np.atleast_2d(np.asarray(feats, dtype=np.float64))
        self._parts.setdefault(key, []).append((src, dst, feats))
        if key == f"{EXT}__{TXN}__{ORG}" and src.size:
            np.add.at(self.org_ext_inflow, dst, feats[:, 1])

    def tables(self) -> dict[str, EdgeTable]:
        out: dict[str, EdgeTable] = {}
        for key, parts in self._parts.items():
            out[key] = EdgeTable(
                src=np.concatenate([p[0] for p in parts]),
                dst=np.concatenate([p[1] for p in parts]),
                features=np.vstack([p[2] for p in parts]),
            )
        return out


def _key(source: str, edge: str, target: str) -> str:
    return MetaStep(source_type=source, edge_type=edge, target_type=target).key


# ── Generator ─────────────────────────────────────────────────────────────────

class _Generator:
    def __init__(self, config: GenConfig):
        self.config = config
        self.rng = np.random.default_rng(config.seed)
        self.n = {IND: config.n_individual, ORG: config.n_organization, EXT: config.n_external}
        self.edges = _EdgeBuffer(config.n_organization)
        self.motifs: list[MotifInstance] = []

    # ── draws ──

    def background_txn(self, size: int) -> np.ndarray:
        c = self.config
        count = self.rng.geometric(c.count_p, size=size).astype(np.float64)
        amount = count * self.rng.lognormal(c.amount_mu, c.amount_sigma, size=size)
        return np.column_stack([count, amount])

    def jitter(self, amount: float) -> float:
        return float(amount * np.exp(self.config.noise * self.rng.standard_normal()))

    def other_individual(self, exclude: int) -> int:
        j = int(self.rng.integers(self.n[IND] - 1))
        return j + 1 if j >= exclude else j

    # ── stages ──

    def node_features(self, positives: np.ndarray) -> dict[str, np.ndarray]:
        rng = self.rng
        n_ind, n_org, n_ext = self.n[IND], self.n[ORG], self.n[EXT]
        ind = np.column_stack([
            rng.standard_normal(n_ind),
            rng.standard_normal(n_ind),
            rng.uniform(18, 90, n_ind),
            rng.lognormal(10, 0.8, n_ind),
            rng.exponential(6.0, n_ind),
            rng.standard_normal((n_ind, 6)),
        ]) if n_ind else np.zeros((0, 11))
        # two mildly informative columns
        ind[positives, 0] += 0.5
        ind[positives, 1] += 0.5
        org = np.column_stack([
            rng.lognormal(12, 1.5, n_org),
            rng.integers(1, 500, n_org).astype(np.float64),
            rng.uniform(0, 40, n_org),
            rng.standard_normal((n_org, 5)),
        ]) if n_org else np.zeros((0, 8))
        ext = np.column_stack([
            rng.integers(0, 50, n_ext).astype(np.float64),
            rng.standard_normal(n_ext),
        ]) if n_ext else np.zeros((0, 2))
        return {IND: ind, ORG: org, EXT: ext}

    def background_edges(self) -> None:
        rates = self.config.edge_rates
        for step in aml_schema().allowed_meta_steps:
            n_src, n_dst = self.n[step.source_type], self.n[step.target_type]
            m = int(round(rates.get(step.key, 0.0) * n_src))
            if m == 0 or n_src == 0 or n_dst == 0:
                continue
            src = self.rng.integers(n_src, size=m)
            dst = self.rng.integers(n_dst, size=m)
            if step.source_type == step.target_type:
                if n_src == 1:
                    continue
                clash = src == dst
                dst[clash] = (dst[clash] + 1) % n_dst
            if step.edge_type == TXN:
                feats = self.background_txn(m)
            else:
                role_type = self.rng.integers(1, 4, size=m).astype(np.float64)
                ownership = np.where(role_type == OWNER, self.rng.uniform(0.05, 1.0, size=m), 0.0)
                feats = np.column_stack([role_type, ownership])
            self.edges.add(step.key, src, dst, feats)

    def guaranteed_inflow(self) -> None:
        """Give every individual ``min_txn_in`` incoming txn edges, sources picked by rate mass."""
        n_ind = self.n[IND]
        per_node = self.config.min_txn_in
        if n_ind == 0 or per_node == 0:
            return
        rates = self.config.edge_rates
        sources: list[str] = []
        mass: list[float] = []
        for source in (IND, ORG, EXT):
            n_src = self.n[source] - (1 if source == IND else 0)
            key = _key(source, TXN, IND)
            if n_src > 0:
                sources.append(source)
                mass.append(rates.get(key, 0.0) * n_src)
        if not sources:
            return
        weights = np.array(mass)
        weights = weights / weights.sum() if weights.sum() > 0 else np.full(len(sources), 1 / len(sources))
        dst = np.repeat(np.arange(n_ind), per_node)
        pick = self.rng.choice(len(sources), size=dst.shape[0], p=weights)
        for i, source in enumerate(sources):
            targets = dst[pick == i]
            if targets.size == 0:
                continue
            if source == IND:
                # uniform over the other individuals
                src = self.rng.integers(n_ind - 1, size=targets.size)
                src = src + (src >= targets)
            else:
                src = self.rng.integers(self.n[source], size=targets.size)
            self.edges.add(_key(source, TXN, IND), src, targets, self.background_txn(targets.size))

    def check_feasible(self, num_motifs: int) -> None:
        c = self.config
        if num_motifs == 0:
            return
        weights = {k: c.motif_weights.get(k, 0.0) for k in MOTIF_KINDS}
        if sum(weights.values()) <= 0:
            raise GenerationError("motif weights are all zero but suspicious individuals are requested")
        needs = {
            "smurfing": self.n[EXT] >= 1 and self.n[EXT] + self.n[IND] - 1 >= SMURF_MIN,
            "circular": self.n[EXT] >= 2 and self.n[IND] >= 2,
            "role_abuse": self.n[ORG] >= 1 and self.n[EXT] >= ROLE_MIN,
        }
        for kind, ok in needs.items():
            if weights[kind] > 0 and not ok:
                raise GenerationError(
                    f"motif {kind!r} needs more nodes than the configuration provides "
                    f"(ind={self.n[IND]}, org={self.n[ORG]}, ext={self.n[EXT]})"
                )

    def draw_kinds(self, size: int) -> list[str]:
        if size == 0:
            return []
        w = np.array([self.config.motif_weights.get(k, 0.0) for k in MOTIF_KINDS])
        picks = self.rng.choice(len(MOTIF_KINDS), size=size, p=w / w.sum())
        return [MOTIF_KINDS[i] for i in picks]

    # ── motifs ──

    def _emit(self, motif: MotifInstance, key: str, src: int, dst: int, feats: list[float]) -> None:
        self.edges.add(key, np.array([src]), np.array([dst]), np.array([feats]))
        motif.edges.append(InjectedEdge(step=key, src=src, dst=dst, features=feats))

    def _txn(self, decoy: bool, planted: float) -> list[float]:
        if decoy:
            count, amount = self.background_txn(1)[0]
            return [float(count), float(amount)]
        return [1.0, self.jitter(planted)]

    def smurfing(self, c: int, decoy: bool) -> MotifInstance:
        motif = MotifInstance(kind="smurfing", center=c, decoy=decoy, nodes=[(IND, c)])
        k = int(self.rng.integers(SMURF_MIN, SMURF_MAX + 1))
        threshold = self.config.structuring_threshold
        total = 0.0
        for _ in range(k):
            use_ext = self.rng.random() < 0.7 or self.n[IND] < 2
            feats = self._txn(decoy, threshold * self.rng.uniform(0.9, 0.99))
            total += feats[1]
            if use_ext:
                e = int(self.rng.integers(self.n[EXT]))
                motif.nodes.append((EXT, e))
                self._emit(motif, _key(EXT, TXN, IND), e, c, feats)
            else:
                u = self.other_individual(c)
                motif.nodes.append((IND, u))
                self._emit(motif, _key(IND, TXN, IND), u, c, feats)
        sink = int(self.rng.integers(self.n[EXT]))
        motif.nodes.append((EXT, sink))
        self._emit(motif, _key(IND, TXN, EXT), c, sink,
                   self._txn(decoy, total * self.rng.uniform(0.95, 0.99)))
        return motif

    def circular(self, c: int, decoy: bool) -> MotifInstance:
        e1, e2 = (int(x) for x in self.rng.choice(self.n[EXT], size=2, replace=False))
        mule = self.other_individual(c)
        motif = MotifInstance(kind="circular", center=c, decoy=decoy,
                              nodes=[(IND, c), (EXT, e1), (IND, mule), (EXT, e2)])
        amount = float(self.background_txn(1)[0, 1])
        keep = 1.0 - self.rng.uniform(0.01, 0.03)
        self._emit(motif, _key(IND, TXN, EXT), c, e1, self._txn(decoy, amount))
        self._emit(motif, _key(EXT, TXN, IND), e1, mule, self._txn(decoy, amount * keep))
        self._emit(motif, _key(IND, TXN, EXT), mule, e2, self._txn(decoy, amount * keep ** 2))
        self._emit(motif, _key(EXT, TXN, IND), e2, c, self._txn(decoy, amount * keep ** 3))
        return motif

    def role_abuse(self, c: int, o: int, decoy: bool) -> MotifInstance:
        motif = MotifInstance(kind="role_abuse", center=c, decoy=decoy, nodes=[(IND, c), (ORG, o)])
        if decoy:
            role = [float(self.rng.integers(1, 4)), float(self.rng.uniform(0, 1))]
        else:
            role = [OWNER, float(self.rng.uniform(0.5, 1.0))]
        self._emit(motif, _key(IND, ROLE, ORG), c, o, role)
        k = int(self.rng.integers(ROLE_MIN, ROLE_MAX + 1))
        for e in self.rng.choice(self.n[EXT], size=k, replace=False):
            motif.nodes.append((EXT, int(e)))
            count, amount = self.background_txn(1)[0]
            self._emit(motif, _key(EXT, TXN, ORG), int(e), o, [float(count), float(amount)])
        routed = self.edges.org_ext_inflow[o] * self.rng.uniform(0.85, 0.95)
        self._emit(motif, _key(ORG, TXN, IND), o, c, self._txn(decoy, routed))
        return motif

    # ── driver ──

    def run(self) -> GeneratedGraph:
        c = self.config
        n_ind = self.n[IND]
        n_pos = c.num_positive
        self.check_feasible(n_pos)

        positives = np.sort(self.rng.choice(n_ind, size=n_pos, replace=False)) if n_pos else \
            np.zeros(0, dtype=np.int64)
        labels = np.zeros(n_ind, dtype=np.int64)
        labels[positives] = 1

        features = self.node_features(positives)
        self.background_edges()
        self.guaranteed_inflow()

        regulars = np.flatnonzero(labels == 0)
        n_decoy = min(int(round(c.decoy_ratio * n_pos)), regulars.shape[0]) if n_pos else 0
        decoys = np.sort(self.rng.choice(regulars, size=n_decoy, replace=False)) if n_decoy else \
            np.zeros(0, dtype=np.int64)

        centers = [(int(v), False) for v in positives] + [(int(v), True) for v in decoys]
        kinds = self.draw_kinds(len(centers))
        org_order = self.rng.permutation(self.n[ORG]) if self.n[ORG] else np.zeros(0, dtype=np.int64)
        role_slot = 0
        for (v, decoy), kind in zip(centers, kinds):
            if kind == "smurfing":
                motif = self.smurfing(v, decoy)
            elif kind == "circular":
                motif = self.circular(v, decoy)
            else:
                o = int(org_order[role_slot % org_order.shape[0]])
                role_slot += 1
                motif = self.role_abuse(v, o, decoy)
            self.motifs.append(motif)

        schema = aml_schema()
        graph = build_graph(schema, features, self.edges.tables())
        provenance = Provenance(config=c, num_positive=n_pos, num_decoys=n_decoy, motifs=self.motifs)
        logger.info("Generated graph: %d nodes, %d edges, %d suspicious, %d decoys",
                    graph.num_nodes(), graph.num_edges(), n_pos, n_decoy)
        return GeneratedGraph(graph=graph, labels=LabelTable(labeled_type=IND, labels=labels),
                              provenance=provenance)


def generate(config: GenConfig) -> GeneratedGraph:
    """Deterministic in ``config.seed``."""
    return _Generator(config).run()
