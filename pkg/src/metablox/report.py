"""Assemble the per-variant relevance vector and compression diagnostics.

For each SBM variant the pipeline runs partition inference (sigma_opt),
scores the observed metadata (sigma_d), and builds the permuted-metadata
ensemble (sigma_rand). The headline number per variant is

    gamma = (sigma_d - sigma_opt) / (sigma_rand - sigma_opt)

with gamma < 1 marking the metadata as relevant to the block structure and
gamma = 0 meaning it matches the optimum. The edge compression
c = sigma_opt / E is reported alongside as the absolute-fit reference.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .combinatorics import QTable
from .dl import Variant, dl
from .graph import Graph, Partition
from .inference import InferenceConfig, InferenceResult, infer
from .significance import PermutationEnsemble, bestest_pvalue, randomized_dl_distribution, sigma_rand

DEGENERATE_DENOMINATOR = "degenerate-denominator"
NO_EDGES = "no-edges"

ALL_VARIANT_KEYS = tuple(v.key for v in Variant)


def derive_seed(master_seed: int, *tags: str) -> int:
    """Stable 64-bit stream seed from a master seed and string tags."""
    h = hashlib.blake2b(digest_size=8)
    h.update(str(int(master_seed)).encode())
    for tag in tags:
        h.update(b"\x1f")
        h.update(tag.encode())
    return int.from_bytes(h.digest(), "little")


def compute_gamma(sigma_d: float, sigma_opt: float,
                  sigma_rand_value: float) -> tuple[float | None, list[str]]:
    """Relevance ratio; undefined (flagged) when the normalizer is nonpositive."""
    denominator = sigma_rand_value - sigma_opt
    if denominator <= 0:
        return None, [DEGENERATE_DENOMINATOR]
    return (sigma_d - sigma_opt) / denominator, []


def edge_compression(sigma_opt: float, num_edges: int) -> tuple[float | None, list[str]]:
    """Description length of the optimal partition per edge (nats/edge)."""
    if num_edges < 1:
        return None, [NO_EDGES]
    return sigma_opt / num_edges, []


@dataclass(frozen=True)
class ReportConfig:
    seed: int = 0
    n_permutations: int = 500
    alpha: float = 0.01
    sweeps: int = 1000
    restarts: int = 5
    proposal_epsilon: float = 1.0

    def inference_config(self, variant: Variant) -> InferenceConfig:
        return InferenceConfig(
            seed=derive_seed(self.seed, "infer", variant.key),
            sweeps=self.sweeps,
            restarts=self.restarts,
            proposal_epsilon=self.proposal_epsilon,
        )

    def permutation_seed(self, variant: Variant) -> int:
        return derive_seed(self.seed, "perm", variant.key)


@dataclass
class VariantOutcome:
    variant: Variant
    sigma_d: float
    sigma_opt: float
    sigma_rand: float
    pvalue: float
    gamma: float | None
    edge_compression: float | None
    relevant: bool | None
    flags: list[str]
    num_blocks_opt: int
    inference: InferenceResult | None = None
    ensemble: PermutationEnsemble | None = None

    @property
    def delta(self) -> float:
        return self.sigma_d - self.sigma_opt

    @property
    def delta_star(self) -> float:
        return self.sigma_rand - self.sigma_opt


@dataclass
class MetabloxReport:
    seed: int
    n_permutations: int
    alpha: float
    num_nodes: int
    num_edges: int
    metadata_blocks: int
    outcomes: dict[Variant, VariantOutcome]
    best_compressing_variant: Variant | None
    flags: list[str] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        def per_variant(getter):
            return {v.key: getter(o) for v, o in self.outcomes.items()}

        return {
            "gamma": per_variant(lambda o: o.gamma),
            "edge_compression": per_variant(lambda o: o.edge_compression),
            "sigma": {
                "d": per_variant(lambda o: o.sigma_d),
                "opt": per_variant(lambda o: o.sigma_opt),
                "rand": per_variant(lambda o: o.sigma_rand),
            },
            "delta": per_variant(lambda o: o.delta),
            "delta_star": per_variant(lambda o: o.delta_star),
            "pvalue": per_variant(lambda o: o.pvalue),
            "relevant": per_variant(lambda o: o.relevant),
            "num_blocks_opt": per_variant(lambda o: o.num_blocks_opt),
            "flags": list(self.flags),
            "best_compressing_variant":
                self.best_compressing_variant.tag if self.best_compressing_variant else None,
            "seed": self.seed,
            "n_permutations": self.n_permutations,
            "alpha": self.alpha,
            "num_nodes": self.num_nodes,
            "num_edges": self.num_edges,
            "metadata_blocks": self.metadata_blocks,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True) + "\n"

    @staticmethod
    def csv_header() -> list[str]:
        cols = ["graph", "metadata", "seed", "n_permutations", "alpha",
                "best_compressing_variant", "flags"]
        for key in ALL_VARIANT_KEYS:
            cols += [f"gamma_{key}", f"edge_compression_{key}", f"sigma_d_{key}",
                     f"sigma_opt_{key}", f"sigma_rand_{key}", f"pvalue_{key}",
                     f"relevant_{key}"]
        return cols

    def to_csv_row(self, graph_label: str, metadata_label: str) -> list:
        row: list = [graph_label, metadata_label, self.seed, self.n_permutations,
                     self.alpha,
                     self.best_compressing_variant.tag if self.best_compressing_variant else "",
                     ";".join(self.flags)]
        by_key = {v.key: o for v, o in self.outcomes.items()}
        for key in ALL_VARIANT_KEYS:
            o = by_key.get(key)
            if o is None:
                row += [""] * 7
            else:
                row += [o.gamma if o.gamma is not None else "",
                        o.edge_compression if o.edge_compression is not None else "",
                        o.sigma_d, o.sigma_opt, o.sigma_rand, o.pvalue,
                        o.relevant if o.relevant is not None else ""]
        return row


def evaluate_variant(graph: Graph, metadata: Partition, variant: Variant,
                     cfg: ReportConfig, qtable: QTable | None = None,
                     keep_details: bool = False) -> VariantOutcome:
    """Full single-variant pipeline: inference, ensemble, observed metadata score."""
    inference = infer(graph, variant, cfg.inference_config(variant), qtable)
    ensemble = randomized_dl_distribution(
        graph, metadata, variant, n_permutations=cfg.n_permutations,
        seed=cfg.permutation_seed(variant), alpha=cfg.alpha, qtable=qtable)
    sigma_d = dl(graph, metadata, variant, qtable).total
    s_rand = sigma_rand(ensemble)
    pvalue = bestest_pvalue(sigma_d, ensemble)
    gamma, flags = compute_gamma(sigma_d, inference.sigma_opt, s_rand)
    compression, c_flags = edge_compression(inference.sigma_opt, graph.num_edges)
    flags += c_flags
    return VariantOutcome(
        variant=variant,
        sigma_d=sigma_d,
        sigma_opt=inference.sigma_opt,
        sigma_rand=s_rand,
        pvalue=pvalue,
        gamma=gamma,
        edge_compression=compression,
        relevant=(gamma < 1.0) if gamma is not None else None,
        flags=flags,
        num_blocks_opt=inference.best_partition.num_blocks,
        inference=inference if keep_details else None,
        ensemble=ensemble if keep_details else None,
    )


def compute_metablox(graph: Graph, metadata: Partition,
                     variants: tuple[Variant, ...] = (Variant.NDC, Variant.DC,
                                                      Variant.PP_NONUNIFORM),
                     cfg: ReportConfig | None = None,
                     qtable: QTable | None = None,
                     keep_details: bool = False) -> MetabloxReport:
    """Per-variant relevance report for one (graph, metadata) pair."""
    if metadata.size != graph.num_nodes:
        raise ValueError("metadata partition length differs from the graph's node count")
    cfg = cfg or ReportConfig()
    outcomes: dict[Variant, VariantOutcome] = {}
    for variant in variants:
        outcomes[variant] = evaluate_variant(graph, metadata, variant, cfg,
                                             qtable, keep_details)
    flags = sorted({f"{o.variant.key}:{flag}" for o in outcomes.values() for flag in o.flags})
    best = None
    defined = [(o.edge_compression, v) for v, o in outcomes.items()
               if o.edge_compression is not None]
    if defined:
        best = min(defined, key=lambda pair: pair[0])[1]
    return MetabloxReport(
        seed=cfg.seed,
        n_permutations=cfg.n_permutations,
        alpha=cfg.alpha,
        num_nodes=graph.num_nodes,
        num_edges=graph.num_edges,
        metadata_blocks=metadata.num_blocks,
        outcomes=outcomes,
        best_compressing_variant=best,
        flags=flags,
    )
