"""Microcanonical SBM description lengths for a graph under a fixed partition.

Four model variants are supported: the plain blockmodel (NDC), the
degree-corrected blockmodel (DC), and the assortative planted-partition
model (PP) in its uniform and non-uniform forms. Every description length
is the exact negative log of the model's joint distribution, in nats,
assuming a simple undirected graph (the adjacency factorials are then 1).

The same code path scores inferred partitions and metadata partitions;
callers simply pass whichever :class:`~metablox.graph.Partition` they have.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .combinatorics import (
    QTable,
    default_qtable,
    log_binomial,
    log_double_factorial_even,
    log_factorial,
    log_factorial_arr,
    log_multiset,
)
from .graph import BlockStats, Graph, GraphValidationError, Partition, block_stats

LN2 = math.log(2.0)


class Variant(enum.Enum):
    """SBM variant probed by the measure."""

    NDC = "ndc"
    DC = "dc"
    PP_UNIFORM = "pp-uniform"
    PP_NONUNIFORM = "pp-nonuniform"

    @property
    def tag(self) -> str:
        return self.value

    @property
    def key(self) -> str:
        """Identifier used in JSON/CSV field names."""
        return self.value.replace("-", "_")

    @property
    def is_pp(self) -> bool:
        return self in (Variant.PP_UNIFORM, Variant.PP_NONUNIFORM)

    @property
    def has_degree_prior(self) -> bool:
        return self is not Variant.NDC

    @classmethod
    def from_tag(cls, tag: str) -> "Variant":
        try:
            return cls(tag.strip().lower())
        except ValueError:
            valid = ", ".join(v.value for v in cls)
            raise ValueError(f"unknown variant {tag!r} (expected one of: {valid})") from None


@dataclass(frozen=True)
class DLBreakdown:
    """Description length split into its model components (all nats)."""

    variant: Variant
    likelihood_nats: float
    edge_prior_nats: float
    degree_prior_nats: float
    partition_prior_nats: float
    pp_hyperprior_nats: float

    @property
    def total(self) -> float:
        return (self.likelihood_nats + self.edge_prior_nats + self.degree_prior_nats
                + self.partition_prior_nats + self.pp_hyperprior_nats)

    def to_dict(self) -> dict:
        return {
            "variant": self.variant.tag,
            "likelihood_nats": self.likelihood_nats,
            "edge_prior_nats": self.edge_prior_nats,
            "degree_prior_nats": self.degree_prior_nats,
            "partition_prior_nats": self.partition_prior_nats,
            "pp_hyperprior_nats": self.pp_hyperprior_nats,
            "total_nats": self.total,
        }


def _sum_log_fact_degrees(graph: Graph) -> float:
    cached = graph._adjacency.get("sum_lf_deg")
    if cached is None:
        cached = float(log_factorial_arr(graph.degrees).sum())
        graph._adjacency["sum_lf_deg"] = cached
    return cached


def _pair_and_diag(stats: BlockStats) -> tuple[float, float]:
    """(sum over r<s of ln e_rs!, sum over r of ln e_rr!!)."""
    e = stats.edge_counts
    iu = np.triu_indices(stats.num_blocks, k=1)
    off = float(log_factorial_arr(e[iu]).sum()) if iu[0].size else 0.0
    diag = np.diag(e)
    halves = diag // 2
    dd = float((halves * LN2 + log_factorial_arr(halves)).sum())
    return off, dd


def ndc_likelihood(graph: Graph, stats: BlockStats) -> float:
    """-ln P(A | e, b) for the plain blockmodel on a simple graph."""
    off, diag = _pair_and_diag(stats)
    sizes = stats.block_sizes.astype(np.float64)
    placement = float((stats.block_degree_sums * np.log(sizes)).sum())
    return placement - off - diag


def dc_likelihood(graph: Graph, stats: BlockStats) -> float:
    """-ln P(A | e, k, b) for the degree-corrected blockmodel on a simple graph."""
    off, diag = _pair_and_diag(stats)
    half_edges = float(log_factorial_arr(stats.block_degree_sums).sum())
    return half_edges - off - diag - _sum_log_fact_degrees(graph)


def _pp_hyperprior(num_blocks: int, num_edges: int) -> float:
    """-ln P(e_in, e_out | E, b); zero for a single block."""
    return math.log(num_edges + 1.0) if num_blocks > 1 else 0.0


def edge_matrix_prior(stats: BlockStats, variant: Variant, num_edges: int) -> float:
    """-ln of the edge-count-matrix prior, including the PP hyperprior term."""
    b = stats.num_blocks
    if not variant.is_pp:
        return log_multiset(b * (b + 1) // 2, num_edges)
    e = stats.edge_counts
    e_in, e_out = stats.e_in, stats.e_out
    out = _pp_hyperprior(b, num_edges)
    # e_out > 0 implies B >= 2, so C(B, 2) >= 1 whenever its exponent is nonzero
    if e_out:
        out += e_out * log_binomial(b, 2) - log_factorial(e_out)
    if variant is Variant.PP_UNIFORM:
        halves = np.diag(e) // 2
        out += e_in * math.log(b) + float(log_factorial_arr(halves).sum())
        out -= log_factorial(e_in)
    else:
        out += log_binomial(b + e_in - 1, e_in)
    if e_out:
        iu = np.triu_indices(b, k=1)
        out += float(log_factorial_arr(e[iu]).sum())
    return out


def degree_prior(stats: BlockStats, qtable: QTable | None = None) -> float:
    """-ln P(k | e, b): per-block degree histograms plus restricted partition counts."""
    qt = qtable or default_qtable()
    out = float(log_factorial_arr(stats.block_sizes).sum())
    for hist in stats.degree_histograms:
        counts = np.fromiter(hist.values(), dtype=np.int64, count=len(hist))
        out -= float(log_factorial_arr(counts).sum())
    for e_r, n_r in zip(stats.block_degree_sums.tolist(), stats.block_sizes.tolist()):
        out += qt.log_q(e_r, n_r)
    return out


def partition_prior(partition: Partition, num_nodes: int) -> float:
    """-ln P(b) = -ln [ P(b|n) P(n|B) P(B) ] with uniform hyperpriors on B and n."""
    if partition.size != num_nodes:
        raise GraphValidationError("partition length differs from node count")
    sizes = np.bincount(partition.labels, minlength=partition.num_blocks)
    out = log_factorial(num_nodes) - float(log_factorial_arr(sizes).sum())
    out += log_binomial(num_nodes - 1, partition.num_blocks - 1)
    out += math.log(num_nodes)
    return out


def dl(graph: Graph, partition: Partition, variant: Variant,
       qtable: QTable | None = None) -> DLBreakdown:
    """Full description length of ``graph`` under ``partition`` and ``variant``."""
    stats = block_stats(graph, partition)
    return dl_from_stats(graph, partition, stats, variant, qtable)


def dl_from_stats(graph: Graph, partition: Partition, stats: BlockStats,
                  variant: Variant, qtable: QTable | None = None) -> DLBreakdown:
    """As :func:`dl` but reusing precomputed block statistics."""
    if variant is Variant.NDC:
        like = ndc_likelihood(graph, stats)
        deg = 0.0
    else:
        like = dc_likelihood(graph, stats)
        deg = degree_prior(stats, qtable)
    hyper = _pp_hyperprior(stats.num_blocks, graph.num_edges) if variant.is_pp else 0.0
    edge = edge_matrix_prior(stats, variant, graph.num_edges) - hyper
    part = partition_prior(partition, graph.num_nodes)
    return DLBreakdown(
        variant=variant,
        likelihood_nats=like,
        edge_prior_nats=edge,
        degree_prior_nats=deg,
        partition_prior_nats=part,
        pp_hyperprior_nats=hyper,
    )


def posterior_odds(sigma_1: float, sigma_2: float) -> float:
    """Posterior odds ratio exp(-(sigma_1 - sigma_2)); > 1 when model 1 wins."""
    return math.exp(-(sigma_1 - sigma_2))
