"""Permutation-test machinery for metadata description lengths.

Randomizing the metadata labels while keeping the category counts fixed
yields the null distribution of description lengths against which the
observed metadata is judged: its alpha-percentile gives the randomized
reference description length, and the fraction of permutations at least as
good gives the permutation p-value.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .combinatorics import QTable
from .dl import Variant, dl
from .graph import Graph, Partition

_STREAM_PERM = 41
_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class PermutationEnsemble:
    """Description lengths of one metadata partition under label permutations."""

    variant: Variant
    n_permutations: int
    dls: np.ndarray
    alpha: float
    seed: int

    def __post_init__(self):
        if self.dls.shape != (self.n_permutations,):
            raise ValueError("ensemble length differs from n_permutations")
        if self.alpha * self.n_permutations < 1.0 - 1e-9:
            raise ValueError(
                f"alpha * n_permutations = {self.alpha * self.n_permutations:.3g} < 1; "
                "increase the number of permutations")


def permute_labels(metadata: Partition, rng: np.random.Generator) -> Partition:
    """Uniformly random permutation of the label sequence; category counts are kept."""
    return Partition(rng.permutation(metadata.labels), metadata.num_blocks)


def randomized_dl_distribution(graph: Graph, metadata: Partition, variant: Variant,
                               n_permutations: int = 500, seed: int = 0,
                               alpha: float = 0.01,
                               qtable: QTable | None = None) -> PermutationEnsemble:
    """Score ``n_permutations`` independent label permutations with :func:`dl`.

    Each permutation uses its own seed-derived stream, so the ensemble is
    reproducible and independent of evaluation order.
    """
    if metadata.size != graph.num_nodes:
        raise ValueError("metadata length differs from the graph's node count")
    dls = np.empty(n_permutations)
    for idx in range(n_permutations):
        rng = np.random.default_rng([seed & _SEED_MASK, _STREAM_PERM, idx])
        permuted = permute_labels(metadata, rng)
        dls[idx] = dl(graph, permuted, variant, qtable).total
    return PermutationEnsemble(variant=variant, n_permutations=n_permutations,
                               dls=dls, alpha=alpha, seed=seed)


def sigma_rand(ensemble: PermutationEnsemble) -> float:
    """Lower alpha-percentile of the ensemble as an order statistic.

    Returns the ceil(alpha * n_p)-th smallest description length, without
    interpolation; ties and discreteness therefore err on the strict side.
    """
    if ensemble.alpha * ensemble.n_permutations < 1.0 - 1e-9:
        raise ValueError("alpha * n_permutations < 1; increase the number of permutations")
    k = math.ceil(ensemble.alpha * ensemble.n_permutations - 1e-9)
    return float(np.partition(ensemble.dls, k - 1)[k - 1])


def bestest_pvalue(sigma_d: float, ensemble: PermutationEnsemble) -> float:
    """Probability that randomized metadata describes the network at least as well.

    Ties count against the observed metadata; the value is floored at
    1/n_p because the observed labeling can never beat more permutations
    than were drawn.
    """
    if not math.isfinite(sigma_d):
        raise ValueError("sigma_d must be finite")
    n_p = ensemble.n_permutations
    count = int(np.count_nonzero(ensemble.dls <= sigma_d))
    return max(count / n_p, 1.0 / n_p)


def ensemble_to_csv(ensemble: PermutationEnsemble) -> str:
    """One-column CSV dump of the ensemble (nats), for external plotting."""
    lines = ["dl_nats"]
    lines.extend(repr(v) for v in ensemble.dls.tolist())
    return "\n".join(lines) + "\n"
