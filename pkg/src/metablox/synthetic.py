"""Synthetic benchmark generators: planted-partition networks, the
two-partition cross-block network, and label sequences correlated with a
planted structure.

Edge placement is microcanonical: block-pair quotas are rounded to integers
that conserve the edge total exactly, and each quota is placed uniformly at
random among the allowed node pairs without replacement, so every generated
graph is simple and E is deterministic.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph, Partition


class GenerationError(ValueError):
    """Requested synthetic network is infeasible."""


@dataclass(frozen=True)
class BlockMatrix:
    """Symmetric expected edge-count-mass matrix over planted blocks."""

    theta: np.ndarray
    planted_blocks: int

    def __post_init__(self):
        t = np.asarray(self.theta, dtype=np.float64)
        object.__setattr__(self, "theta", t)
        if t.shape != (self.planted_blocks, self.planted_blocks):
            raise GenerationError("theta must be square over the planted blocks")
        if not np.allclose(t, t.T):
            raise GenerationError("theta must be symmetric")
        if np.any(t < 0):
            raise GenerationError("theta entries must be nonnegative")

    def normalized_mass(self, num_edges: int) -> np.ndarray:
        """Rescale so that total mass equals 2E (diagonal counts twice)."""
        total = float(self.theta.sum())
        if total <= 0:
            raise GenerationError("theta has no mass")
        return self.theta * (2.0 * num_edges / total)


def theta_bc(num_edges: int, mu: float) -> BlockMatrix:
    """Bicommunity block matrix 2E [[1-mu, mu], [mu, 1-mu]]."""
    if not 0.0 <= mu <= 1.0 or num_edges < 1:
        raise GenerationError("need 0 <= mu <= 1 and E >= 1")
    m = 2.0 * num_edges * np.array([[1.0 - mu, mu], [mu, 1.0 - mu]])
    return BlockMatrix(m, 2)


def theta_cp(num_edges: int, lam: float) -> BlockMatrix:
    """Core-periphery block matrix 2E [[1-lam, 1/2], [1/2, lam]]."""
    if not 0.0 <= lam <= 1.0 or num_edges < 1:
        raise GenerationError("need 0 <= lambda <= 1 and E >= 1")
    m = 2.0 * num_edges * np.array([[1.0 - lam, 0.5], [0.5, lam]])
    return BlockMatrix(m, 2)


@dataclass(frozen=True)
class SyntheticSpec:
    """Parameters of one synthetic draw, kept for manifests."""

    num_nodes: int
    expected_degree: float
    matrices: tuple[BlockMatrix, ...]
    rho: float
    seed: int

    @property
    def target_edges(self) -> int:
        return int(round(self.num_nodes * self.expected_degree / 2.0))

    def to_json_dict(self) -> dict:
        return {
            "num_nodes": self.num_nodes,
            "expected_degree": self.expected_degree,
            "target_edges": self.target_edges,
            "rho": self.rho,
            "seed": self.seed,
            "matrices": [m.theta.tolist() for m in self.matrices],
        }


def _block_sizes(num_nodes: int, num_blocks: int) -> np.ndarray:
    """Near-equal block sizes; any remainder spread over the first blocks."""
    base, extra = divmod(num_nodes, num_blocks)
    return np.array([base + (1 if r < extra else 0) for r in range(num_blocks)],
                    dtype=np.int64)


def largest_remainder_round(values: np.ndarray, total: int) -> np.ndarray:
    """Round nonnegative reals to integers with the exact requested sum."""
    values = np.asarray(values, dtype=np.float64)
    floors = np.floor(values).astype(np.int64)
    short = total - int(floors.sum())
    if short < 0:
        raise GenerationError("rounding target below the floor sum")
    if short:
        order = np.argsort(-(values - floors), kind="stable")
        floors[order[:short]] += 1
    return floors


def _mass_to_edge_quotas(mass: np.ndarray, num_edges: int) -> np.ndarray:
    """Per unordered block pair edge counts from a 2E mass matrix."""
    b = mass.shape[0]
    iu = np.triu_indices(b)
    raw = np.array([mass[r, s] / 2.0 if r == s else mass[r, s]
                    for r, s in zip(*iu)])
    quotas_flat = largest_remainder_round(raw, num_edges)
    quotas = np.zeros((b, b), dtype=np.int64)
    quotas[iu] = quotas_flat
    return quotas


def _pair_capacity(sizes: np.ndarray, r: int, s: int) -> int:
    if r == s:
        n = int(sizes[r])
        return n * (n - 1) // 2
    return int(sizes[r]) * int(sizes[s])


def _place_pair_edges(rng: np.random.Generator, offsets: np.ndarray,
                      sizes: np.ndarray, r: int, s: int, count: int) -> np.ndarray:
    """Uniformly choose ``count`` distinct node pairs for block pair (r, s)."""
    cap = _pair_capacity(sizes, r, s)
    if count > cap:
        raise GenerationError(
            f"block pair ({r}, {s}) needs {count} edges but only {cap} node pairs exist")
    if count == 0:
        return np.empty((0, 2), dtype=np.int64)
    chosen = rng.choice(cap, size=count, replace=False)
    if r == s:
        iu = np.triu_indices(int(sizes[r]), k=1)
        u = offsets[r] + iu[0][chosen]
        v = offsets[r] + iu[1][chosen]
    else:
        u = offsets[r] + chosen // int(sizes[s])
        v = offsets[s] + chosen % int(sizes[s])
    return np.column_stack([np.minimum(u, v), np.maximum(u, v)])


def _generate_from_quotas(rng: np.random.Generator, sizes: np.ndarray,
                          quotas: np.ndarray) -> Graph:
    offsets = np.concatenate([[0], np.cumsum(sizes)[:-1]])
    chunks = []
    b = quotas.shape[0]
    for r in range(b):
        for s in range(r, b):
            chunks.append(_place_pair_edges(rng, offsets, sizes, r, s,
                                            int(quotas[r, s])))
    edges = np.vstack(chunks) if chunks else np.empty((0, 2), dtype=np.int64)
    return Graph.from_edges(int(sizes.sum()), [tuple(p) for p in edges.tolist()])


def sbm_generate(num_nodes: int, expected_degree: float, matrix: BlockMatrix,
                 seed: int = 0, rng: np.random.Generator | None = None
                 ) -> tuple[Graph, Partition]:
    """Draw one planted-partition network with equal-size blocks.

    The target edge count E = N k / 2 is met exactly; per-pair quotas come
    from the normalized block matrix via largest-remainder rounding.
    """
    rng = rng or np.random.default_rng([seed & ((1 << 64) - 1), 101])
    num_edges = int(round(num_nodes * expected_degree / 2.0))
    if num_edges < 1:
        raise GenerationError("target edge count below 1")
    sizes = _block_sizes(num_nodes, matrix.planted_blocks)
    quotas = _mass_to_edge_quotas(matrix.normalized_mass(num_edges), num_edges)
    graph = _generate_from_quotas(rng, sizes, quotas)
    labels = np.repeat(np.arange(matrix.planted_blocks, dtype=np.int64), sizes)
    return graph, Partition(labels, matrix.planted_blocks)


def cross_cell_mass(m_first: np.ndarray, m_second: np.ndarray, num_edges: int,
                    tol: float = 1e-8, max_iter: int = 10_000) -> np.ndarray:
    """Cell-pair mass over the cross-partition matching both block matrices.

    Cells are (first-block, second-block) pairs; iterative proportional
    fitting rescales the cell-pair mass until marginalizing over either
    planted partition reproduces its 2E mass matrix.
    """
    b1, b2 = m_first.shape[0], m_second.shape[0]
    cells = [(a, i) for a in range(b1) for i in range(b2)]
    idx = {c: n for n, c in enumerate(cells)}
    x = np.empty((len(cells), len(cells)))
    for (a, i), n1 in idx.items():
        for (c, j), n2 in idx.items():
            x[n1, n2] = m_first[a, c] * m_second[i, j] / (2.0 * num_edges)

    def marginal_first(mat):
        out = np.zeros((b1, b1))
        for (a, _), n1 in idx.items():
            for (c, _), n2 in idx.items():
                out[a, c] += mat[n1, n2]
        return out

    def marginal_second(mat):
        out = np.zeros((b2, b2))
        for (_, i), n1 in idx.items():
            for (_, j), n2 in idx.items():
                out[i, j] += mat[n1, n2]
        return out

    for _ in range(max_iter):
        m1 = marginal_first(x)
        for (a, i), n1 in idx.items():
            for (c, j), n2 in idx.items():
                if m1[a, c] > 0:
                    x[n1, n2] *= m_first[a, c] / m1[a, c]
        m2 = marginal_second(x)
        for (a, i), n1 in idx.items():
            for (c, j), n2 in idx.items():
                if m2[i, j] > 0:
                    x[n1, n2] *= m_second[i, j] / m2[i, j]
        err1 = np.abs(marginal_first(x) - m_first).max()
        err2 = np.abs(marginal_second(x) - m_second).max()
        scale = 2.0 * num_edges
        if max(err1, err2) <= tol * scale:
            return x
    raise GenerationError(
        f"proportional fitting did not reach tolerance {tol} in {max_iter} iterations; "
        "the two block matrices have incompatible marginals")


def scbm_generate(num_nodes: int, expected_degree: float, m_first: BlockMatrix,
                  m_second: BlockMatrix, seed: int = 0,
                  rng: np.random.Generator | None = None
                  ) -> tuple[Graph, tuple[Partition, Partition]]:
    """Draw one network with two coexisting planted partitions.

    Nodes are split into balanced cross cells (one per combination of the
    two planted block labels); cell-pair quotas are fitted so that the edge
    counts marginalize to both block matrices.
    """
    rng = rng or np.random.default_rng([seed & ((1 << 64) - 1), 103])
    b1, b2 = m_first.planted_blocks, m_second.planted_blocks
    n_cells = b1 * b2
    if num_nodes % n_cells:
        raise GenerationError(
            f"N = {num_nodes} must be divisible by {n_cells} for balanced cross cells")
    num_edges = int(round(num_nodes * expected_degree / 2.0))
    mass = cross_cell_mass(m_first.normalized_mass(num_edges),
                           m_second.normalized_mass(num_edges), num_edges)
    quotas = _mass_to_edge_quotas(mass, num_edges)
    sizes = np.full(n_cells, num_nodes // n_cells, dtype=np.int64)
    graph = _generate_from_quotas(rng, sizes, quotas)
    cells = [(a, i) for a in range(b1) for i in range(b2)]
    first_labels = np.repeat([a for a, _ in cells], sizes)
    second_labels = np.repeat([i for _, i in cells], sizes)
    return graph, (Partition(first_labels, b1), Partition(second_labels, b2))


def correlated_metadata(planted: Partition, rho: float,
                        rng: np.random.Generator) -> Partition:
    """Labels agreeing with the planted partition with probability (1+rho)/2.

    Disagreeing nodes draw uniformly among the other labels. Label values are
    kept aligned with the planted ones; only when a category vanishes are the
    survivors compacted (order preserving) to stay contiguous.
    """
    if not 0.0 <= rho <= 1.0:
        raise GenerationError("rho must lie in [0, 1]")
    labels = planted.labels.copy()
    n_blocks = planted.num_blocks
    keep = rng.random(labels.size) < (1.0 + rho) / 2.0
    if n_blocks > 1:
        flip = np.flatnonzero(~keep)
        if flip.size:
            shift = rng.integers(1, n_blocks, size=flip.size)
            labels[flip] = (labels[flip] + shift) % n_blocks
    present = np.unique(labels)
    if present.size != n_blocks:
        labels = np.searchsorted(present, labels)
    return Partition(labels, int(present.size))
