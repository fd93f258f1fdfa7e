"""Undirected simple graphs, node partitions, and their block statistics.

Graphs carry contiguous integer node ids internally; the mapping to the
external string ids found in input files is preserved so reports stay
joinable with the source data. All three containers are immutable after
construction and safe for concurrent shared reads.
"""
from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from typing import IO, Iterable, Sequence

import numpy as np

log = logging.getLogger(__name__)


class GraphFormatError(ValueError):
    """Malformed edge-list or metadata input."""


class GraphValidationError(ValueError):
    """Inputs violate a structural invariant."""


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph with N nodes and E edges.

    ``edges`` has shape (E, 2) with each row (u, v), u < v, unique;
    ``degrees`` has length N and sums to 2E. Isolated nodes are legal.
    """

    num_nodes: int
    edges: np.ndarray
    degrees: np.ndarray
    node_names: tuple[str, ...]
    _adjacency: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def num_edges(self) -> int:
        return int(self.edges.shape[0])

    def __post_init__(self):
        if self.num_nodes < 1:
            raise GraphValidationError("graph needs at least one node")
        e = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        object.__setattr__(self, "edges", e)
        if e.size:
            if e.min() < 0 or e.max() >= self.num_nodes:
                raise GraphValidationError("edge endpoint outside [0, N)")
            if np.any(e[:, 0] >= e[:, 1]):
                raise GraphValidationError("edges must satisfy u < v (no self-loops)")
            keys = e[:, 0] * self.num_nodes + e[:, 1]
            if np.unique(keys).size != e.shape[0]:
                raise GraphValidationError("duplicate edges present")
        deg = np.asarray(self.degrees, dtype=np.int64)
        object.__setattr__(self, "degrees", deg)
        if deg.shape != (self.num_nodes,):
            raise GraphValidationError("degree sequence length != N")
        if int(deg.sum()) != 2 * self.num_edges:
            raise GraphValidationError("degree sum != 2E")
        if len(self.node_names) != self.num_nodes:
            raise GraphValidationError("node_names length != N")

    @classmethod
    def from_edges(cls, num_nodes: int, edges: Iterable[tuple[int, int]],
                   node_names: Sequence[str] | None = None) -> "Graph":
        pairs = np.asarray(sorted({(min(u, v), max(u, v)) for u, v in edges}),
                           dtype=np.int64).reshape(-1, 2)
        if np.any(pairs[:, 0] == pairs[:, 1]) if pairs.size else False:
            raise GraphValidationError("self-loop in edge iterable")
        deg = np.zeros(num_nodes, dtype=np.int64)
        if pairs.size:
            np.add.at(deg, pairs[:, 0], 1)
            np.add.at(deg, pairs[:, 1], 1)
        names = tuple(node_names) if node_names is not None else tuple(str(i) for i in range(num_nodes))
        return cls(num_nodes, pairs, deg, names)

    def name_index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.node_names)}

    def neighbors_csr(self) -> tuple[np.ndarray, np.ndarray]:
        """CSR adjacency (indptr, indices); built once and cached."""
        cached = self._adjacency.get("csr")
        if cached is None:
            n, e = self.num_nodes, self.edges
            indptr = np.zeros(n + 1, dtype=np.int64)
            np.add.at(indptr, e[:, 0] + 1, 1)
            np.add.at(indptr, e[:, 1] + 1, 1)
            np.cumsum(indptr, out=indptr)
            indices = np.empty(2 * self.num_edges, dtype=np.int64)
            cursor = indptr[:-1].copy()
            for u, v in e:
                indices[cursor[u]] = v
                cursor[u] += 1
                indices[cursor[v]] = u
                cursor[v] += 1
            cached = (indptr, indices)
            self._adjacency["csr"] = cached
        return cached


@dataclass(frozen=True)
class Partition:
    """Node-to-block assignment with contiguous block labels 0..B-1."""

    labels: np.ndarray
    num_blocks: int

    def __post_init__(self):
        lab = np.asarray(self.labels, dtype=np.int64)
        object.__setattr__(self, "labels", lab)
        if lab.ndim != 1 or lab.size < 1:
            raise GraphValidationError("partition labels must be a nonempty 1-d sequence")
        counts = np.bincount(lab, minlength=self.num_blocks) if lab.size else np.array([])
        if lab.min() < 0 or lab.max() >= self.num_blocks or np.any(counts == 0) \
                or counts.size != self.num_blocks:
            raise GraphValidationError("labels must cover 0..B-1 contiguously")

    @property
    def size(self) -> int:
        return int(self.labels.size)


def relabel_partition(raw_labels: Sequence) -> Partition:
    """Map arbitrary categorical tokens to contiguous block indices.

    Blocks are numbered in order of first appearance, so equal inputs always
    produce identical label arrays.
    """
    if len(raw_labels) < 1:
        raise GraphValidationError("cannot relabel an empty label sequence")
    mapping: dict = {}
    out = np.empty(len(raw_labels), dtype=np.int64)
    for i, tok in enumerate(raw_labels):
        idx = mapping.get(tok)
        if idx is None:
            idx = len(mapping)
            mapping[tok] = idx
        out[i] = idx
    return Partition(out, len(mapping))


@dataclass(frozen=True)
class BlockStats:
    """Sufficient statistics of a (graph, partition) pair.

    ``edge_counts`` is the symmetric B x B matrix with twice the internal
    edge count on the diagonal; ``block_degree_sums[r]`` equals its row sums;
    ``degree_histograms[r]`` maps node degree -> count within block r.
    """

    edge_counts: np.ndarray
    block_sizes: np.ndarray
    block_degree_sums: np.ndarray
    degree_histograms: tuple[dict, ...]
    e_in: int
    e_out: int

    @property
    def num_blocks(self) -> int:
        return int(self.block_sizes.size)

    def validate(self, graph: Graph) -> None:
        e = self.edge_counts
        if not np.array_equal(e, e.T):
            raise GraphValidationError("edge count matrix not symmetric")
        if np.any(np.diag(e) % 2 != 0):
            raise GraphValidationError("diagonal edge counts must be even")
        if int(e.sum()) != 2 * graph.num_edges:
            raise GraphValidationError("sum of edge counts != 2E")
        if int(self.block_sizes.sum()) != graph.num_nodes:
            raise GraphValidationError("block sizes do not sum to N")
        if not np.array_equal(self.block_degree_sums, e.sum(axis=1)):
            raise GraphValidationError("block degree sums inconsistent with matrix")
        if self.e_in + self.e_out != graph.num_edges:
            raise GraphValidationError("e_in + e_out != E")
        if 2 * self.e_in != int(np.trace(e)):
            raise GraphValidationError("2 e_in != trace of edge counts")
        for r, hist in enumerate(self.degree_histograms):
            if sum(hist.values()) != int(self.block_sizes[r]):
                raise GraphValidationError(f"degree histogram of block {r} misses nodes")
            if sum(k * c for k, c in hist.items()) != int(self.block_degree_sums[r]):
                raise GraphValidationError(f"degree histogram of block {r} misses degree mass")


def block_stats(graph: Graph, partition: Partition) -> BlockStats:
    """Count nodes and edges per block pair for the given partition."""
    if partition.size != graph.num_nodes:
        raise GraphValidationError(
            f"partition covers {partition.size} nodes, graph has {graph.num_nodes}")
    b = partition.labels
    n_blocks = partition.num_blocks
    e = np.zeros((n_blocks, n_blocks), dtype=np.int64)
    if graph.num_edges:
        bu = b[graph.edges[:, 0]]
        bv = b[graph.edges[:, 1]]
        np.add.at(e, (bu, bv), 1)
        np.add.at(e, (bv, bu), 1)
    sizes = np.bincount(b, minlength=n_blocks)
    hists: list[dict] = [dict() for _ in range(n_blocks)]
    for r, k in zip(b.tolist(), graph.degrees.tolist()):
        hists[r][k] = hists[r].get(k, 0) + 1
    e_in = int(np.trace(e)) // 2
    stats = BlockStats(
        edge_counts=e,
        block_sizes=sizes,
        block_degree_sums=e.sum(axis=1),
        degree_histograms=tuple(hists),
        e_in=e_in,
        e_out=graph.num_edges - e_in,
    )
    stats.validate(graph)
    return stats


def load_edge_list(source: IO[str] | str, strict: bool = False) -> Graph:
    """Parse a whitespace-separated edge list into a simple undirected graph.

    Lines starting with ``#`` (and blank lines) are ignored. External node
    tokens are assigned dense indices in first-appearance order. Self-loops
    are dropped and parallel edges collapsed, each with a counted warning;
    ``strict=True`` turns both into errors.
    """
    if isinstance(source, str):
        lines = source.splitlines()
    else:
        lines = source.read().splitlines()
    names: dict[str, int] = {}
    seen: set[tuple[int, int]] = set()
    self_loops = 0
    duplicates = 0
    got_line = False
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        got_line = True
        toks = line.split()
        if len(toks) != 2:
            raise GraphFormatError(
                f"line {lineno}: expected 2 node tokens, got {len(toks)}")
        uv = []
        for tok in toks:
            idx = names.get(tok)
            if idx is None:
                idx = len(names)
                names[tok] = idx
            uv.append(idx)
        u, v = uv
        if u == v:
            if strict:
                raise GraphFormatError(f"line {lineno}: self-loop on node {toks[0]!r}")
            self_loops += 1
            continue
        key = (min(u, v), max(u, v))
        if key in seen:
            if strict:
                raise GraphFormatError(f"line {lineno}: duplicate edge {toks[0]!r} -- {toks[1]!r}")
            duplicates += 1
            continue
        seen.add(key)
    if not got_line:
        raise GraphFormatError("edge list is empty")
    if self_loops:
        log.warning("dropped %d self-loop(s)", self_loops)
    if duplicates:
        log.warning("collapsed %d parallel edge(s)", duplicates)
    order = tuple(sorted(names, key=names.get))
    return Graph.from_edges(len(names), seen, order)


def load_metadata_csv(source: IO[str] | str) -> dict[str, str]:
    """Read a two-column ``node,label`` CSV (with header) into a dict."""
    if isinstance(source, str):
        rows = list(csv.reader(source.splitlines()))
    else:
        rows = list(csv.reader(source))
    if not rows:
        raise GraphFormatError("metadata CSV is empty")
    header = [c.strip().lower() for c in rows[0]]
    if len(header) < 2 or header[0] != "node" or header[1] != "label":
        raise GraphFormatError("metadata CSV must start with a 'node,label' header")
    table: dict[str, str] = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) < 2:
            raise GraphFormatError(f"line {lineno}: expected 'node,label'")
        node, label = row[0].strip(), row[1].strip()
        if node in table:
            raise GraphFormatError(f"line {lineno}: node {node!r} listed twice")
        table[node] = label
    if not table:
        raise GraphFormatError("metadata CSV has no data rows")
    return table


def align_metadata(graph: Graph, table: dict[str, str],
                   drop_missing: bool = False) -> tuple[Graph, Partition]:
    """Match a metadata table against a graph's node set.

    Every graph node must appear in ``table``; with ``drop_missing`` the
    graph is restricted to the induced subgraph on labeled nodes instead
    (logged). Labels for unknown nodes are always an error.
    """
    names = graph.name_index()
    unknown = [n for n in table if n not in names]
    if unknown:
        raise GraphFormatError(
            f"metadata labels {len(unknown)} node(s) absent from the graph "
            f"(first: {unknown[0]!r})")
    missing = [n for n in graph.node_names if n not in table]
    if missing and not drop_missing:
        raise GraphFormatError(
            f"{len(missing)} graph node(s) lack metadata (first: {missing[0]!r}); "
            "pass drop_missing to restrict to the labeled subgraph")
    if missing:
        log.warning("dropping %d unlabeled node(s); analysing the induced subgraph",
                    len(missing))
        keep = [i for i, n in enumerate(graph.node_names) if n in table]
        remap = {old: new for new, old in enumerate(keep)}
        keep_set = set(keep)
        edges = [(remap[u], remap[v]) for u, v in graph.edges.tolist()
                 if u in keep_set and v in keep_set]
        graph = Graph.from_edges(len(keep), edges,
                                 [graph.node_names[i] for i in keep])
    labels = [table[n] for n in graph.node_names]
    return graph, relabel_partition(labels)
