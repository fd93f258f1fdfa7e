"""MDL-minimizing partition search: agglomerative initialization refined by
merge-flip MCMC, with exact incremental description-length deltas.

The search is nonparametric (the number of blocks is free). A
:class:`PartitionState` tracks the block statistics and the description
length incrementally; every move's delta matches a from-scratch
recomputation, which the state can be resynced against at any time.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .combinatorics import QTable, default_qtable, log_binomial, log_factorial_arr, log_multiset
from .dl import LN2, Variant, dl
from .graph import Graph, Partition

_TIE_EPS = 1e-10
_SEED_MASK = (1 << 64) - 1

# rng stream tags so that restarts, sweeps and samplers never share a stream
_STREAM_RESTART = 17
_STREAM_SAMPLE = 23


@dataclass(frozen=True)
class BetaSchedule:
    """Two-phase ramp: unit-temperature exploration, then zero-temperature greed."""

    explore_fraction: float = 0.5

    def beta_for_sweep(self, sweep: int, total: int) -> float:
        return 1.0 if sweep < int(total * self.explore_fraction) else math.inf


@dataclass(frozen=True)
class AgglomerationLadder:
    """Geometric block-count ladder descriptor for the initial merge phase."""

    ratio: float = 2.0
    merge_candidates: int = 10
    level_sweeps: int = 2
    max_initial_blocks: int = 2048

    def targets(self, start: int) -> list[int]:
        out = []
        b = start
        while b > 1:
            b = max(1, int(b / self.ratio))
            out.append(b)
        return out or [1]


@dataclass(frozen=True)
class InferenceConfig:
    seed: int = 0
    sweeps: int = 1000
    restarts: int = 5
    proposal_epsilon: float = 1.0
    beta_schedule: BetaSchedule = field(default_factory=BetaSchedule)
    agglomeration_levels: AgglomerationLadder = field(default_factory=AgglomerationLadder)
    merge_prob: float = 0.1
    split_prob: float = 0.1
    resync_interval: int = 100

    def __post_init__(self):
        if self.sweeps < 1 or self.restarts < 1 or self.proposal_epsilon <= 0:
            raise ValueError("need sweeps >= 1, restarts >= 1, proposal_epsilon > 0")


@dataclass(frozen=True)
class MoveNode:
    """Reassign one node to a (possibly fresh) block slot."""

    node: int
    target: int


@dataclass(frozen=True)
class MoveMerge:
    """Fold block ``source`` into block ``target``."""

    source: int
    target: int


@dataclass
class InferenceResult:
    best_partition: Partition
    sigma_opt: float
    trace: np.ndarray
    restart_sigmas: list[float]

    def to_json_dict(self, graph: Graph, include_trace: bool = False) -> dict:
        out = {
            "sigma_opt_nats": self.sigma_opt,
            "num_blocks": self.best_partition.num_blocks,
            "partition": {name: int(lab) for name, lab in
                          zip(graph.node_names, self.best_partition.labels.tolist())},
            "restart_sigmas": list(self.restart_sigmas),
        }
        if include_trace:
            out["trace"] = self.trace.tolist()
        return out


class PartitionState:
    """Mutable (graph, partition) state with incremental description length.

    Block slots are array indices; empty slots are recycled through a free
    list, so labels are only made contiguous when exported. One state is
    single-threaded; concurrent searches use independent copies.
    """

    def __init__(self, graph: Graph, variant: Variant,
                 qtable: QTable | None = None,
                 labels: np.ndarray | None = None,
                 epsilon: float = 1.0):
        self.graph = graph
        self.variant = variant
        self.qt = qtable or default_qtable()
        self.epsilon = float(epsilon)
        self.N = graph.num_nodes
        self.E = graph.num_edges
        self.k = graph.degrees
        self.indptr, self.indices = graph.neighbors_csr()

        if labels is None:
            labels = np.arange(self.N, dtype=np.int64)
        else:
            labels = np.asarray(labels, dtype=np.int64).copy()
        n_blocks = int(labels.max()) + 1
        cap = max(n_blocks + 8, min(self.N, max(2 * n_blocks, 64)))
        self.cap = cap
        self.b = labels
        self.n = np.zeros(cap, dtype=np.int64)
        np.add.at(self.n, labels, 1)
        if np.any(self.n[:n_blocks] == 0):
            raise ValueError("initial labels must be contiguous")
        self.e = np.zeros((cap, cap), dtype=np.int64)
        if self.E:
            bu = labels[graph.edges[:, 0]]
            bv = labels[graph.edges[:, 1]]
            np.add.at(self.e, (bu, bv), 1)
            np.add.at(self.e, (bv, bu), 1)
        self.er = self.e.sum(axis=1)
        self.eta: list[dict] = [dict() for _ in range(cap)]
        for node, r in enumerate(labels.tolist()):
            deg = int(self.k[node])
            self.eta[r][deg] = self.eta[r].get(deg, 0) + 1
        self.e_in = int(np.trace(self.e)) // 2
        self.B = n_blocks
        self.free = list(range(cap - 1, n_blocks - 1, -1))
        self._occ_cache: np.ndarray | None = None

        # lookup tables; indices stay within max(2E, N) for counts and sizes
        top = max(2 * self.E, self.N, 4) + 2
        self.LF = log_factorial_arr(np.arange(top))
        self.LOGN = np.log(np.maximum(np.arange(max(self.N, self.E, 2) + 2), 1))
        self._sum_lf_deg = float(log_factorial_arr(self.k).sum())
        self.hist_lf = np.zeros(cap)
        for r in range(n_blocks):
            counts = np.fromiter(self.eta[r].values(), dtype=np.int64, count=len(self.eta[r]))
            self.hist_lf[r] = float(self.LF[counts].sum())
        self._offdiag = not variant.is_pp
        self.sigma = self.sigma_full()

    # -- export / exact recompute -------------------------------------------

    def occupied_array(self) -> np.ndarray:
        if self._occ_cache is None:
            self._occ_cache = np.flatnonzero(self.n > 0)
        return self._occ_cache

    def to_partition(self) -> Partition:
        return canonical_partition(self.b)

    def sigma_full(self) -> float:
        """Description length recomputed from scratch through the public formulas."""
        return dl(self.graph, self.to_partition(), self.variant, self.qt).total

    def resync(self) -> float:
        """Replace the tracked description length by the exact value; returns |drift|."""
        exact = self.sigma_full()
        drift = abs(exact - self.sigma)
        self.sigma = exact
        return drift

    # -- term helpers ---------------------------------------------------------

    def _diag_term(self, x: int) -> float:
        half = x >> 1
        t = -(half * LN2 + self.LF[half])
        if self.variant is Variant.PP_UNIFORM:
            t += self.LF[half]
        return float(t)

    def _block_term(self, n_r: int, e_r: int, hist_lf_r: float) -> float:
        t = -float(self.LF[n_r])
        if self.variant is Variant.NDC:
            t += e_r * float(self.LOGN[n_r])
        else:
            t += float(self.LF[e_r]) + float(self.LF[n_r]) - hist_lf_r \
                + self.qt.log_q(e_r, n_r)
        return t

    def _global_term(self, n_blocks: int, e_in: int) -> float:
        t = float(self.LF[self.N]) + math.log(self.N) \
            + log_binomial(self.N - 1, n_blocks - 1)
        if self.variant is not Variant.NDC:
            t -= self._sum_lf_deg
        if not self.variant.is_pp:
            return t + log_multiset(n_blocks * (n_blocks + 1) // 2, self.E)
        e_out = self.E - e_in
        if n_blocks > 1:
            t += math.log(self.E + 1.0)
        if e_out:
            t += e_out * log_binomial(n_blocks, 2) - float(self.LF[e_out])
        if self.variant is Variant.PP_UNIFORM:
            t += e_in * math.log(n_blocks) - float(self.LF[e_in])
        else:
            t += log_binomial(n_blocks + e_in - 1, e_in)
        return t

    # -- flips ----------------------------------------------------------------

    def neighbor_counts(self, i: int) -> dict:
        lo, hi = self.indptr[i], self.indptr[i + 1]
        counts: dict = {}
        for t in self.b[self.indices[lo:hi]].tolist():
            counts[t] = counts.get(t, 0) + 1
        return counts

    def fresh_slot(self) -> int | None:
        return self.free[-1] if self.free else None

    def flip_delta(self, i: int, s: int, nc: dict | None = None) -> tuple[float, dict]:
        """Description-length change of moving node ``i`` to slot ``s``."""
        r = int(self.b[i])
        if nc is None:
            nc = self.neighbor_counts(i)
        if s == r:
            return 0.0, nc
        n_r = int(self.n[r])
        n_s = int(self.n[s])
        if n_r == 1 and n_s == 0:
            return 0.0, nc  # pure relabel
        k_i = int(self.k[i])
        c_r = nc.get(r, 0)
        c_s = nc.get(s, 0)
        e_rr = int(self.e[r, r])
        e_ss = int(self.e[s, s])
        e_rs = int(self.e[r, s])
        delta = self._diag_term(e_rr - 2 * c_r) - self._diag_term(e_rr)
        delta += self._diag_term(e_ss + 2 * c_s) - self._diag_term(e_ss)
        if self._offdiag:
            lf = self.LF
            delta -= float(lf[e_rs + c_r - c_s]) - float(lf[e_rs])
            for t, c in nc.items():
                if t == r or t == s:
                    continue
                e_rt = int(self.e[r, t])
                e_st = int(self.e[s, t])
                delta -= float(lf[e_rt - c]) - float(lf[e_rt])
                delta -= float(lf[e_st + c]) - float(lf[e_st])
        er_r = int(self.er[r])
        er_s = int(self.er[s])
        cnt_r = self.eta[r][k_i]
        hist_r_new = self.hist_lf[r] - float(self.LOGN[cnt_r])
        old = self._block_term(n_r, er_r, self.hist_lf[r])
        if n_r > 1:
            delta += self._block_term(n_r - 1, er_r - k_i, hist_r_new) - old
        else:
            delta -= old
        cnt_s = self.eta[s].get(k_i, 0) + 1
        hist_s_new = self.hist_lf[s] + float(self.LOGN[cnt_s])
        new_s = self._block_term(n_s + 1, er_s + k_i, hist_s_new)
        if n_s > 0:
            delta += new_s - self._block_term(n_s, er_s, self.hist_lf[s])
        else:
            delta += new_s
        d_blocks = (1 if n_s == 0 else 0) - (1 if n_r == 1 else 0)
        e_in_new = self.e_in - c_r + c_s
        if d_blocks != 0 or (self.variant.is_pp and e_in_new != self.e_in):
            delta += self._global_term(self.B + d_blocks, e_in_new) \
                - self._global_term(self.B, self.e_in)
        return float(delta), nc

    def apply_flip(self, i: int, s: int, nc: dict, delta: float) -> None:
        r = int(self.b[i])
        if s == r:
            return
        n_r = int(self.n[r])
        if n_r == 1 and int(self.n[s]) == 0:
            return
        k_i = int(self.k[i])
        e = self.e
        for t, c in nc.items():
            if t == r:
                e[r, r] -= 2 * c
                e[r, s] += c
                e[s, r] += c
            elif t == s:
                e[r, s] -= c
                e[s, r] -= c
                e[s, s] += 2 * c
            else:
                e[r, t] -= c
                e[t, r] -= c
                e[s, t] += c
                e[t, s] += c
        self.er[r] -= k_i
        self.er[s] += k_i
        cnt = self.eta[r][k_i]
        self.hist_lf[r] -= float(self.LOGN[cnt])
        if cnt > 1:
            self.eta[r][k_i] = cnt - 1
        else:
            del self.eta[r][k_i]
        cnt_s = self.eta[s].get(k_i, 0) + 1
        self.eta[s][k_i] = cnt_s
        self.hist_lf[s] += float(self.LOGN[cnt_s])
        self.e_in += nc.get(s, 0) - nc.get(r, 0)
        if int(self.n[s]) == 0:
            if not self.free or self.free[-1] != s:
                raise RuntimeError("moves into empty slots must use fresh_slot()")
            self.free.pop()
            self.B += 1
            self._occ_cache = None
        self.n[r] -= 1
        self.n[s] += 1
        if int(self.n[r]) == 0:
            self.free.append(r)
            self.B -= 1
            self.hist_lf[r] = 0.0
            self._occ_cache = None
        self.b[i] = s
        self.sigma += delta

    # -- merges ---------------------------------------------------------------

    def merge_delta(self, r: int, s: int) -> float:
        """Description-length change of folding block ``r`` into block ``s``."""
        if r == s or self.n[r] == 0 or self.n[s] == 0:
            raise ValueError("merge needs two distinct occupied blocks")
        occ = self.occupied_array()
        mask = (occ != r) & (occ != s)
        others = occ[mask]
        row_r = self.e[r, others]
        row_s = self.e[s, others]
        lf = self.LF
        delta = 0.0
        if self._offdiag:
            delta -= float(lf[row_r + row_s].sum()) \
                - float(lf[row_r].sum()) - float(lf[row_s].sum())
            delta += float(lf[self.e[r, s]])
        e_rr, e_ss, e_rs = int(self.e[r, r]), int(self.e[s, s]), int(self.e[r, s])
        delta += self._diag_term(e_rr + e_ss + 2 * e_rs) \
            - self._diag_term(e_rr) - self._diag_term(e_ss)
        merged_hist = self._merged_hist_lf(r, s)
        delta += self._block_term(int(self.n[r] + self.n[s]),
                                  int(self.er[r] + self.er[s]), merged_hist)
        delta -= self._block_term(int(self.n[r]), int(self.er[r]), self.hist_lf[r])
        delta -= self._block_term(int(self.n[s]), int(self.er[s]), self.hist_lf[s])
        delta += self._global_term(self.B - 1, self.e_in + e_rs) \
            - self._global_term(self.B, self.e_in)
        return float(delta)

    def _merged_hist_lf(self, r: int, s: int) -> float:
        small, big = self.eta[r], self.eta[s]
        if len(small) > len(big):
            small, big = big, small
        extra = 0.0
        for deg, c1 in small.items():
            c2 = big.get(deg)
            if c2:
                extra += float(self.LF[c1 + c2] - self.LF[c1] - self.LF[c2])
        return float(self.hist_lf[r] + self.hist_lf[s] + extra)

    def apply_merge(self, r: int, s: int, delta: float) -> None:
        e = self.e
        e_rs = int(e[r, s])
        merged_hist = self._merged_hist_lf(r, s)
        new_diag = int(e[r, r] + e[s, s] + 2 * e_rs)
        row = e[r, :] + e[s, :]
        row[r] = 0
        e[s, :] = row
        e[:, s] = row
        e[s, s] = new_diag
        e[r, :] = 0
        e[:, r] = 0
        self.er[s] += self.er[r]
        self.er[r] = 0
        big = self.eta[s]
        for deg, c in self.eta[r].items():
            big[deg] = big.get(deg, 0) + c
        self.eta[r] = {}
        self.hist_lf[s] = merged_hist
        self.hist_lf[r] = 0.0
        self.n[s] += self.n[r]
        self.n[r] = 0
        self.e_in += e_rs
        self.b[self.b == r] = s
        self.free.append(r)
        self.B -= 1
        self._occ_cache = None
        self.sigma += delta

    # -- proposals --------------------------------------------------------------

    def _num_targets(self) -> int:
        return self.B + (1 if self.free else 0)

    def propose_target(self, i: int, rng: np.random.Generator) -> tuple[int, dict]:
        nc = self.neighbor_counts(i)
        n_t = self._num_targets()
        occ = self.occupied_array()
        if not nc:
            idx = int(rng.integers(n_t))
            target = self.free[-1] if idx == self.B else int(occ[idx])
            return target, nc
        lo = self.indptr[i]
        j = int(self.indices[lo + int(rng.integers(self.indptr[i + 1] - lo))])
        t = int(self.b[j])
        e_t = int(self.er[t])
        w = self.epsilon * n_t / (e_t + self.epsilon * n_t)
        if rng.random() < w:
            idx = int(rng.integers(n_t))
            target = self.free[-1] if idx == self.B else int(occ[idx])
        else:
            weights = self.e[t, occ]
            cum = np.cumsum(weights)
            x = int(rng.integers(e_t))
            target = int(occ[int(np.searchsorted(cum, x, side="right"))])
        return target, nc

    def proposal_prob(self, i: int, target: int, nc: dict) -> float:
        """Probability that :meth:`propose_target` suggests ``target`` for ``i``."""
        n_t = self._num_targets()
        if not nc:
            return 1.0 / n_t
        k_i = int(self.k[i])
        occupied = int(self.n[target]) > 0
        p = 0.0
        for t, c in nc.items():
            e_t = int(self.er[t])
            w = self.epsilon * n_t / (e_t + self.epsilon * n_t)
            p_t = w / n_t
            if occupied:
                p_t += (1.0 - w) * int(self.e[t, target]) / e_t
            p += c * p_t
        return p / k_i


def canonical_partition(labels: np.ndarray) -> Partition:
    """Relabel arbitrary slot ids to contiguous blocks in first-appearance order."""
    mapping: dict = {}
    out = np.empty(labels.size, dtype=np.int64)
    for i, lab in enumerate(labels.tolist()):
        idx = mapping.get(lab)
        if idx is None:
            idx = len(mapping)
            mapping[lab] = idx
        out[i] = idx
    return Partition(out, len(mapping))


def delta_dl(state: PartitionState, move: MoveNode | MoveMerge) -> float:
    """Exact description-length change of ``move`` without mutating ``state``."""
    if isinstance(move, MoveNode):
        return state.flip_delta(move.node, move.target)[0]
    if isinstance(move, MoveMerge):
        return state.merge_delta(move.source, move.target)
    raise TypeError(f"unsupported move {move!r}")


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------


def _propose_and_decide_flip(state: PartitionState, i: int,
                             rng: np.random.Generator, beta: float) -> int:
    target, nc = state.propose_target(i, rng)
    r = int(state.b[i])
    if target == r:
        return 0
    if int(state.n[r]) == 1 and int(state.n[target]) == 0:
        return 0
    delta, nc = state.flip_delta(i, target, nc)
    if math.isinf(beta):
        if delta < -_TIE_EPS or (abs(delta) <= _TIE_EPS and rng.random() < 0.5):
            state.apply_flip(i, target, nc, delta)
            return 1
        return 0
    q_fwd = state.proposal_prob(i, target, nc)
    state.apply_flip(i, target, nc, delta)
    q_rev = state.proposal_prob(i, r, nc)
    log_alpha = -beta * delta + math.log(q_rev) - math.log(q_fwd)
    if log_alpha >= 0 or math.log(rng.random()) < log_alpha:
        return 1
    back, _ = state.flip_delta(i, r, nc)
    state.apply_flip(i, r, nc, back)
    return 0


def _attempt_merge(state: PartitionState, rng: np.random.Generator) -> int:
    if state.B < 2:
        return 0
    occ = state.occupied_array()
    r = int(occ[int(rng.integers(occ.size))])
    members = np.flatnonzero(state.b == r)
    s = None
    node = int(members[int(rng.integers(members.size))])
    lo, hi = state.indptr[node], state.indptr[node + 1]
    if hi > lo:
        j = int(state.indices[lo + int(rng.integers(hi - lo))])
        t = int(state.b[j])
        if t != r:
            s = t
    if s is None:
        others = occ[occ != r]
        s = int(others[int(rng.integers(others.size))])
    delta = state.merge_delta(r, s)
    if delta < -_TIE_EPS or (abs(delta) <= _TIE_EPS and rng.random() < 0.5):
        state.apply_merge(r, s, delta)
        return 1
    return 0


def _attempt_split(state: PartitionState, rng: np.random.Generator) -> int:
    fresh = state.fresh_slot()
    if fresh is None:
        return 0
    occ = state.occupied_array()
    sizes = state.n[occ]
    cands = occ[sizes >= 2]
    if cands.size == 0:
        return 0
    t = int(cands[int(rng.integers(cands.size))])
    members = np.flatnonzero(state.b == t)
    sel = members[rng.random(members.size) < 0.5]
    if sel.size == 0 or sel.size == members.size:
        return 0
    sigma0 = state.sigma
    for i in sel.tolist():
        delta, nc = state.flip_delta(i, fresh)
        state.apply_flip(i, fresh, nc, delta)
    for _ in range(2):  # local polish between the two halves
        for i in rng.permutation(members).tolist():
            cur = int(state.b[i])
            other = fresh if cur == t else t
            if int(state.n[cur]) == 1:
                continue
            delta, nc = state.flip_delta(i, other)
            if delta < -_TIE_EPS:
                state.apply_flip(i, other, nc, delta)
    if state.sigma < sigma0 - _TIE_EPS:
        return 1
    if int(state.n[fresh]) > 0:
        back = state.merge_delta(fresh, t)
        state.apply_merge(fresh, t, back)
    return 0


def mcmc_sweep(state: PartitionState, rng: np.random.Generator,
               beta: float = 1.0, merge_prob: float = 0.0,
               split_prob: float = 0.0) -> int:
    """One proposal per node (random order), plus optional merge/split attempts.

    Returns the number of accepted moves. At finite beta the flip kernel is
    Metropolis-Hastings-corrected for the edge-weighted proposal; merges and
    splits are greedy-only moves intended for the zero-temperature phase.
    """
    accepted = 0
    for i in rng.permutation(state.N).tolist():
        accepted += _propose_and_decide_flip(state, i, rng, beta)
    if merge_prob and rng.random() < merge_prob:
        accepted += _attempt_merge(state, rng)
    if split_prob and rng.random() < split_prob:
        accepted += _attempt_split(state, rng)
    return accepted


# ---------------------------------------------------------------------------
# initialization and search drivers
# ---------------------------------------------------------------------------


def _merge_candidates(state: PartitionState, rng: np.random.Generator,
                      count: int) -> list[tuple[int, int]]:
    pairs: set[tuple[int, int]] = set()
    edges = state.graph.edges
    occ = state.occupied_array()
    for _ in range(count):
        if edges.shape[0] and rng.random() < 0.9:
            u, v = edges[int(rng.integers(edges.shape[0]))]
            a, b = int(state.b[u]), int(state.b[v])
        else:
            a, b = occ[rng.integers(occ.size, size=2)]
            a, b = int(a), int(b)
        if a != b:
            pairs.add((min(a, b), max(a, b)))
    if not pairs and occ.size >= 2:
        a, b = occ[:2]
        pairs.add((int(a), int(b)))
    return list(pairs)


def agglomerative_init(graph: Graph, variant: Variant, cfg: InferenceConfig,
                       rng: np.random.Generator,
                       qtable: QTable | None = None) -> np.ndarray:
    """Greedy merge ladder from (near-)singleton blocks down to one block.

    Returns the label array of the best description length seen on the ladder.
    """
    ladder = cfg.agglomeration_levels
    if graph.num_nodes > ladder.max_initial_blocks:
        labels = rng.permutation(graph.num_nodes) % ladder.max_initial_blocks
        labels = canonical_partition(labels).labels
    else:
        labels = np.arange(graph.num_nodes, dtype=np.int64)
    state = PartitionState(graph, variant, qtable, labels, cfg.proposal_epsilon)
    best_sigma = state.sigma
    best_labels = state.b.copy()
    for target in ladder.targets(state.B):
        while state.B > target:
            cands = _merge_candidates(state, rng, ladder.merge_candidates)
            if not cands:
                break
            deltas = [state.merge_delta(a, b) for a, b in cands]
            idx = int(np.argmin(deltas))
            a, b = cands[idx]
            state.apply_merge(a, b, deltas[idx])
        for _ in range(ladder.level_sweeps):
            mcmc_sweep(state, rng, beta=math.inf)
        state.resync()
        if state.sigma < best_sigma - 1e-12:
            best_sigma = state.sigma
            best_labels = state.b.copy()
    return canonical_partition(best_labels).labels


def hill_climb(state: PartitionState, max_passes: int = 100) -> None:
    """Exhaust strictly improving single-node flips and block merges."""
    for _ in range(max_passes):
        improved = False
        for i in range(state.N):
            nc = state.neighbor_counts(i)
            cur = int(state.b[i])
            best_delta, best_target = -_TIE_EPS, None
            targets = state.occupied_array().tolist()
            fresh = state.fresh_slot()
            if fresh is not None and int(state.n[cur]) > 1:
                targets.append(fresh)
            for s in targets:
                if s == cur:
                    continue
                delta, nc = state.flip_delta(i, s, nc)
                if delta < best_delta:
                    best_delta, best_target = delta, s
            if best_target is not None:
                state.apply_flip(i, best_target, nc, best_delta)
                improved = True
        while state.B >= 2:
            occ = state.occupied_array().tolist()
            best_delta, best_pair = -_TIE_EPS, None
            for ai in range(len(occ)):
                for bi in range(ai + 1, len(occ)):
                    delta = state.merge_delta(occ[ai], occ[bi])
                    if delta < best_delta:
                        best_delta, best_pair = delta, (occ[ai], occ[bi])
            if best_pair is None:
                break
            state.apply_merge(best_pair[0], best_pair[1], best_delta)
            improved = True
        if not improved:
            return


def _restart_rng(seed: int, restart: int) -> np.random.Generator:
    return np.random.default_rng([seed & _SEED_MASK, _STREAM_RESTART, restart])


def infer(graph: Graph, variant: Variant, cfg: InferenceConfig | None = None,
          qtable: QTable | None = None) -> InferenceResult:
    """Best partition found across seeded restarts of the search schedule."""
    cfg = cfg or InferenceConfig()
    qt = qtable or default_qtable()
    best_labels: np.ndarray | None = None
    best_sigma = math.inf
    best_trace: list[float] = []
    restart_sigmas: list[float] = []
    for restart in range(cfg.restarts):
        rng = _restart_rng(cfg.seed, restart)
        labels = agglomerative_init(graph, variant, cfg, rng, qt)
        state = PartitionState(graph, variant, qt, labels, cfg.proposal_epsilon)
        r_best_sigma = state.sigma
        r_best_labels = state.b.copy()
        trace: list[float] = []
        for sweep in range(cfg.sweeps):
            beta = cfg.beta_schedule.beta_for_sweep(sweep, cfg.sweeps)
            greedy = math.isinf(beta)
            mcmc_sweep(state, rng, beta,
                       merge_prob=cfg.merge_prob if greedy else 0.0,
                       split_prob=cfg.split_prob if greedy else 0.0)
            if (sweep + 1) % cfg.resync_interval == 0:
                state.resync()
            if state.sigma < r_best_sigma - 1e-12:
                r_best_sigma = state.sigma
                r_best_labels = state.b.copy()
            trace.append(r_best_sigma)
        hill_climb(state)
        state.resync()
        if state.sigma < r_best_sigma:
            r_best_sigma = state.sigma
            r_best_labels = state.b.copy()
        exact = dl(graph, canonical_partition(r_best_labels), variant, qt).total
        trace.append(exact)
        restart_sigmas.append(exact)
        if exact < best_sigma:
            best_sigma = exact
            best_labels = r_best_labels
            best_trace = trace
    partition = canonical_partition(best_labels)
    sigma_opt = dl(graph, partition, variant, qt).total
    trace_arr = np.maximum(np.minimum.accumulate(np.asarray(best_trace)), sigma_opt)
    return InferenceResult(best_partition=partition, sigma_opt=sigma_opt,
                           trace=trace_arr, restart_sigmas=restart_sigmas)


def posterior_sample(graph: Graph, variant: Variant,
                     cfg: InferenceConfig | None = None,
                     n_samples: int = 100, thin: int = 5, burn_in: int = 20,
                     qtable: QTable | None = None) -> tuple[list[Partition], list[float]]:
    """Unit-temperature samples of the partition posterior across restart chains.

    Chains start from independent agglomerative initializations; every
    ``thin``-th sweep after ``burn_in`` contributes one sample.
    """
    cfg = cfg or InferenceConfig()
    qt = qtable or default_qtable()
    per_chain = max(1, n_samples // cfg.restarts)
    partitions: list[Partition] = []
    sigmas: list[float] = []
    for restart in range(cfg.restarts):
        rng = np.random.default_rng([cfg.seed & _SEED_MASK, _STREAM_SAMPLE, restart])
        labels = agglomerative_init(graph, variant, cfg, rng, qt)
        state = PartitionState(graph, variant, qt, labels, cfg.proposal_epsilon)
        for _ in range(burn_in):
            mcmc_sweep(state, rng, beta=1.0)
        taken = 0
        while taken < per_chain:
            for _ in range(thin):
                mcmc_sweep(state, rng, beta=1.0)
            state.resync()
            partitions.append(state.to_partition())
            sigmas.append(state.sigma)
            taken += 1
    return partitions, sigmas
