"""Independent exact-rational reference implementations used only by tests.

Every formula is evaluated with ``fractions.Fraction`` and exact integer
combinatorics, following the model joint distributions factor by factor,
with no code shared with the package's log-space implementation. The final
log is taken once, on the exact rational probability.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from itertools import combinations


def fact(n: int) -> int:
    return math.factorial(n)


def double_fact_even(x: int) -> int:
    assert x >= 0 and x % 2 == 0
    out = 1
    for v in range(x, 0, -2):
        out *= v
    return out


def binom(n: int, k: int) -> int:
    return math.comb(n, k)


def multiset_coeff(n: int, k: int) -> int:
    return math.comb(n + k - 1, k)


@lru_cache(maxsize=None)
def q_exact(n: int, m: int) -> int:
    """Partitions of n into at most m positive parts, by direct recursion."""
    if n == 0:
        return 1
    if m <= 0:
        return 0
    if m > n:
        m = n
    # largest-part split: either no part equals m, or remove one part of size m
    return q_exact(n, m - 1) + q_exact(n - m, m)


def q_brute(n: int, m: int) -> int:
    """Brute-force partition enumeration for cross-checking q_exact."""
    def count(remaining: int, max_part: int, parts_left: int) -> int:
        if remaining == 0:
            return 1
        if parts_left == 0:
            return 0
        total = 0
        for part in range(min(remaining, max_part), 0, -1):
            total += count(remaining - part, part, parts_left - 1)
        return total

    return count(n, n, m)


# ---------------------------------------------------------------------------
# graph-side counting, kept deliberately naive
# ---------------------------------------------------------------------------


def counts_from_edges(n_nodes: int, edges, labels) -> dict:
    """Plain-python sufficient statistics for the formulas below."""
    b = list(labels)
    n_blocks = max(b) + 1
    e = [[0] * n_blocks for _ in range(n_blocks)]
    degrees = [0] * n_nodes
    for u, v in edges:
        assert u != v
        degrees[u] += 1
        degrees[v] += 1
        e[b[u]][b[v]] += 1
        e[b[v]][b[u]] += 1
    sizes = [0] * n_blocks
    for lab in b:
        sizes[lab] += 1
    e_r = [sum(row) for row in e]
    hists = [{} for _ in range(n_blocks)]
    for node, lab in enumerate(b):
        k = degrees[node]
        hists[lab][k] = hists[lab].get(k, 0) + 1
    e_in = sum(e[r][r] for r in range(n_blocks)) // 2
    return {
        "B": n_blocks, "e": e, "n": sizes, "e_r": e_r, "k": degrees,
        "eta": hists, "e_in": e_in, "e_out": len(list(edges)) - e_in,
        "E": len(list(edges)), "N": n_nodes,
    }


def prob_likelihood_ndc(c) -> Fraction:
    num = Fraction(1)
    for r in range(c["B"]):
        for s in range(r + 1, c["B"]):
            num *= fact(c["e"][r][s])
        num *= double_fact_even(c["e"][r][r])
    den = Fraction(1)
    for r in range(c["B"]):
        den *= Fraction(c["n"][r]) ** c["e_r"][r]
    return num / den


def prob_likelihood_dc(c) -> Fraction:
    num = Fraction(1)
    for r in range(c["B"]):
        for s in range(r + 1, c["B"]):
            num *= fact(c["e"][r][s])
        num *= double_fact_even(c["e"][r][r])
    for k in c["k"]:
        num *= fact(k)
    den = Fraction(1)
    for r in range(c["B"]):
        den *= fact(c["e_r"][r])
    return num / den


def prob_degree_sequence(c) -> Fraction:
    out = Fraction(1)
    for r in range(c["B"]):
        inner = Fraction(1)
        for count in c["eta"][r].values():
            inner *= fact(count)
        out *= Fraction(inner, fact(c["n"][r]))
        out *= Fraction(1, q_exact(c["e_r"][r], c["n"][r]))
    return out


def prob_edge_matrix_flat(c) -> Fraction:
    b = c["B"]
    return Fraction(1, multiset_coeff(b * (b + 1) // 2, c["E"]))


def prob_edge_matrix_pp_uniform(c) -> Fraction:
    b, e_in, e_out = c["B"], c["e_in"], c["e_out"]
    num = Fraction(fact(e_in) * fact(e_out))
    den = Fraction(b) ** e_in
    for r in range(b):
        den *= fact(c["e"][r][r] // 2)
    den *= Fraction(binom(b, 2)) ** e_out if e_out else 1
    for r in range(b):
        for s in range(r + 1, b):
            den *= fact(c["e"][r][s])
    out = num / den
    if b > 1:
        out *= Fraction(1, c["E"] + 1)
    return out


def prob_edge_matrix_pp_nonuniform(c) -> Fraction:
    b, e_in, e_out = c["B"], c["e_in"], c["e_out"]
    num = Fraction(fact(e_out))
    den = Fraction(binom(b, 2)) ** e_out if e_out else Fraction(1)
    for r in range(b):
        for s in range(r + 1, b):
            den *= fact(c["e"][r][s])
    out = num / den
    out *= Fraction(1, binom(b + e_in - 1, e_in))
    if b > 1:
        out *= Fraction(1, c["E"] + 1)
    return out


def prob_partition(c) -> Fraction:
    num = Fraction(1)
    for size in c["n"]:
        num *= fact(size)
    out = Fraction(num, fact(c["N"]))
    out *= Fraction(1, binom(c["N"] - 1, c["B"] - 1))
    out *= Fraction(1, c["N"])
    return out


def oracle_sigma(n_nodes: int, edges, labels, variant: str) -> float:
    """Exact-rational description length in nats for one variant tag."""
    edges = list(edges)
    c = counts_from_edges(n_nodes, edges, labels)
    if variant == "ndc":
        p = prob_likelihood_ndc(c) * prob_edge_matrix_flat(c) * prob_partition(c)
    elif variant == "dc":
        p = (prob_likelihood_dc(c) * prob_degree_sequence(c)
             * prob_edge_matrix_flat(c) * prob_partition(c))
    elif variant == "pp-uniform":
        p = (prob_likelihood_dc(c) * prob_degree_sequence(c)
             * prob_edge_matrix_pp_uniform(c) * prob_partition(c))
    elif variant == "pp-nonuniform":
        p = (prob_likelihood_dc(c) * prob_degree_sequence(c)
             * prob_edge_matrix_pp_nonuniform(c) * prob_partition(c))
    else:
        raise ValueError(variant)
    return -(math.log(p.numerator) - math.log(p.denominator))


# ---------------------------------------------------------------------------
# exhaustive partition enumeration (restricted growth strings)
# ---------------------------------------------------------------------------


def set_partitions(n: int, max_blocks: int | None = None):
    """All partitions of n items as canonical label tuples."""
    labels = [0] * n

    def rec(pos: int, used: int):
        if pos == n:
            yield tuple(labels)
            return
        limit = used + 1 if (max_blocks is None or used < max_blocks) else used
        for lab in range(limit):
            labels[pos] = lab
            yield from rec(pos + 1, max(used, lab + 1))

    yield from rec(0, 0)


def all_graphs_on(n: int):
    """Every labeled simple graph on n nodes, as edge tuples."""
    pairs = list(combinations(range(n), 2))
    for mask in range(1 << len(pairs)):
        yield [pairs[i] for i in range(len(pairs)) if mask >> i & 1]
