"""Shared fixtures-in-spirit: named small graphs and brute-force oracles.

Oracles here are deliberately independent of the package's counting
paths: permutations for cycles, full subset enumeration for cut norms,
tuple scans for equation solutions.
"""

from __future__ import annotations

import itertools

import numpy as np

from c5kit.core import Graph, Kernel, WeightedVertexSet


def complete(n: int) -> Graph:
    return Graph.from_edges(n, itertools.combinations(range(n), 2))


def cycle_graph(k: int) -> Graph:
    return Graph.from_edges(k, [(i, (i + 1) % k) for i in range(k)])


def petersen() -> Graph:
    edges = (
        [(i, (i + 1) % 5) for i in range(5)]
        + [(i, i + 5) for i in range(5)]
        + [(5 + i, 5 + ((i + 2) % 5)) for i in range(5)]
    )
    return Graph.from_edges(10, edges)


def house_graph() -> Graph:
    # 4-cycle 0-1-2-3 plus apex 4 over the edge (2, 3)
    return Graph.from_edges(5, [(0, 1), (1, 2), (2, 3), (0, 3), (2, 4), (3, 4)])


def random_graph(rng: np.random.Generator, n: int, p: float) -> Graph:
    edges = [e for e in itertools.combinations(range(n), 2) if rng.random() < p]
    return Graph.from_edges(n, edges)


def brute_count_cycles(graph: Graph, k: int) -> int:
    """Ordered-tuple enumeration with canonical start and direction."""
    count = 0
    for vs in itertools.permutations(range(graph.n), k):
        if vs[0] != min(vs) or vs[1] > vs[-1]:
            continue
        if all(graph.has_edge(vs[i], vs[(i + 1) % k]) for i in range(k)):
            count += 1
    return count


def brute_closed_walks(graph: Graph, k: int) -> int:
    count = 0
    for vs in itertools.product(range(graph.n), repeat=k):
        if all(graph.has_edge(vs[i], vs[(i + 1) % k]) for i in range(k)):
            count += 1
    return count


def brute_degenerate_walks(graph: Graph, k: int) -> int:
    count = 0
    for vs in itertools.product(range(graph.n), repeat=k):
        if len(set(vs)) == k:
            continue
        if all(graph.has_edge(vs[i], vs[(i + 1) % k]) for i in range(k)):
            count += 1
    return count


def brute_cut_norm(values, lw, rw) -> float:
    """Max over all subset pairs, both sides enumerated."""
    values = np.asarray(values, dtype=float)
    n1, n2 = values.shape
    weighted = np.asarray(lw)[:, None] * values * np.asarray(rw)[None, :]
    best = 0.0
    for amask in range(1 << n1):
        rows = [i for i in range(n1) if (amask >> i) & 1]
        if not rows:
            continue
        row_sum = weighted[rows].sum(axis=0)
        for bmask in range(1 << n2):
            cols = [j for j in range(n2) if (bmask >> j) & 1]
            best = max(best, abs(float(row_sum[cols].sum())))
    return best


def random_kernel(rng: np.random.Generator, n: int, scale: float = 1.0) -> Kernel:
    vals = rng.random((n, n)) * scale
    vals = np.round((vals + vals.T) / 2, 9)
    return Kernel(WeightedVertexSet.uniform(n), vals)


def random_weighted_space(rng: np.random.Generator, n: int) -> WeightedVertexSet:
    w = rng.random(n) + 0.1
    return WeightedVertexSet(w / w.sum())


def brute_solutions(coeffs, sets, predicate=None) -> int:
    count = 0
    for tup in itertools.product(*[s.elements for s in sets]):
        if sum(a * x for a, x in zip(coeffs, tup)) != 0:
            continue
        if predicate is None or predicate(tup):
            count += 1
    return count


def matches_pattern(tup, pattern) -> bool:
    binding = {}
    for pos, sym in enumerate(pattern):
        if sym in binding and binding[sym] != tup[pos]:
            return False
        binding[sym] = tup[pos]
    return True
