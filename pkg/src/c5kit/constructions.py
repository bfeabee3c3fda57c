"""Explicit graph and hypergraph constructions, each shipped with the
structural claims it is supposed to satisfy and the checks that certify
them on the instance actually built.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .arithmetic import EquationSpec, IntegerSet, count_solutions, prop17_constraints
from .counting import (
    count_cycles,
    enumerate_triangles,
    layered_c4_count,
    layered_c5_count,
)
from .core import Graph, LayeredGraph, normalize_edge
from .hypergraph import Hypergraph, berge_girth_above


@dataclass(frozen=True)
class ConstructionOutput:
    """A built object, the named checks that were run, and the parameters."""

    graph: object
    properties: dict
    provenance: dict

    def to_json(self) -> dict:
        return {"properties": self.properties, "provenance": self.provenance}


def _smallest_coprime_modulus(lower: int, coeffs) -> int:
    n = lower + 1
    while any(math.gcd(n, abs(a)) != 1 for a in coeffs):
        n += 1
    return n


def reduction_graph(eq: EquationSpec, sets, n: int) -> tuple[LayeredGraph, int]:
    """Cyclically 5-partite graph whose 5-cycles encode equation solutions.

    Layer i+1 receives the edge (s, s + a_i x_i) for every residue s and
    every x_i in the i-th set; the modulus is the smallest integer above
    (|a_1| + ... + |a_5|) n coprime to every coefficient, so sums cannot
    wrap and every 5-cycle closes exactly when the equation holds.
    Returns the graph together with the modulus.
    """
    if eq.k != 5:
        raise ValueError("equation must have five variables")
    if not eq.is_translation_invariant():
        raise ValueError("coefficients must sum to zero")
    if len(sets) != 5:
        raise ValueError("need five integer sets")
    for s in sets:
        if s.elements and (s.elements[0] < 1 or s.elements[-1] > n):
            raise ValueError(f"set elements must lie in [1, {n}]")
    modulus = _smallest_coprime_modulus(sum(abs(a) for a in eq.coefficients) * n, eq.coefficients)
    edges: set[tuple[int, int]] = set()
    count = 0
    for i in range(5):
        a = eq.coefficients[i]
        off_lo = i * modulus
        off_hi = ((i + 1) % 5) * modulus
        for s in range(modulus):
            for x in sets[i].elements:
                u = off_lo + s
                v = off_hi + (s + a * x) % modulus
                e = normalize_edge(u, v)
                count += 1
                edges.add(e)
    if len(edges) != count:
        warnings.warn("edge multiset had collisions; duplicates were merged")
    layered = LayeredGraph((modulus,) * 5, frozenset(edges))
    return layered, modulus


def prop17_graph(xs: IntegerSet, n: int) -> ConstructionOutput:
    """Union of the 5-cycles (s, s+x, s+3x, s+6x, s+10x) over residues s
    modulo 60n+1 and x in the given set.

    The input set must avoid the two constraint families (difference
    ratios with multipliers {1,2,3,4,10}, and the weighted-mean equation);
    it is re-verified here and the construction refuses otherwise.  The
    output's claims (C4-free, every edge in exactly one 5-cycle, edge
    count 5 N |X|) are certified on the built graph.
    """
    if xs.elements and xs.elements[-1] > n:
        raise ValueError(f"set elements must lie in [1, {n}]")
    for eq, filt in prop17_constraints():
        if count_solutions(eq, [xs] * eq.k, filt) != 0:
            raise ValueError(
                "input set fails its required constraints; construction refused"
            )
    modulus = 60 * n + 1
    steps = (0, 1, 3, 6, 10)
    edges: set[tuple[int, int]] = set()
    edge_uses = 0
    clean = True
    for s in range(modulus):
        for x in xs.elements:
            cyc = [(layer, (s + steps[layer] * x) % modulus) for layer in range(5)]
            for layer in range(5):
                la, va = cyc[layer]
                lb, vb = cyc[(layer + 1) % 5]
                e = normalize_edge(la * modulus + va, lb * modulus + vb)
                edge_uses += 1
                if e in edges:
                    clean = False
                edges.add(e)
    layered = LayeredGraph((modulus,) * 5, frozenset(edges))
    expected_edges = 5 * modulus * len(xs)
    c4 = layered_c4_count(layered)
    c5 = layered_c5_count(layered)
    properties = {
        "edge_count": len(edges),
        "edge_count_expected": expected_edges,
        "cycles_edge_disjoint": clean and len(edges) == edge_uses,
        "c4_count": c4,
        "c4_free": c4 == 0,
        "c5_count": c5,
        "c5_count_expected": modulus * len(xs),
        "every_edge_in_exactly_one_c5": (
            clean and len(edges) == expected_edges and c5 == modulus * len(xs)
        ),
    }
    return ConstructionOutput(layered, properties, {"n": n, "modulus": modulus, "set": list(xs.elements)})


def tensor_triangle(m: int) -> Graph:
    """m-fold tensor power of a triangle: vertices are base-3 strings of
    length m, adjacent when they differ in every coordinate."""
    if m < 1:
        raise ValueError("m must be at least 1")
    n = 3**m
    digits = np.zeros((n, m), dtype=np.int64)
    for j in range(m):
        digits[:, j] = (np.arange(n) // 3**j) % 3
    edges = []
    for u in range(n):
        diff = digits != digits[u]
        adjacent = np.nonzero(diff.all(axis=1))[0]
        for v in adjacent:
            if v > u:
                edges.append((u, int(v)))
    return Graph(n, frozenset(edges))


def sample_triangles(graph: Graph, keep_prob: float, seed: int = 0) -> Graph:
    """Keep each triangle of an edge-partitioned-into-triangles graph
    independently; the output is the union of the kept triangles.

    Requires every edge to lie in exactly one triangle, so keep_prob 1
    reproduces the input exactly.
    """
    if not (0 <= keep_prob <= 1):
        raise ValueError("keep probability must lie in [0, 1]")
    triangles = list(enumerate_triangles(graph))
    edge_uses: dict[tuple[int, int], int] = {}
    for a, b, c in triangles:
        for e in ((a, b), (a, c), (b, c)):
            edge_uses[e] = edge_uses.get(e, 0) + 1
    if set(edge_uses) != set(graph.edges) or any(v != 1 for v in edge_uses.values()):
        raise ValueError("sampler needs every edge in exactly one triangle")
    rng = np.random.default_rng(seed)
    keep = rng.random(len(triangles)) < keep_prob
    edges: set[tuple[int, int]] = set()
    for (a, b, c), kept in zip(triangles, keep):
        if kept:
            edges.update(((a, b), (a, c), (b, c)))
    return Graph(graph.n, frozenset(edges))


def theta_hypergraph(r: int, g: int, n: int) -> ConstructionOutput:
    """Edge-disjoint hyperpaths of floor(g/2)+1 edges between two hubs.

    Consecutive edges in a path share exactly one vertex; all other
    vertices are fresh, so each path uses (floor(g/2)+1)(r-1) - 1 new
    vertices and any two hub-to-hub routes differ in at least
    2(floor(g/2)+1) > g edges, giving girth above g.
    """
    if r < 2 or g < 2:
        raise ValueError("need r >= 2 and g >= 2")
    path_len = g // 2 + 1
    per_path = path_len * (r - 1) - 1
    if n < 2 + per_path:
        raise ValueError(f"need at least {2 + per_path} vertices")
    num_paths = (n - 2) // per_path
    u, v = 0, 1
    fresh = 2
    edges = []
    for _ in range(num_paths):
        prev = u
        for step in range(path_len):
            need = r - 1 if step < path_len - 1 else r - 2
            verts = [prev] + list(range(fresh, fresh + need))
            fresh += need
            if step == path_len - 1:
                verts.append(v)
            else:
                prev = verts[-1]
            edges.append(frozenset(verts))
    h = Hypergraph(n, r, tuple(edges))
    expected = num_paths * path_len
    properties = {
        "edge_count": h.num_edges,
        "edge_count_expected": expected,
        "girth_above_g": berge_girth_above(h, min(g, 5)) if g <= 5 else None,
    }
    return ConstructionOutput(h, properties, {"r": r, "g": g, "n": n, "paths": num_paths})


def _is_prime(q: int) -> bool:
    if q < 2:
        return False
    d = 2
    while d * d <= q:
        if q % d == 0:
            return False
        d += 1
    return True


def polarity_graph(q: int) -> ConstructionOutput:
    """Orthogonality graph on the points of the projective plane over F_q.

    Distinct points are adjacent when their dot product vanishes mod q;
    self-orthogonal points simply lose their loop.  C4-freeness is
    certified by counting; the edge-in-exactly-one-triangle observation is
    measured and reported, not asserted.
    """
    if not _is_prime(q):
        raise ValueError(f"q = {q} must be prime (prime powers are out of scope)")
    points: list[tuple[int, int, int]] = []
    for b in range(q):
        for c in range(q):
            points.append((1, b, c))
    for c in range(q):
        points.append((0, 1, c))
    points.append((0, 0, 1))
    nv = len(points)
    edges = []
    for i in range(nv):
        for j in range(i + 1, nv):
            dot = sum(points[i][t] * points[j][t] for t in range(3)) % q
            if dot == 0:
                edges.append((i, j))
    graph = Graph(nv, frozenset(edges))
    c4 = count_cycles(graph, 4).count
    # per-edge triangle membership, measured
    a = graph.adjacency_matrix(dtype=np.int64)
    common = a @ a
    memberships = [int(common[u, v]) for u, v in graph.edges]
    histogram: dict[int, int] = {}
    for x in memberships:
        histogram[x] = histogram.get(x, 0) + 1
    degrees = [graph.degree(v) for v in range(nv)]
    properties = {
        "vertices": nv,
        "edge_count": graph.num_edges,
        "c4_count": int(c4),
        "c4_free": c4 == 0,
        "edge_triangle_membership_histogram": dict(sorted(histogram.items())),
        "every_edge_in_exactly_one_triangle_observed": bool(
            memberships and all(x == 1 for x in memberships)
        ),
        "every_edge_in_at_most_one_triangle_observed": bool(
            not memberships or max(memberships) <= 1
        ),
        "c5_count": count_cycles(graph, 5).count,
        "degree_min": min(degrees),
        "degree_max": max(degrees),
    }
    return ConstructionOutput(graph, properties, {"q": q})


def gnp(n: int, p: float, seed: int = 0) -> Graph:
    """Binomial random graph, reproducible under the seed."""
    if not (0 <= p <= 1):
        raise ValueError("p must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    mask = rng.random(len(iu)) < p
    edges = frozenset((int(u), int(v)) for u, v in zip(iu[mask], ju[mask]))
    return Graph(n, edges)
