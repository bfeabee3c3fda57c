"""Exact subgraph and homomorphism counting.

Copy counts use exact integer arithmetic (bitmask enumeration, codegree
formulas, or integer traces with an arbitrary-precision fallback);
densities use floats with a documented 1e-9 comparison tolerance.
Cross-check mode runs an independent engine and insists on agreement.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .core import BipartiteKernel, Graph, Kernel, LayeredGraph

DENSITY_TOL = 1e-9

# float64 matmuls stay exact while every accumulated sum is below 2^53
_FLOAT_EXACT = 2**53

_SUPPORTED_CYCLES = (3, 4, 5)


class CountMismatchError(AssertionError):
    """Two independent counting engines disagreed; a bug, not an input problem."""


@dataclass(frozen=True)
class CountReport:
    pattern: str
    count: int | float
    method: str

    def to_json(self) -> dict:
        return {"pattern": self.pattern, "count": self.count, "method": self.method}


def _bitmasks(graph: Graph) -> list[int]:
    masks = [0] * graph.n
    for u, v in graph.edges:
        masks[u] |= 1 << v
        masks[v] |= 1 << u
    return masks


def _count_c3_bitmask(graph: Graph) -> int:
    masks = _bitmasks(graph)
    total = 0
    for u, v in graph.edges:
        hi = max(u, v)
        above = -1 << (hi + 1)
        total += (masks[u] & masks[v] & above).bit_count()
    return total


def _count_c4_formula(graph: Graph) -> int:
    n = graph.n
    if n == 0:
        return 0
    if n <= 1500:
        a = graph.adjacency_matrix(dtype=float)
        codeg = a @ a
        np.fill_diagonal(codeg, 0.0)
        c = codeg[np.triu_indices(n, k=1)].astype(np.int64)
        return int(np.sum(c * (c - 1) // 2)) // 2
    # sparse path: hash common-neighbor pairs through each middle vertex
    keys: list[np.ndarray] = []
    for v in range(n):
        nbrs = graph.neighbor_arrays[v]
        d = len(nbrs)
        if d >= 2:
            iu, ju = np.triu_indices(d, k=1)
            keys.append(nbrs[iu] * n + nbrs[ju])
    if not keys:
        return 0
    _, counts = np.unique(np.concatenate(keys), return_counts=True)
    return int(np.sum(counts * (counts - 1) // 2)) // 2


def _count_c4_enum(graph: Graph) -> int:
    """Anchored enumeration: smallest vertex first, direction deduplicated."""
    masks = _bitmasks(graph)
    total = 0
    for v0 in range(graph.n):
        above = -1 << (v0 + 1)
        nbrs = [w for w in sorted(graph.adj[v0]) if w > v0]
        for i, v1 in enumerate(nbrs):
            for v3 in nbrs[i + 1 :]:
                total += (masks[v1] & masks[v3] & above).bit_count()
    return total


def _count_c5_enum(graph: Graph) -> int:
    """Path enumeration anchored at the minimum-id vertex of each cycle."""
    masks = _bitmasks(graph)
    total = 0
    for v0 in range(graph.n):
        above = -1 << (v0 + 1)
        nbrs = [w for w in sorted(graph.adj[v0]) if w > v0]
        for i, v1 in enumerate(nbrs):
            m1 = masks[v1] & above
            for v4 in nbrs[i + 1 :]:
                m4 = masks[v4]
                not_v4 = ~(1 << v4)
                w2 = m1 & not_v4
                while w2:
                    low = w2 & -w2
                    w2 ^= low
                    v2 = low.bit_length() - 1
                    cand = masks[v2] & m4 & above & not_v4
                    cand &= ~(1 << v1)
                    cand &= ~low
                    total += cand.bit_count()
    return total


def _trace_power(graph: Graph, k: int) -> int:
    """Trace of the k-th adjacency power, exact."""
    n = graph.n
    if n == 0:
        return 0
    # entries of A^j are bounded by n^(j-1); pick int64 only when that fits
    if n ** max(k - 1, 1) < 2**62:
        a = graph.adjacency_matrix(dtype=np.int64)
    else:
        a = graph.adjacency_matrix(dtype=object)
    result = None
    base = a
    e = k
    while e:
        if e & 1:
            result = base if result is None else result @ base
        e >>= 1
        if e:
            base = base @ base
    return int(sum(int(x) for x in np.diagonal(result)))


def _count_c5_formula(graph: Graph) -> int:
    """Closed-walk traces with degeneracy corrections."""
    t5 = _trace_power(graph, 5)
    t3 = _trace_power(graph, 3)
    a = graph.adjacency_matrix(dtype=np.int64) if graph.n ** 2 < 2**62 else graph.adjacency_matrix(dtype=object)
    a3_diag = np.diagonal(a @ a @ a)
    degs = [graph.degree(v) for v in range(graph.n)]
    corr = sum((degs[v] - 2) * int(a3_diag[v]) for v in range(graph.n))
    val = t5 - 5 * t3 - 5 * corr
    assert val % 10 == 0
    return val // 10


def _count_c3_formula(graph: Graph) -> int:
    t3 = _trace_power(graph, 3)
    assert t3 % 6 == 0
    return t3 // 6


def count_cycles(graph: Graph, k: int, cross_check: bool = False) -> CountReport:
    """Number of unlabeled k-cycle subgraphs, k in {3, 4, 5}.

    Default engines: bitmask enumeration for C3 and C5, the codegree
    formula sum-over-pairs C(codeg, 2)/2 for C4.  Cross-check mode also
    runs the independent engine (enumeration vs. trace/codegree formula)
    and raises on disagreement.
    """
    if k not in _SUPPORTED_CYCLES:
        raise ValueError(f"unsupported pattern C{k}; supported: C3, C4, C5")
    if k == 3:
        primary, method = _count_c3_bitmask(graph), "enumeration"
        other = _count_c3_formula(graph) if cross_check else None
    elif k == 4:
        primary, method = _count_c4_formula(graph), "formula"
        other = _count_c4_enum(graph) if cross_check else None
    else:
        primary, method = _count_c5_enum(graph), "enumeration"
        other = _count_c5_formula(graph) if cross_check else None
    if cross_check and other != primary:
        raise CountMismatchError(
            f"C{k} engines disagree: {method}={primary}, cross-check={other}"
        )
    return CountReport(f"c{k}", primary, method)


def hom_cycle(graph: Graph, k: int) -> int:
    """Closed k-walk count: trace of the k-th adjacency power, exact integers."""
    if k < 3:
        raise ValueError("cycle length must be at least 3")
    return _trace_power(graph, k)


def hom_density(pattern: str, kernel: Kernel) -> float:
    """Homomorphism density t(H, f) for H in {c3, c4, c5, k22}."""
    w = kernel.space.weights
    f = kernel.values
    name = pattern.lower()
    if name in ("c3", "c4", "c5"):
        k = int(name[1])
        m = w[:, None] * f
        return float(np.trace(np.linalg.matrix_power(m, k)))
    if name == "k22":
        c = f @ (w[:, None] * f)
        c = c * c.T  # squared two-step kernel, computed symmetrically
        return float(w @ c @ w)
    raise ValueError(f"unsupported pattern {pattern!r}")


def compose(f12: BipartiteKernel, f23: BipartiteKernel) -> BipartiteKernel:
    """Two-step path kernel (f12 o f23)(x, z) = E_y f12(x, y) f23(y, z)."""
    if not f12.right.same_space(f23.left):
        raise ValueError("inner spaces do not match")
    mid = f12.right.weights
    vals = f12.values @ (mid[:, None] * f23.values)
    return BipartiteKernel(f12.left, f23.right, vals)


def l2sq(h: BipartiteKernel) -> float:
    """Squared L2 norm E[h^2] under the product measure."""
    return float(h.left.weights @ (h.values * h.values) @ h.right.weights)


def truncate_above(h: BipartiteKernel, bound: float) -> BipartiteKernel:
    """Zero every entry strictly exceeding the bound (infinity is the identity)."""
    vals = np.where(h.values > bound, 0.0, h.values)
    return BipartiteKernel(h.left, h.right, vals)


def cycle_product_density(kernels) -> float:
    """E prod f_i(x_i, x_{i+1}) around a cycle of bipartite kernels."""
    ks = list(kernels)
    if len(ks) < 3:
        raise ValueError("need at least three kernels")
    for a, b in zip(ks, ks[1:]):
        if not a.right.same_space(b.left):
            raise ValueError("consecutive kernel spaces do not match")
    if not ks[-1].right.same_space(ks[0].left):
        raise ValueError("cycle does not close")
    m = ks[0].left.weights[:, None] * ks[0].values
    for k in ks[1:]:
        m = m @ (k.left.weights[:, None] * k.values)
    return float(np.trace(m))


def count_c5_labeled(graph: Graph, labels) -> int:
    """5-cycles whose r-th vertex carries label r (labels 0..4), each once.

    Distinct labels force distinct vertices, so this equals the trace of
    the label-masked adjacency chain.
    """
    labels = np.asarray(labels, dtype=np.int64)
    if len(labels) != graph.n:
        raise ValueError("labels must cover every vertex")
    if graph.n == 0 or not graph.edges:
        return 0
    classes = [np.nonzero(labels == r)[0] for r in range(5)]
    if any(len(c) == 0 for c in classes):
        # some class empty: fall back to the same chain, which is then zero
        pass
    use_float = graph.n**5 < _FLOAT_EXACT
    a = graph.adjacency_matrix(dtype=float if use_float else np.int64)
    blocks = [a[np.ix_(classes[r], classes[(r + 1) % 5])] for r in range(5)]
    m = blocks[0]
    for b in blocks[1:]:
        m = m @ b
    tr = float(np.trace(m)) if use_float else int(np.trace(m))
    return int(round(tr))


def count_c5_layered(layered: LayeredGraph) -> int:
    """Label-respecting 5-cycle count for a layered graph with sublabels."""
    if layered.num_layers != 5:
        raise ValueError("need exactly five layers")
    if layered.sublabels is None:
        raise ValueError("sublabels are required")
    return count_c5_labeled(layered.to_graph(), layered.sublabels)


def _layer_neighbor_maps(layered: LayeredGraph):
    """Per-vertex neighbors in the next and previous layer."""
    k = layered.num_layers
    nxt: dict[int, list[int]] = {}
    prv: dict[int, list[int]] = {}
    for u, v in layered.edges:
        lu, lv = layered.layer_of(u), layered.layer_of(v)
        if (lv - lu) % k == 1:
            a, b = u, v
        else:
            a, b = v, u
        nxt.setdefault(a, []).append(b)
        prv.setdefault(b, []).append(a)
    return nxt, prv


def layered_c4_count(layered: LayeredGraph) -> int:
    """Exact C4 count in a cyclically layered graph with at least 5 layers.

    With 5 or more layers every 4-cycle either stays between two
    consecutive layers or spans three consecutive layers with both middle
    vertices in the central one; both shapes are counted by codegrees.
    """
    k = layered.num_layers
    if k < 5:
        raise ValueError("need at least five layers")
    nxt, prv = _layer_neighbor_maps(layered)

    def pair_codegrees(mid_vertices, nbr_map) -> Counter:
        codeg: Counter = Counter()
        for mid in mid_vertices:
            nbrs = sorted(nbr_map.get(mid, ()))
            for i in range(len(nbrs)):
                for j in range(i + 1, len(nbrs)):
                    codeg[(nbrs[i], nbrs[j])] += 1
        return codeg

    total = 0
    for layer in range(k):
        # codegrees of vertex pairs inside this layer, w.r.t. each neighbor layer
        codeg_next = pair_codegrees(layered.layer_vertices((layer + 1) % k), prv)
        codeg_prev = pair_codegrees(layered.layer_vertices((layer - 1) % k), nxt)
        # two-layer cycles between (layer, layer+1), anchored on the pair here
        total += sum(c * (c - 1) // 2 for c in codeg_next.values())
        # three-layer cycles with the middle pair in this layer
        small, big = (
            (codeg_prev, codeg_next)
            if len(codeg_prev) <= len(codeg_next)
            else (codeg_next, codeg_prev)
        )
        for key, c in small.items():
            other = big.get(key)
            if other:
                total += c * other
    return total


def layered_c5_count(layered: LayeredGraph) -> int:
    """Exact C5 count in a 5-layer cyclic graph via meet-in-the-middle paths."""
    if layered.num_layers != 5:
        raise ValueError("need exactly five layers")
    nxt, prv = _layer_neighbor_maps(layered)
    total = 0
    for v1 in layered.layer_vertices(0):
        fwd: Counter = Counter()
        for v2 in nxt.get(v1, ()):
            for v3 in nxt.get(v2, ()):
                fwd[v3] += 1
        if not fwd:
            continue
        bwd: Counter = Counter()
        for v5 in prv.get(v1, ()):
            for v4 in prv.get(v5, ()):
                bwd[v4] += 1
        if not bwd:
            continue
        for v4, cb in bwd.items():
            for v3 in prv.get(v4, ()):
                cf = fwd.get(v3)
                if cf:
                    total += cf * cb
    return total


def _enumerate_c4_cycles(graph: Graph):
    """Yield each 4-cycle once as (v0, v1, v2, v3) in cycle order, v0 minimal."""
    masks = _bitmasks(graph)
    for v0 in range(graph.n):
        above = -1 << (v0 + 1)
        nbrs = [w for w in sorted(graph.adj[v0]) if w > v0]
        for i, v1 in enumerate(nbrs):
            for v3 in nbrs[i + 1 :]:
                cand = masks[v1] & masks[v3] & above
                while cand:
                    low = cand & -cand
                    cand ^= low
                    v2 = low.bit_length() - 1
                    yield (v0, v1, v2, v3)


def house_c4_count(graph: Graph) -> tuple[int, int]:
    """(total C4 count, count of C4s extending to a house).

    A 4-cycle extends when some vertex outside it is adjacent to both
    endpoints of one of the cycle's edges, forming the apex triangle.
    """
    masks = _bitmasks(graph)
    total = 0
    extending = 0
    for cyc in _enumerate_c4_cycles(graph):
        total += 1
        cyc_mask = 0
        for v in cyc:
            cyc_mask |= 1 << v
        v0, v1, v2, v3 = cyc
        for a, b in ((v0, v1), (v1, v2), (v2, v3), (v3, v0)):
            if masks[a] & masks[b] & ~cyc_mask:
                extending += 1
                break
    return total, extending


def enumerate_triangles(graph: Graph):
    masks = _bitmasks(graph)
    for u, v in sorted(graph.edges):
        above = -1 << (v + 1)
        cand = masks[u] & masks[v] & above
        while cand:
            low = cand & -cand
            cand ^= low
            yield (u, v, low.bit_length() - 1)


def greedy_triangle_decomposition(graph: Graph, seed: int | None = None):
    """Greedy maximal family of edge-disjoint triangles plus its union subgraph.

    Candidate order is lexicographic, or a seeded shuffle when a seed is
    given, so the output is deterministic either way.
    """
    triangles = list(enumerate_triangles(graph))
    if seed is not None:
        rng = np.random.default_rng(seed)
        rng.shuffle(triangles)
    used: set[tuple[int, int]] = set()
    family: list[tuple[int, int, int]] = []
    for a, b, c in triangles:
        es = ((a, b), (a, c), (b, c))
        if any(e in used for e in es):
            continue
        used.update(es)
        family.append((a, b, c))
    union = Graph(graph.n, frozenset(used))
    return family, union
