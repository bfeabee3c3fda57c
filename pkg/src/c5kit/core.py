"""Core graph, kernel, and partition types shared by every other module.

Vertices are dense integers 0..n-1 (named vertices are a CLI concern).
Kernels are dense symmetric matrices over a weighted probability space;
in the desk-scale regime (n up to a few thousand for kernel work) dense
storage keeps averaging and composition cache-friendly.

All types are immutable after construction and safe to share read-only
across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

WEIGHT_TOL = 1e-12

# Parts at or below this size get their incident edges dropped before the
# five-way split; the constant is arbitrary and therefore a parameter.
DEFAULT_SMALL_PART = 100


class GraphParseError(ValueError):
    """Malformed graph/hypergraph/integer-set file; message names the line."""


def normalize_edge(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph: no loops, no repeated edges, endpoints in [0, n)."""

    n: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("vertex count must be nonnegative")
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            if u > v:
                raise ValueError(f"edge ({u},{v}) not normalized")
            if not (0 <= u and v < self.n):
                raise ValueError(f"edge ({u},{v}) out of range for n={self.n}")

    @classmethod
    def from_edges(cls, n: int, pairs) -> "Graph":
        return cls(n, frozenset(normalize_edge(u, v) for u, v in pairs))

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def adj(self) -> tuple[frozenset, ...]:
        sets: list[set] = [set() for _ in range(self.n)]
        for u, v in self.edges:
            sets[u].add(v)
            sets[v].add(u)
        return tuple(frozenset(s) for s in sets)

    @cached_property
    def neighbor_arrays(self) -> tuple[np.ndarray, ...]:
        return tuple(np.fromiter(sorted(s), dtype=np.int64) for s in self.adj)

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return normalize_edge(u, v) in self.edges

    def adjacency_matrix(self, dtype=np.int64) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=dtype)
        for u, v in self.edges:
            a[u, v] = 1
            a[v, u] = 1
        return a

    def without_edges(self, removed) -> "Graph":
        removed = {normalize_edge(u, v) for u, v in removed}
        return Graph(self.n, self.edges - removed)

    def density(self) -> float:
        return 2.0 * len(self.edges) / (self.n * self.n) if self.n else 0.0


def read_graph(path) -> Graph:
    """Parse the edge-list format: header ``n m`` then m lines ``u v``."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise GraphParseError("empty file")
    head = lines[0].split()
    if len(head) != 2:
        raise GraphParseError("header at line 1 must be 'n m'")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError:
        raise GraphParseError("header at line 1 must be 'n m'") from None
    if n < 0 or m < 0:
        raise GraphParseError("header at line 1 must be nonnegative")
    edges: set[tuple[int, int]] = set()
    for k in range(m):
        lineno = k + 2
        if lineno - 1 >= len(lines):
            raise GraphParseError(f"missing edge line {lineno}")
        parts = lines[lineno - 1].split()
        if len(parts) != 2:
            raise GraphParseError(f"malformed edge at line {lineno}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphParseError(f"malformed edge at line {lineno}") from None
        if u == v:
            raise GraphParseError(f"loop at line {lineno}")
        if not (0 <= u < n and 0 <= v < n):
            raise GraphParseError(f"vertex out of range at line {lineno}")
        e = normalize_edge(u, v)
        if e in edges:
            raise GraphParseError(f"duplicate edge at line {lineno}")
        edges.add(e)
    return Graph(n, frozenset(edges))


def write_graph(graph: Graph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{graph.n} {graph.num_edges}\n")
        for u, v in sorted(graph.edges):
            fh.write(f"{u} {v}\n")


@dataclass(frozen=True)
class WeightedVertexSet:
    """Finite probability space over vertices; weights sum to 1."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1:
            raise ValueError("weights must be a vector")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite and nonnegative")
        if abs(float(w.sum()) - 1.0) > WEIGHT_TOL:
            raise ValueError("weights must sum to 1")
        w = w.copy()
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @classmethod
    def uniform(cls, n: int) -> "WeightedVertexSet":
        if n <= 0:
            raise ValueError("need at least one vertex")
        return cls(np.full(n, 1.0 / n))

    @property
    def size(self) -> int:
        return len(self.weights)

    def same_space(self, other: "WeightedVertexSet") -> bool:
        return self.size == other.size and bool(
            np.all(np.abs(self.weights - other.weights) <= WEIGHT_TOL)
        )


def _frozen_matrix(values, shape_check=None) -> np.ndarray:
    vals = np.array(values, dtype=float)
    if vals.ndim != 2:
        raise ValueError("kernel values must be a matrix")
    if shape_check is not None and vals.shape != shape_check:
        raise ValueError(f"kernel shape {vals.shape} does not match space {shape_check}")
    if not np.all(np.isfinite(vals)):
        raise ValueError("kernel values must be finite")
    vals.setflags(write=False)
    return vals


@dataclass(frozen=True)
class Kernel:
    """Symmetric nonnegative function on a weighted vertex space.

    Houses normalized edge indicators (adjacency divided by a density
    scale), their block averages, and anything else the regularity and
    counting machinery passes around.
    """

    space: WeightedVertexSet
    values: np.ndarray

    def __post_init__(self):
        n = self.space.size
        vals = _frozen_matrix(self.values, (n, n))
        if np.any(vals < 0):
            raise ValueError("kernel values must be nonnegative")
        if not np.array_equal(vals, vals.T):
            raise ValueError("kernel values must be symmetric")
        object.__setattr__(self, "values", vals)

    @property
    def size(self) -> int:
        return self.space.size

    def mean(self) -> float:
        w = self.space.weights
        return float(w @ self.values @ w)

    def scale(self, factor: float) -> "Kernel":
        return Kernel(self.space, self.values * factor)


@dataclass(frozen=True)
class BipartiteKernel:
    """Nonnegative function on a product of two weighted vertex spaces."""

    left: WeightedVertexSet
    right: WeightedVertexSet
    values: np.ndarray

    def __post_init__(self):
        vals = _frozen_matrix(self.values, (self.left.size, self.right.size))
        if np.any(vals < 0):
            raise ValueError("kernel values must be nonnegative")
        object.__setattr__(self, "values", vals)

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def transpose(self) -> "BipartiteKernel":
        return BipartiteKernel(self.right, self.left, self.values.T)

    def mean(self) -> float:
        return float(self.left.weights @ self.values @ self.right.weights)


def graph_to_kernel(graph: Graph, p: float) -> Kernel:
    """Normalized edge indicator: value 1/p on edges, 0 elsewhere, uniform weights.

    The mean is 2|E| / (p n^2), so p equal to the edge density gives mean 1.
    """
    if not (p > 0):
        raise ValueError("density scale p must be positive")
    if p > 1:
        raise ValueError("density scale p must be at most 1")
    if graph.n == 0:
        raise ValueError("graph must have at least one vertex")
    vals = graph.adjacency_matrix(dtype=float) / p
    return Kernel(WeightedVertexSet.uniform(graph.n), vals)


@dataclass(frozen=True)
class Partition:
    """Partition of 0..n-1 into disjoint nonempty blocks covering everything."""

    n: int
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        seen: set[int] = set()
        canon = []
        for blk in self.blocks:
            if len(blk) == 0:
                raise ValueError("empty blocks are not stored")
            b = tuple(sorted(blk))
            if seen.intersection(b):
                raise ValueError("blocks must be disjoint")
            seen.update(b)
            canon.append(b)
        if seen != set(range(self.n)):
            raise ValueError("blocks must cover exactly 0..n-1")
        object.__setattr__(self, "blocks", tuple(sorted(canon)))

    @classmethod
    def trivial(cls, n: int) -> "Partition":
        return cls(n, (tuple(range(n)),))

    @classmethod
    def singletons(cls, n: int) -> "Partition":
        return cls(n, tuple((v,) for v in range(n)))

    @classmethod
    def from_labels(cls, labels) -> "Partition":
        groups: dict[int, list[int]] = {}
        for v, lab in enumerate(labels):
            groups.setdefault(int(lab), []).append(v)
        return cls(len(labels), tuple(tuple(g) for g in groups.values()))

    @property
    def num_blocks(self) -> int:
        return len(self.blocks)

    @cached_property
    def block_index(self) -> np.ndarray:
        idx = np.empty(self.n, dtype=np.int64)
        for b, blk in enumerate(self.blocks):
            idx[list(blk)] = b
        idx.setflags(write=False)
        return idx

    def refine_with(self, left, right) -> "Partition":
        """Common refinement with the four-cell partition cut out by two vertex sets.

        Empty intersections are dropped immediately.
        """
        left = set(left)
        right = set(right)
        groups: dict[tuple[int, bool, bool], list[int]] = {}
        bidx = self.block_index
        for v in range(self.n):
            key = (int(bidx[v]), v in left, v in right)
            groups.setdefault(key, []).append(v)
        return Partition(self.n, tuple(tuple(g) for g in groups.values()))

    def refines(self, coarser: "Partition") -> bool:
        if self.n != coarser.n:
            return False
        cidx = coarser.block_index
        return all(len({int(cidx[v]) for v in blk}) == 1 for blk in self.blocks)

    def block_measures(self, weights: np.ndarray) -> np.ndarray:
        return np.array([float(np.sum(weights[list(blk)])) for blk in self.blocks])


@dataclass(frozen=True)
class LayeredGraph:
    """k-partite graph whose layers occupy consecutive id ranges.

    Edges run only between cyclically consecutive layers.  Optional
    per-vertex sublabels in 0..4 must split every layer into five classes
    of nearly equal size (differing by at most 1).
    """

    layer_sizes: tuple[int, ...]
    edges: frozenset[tuple[int, int]]
    sublabels: tuple[int, ...] | None = None

    def __post_init__(self):
        if len(self.layer_sizes) < 2:
            raise ValueError("need at least two layers")
        if any(s < 0 for s in self.layer_sizes):
            raise ValueError("layer sizes must be nonnegative")
        k = len(self.layer_sizes)
        offs = self.offsets
        n = offs[-1]
        for u, v in self.edges:
            if u > v:
                raise ValueError(f"edge ({u},{v}) not normalized")
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            if not (0 <= u and v < n):
                raise ValueError(f"edge ({u},{v}) out of range")
            lu, lv = self.layer_of(u), self.layer_of(v)
            if (lu - lv) % k not in (1, k - 1) or lu == lv:
                raise ValueError(f"edge ({u},{v}) joins non-consecutive layers {lu},{lv}")
        if self.sublabels is not None:
            labs = tuple(int(x) for x in self.sublabels)
            if len(labs) != n:
                raise ValueError("sublabels must cover every vertex")
            if any(not 0 <= x < 5 for x in labs):
                raise ValueError("sublabels must lie in 0..4")
            for layer in range(k):
                lo, hi = offs[layer], offs[layer + 1]
                counts = [0] * 5
                for v in range(lo, hi):
                    counts[labs[v]] += 1
                if counts and max(counts) - min(counts) > 1:
                    raise ValueError(f"sublabel classes in layer {layer} differ by more than 1")
            object.__setattr__(self, "sublabels", labs)

    @cached_property
    def offsets(self) -> tuple[int, ...]:
        offs = [0]
        for s in self.layer_sizes:
            offs.append(offs[-1] + s)
        return tuple(offs)

    @property
    def n(self) -> int:
        return self.offsets[-1]

    @property
    def num_layers(self) -> int:
        return len(self.layer_sizes)

    def layer_of(self, v: int) -> int:
        offs = self.offsets
        for i in range(len(self.layer_sizes)):
            if v < offs[i + 1]:
                return i
        raise ValueError(f"vertex {v} out of range")

    def layer_vertices(self, i: int) -> range:
        return range(self.offsets[i], self.offsets[i + 1])

    def to_graph(self) -> Graph:
        return Graph(self.n, self.edges)


def split_into_five(
    partition: Partition,
    graph: Graph,
    min_part: int = DEFAULT_SMALL_PART,
    seed: int = 0,
):
    """Label every vertex with a class in 0..4, splitting each block near-equally.

    Blocks with at most ``min_part`` vertices have all their incident edges
    returned as dropped.  The class assignment within each block is a seeded
    shuffle chopped into five chunks whose sizes differ by at most 1.

    Returns ``(labels, dropped_edges)`` with ``labels`` an int array of length n.
    """
    if partition.n != graph.n:
        raise ValueError("partition and graph disagree on the vertex count")
    rng = np.random.default_rng(seed)
    labels = np.zeros(graph.n, dtype=np.int64)
    small_vertices: set[int] = set()
    for blk in partition.blocks:
        verts = np.array(blk, dtype=np.int64)
        rng.shuffle(verts)
        for cls, chunk in enumerate(np.array_split(verts, 5)):
            labels[chunk] = cls
        if len(blk) <= min_part:
            small_vertices.update(blk)
    dropped = frozenset(
        e for e in graph.edges if e[0] in small_vertices or e[1] in small_vertices
    )
    labels.setflags(write=False)
    return labels, dropped
