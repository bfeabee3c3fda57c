"""r-uniform hypergraphs: Berge girth, configurations, peeling, shadows.

Cycle search is specialized per length (2-cycles via shared pairs,
lengths 3..5 via bounded alternating-sequence search) because only short
girth matters here; everything is exact at desk scale.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .core import Graph, GraphParseError, normalize_edge
from .counting import count_cycles


@dataclass(frozen=True)
class Hypergraph:
    """n vertices, r-uniform edge list; edges are distinct r-element sets."""

    n: int
    r: int
    edges: tuple[frozenset, ...]

    def __post_init__(self):
        if self.r < 2:
            raise ValueError("uniformity must be at least 2")
        canon = []
        seen = set()
        for e in self.edges:
            es = frozenset(int(v) for v in e)
            if len(es) != self.r:
                raise ValueError(f"edge {sorted(es)} does not have {self.r} distinct vertices")
            if any(not 0 <= v < self.n for v in es):
                raise ValueError(f"edge {sorted(es)} out of range")
            if es in seen:
                raise ValueError(f"duplicate edge {sorted(es)}")
            seen.add(es)
            canon.append(es)
        object.__setattr__(self, "edges", tuple(canon))

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def incident(self) -> tuple[tuple[int, ...], ...]:
        inc: list[list[int]] = [[] for _ in range(self.n)]
        for i, e in enumerate(self.edges):
            for v in e:
                inc[v].append(i)
        return tuple(tuple(x) for x in inc)

    def vertex_degree(self, v: int) -> int:
        return len(self.incident[v])


def read_hypergraph(path) -> Hypergraph:
    """Parse the format: header ``n m r`` then m lines of r vertex ids."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise GraphParseError("empty file")
    head = lines[0].split()
    if len(head) != 3:
        raise GraphParseError("header at line 1 must be 'n m r'")
    try:
        n, m, r = (int(x) for x in head)
    except ValueError:
        raise GraphParseError("header at line 1 must be 'n m r'") from None
    edges = []
    for k in range(m):
        lineno = k + 2
        if lineno - 1 >= len(lines):
            raise GraphParseError(f"missing edge line {lineno}")
        parts = lines[lineno - 1].split()
        if len(parts) != r:
            raise GraphParseError(f"malformed edge at line {lineno}")
        try:
            verts = [int(x) for x in parts]
        except ValueError:
            raise GraphParseError(f"malformed edge at line {lineno}") from None
        if len(set(verts)) != r:
            raise GraphParseError(f"repeated vertex in edge at line {lineno}")
        if any(not 0 <= v < n for v in verts):
            raise GraphParseError(f"vertex out of range at line {lineno}")
        edges.append(frozenset(verts))
    try:
        return Hypergraph(n, r, tuple(edges))
    except ValueError as exc:
        raise GraphParseError(str(exc)) from None


def write_hypergraph(h: Hypergraph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{h.n} {h.num_edges} {h.r}\n")
        for e in h.edges:
            fh.write(" ".join(str(v) for v in sorted(e)) + "\n")


@dataclass(frozen=True)
class BergeCycle:
    """Alternating vertices and edge indices v1, e1, ..., vk, ek."""

    vertices: tuple[int, ...]
    edge_indices: tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.edge_indices)

    def to_json(self) -> dict:
        return {"vertices": list(self.vertices), "edges": list(self.edge_indices)}


def _two_cycle(h: Hypergraph) -> BergeCycle | None:
    pair_seen: dict[tuple[int, int], int] = {}
    for i, e in enumerate(h.edges):
        for a, b in itertools.combinations(sorted(e), 2):
            key = (a, b)
            if key in pair_seen:
                return BergeCycle((a, b), (pair_seen[key], i))
            pair_seen[key] = i
    return None


def _cycle_of_length(h: Hypergraph, k: int) -> BergeCycle | None:
    """First Berge cycle of exactly length k found by backtracking.

    The first edge is forced to carry the lowest index in the cycle, which
    removes rotations; distinct vertices and edges are tracked explicitly.
    """
    edges = h.edges
    incident = h.incident

    def extend(first_edge, v1, verts, eidx):
        if len(eidx) == k - 1:
            # close: need final edge containing last vertex and v1, unused
            last = verts[-1]
            for f in incident[last]:
                if f <= first_edge or f in eidx:
                    continue
                if v1 in edges[f]:
                    return BergeCycle(tuple(verts), tuple(eidx) + (f,))
            return None
        last = verts[-1]
        for f in incident[last]:
            if f <= first_edge or f in eidx:
                continue
            for w in sorted(edges[f]):
                if w == v1 or w in verts:
                    continue
                got = extend(first_edge, v1, verts + [w], eidx + [f])
                if got is not None:
                    return got
        return None

    for e1 in range(len(edges)):
        for v1 in sorted(edges[e1]):
            for v2 in sorted(edges[e1]):
                if v2 == v1:
                    continue
                got = extend(e1, v1, [v1, v2], [e1])
                if got is not None:
                    return got
    return None


def berge_girth_leq(h: Hypergraph, g: int) -> BergeCycle | None:
    """Shortest Berge cycle of length at most g (g in 2..5), or None."""
    if g not in (2, 3, 4, 5):
        raise ValueError("g must be between 2 and 5")
    found = _two_cycle(h)
    if found is not None:
        return found
    for k in range(3, g + 1):
        found = _cycle_of_length(h, k)
        if found is not None:
            return found
    return None


def berge_girth_above(h: Hypergraph, g: int) -> bool:
    return berge_girth_leq(h, g) is None


def has_configuration(h: Hypergraph, v: int, e: int):
    """Witness e edges spanning at most v vertices, or None; exact for e <= 5."""
    if e > 5:
        raise ValueError("configuration search is exact only for e <= 5")
    if e < 1 or h.num_edges < e:
        return None

    edges = h.edges
    m = h.num_edges

    def search(start, chosen, span):
        if len(chosen) == e:
            return tuple(chosen)
        remaining = e - len(chosen)
        for i in range(start, m - remaining + 1):
            new_span = span | edges[i]
            # the span never shrinks, so anything already above v is dead
            if len(new_span) > v:
                continue
            got = search(i + 1, chosen + [i], new_span)
            if got is not None:
                return got
        return None

    return search(0, [], frozenset())


def peel_min_degree(h: Hypergraph, t: int = 4) -> tuple[Hypergraph, int]:
    """Repeatedly delete a vertex lying in at most t edges, with its edges.

    Returns the fixpoint hypergraph (every remaining vertex lies in more
    than t edges, counting only surviving edges) and the number of edges
    deleted.  Vertex ids are preserved.
    """
    if t < 0:
        raise ValueError("threshold must be nonnegative")
    alive_edge = [True] * h.num_edges
    degree = [h.vertex_degree(v) for v in range(h.n)]
    removed_vertex = [False] * h.n
    deleted = 0
    queue = [v for v in range(h.n) if 0 < degree[v] <= t]
    while queue:
        v = queue.pop()
        if removed_vertex[v] or degree[v] > t or degree[v] == 0:
            continue
        removed_vertex[v] = True
        for ei in h.incident[v]:
            if not alive_edge[ei]:
                continue
            alive_edge[ei] = False
            deleted += 1
            for w in h.edges[ei]:
                degree[w] -= 1
                if not removed_vertex[w] and 0 < degree[w] <= t:
                    queue.append(w)
    kept = tuple(e for i, e in enumerate(h.edges) if alive_edge[i])
    return Hypergraph(h.n, h.r, kept), deleted


def min_degree_peeling_order(h: Hypergraph) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Full peeling: always remove a minimum-degree vertex (ties: lowest id).

    Returns (order, degrees) in reverse order of peeling, so order[i] is a
    minimum-degree vertex of the sub-hypergraph induced by order[:i+1] and
    degrees[i] is its degree there.
    """
    alive_edge = [True] * h.num_edges
    degree = [h.vertex_degree(v) for v in range(h.n)]
    removed = [False] * h.n
    peel: list[tuple[int, int]] = []
    for _ in range(h.n):
        best = min(
            (v for v in range(h.n) if not removed[v]),
            key=lambda v: (degree[v], v),
        )
        peel.append((best, degree[best]))
        removed[best] = True
        for ei in h.incident[best]:
            if alive_edge[ei]:
                alive_edge[ei] = False
                for w in h.edges[ei]:
                    degree[w] -= 1
    peel.reverse()
    return tuple(v for v, _ in peel), tuple(d for _, d in peel)


def shadow_and_linearity(h: Hypergraph) -> tuple[Graph, bool]:
    """Shadow graph of a 3-graph plus whether the 3-graph is linear.

    Linear means no two triples share two vertices; a linear 3-graph's
    shadow is an edge-disjoint union of triangles.
    """
    if h.r != 3:
        raise ValueError("shadow is defined here for 3-graphs only")
    pair_count: dict[tuple[int, int], int] = {}
    for e in h.edges:
        for a, b in itertools.combinations(sorted(e), 2):
            pair_count[(a, b)] = pair_count.get((a, b), 0) + 1
    linear = all(c == 1 for c in pair_count.values())
    return Graph(h.n, frozenset(pair_count)), linear


def find_c4(graph: Graph):
    """Some 4-cycle as a vertex tuple, or None."""
    for v0 in range(graph.n):
        nbrs = sorted(graph.adj[v0])
        for i, v1 in enumerate(nbrs):
            for v3 in nbrs[i + 1 :]:
                common = graph.adj[v1] & graph.adj[v3]
                for v2 in sorted(common):
                    if v2 != v0:
                        return (v0, v1, v2, v3)
    return None


def c4free_min_degree_audit(graph: Graph) -> tuple[int, bool]:
    """Check the edge bound: a C4-free graph of minimum degree d has more
    than d^3/2 - d^2/2 edges (vacuous at d = 0).

    Raises if the input contains a C4 (with the witness in the message).
    Returns (min degree, bound holds).
    """
    witness = find_c4(graph)
    if witness is not None:
        raise ValueError(f"input has a 4-cycle {witness}; audit requires C4-free input")
    if graph.n == 0:
        return 0, True
    d = min(graph.degree(v) for v in range(graph.n))
    if d == 0:
        return 0, True
    ok = graph.num_edges > d**3 / 2 - d**2 / 2
    return d, ok


def triples_from_triangles(graph: Graph, triangles) -> Hypergraph:
    """3-graph whose edges are the given triangles of the graph."""
    return Hypergraph(graph.n, 3, tuple(frozenset(t) for t in triangles))


def reduce_uniformity(h: Hypergraph, target_r: int = 3, seed: int = 0) -> Hypergraph:
    """Replace each edge with a subset of size target_r (deterministic under seed)."""
    if target_r > h.r:
        raise ValueError("target uniformity exceeds the input's")
    rng = np.random.default_rng(seed)
    new_edges = []
    for e in h.edges:
        verts = sorted(e)
        idx = rng.choice(len(verts), size=target_r, replace=False)
        new_edges.append(frozenset(verts[i] for i in sorted(idx)))
    # duplicates can arise from distinct parents; keep the first occurrence
    seen = set()
    uniq = []
    for e in new_edges:
        if e not in seen:
            seen.add(e)
            uniq.append(e)
    return Hypergraph(h.n, target_r, tuple(uniq))
