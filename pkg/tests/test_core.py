import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from c5kit.core import (
    Graph,
    GraphParseError,
    Kernel,
    LayeredGraph,
    Partition,
    WeightedVertexSet,
    graph_to_kernel,
    read_graph,
    split_into_five,
    write_graph,
)

from helpers import complete, cycle_graph, random_graph


def write_lines(tmp_path, name, lines):
    path = tmp_path / name
    path.write_text("\n".join(lines) + "\n")
    return path


class TestGraphIO:
    def test_triangle_file(self, tmp_path):
        path = write_lines(tmp_path, "t.txt", ["3 3", "0 1", "1 2", "0 2"])
        g = read_graph(path)
        assert g.n == 3 and g.edges == frozenset({(0, 1), (1, 2), (0, 2)})

    def test_edgeless(self, tmp_path):
        g = read_graph(write_lines(tmp_path, "e.txt", ["2 0"]))
        assert g.n == 2 and g.num_edges == 0

    def test_loop_error_names_line(self, tmp_path):
        path = write_lines(tmp_path, "l.txt", ["3 1", "0 0"])
        with pytest.raises(GraphParseError, match="loop at line 2"):
            read_graph(path)

    def test_duplicate_edge(self, tmp_path):
        path = write_lines(tmp_path, "d.txt", ["3 2", "0 1", "1 0"])
        with pytest.raises(GraphParseError, match="duplicate edge at line 3"):
            read_graph(path)

    def test_out_of_range(self, tmp_path):
        path = write_lines(tmp_path, "r.txt", ["3 1", "0 5"])
        with pytest.raises(GraphParseError, match="line 2"):
            read_graph(path)

    def test_malformed(self, tmp_path):
        path = write_lines(tmp_path, "m.txt", ["3 1", "0 x"])
        with pytest.raises(GraphParseError, match="malformed"):
            read_graph(path)

    def test_missing_line(self, tmp_path):
        path = write_lines(tmp_path, "s.txt", ["3 2", "0 1"])
        with pytest.raises(GraphParseError, match="missing edge line 3"):
            read_graph(path)

    @given(n=st.integers(1, 9), mask=st.integers(0, 2**30 - 1))
    @settings(max_examples=60, deadline=None)
    def test_roundtrip(self, tmp_path_factory, n, mask):
        import itertools

        pairs = list(itertools.combinations(range(n), 2))
        edges = [pairs[i] for i in range(len(pairs)) if (mask >> i) & 1]
        g = Graph.from_edges(n, edges)
        path = tmp_path_factory.mktemp("rt") / "g.txt"
        write_graph(g, path)
        assert read_graph(path).edges == g.edges


class TestGraphType:
    def test_rejects_loop(self):
        with pytest.raises(ValueError):
            Graph(3, frozenset({(1, 1)}))

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            Graph(2, frozenset({(0, 2)}))

    def test_adjacency(self):
        g = cycle_graph(5)
        assert g.adj[0] == frozenset({1, 4})
        assert g.degree(2) == 2
        assert g.has_edge(4, 0) and not g.has_edge(0, 2)


class TestKernelTypes:
    def test_weights_must_sum_to_one(self):
        with pytest.raises(ValueError):
            WeightedVertexSet(np.array([0.5, 0.4]))
        with pytest.raises(ValueError):
            WeightedVertexSet(np.array([1.5, -0.5]))

    def test_kernel_requires_symmetry(self):
        space = WeightedVertexSet.uniform(2)
        with pytest.raises(ValueError):
            Kernel(space, np.array([[0.0, 1.0], [0.5, 0.0]]))
        with pytest.raises(ValueError):
            Kernel(space, np.array([[0.0, -1.0], [-1.0, 0.0]]))

    def test_graph_to_kernel_indicator(self):
        k = graph_to_kernel(complete(3), 1.0)
        assert np.array_equal(k.values, np.ones((3, 3)) - np.eye(3))
        assert abs(k.mean() - 2 / 3) < 1e-15

    def test_graph_to_kernel_scaling(self):
        k = graph_to_kernel(complete(3), 1 / 3)
        assert np.all(k.values[0, 1:] == 3.0)
        assert abs(k.mean() - 2.0) < 1e-12

    def test_graph_to_kernel_edgeless(self):
        k = graph_to_kernel(Graph(4, frozenset()), 0.5)
        assert np.all(k.values == 0)

    def test_graph_to_kernel_domain(self):
        with pytest.raises(ValueError):
            graph_to_kernel(complete(3), 0.0)
        with pytest.raises(ValueError):
            graph_to_kernel(complete(3), 1.5)

    @given(n=st.integers(2, 8), seed=st.integers(1, 10**9))
    @settings(max_examples=40, deadline=None)
    def test_kernel_sum_identity(self, n, seed):
        rng = np.random.default_rng(seed)
        g = random_graph(rng, n, 0.5)
        p = float(rng.uniform(0.1, 1.0))
        k = graph_to_kernel(g, p)
        expect = 2 * g.num_edges / p
        assert math.isclose(float(k.values.sum()), expect, rel_tol=1e-12)


class TestPartition:
    def test_validation(self):
        with pytest.raises(ValueError):
            Partition(3, ((0, 1),))
        with pytest.raises(ValueError):
            Partition(3, ((0, 1), (1, 2)))
        with pytest.raises(ValueError):
            Partition(3, ((0, 1, 2), ()))

    def test_refine_with(self):
        p = Partition.trivial(6)
        q = p.refine_with({0, 1, 2}, {2, 3})
        assert q.num_blocks == 4
        assert q.refines(p) and not p.refines(q)

    def test_refine_drops_empty_cells(self):
        p = Partition.trivial(4)
        q = p.refine_with({0, 1, 2, 3}, set())
        assert q.num_blocks == 1


class TestLayeredGraph:
    def test_rejects_cross_layer_edge(self):
        with pytest.raises(ValueError, match="non-consecutive"):
            LayeredGraph((2, 2, 2, 2, 2), frozenset({(0, 4)}))

    def test_accepts_wraparound(self):
        lg = LayeredGraph((1, 1, 1, 1, 1), frozenset({(0, 4), (0, 1)}))
        assert lg.to_graph().num_edges == 2

    def test_sublabel_balance_enforced(self):
        with pytest.raises(ValueError, match="differ by more than 1"):
            LayeredGraph((10, 10), frozenset(), tuple([0] * 10 + [0] * 9 + [1]))


class TestSplitIntoFive:
    def test_small_part_drops_incident_edges(self):
        g = cycle_graph(10)
        labels, dropped = split_into_five(Partition.trivial(10), g, min_part=100)
        assert dropped == g.edges
        assert len(labels) == 10

    def test_large_part_splits_evenly(self):
        g = Graph(500, frozenset())
        labels, dropped = split_into_five(Partition.trivial(500), g, min_part=100)
        assert dropped == frozenset()
        counts = np.bincount(labels, minlength=5)
        assert np.all(counts == 100)

    def test_class_sizes_within_one_per_part(self):
        rng = np.random.default_rng(5)
        for trial in range(10):
            n = int(rng.integers(3, 40))
            labels_parts = rng.integers(0, 3, size=n)
            part = Partition.from_labels(labels_parts)
            g = random_graph(rng, n, 0.3)
            labels, _ = split_into_five(part, g, min_part=0, seed=trial)
            for blk in part.blocks:
                counts = np.bincount(labels[list(blk)], minlength=5)
                assert counts.max() - counts.min() <= 1

    def test_deterministic_under_seed(self):
        g = cycle_graph(30)
        p = Partition.trivial(30)
        a1, _ = split_into_five(p, g, seed=9)
        a2, _ = split_into_five(p, g, seed=9)
        b, _ = split_into_five(p, g, seed=10)
        assert np.array_equal(a1, a2)
        assert not np.array_equal(a1, b)

    def test_empty_graph(self):
        g = Graph(7, frozenset())
        labels, dropped = split_into_five(Partition.trivial(7), g)
        assert dropped == frozenset() and len(labels) == 7
