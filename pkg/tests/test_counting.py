import itertools
import math

import numpy as np
import pytest

from c5kit.core import BipartiteKernel, Graph, Kernel, LayeredGraph, WeightedVertexSet, graph_to_kernel
from c5kit.counting import (
    CountMismatchError,
    compose,
    count_c5_labeled,
    count_c5_layered,
    count_cycles,
    cycle_product_density,
    greedy_triangle_decomposition,
    hom_cycle,
    hom_density,
    house_c4_count,
    l2sq,
    layered_c4_count,
    layered_c5_count,
    truncate_above,
    enumerate_triangles,
)

from helpers import (
    brute_closed_walks,
    brute_count_cycles,
    brute_degenerate_walks,
    complete,
    cycle_graph,
    house_graph,
    petersen,
    random_graph,
)


class TestCountCycles:
    def test_named_examples(self):
        k22 = Graph.from_edges(4, [(0, 2), (0, 3), (1, 2), (1, 3)])
        assert count_cycles(k22, 4, cross_check=True).count == 1
        assert count_cycles(complete(4), 4, cross_check=True).count == 3
        assert count_cycles(complete(5), 5, cross_check=True).count == 12
        assert count_cycles(petersen(), 5, cross_check=True).count == 12
        assert count_cycles(petersen(), 4, cross_check=True).count == 0

    def test_unsupported_length(self):
        with pytest.raises(ValueError, match="unsupported"):
            count_cycles(complete(4), 6)

    def test_exhaustive_small_graphs(self):
        # every graph on up to 5 vertices, all three patterns, both engines
        pairs = list(itertools.combinations(range(5), 2))
        for mask in range(1 << len(pairs)):
            g = Graph.from_edges(5, [pairs[i] for i in range(len(pairs)) if (mask >> i) & 1])
            for k in (3, 4, 5):
                rep = count_cycles(g, k, cross_check=True)
                assert rep.count == brute_count_cycles(g, k)

    def test_random_medium_graphs(self):
        rng = np.random.default_rng(11)
        for trial in range(60):
            n = int(rng.integers(6, 10))
            g = random_graph(rng, n, float(rng.uniform(0.2, 0.8)))
            for k in (3, 4, 5):
                rep = count_cycles(g, k, cross_check=True)
                assert rep.count == brute_count_cycles(g, k)

    def test_report_serialization(self):
        rep = count_cycles(complete(5), 5)
        payload = rep.to_json()
        assert payload == {"pattern": "c5", "count": 12, "method": "enumeration"}


class TestHomCycle:
    def test_triangle_closed_walk_identity(self):
        for k in range(3, 11):
            assert hom_cycle(complete(3), k) == 2**k + 2 * (-1) ** k

    def test_square(self):
        assert hom_cycle(cycle_graph(4), 4) == 32

    def test_edgeless(self):
        assert hom_cycle(Graph(5, frozenset()), 7) == 0

    def test_against_walk_enumeration(self):
        rng = np.random.default_rng(12)
        for trial in range(15):
            n = int(rng.integers(3, 7))
            g = random_graph(rng, n, 0.5)
            for k in (3, 4, 5):
                assert hom_cycle(g, k) == brute_closed_walks(g, k)

    def test_degenerate_walk_decomposition(self):
        # closed walks = 2k * copies + degenerate walks
        rng = np.random.default_rng(13)
        for trial in range(10):
            n = int(rng.integers(4, 7))
            g = random_graph(rng, n, 0.6)
            for k in (3, 4, 5):
                hom = hom_cycle(g, k)
                copies = count_cycles(g, k).count
                assert hom == 2 * k * copies + brute_degenerate_walks(g, k)

    def test_arbitrary_precision_fallback(self):
        # large k forces the object-dtype path; compare with the eigenvalue
        # identity for complete graphs: (n-1)^k + (n-1)(-1)^k
        g = complete(20)
        k = 40
        assert 20 ** (k - 1) >= 2**62
        assert hom_cycle(g, k) == 19**k + 19

    def test_minimum_length(self):
        with pytest.raises(ValueError):
            hom_cycle(complete(3), 2)


class TestHomDensity:
    def test_constant_one(self):
        f = Kernel(WeightedVertexSet.uniform(4), np.ones((4, 4)))
        for name in ("c3", "c4", "c5", "k22"):
            assert abs(hom_density(name, f) - 1.0) < 1e-12

    def test_constant_c(self):
        f = Kernel(WeightedVertexSet.uniform(3), np.full((3, 3), 0.5))
        assert abs(hom_density("c3", f) - 0.5**3) < 1e-12
        assert abs(hom_density("c5", f) - 0.5**5) < 1e-12
        assert abs(hom_density("k22", f) - 0.5**4) < 1e-12

    def test_triangle_c5_density(self):
        f = graph_to_kernel(complete(3), 1.0)
        assert abs(hom_density("c5", f) - 30 / 3**5) < 1e-12

    def test_matches_hom_counts_on_graphs(self):
        rng = np.random.default_rng(14)
        for trial in range(10):
            n = int(rng.integers(3, 7))
            g = random_graph(rng, n, 0.5)
            f = graph_to_kernel(g, 1.0)
            for k in (3, 4, 5):
                assert abs(hom_density(f"c{k}", f) - hom_cycle(g, k) / n**k) < 1e-12

    def test_unsupported(self):
        f = Kernel(WeightedVertexSet.uniform(2), np.zeros((2, 2)))
        with pytest.raises(ValueError):
            hom_density("c6", f)


class TestCompose:
    def test_constants(self):
        s = WeightedVertexSet.uniform(3)
        a = BipartiteKernel(s, s, np.full((3, 3), 2.0))
        b = BipartiteKernel(s, s, np.full((3, 3), 1.5))
        c = compose(a, b)
        assert np.allclose(c.values, 3.0)

    def test_dimension_mismatch(self):
        a = BipartiteKernel(WeightedVertexSet.uniform(2), WeightedVertexSet.uniform(3), np.zeros((2, 3)))
        b = BipartiteKernel(WeightedVertexSet.uniform(4), WeightedVertexSet.uniform(2), np.zeros((4, 2)))
        with pytest.raises(ValueError, match="inner spaces"):
            compose(a, b)

    def test_c4_density_equals_l2sq_of_self_composition(self):
        rng = np.random.default_rng(15)
        for trial in range(15):
            n = int(rng.integers(2, 13))
            vals = rng.random((n, n))
            vals = (vals + vals.T) / 2
            f = Kernel(WeightedVertexSet.uniform(n), vals)
            bk = BipartiteKernel(f.space, f.space, f.values)
            assert abs(hom_density("c4", f) - l2sq(compose(bk, bk))) < 1e-10

    def test_composition_l2_cauchy_schwarz(self):
        # squared L2 of a composition is at most the geometric mean of the
        # two K22 densities
        rng = np.random.default_rng(16)
        for trial in range(15):
            n0, n1, n2 = (int(x) for x in rng.integers(2, 7, size=3))
            s0, s1, s2 = (WeightedVertexSet.uniform(n) for n in (n0, n1, n2))
            f01 = BipartiteKernel(s0, s1, rng.random((n0, n1)))
            f12 = BipartiteKernel(s1, s2, rng.random((n1, n2)))

            def k22(bk):
                left = bk.left.weights
                right = bk.right.weights
                c = bk.values @ (right[:, None] * bk.values.T)
                return float(left @ (c * c) @ left)

            lhs = l2sq(compose(f01, f12))
            assert lhs <= math.sqrt(k22(f01)) * math.sqrt(k22(f12)) + 1e-10

    def test_truncate(self):
        s = WeightedVertexSet.uniform(2)
        h = BipartiteKernel(s, s, np.array([[0.5, 3.0], [2.0, 1.0]]))
        assert np.array_equal(
            truncate_above(h, 1.9).values, np.array([[0.5, 0.0], [0.0, 1.0]])
        )
        assert np.array_equal(truncate_above(h, np.inf).values, h.values)

    def test_cycle_product_density_closes(self):
        s = WeightedVertexSet.uniform(2)
        ks = [BipartiteKernel(s, s, np.full((2, 2), 1.0)) for _ in range(5)]
        assert abs(cycle_product_density(ks) - 1.0) < 1e-12
        bad = ks[:4] + [BipartiteKernel(s, WeightedVertexSet.uniform(3), np.ones((2, 3)))]
        with pytest.raises(ValueError):
            cycle_product_density(bad)


def random_layered(rng, sizes, p):
    edges = []
    offs = [0]
    for s in sizes:
        offs.append(offs[-1] + s)
    k = len(sizes)
    for layer in range(k):
        nxt = (layer + 1) % k
        for u in range(offs[layer], offs[layer + 1]):
            for v in range(offs[nxt], offs[nxt + 1]):
                if rng.random() < p:
                    edges.append((min(u, v), max(u, v)))
    return LayeredGraph(tuple(sizes), frozenset(edges))


class TestLayeredCounting:
    def test_empty(self):
        lg = LayeredGraph((2, 2, 2, 2, 2), frozenset(), tuple([0, 1] * 5))
        assert count_c5_layered(lg) == 0

    def test_single_matching_cycle(self):
        edges = frozenset({(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)})
        lg = LayeredGraph((1, 1, 1, 1, 1), edges, (0, 1, 2, 3, 4))
        assert count_c5_layered(lg) == 1

    def test_single_mismatched_cycle(self):
        edges = frozenset({(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)})
        lg = LayeredGraph((1, 1, 1, 1, 1), edges, (0, 2, 1, 3, 4))
        assert count_c5_layered(lg) == 0

    def test_labeled_count_against_brute_force(self):
        rng = np.random.default_rng(17)
        for trial in range(25):
            n = int(rng.integers(5, 10))
            g = random_graph(rng, n, 0.5)
            labels = rng.integers(0, 5, size=n)
            got = count_c5_labeled(g, labels)
            want = 0
            for vs in itertools.permutations(range(n), 5):
                if all(labels[vs[r]] == r for r in range(5)) and all(
                    g.has_edge(vs[i], vs[(i + 1) % 5]) for i in range(5)
                ):
                    want += 1
            assert got == want

    def test_labeled_at_most_total(self):
        rng = np.random.default_rng(18)
        for trial in range(15):
            n = int(rng.integers(5, 10))
            g = random_graph(rng, n, 0.5)
            labels = rng.integers(0, 5, size=n)
            assert count_c5_labeled(g, labels) <= count_cycles(g, 5).count

    def test_requires_sublabels_and_five_layers(self):
        lg = LayeredGraph((1, 1, 1, 1, 1), frozenset())
        with pytest.raises(ValueError, match="sublabels"):
            count_c5_layered(lg)
        lg3 = LayeredGraph((1, 1, 1), frozenset(), None)
        with pytest.raises(ValueError, match="five layers"):
            count_c5_layered(LayeredGraph((1, 1, 1, 1), frozenset(), (0, 1, 2, 3)))

    def test_layered_counters_match_generic(self):
        rng = np.random.default_rng(19)
        for trial in range(12):
            sizes = [int(rng.integers(1, 5)) for _ in range(5)]
            lg = random_layered(rng, sizes, float(rng.uniform(0.2, 0.7)))
            g = lg.to_graph()
            assert layered_c5_count(lg) == count_cycles(g, 5, cross_check=True).count
            assert layered_c4_count(lg) == count_cycles(g, 4, cross_check=True).count


class TestHouse:
    def test_bare_square(self):
        assert house_c4_count(cycle_graph(4)) == (1, 0)

    def test_house(self):
        assert house_c4_count(house_graph()) == (1, 1)

    def test_triangle_unions_always_extend(self):
        rng = np.random.default_rng(20)
        checked = 0
        for trial in range(40):
            n = int(rng.integers(5, 9))
            g = random_graph(rng, n, 0.6)
            _, union = greedy_triangle_decomposition(g)
            total, extending = house_c4_count(union)
            assert total == extending
            checked += total
        assert checked > 0


class TestGreedyTriangles:
    def test_single_triangle(self):
        fam, union = greedy_triangle_decomposition(complete(3))
        assert fam == [(0, 1, 2)] and union.num_edges == 3

    def test_triangle_free(self):
        fam, union = greedy_triangle_decomposition(petersen())
        assert fam == [] and union.num_edges == 0

    def test_k5_maximal_family_of_two(self):
        fam, union = greedy_triangle_decomposition(complete(5))
        assert len(fam) == 2

    def test_edge_disjoint_and_maximal(self):
        rng = np.random.default_rng(21)
        for trial in range(20):
            n = int(rng.integers(4, 9))
            g = random_graph(rng, n, 0.6)
            fam, union = greedy_triangle_decomposition(g, seed=trial)
            used = set()
            for a, b, c in fam:
                for e in ((a, b), (a, c), (b, c)):
                    assert e not in used
                    used.add(e)
            assert union.edges == frozenset(used)
            # maximality: no triangle of g has all three edges unused
            for a, b, c in enumerate_triangles(g):
                es = {(a, b), (a, c), (b, c)}
                assert es & used
