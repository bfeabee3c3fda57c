import itertools

import numpy as np
import pytest

from c5kit.core import BipartiteKernel, Kernel, WeightedVertexSet
from c5kit.counting import compose
from c5kit.cutnorm import cut_norm_exact, cut_norm_lower

from helpers import brute_cut_norm, random_weighted_space


def uniform(n):
    return np.full(n, 1.0 / n)


class TestExact:
    def test_zero_kernel(self):
        res = cut_norm_exact(np.zeros((3, 4)), uniform(3), uniform(4))
        assert res.value == 0.0
        assert res.left == () and res.right == ()
        assert res.kind == "exact"

    def test_constant_kernel(self):
        res = cut_norm_exact(np.full((3, 3), 0.7), uniform(3), uniform(3))
        assert abs(res.value - 0.7) < 1e-12
        assert res.left == (0, 1, 2) and res.right == (0, 1, 2)

    def test_two_by_two_signed(self):
        res = cut_norm_exact(np.array([[1.0, -1.0], [-1.0, 1.0]]), uniform(2), uniform(2))
        assert abs(res.value - 0.25) < 1e-12
        assert res.left == (0,) and res.right == (0,)

    def test_against_full_subset_enumeration(self):
        rng = np.random.default_rng(0)
        for trial in range(40):
            n1 = int(rng.integers(1, 5))
            n2 = int(rng.integers(1, 5))
            vals = rng.standard_normal((n1, n2))
            lw = rng.random(n1) + 0.1
            lw /= lw.sum()
            rw = rng.random(n2) + 0.1
            rw /= rw.sum()
            got = cut_norm_exact(vals, lw, rw)
            want = brute_cut_norm(vals, lw, rw)
            assert abs(got.value - want) < 1e-12
            assert abs(got.witness_value(vals, lw, rw) - got.value) < 1e-9

    def test_permutation_invariance(self):
        rng = np.random.default_rng(1)
        vals = rng.standard_normal((6, 6))
        base = cut_norm_exact(vals, uniform(6), uniform(6)).value
        for _ in range(5):
            pr = rng.permutation(6)
            pc = rng.permutation(6)
            permuted = vals[np.ix_(pr, pc)]
            assert abs(cut_norm_exact(permuted, uniform(6), uniform(6)).value - base) < 1e-12

    def test_triangle_inequality(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            a = rng.standard_normal((5, 7))
            b = rng.standard_normal((5, 7))
            na = cut_norm_exact(a, uniform(5), uniform(7)).value
            nb = cut_norm_exact(b, uniform(5), uniform(7)).value
            nab = cut_norm_exact(a + b, uniform(5), uniform(7)).value
            assert nab <= na + nb + 1e-12

    def test_side_limit_enforced(self):
        with pytest.raises(ValueError, match="cut_norm_lower"):
            cut_norm_exact(np.zeros((30, 30)), uniform(30), uniform(30))

    def test_transposes_to_smaller_side(self):
        rng = np.random.default_rng(3)
        vals = rng.standard_normal((3, 30))
        res = cut_norm_exact(vals, uniform(3), uniform(30))
        assert abs(res.witness_value(vals, uniform(3), uniform(30)) - res.value) < 1e-9


class TestHeuristic:
    def test_never_exceeds_exact(self):
        rng = np.random.default_rng(4)
        for trial in range(20):
            vals = rng.standard_normal((8, 8))
            exact = cut_norm_exact(vals, uniform(8), uniform(8)).value
            low = cut_norm_lower(vals, uniform(8), uniform(8), restarts=8, seed=trial)
            assert low.kind == "lower-bound"
            assert low.value <= exact + 1e-12
            assert abs(low.witness_value(vals, uniform(8), uniform(8)) - low.value) < 1e-9

    def test_constant_found_immediately(self):
        res = cut_norm_lower(np.full((5, 5), 0.3), uniform(5), uniform(5), restarts=1, seed=0)
        assert abs(res.value - 0.3) < 1e-12

    def test_within_ten_percent_on_20x20(self):
        rng = np.random.default_rng(7)
        for trial in range(10):
            vals = rng.standard_normal((20, 20))
            exact = cut_norm_exact(vals, uniform(20), uniform(20)).value
            low = cut_norm_lower(vals, uniform(20), uniform(20), restarts=32, seed=trial)
            assert low.value >= 0.9 * exact

    def test_deterministic(self):
        rng = np.random.default_rng(8)
        vals = rng.standard_normal((12, 12))
        a = cut_norm_lower(vals, uniform(12), uniform(12), restarts=16, seed=3)
        b = cut_norm_lower(vals, uniform(12), uniform(12), restarts=16, seed=3)
        assert a == b

    def test_restart_validation(self):
        with pytest.raises(ValueError):
            cut_norm_lower(np.zeros((2, 2)), uniform(2), uniform(2), restarts=0)


class TestKernelLemmas:
    def test_composition_cut_bound(self):
        # cut norm of a composition is at most (row-mean cap) * cut norm
        rng = np.random.default_rng(9)
        for trial in range(25):
            n1, n2, n3 = (int(x) for x in rng.integers(2, 7, size=3))
            s1, s2, s3 = (random_weighted_space(rng, n) for n in (n1, n2, n3))
            f12 = rng.standard_normal((n1, n2))
            f23 = rng.random((n2, n3)) * rng.uniform(0.2, 3.0)
            row_means = f23 @ s3.weights
            cap = float(row_means.max())
            comp = f12 @ (s2.weights[:, None] * f23)
            lhs = cut_norm_exact(comp, s1.weights, s3.weights).value
            rhs = cap * cut_norm_exact(f12, s1.weights, s2.weights).value
            assert lhs <= rhs + 1e-10

    def test_dense_triangle_bound(self):
        # E[f12 f13 f23] <= ||f12||_inf ||f13||_inf ||f23||_cut for f12, f13 >= 0
        rng = np.random.default_rng(10)
        for trial in range(25):
            n1, n2, n3 = (int(x) for x in rng.integers(2, 6, size=3))
            w1, w2, w3 = (uniform(n) for n in (n1, n2, n3))
            f12 = rng.random((n1, n2))
            f13 = rng.random((n1, n3))
            f23 = rng.standard_normal((n2, n3))
            mean = 0.0
            for x1 in range(n1):
                mean += w1[x1] * float(
                    (f12[x1][:, None] * f23 * f13[x1][None, :]).T.sum() / (n2 * n3)
                )
            lhs = abs(mean)
            rhs = f12.max() * f13.max() * cut_norm_exact(f23, w2, w3).value
            assert lhs <= rhs + 1e-10
