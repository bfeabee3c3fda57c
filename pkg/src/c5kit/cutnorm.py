"""Cut norms of signed kernels.

The cut norm of f on V1 x V2 is the supremum of |E[f 1_A 1_B]| over vertex
subsets A, B.  On finite spaces it is a maximization over subsets, and for
a fixed A the optimal B is closed-form (keep exactly the columns whose
weighted sum has the right sign), so the exact computation enumerates
subsets of the smaller side only.  Above the exact size limit an
alternating-maximization heuristic produces certified lower bounds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import BipartiteKernel, Kernel, WeightedVertexSet

# 2^EXACT_LIMIT subset enumerations stay under a minute; callers above this
# must use the heuristic, which only certifies lower bounds.
EXACT_LIMIT = 24

WITNESS_TOL = 1e-9

_CHUNK_BITS = 15


@dataclass(frozen=True)
class CutNormResult:
    """Value plus the witnessing subset pair; kind says exact or lower-bound."""

    value: float
    left: tuple[int, ...]
    right: tuple[int, ...]
    kind: str

    def __post_init__(self):
        if self.kind not in ("exact", "lower-bound"):
            raise ValueError("kind must be 'exact' or 'lower-bound'")

    def witness_value(self, values, left_weights, right_weights) -> float:
        """Recompute |E[f 1_A 1_B]| at the stored witness."""
        values = np.asarray(values, dtype=float)
        lw = np.asarray(left_weights, dtype=float)
        rw = np.asarray(right_weights, dtype=float)
        li = list(self.left)
        ri = list(self.right)
        if not li or not ri:
            return 0.0
        sub = values[np.ix_(li, ri)]
        return abs(float(lw[li] @ sub @ rw[ri]))

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "left": list(self.left),
            "right": list(self.right),
            "kind": self.kind,
        }


def _weighted(values, left_weights, right_weights) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    lw = np.asarray(left_weights, dtype=float)
    rw = np.asarray(right_weights, dtype=float)
    if values.shape != (len(lw), len(rw)):
        raise ValueError("values shape does not match the weight vectors")
    return lw[:, None] * values * rw[None, :]


def _bits_of(index: int, n: int) -> tuple[int, ...]:
    return tuple(i for i in range(n) if (index >> i) & 1)


def cut_norm_exact(values, left_weights, right_weights) -> CutNormResult:
    """Exact cut norm by enumerating subsets of the smaller side.

    The enumeration handles signed values; ties prefer the positive
    orientation and then the lexicographically smaller witness index,
    which makes the result deterministic.
    """
    G = _weighted(values, left_weights, right_weights)
    n1, n2 = G.shape
    transposed = False
    if n1 > n2:
        G = G.T
        n1, n2 = n2, n1
        transposed = True
    if n1 > EXACT_LIMIT:
        raise ValueError(
            f"smaller side has {n1} > {EXACT_LIMIT} vertices; use cut_norm_lower"
        )

    best_val = 0.0
    best_index = 0
    best_positive = True
    total = 1 << n1
    chunk = 1 << min(_CHUNK_BITS, n1)
    arange_bits = np.arange(n1, dtype=np.uint64)
    for lo in range(0, total, chunk):
        hi = min(lo + chunk, total)
        idx = np.arange(lo, hi, dtype=np.uint64)
        bits = ((idx[:, None] >> arange_bits[None, :]) & 1).astype(float)
        col_sums = bits @ G
        pos = np.clip(col_sums, 0.0, None).sum(axis=1)
        neg = np.clip(-col_sums, 0.0, None).sum(axis=1)
        # positive orientation checked first so exact ties prefer it
        for arr, positive in ((pos, True), (neg, False)):
            k = int(np.argmax(arr))
            v = float(arr[k])
            if v > best_val:
                best_val = v
                best_index = lo + k
                best_positive = positive

    left_bits = _bits_of(best_index, n1)
    if left_bits:
        col = G[list(left_bits), :].sum(axis=0)
    else:
        col = np.zeros(n2)
    if best_positive:
        right_bits = tuple(int(j) for j in np.nonzero(col > 0)[0])
    else:
        right_bits = tuple(int(j) for j in np.nonzero(col < 0)[0])
    if transposed:
        left_bits, right_bits = right_bits, left_bits
    return CutNormResult(best_val, tuple(left_bits), tuple(right_bits), "exact")


def _alternate(G: np.ndarray, A: np.ndarray, max_rounds: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Batched alternating maximization of a @ G @ b over 0/1 vectors."""
    vals = np.full(A.shape[0], -np.inf)
    B = np.zeros((A.shape[0], G.shape[1]), dtype=bool)
    for _ in range(max_rounds):
        C = A.astype(float) @ G
        B = C > 0
        new_vals = np.where(B, C, 0.0).sum(axis=1)
        R = B.astype(float) @ G.T
        A = R > 0
        if np.all(new_vals <= vals + 1e-15):
            vals = np.maximum(vals, new_vals)
            break
        vals = np.maximum(vals, new_vals)
    # one final sweep so (A, B, value) is a consistent fixpoint triple
    C = A.astype(float) @ G
    B = C > 0
    vals = np.where(B, C, 0.0).sum(axis=1)
    return A, B, vals


def cut_norm_lower(
    values,
    left_weights,
    right_weights,
    restarts: int = 32,
    seed: int = 0,
    max_rounds: int = 100,
) -> CutNormResult:
    """Alternating-maximization lower bound from seeded random starts.

    Every reported value is attained by the returned witness, so it never
    exceeds the exact cut norm.  Restart results merge by value with a
    deterministic tie-break (lexicographically smallest witness).
    """
    if restarts < 1:
        raise ValueError("restarts must be at least 1")
    G = _weighted(values, left_weights, right_weights)
    n1, n2 = G.shape
    rng = np.random.default_rng(seed)
    starts = rng.random((restarts, n1)) < 0.5
    starts[0] = True  # deterministic all-ones start catches constant kernels

    candidates: list[tuple[float, tuple[int, ...], tuple[int, ...]]] = []
    for sign in (1.0, -1.0):
        A, B, vals = _alternate(sign * G, starts.copy(), max_rounds)
        for r in range(restarts):
            left = tuple(int(i) for i in np.nonzero(A[r])[0])
            right = tuple(int(j) for j in np.nonzero(B[r])[0])
            candidates.append((float(vals[r]), left, right))

    best_value = max(c[0] for c in candidates)
    top = [c for c in candidates if c[0] == best_value]
    value, left, right = min(top, key=lambda c: (c[1], c[2]))
    return CutNormResult(max(value, 0.0), left, right, "lower-bound")


def cut_norm_auto(
    values, left_weights, right_weights, restarts: int = 32, seed: int = 0
) -> CutNormResult:
    """Exact when the smaller side fits the enumeration budget, else heuristic."""
    shape = np.asarray(values).shape
    if min(shape) <= EXACT_LIMIT:
        return cut_norm_exact(values, left_weights, right_weights)
    return cut_norm_lower(values, left_weights, right_weights, restarts=restarts, seed=seed)


def kernel_cut_norm(kernel, exact: bool = True, **kwargs) -> CutNormResult:
    """Cut norm of a Kernel or BipartiteKernel (nonnegative entries)."""
    if isinstance(kernel, Kernel):
        w = kernel.space.weights
        fn = cut_norm_exact if exact else cut_norm_lower
        return fn(kernel.values, w, w, **kwargs)
    if isinstance(kernel, BipartiteKernel):
        fn = cut_norm_exact if exact else cut_norm_lower
        return fn(kernel.values, kernel.left.weights, kernel.right.weights, **kwargs)
    raise TypeError("expected Kernel or BipartiteKernel")


def kernel_difference(a, b) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Signed difference of two kernels on the same space(s), with weights."""
    if isinstance(a, Kernel) and isinstance(b, Kernel):
        if not a.space.same_space(b.space):
            raise ValueError("kernels live on different spaces")
        return a.values - b.values, a.space.weights, a.space.weights
    if isinstance(a, BipartiteKernel) and isinstance(b, BipartiteKernel):
        if not (a.left.same_space(b.left) and a.right.same_space(b.right)):
            raise ValueError("kernels live on different spaces")
        return a.values - b.values, a.left.weights, a.right.weights
    raise TypeError("mismatched kernel types")


def _space_of_weights(w) -> WeightedVertexSet:
    return WeightedVertexSet(np.asarray(w, dtype=float))
