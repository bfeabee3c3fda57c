"""Weak regularity partitioning for unbounded nonnegative kernels.

The partitioner runs the energy-increment iteration: find a subset pair
witnessing a cut-norm violation of the residual (f - f_P) restricted to
block pairs where f_P <= 1, refine by that pair, and repeat.  The energy
of a partition is the mean of a convex potential (quadratic up to 2,
linear above) applied to the block-averaged kernel; every accepted
refinement raises it by at least eps^2/4, which yields the part and
iteration bounds recorded on the outcome.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Kernel, Partition
from .cutnorm import EXACT_LIMIT, CutNormResult, cut_norm_exact, cut_norm_lower

ENERGY_GAIN_TOL = 1e-12


def potential(x):
    """Convex potential: x^2 on [0, 2], 4x - 4 above; continuous at 2.

    Accepts scalars or arrays; negative input is a domain error.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0):
        raise ValueError("potential is defined for nonnegative input only")
    out = np.where(arr <= 2.0, arr * arr, 4.0 * arr - 4.0)
    if np.isscalar(x) or arr.ndim == 0:
        return float(out)
    return out


def block_averages(f: Kernel, partition: Partition) -> tuple[np.ndarray, np.ndarray]:
    """Measure-weighted block-pair means and the block measures.

    Zero-measure blocks get mean 0 (they are ignored by every consumer).
    """
    if partition.n != f.size:
        raise ValueError("partition does not match the kernel's space")
    w = f.space.weights
    m = partition.num_blocks
    sel = np.zeros((m, f.size))
    for b, blk in enumerate(partition.blocks):
        sel[b, list(blk)] = w[list(blk)]
    masses = sel.sum(axis=1)
    sums = sel @ f.values @ sel.T
    denom = np.outer(masses, masses)
    with np.errstate(invalid="ignore", divide="ignore"):
        means = np.where(denom > 0, sums / denom, 0.0)
    # mirror the upper triangle so the expanded kernel is exactly symmetric
    means = np.triu(means) + np.triu(means, k=1).T
    return means, masses


def average_over(f: Kernel, partition: Partition) -> Kernel:
    """Step-function kernel: constant on block pairs, value = block mean."""
    means, _ = block_averages(f, partition)
    idx = partition.block_index
    vals = means[np.ix_(idx, idx)]
    return Kernel(f.space, vals)


def energy(f: Kernel, partition: Partition) -> float:
    """Mean of the potential applied to the block-averaged kernel.

    Computed at block level, which equals the vertex-level mean exactly.
    """
    means, masses = block_averages(f, partition)
    return float(masses @ potential(means) @ masses)


def defect_check(distribution) -> tuple[float, float]:
    """Both sides of the defect inequality for a discrete distribution.

    Input is a list of (value >= 0, probability) pairs with mean at most 1.
    Returns (lhs, rhs) = (quarter of the squared mean absolute deviation,
    potential-mean minus potential-of-mean); lhs <= rhs always.
    """
    vals = np.array([v for v, _ in distribution], dtype=float)
    probs = np.array([p for _, p in distribution], dtype=float)
    if np.any(vals < 0):
        raise ValueError("values must be nonnegative")
    if np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-9:
        raise ValueError("probabilities must be nonnegative and sum to 1")
    mu = float(vals @ probs)
    if mu > 1.0 + 1e-12:
        raise ValueError("mean must be at most 1")
    lhs = 0.25 * float(np.abs(vals - mu) @ probs) ** 2
    rhs = float(potential(vals) @ probs) - potential(mu)
    return lhs, rhs


@dataclass(frozen=True)
class RegularityOutcome:
    """Partition, residual cut norm, and the audit trail of the iteration."""

    partition: Partition
    residual: CutNormResult
    iterations: int
    energy_trace: tuple[float, ...]
    converged: bool
    epsilon: float
    kernel_mean: float

    @property
    def part_count(self) -> int:
        return self.partition.num_blocks

    def part_bound_log2(self) -> float:
        """log2 of the guaranteed part bound 2^(32 mean / eps^2)."""
        return 32.0 * self.kernel_mean / self.epsilon**2

    def iteration_bound(self) -> float:
        return 16.0 * self.kernel_mean / self.epsilon**2

    def to_json(self) -> dict:
        return {
            "parts": [list(b) for b in self.partition.blocks],
            "part_count": self.part_count,
            "iterations": self.iterations,
            "converged": self.converged,
            "epsilon": self.epsilon,
            "kernel_mean": self.kernel_mean,
            "energy_trace": list(self.energy_trace),
            "residual": self.residual.to_json(),
        }


def _residual_matrix(f: Kernel, partition: Partition) -> np.ndarray:
    means, _ = block_averages(f, partition)
    idx = partition.block_index
    f_p = means[np.ix_(idx, idx)]
    return np.where(f_p <= 1.0, f.values - f_p, 0.0)


def residual_cut_norm(
    f: Kernel,
    partition: Partition,
    exact_limit: int = EXACT_LIMIT,
    restarts: int = 32,
    seed: int = 0,
) -> CutNormResult:
    """Cut norm of (f - f_P) restricted to block pairs with f_P <= 1."""
    h = _residual_matrix(f, partition)
    w = f.space.weights
    if f.size <= exact_limit:
        return cut_norm_exact(h, w, w)
    return cut_norm_lower(h, w, w, restarts=restarts, seed=seed)


def weak_regularity(
    f: Kernel,
    epsilon: float,
    budget: int | None = None,
    restarts: int = 32,
    seed: int = 0,
    exact_limit: int = EXACT_LIMIT,
    max_parts: int | None = None,
) -> RegularityOutcome:
    """Energy-increment partitioner.

    Stops when no subset pair with residual average above epsilon is found
    (exact search certifies that, the heuristic only fails to find one; the
    residual's kind field records which).  Exhausting the refinement budget
    or the part cap stops early with the outcome flagged non-converged.
    """
    if not (epsilon > 0):
        raise ValueError("epsilon must be positive")
    mean_value = f.mean()
    partition = Partition.trivial(f.size)
    trace = [energy(f, partition)]
    iterations = 0
    while True:
        res = residual_cut_norm(
            f, partition, exact_limit=exact_limit, restarts=restarts, seed=seed + iterations
        )
        if res.value <= epsilon:
            return RegularityOutcome(
                partition, res, iterations, tuple(trace), True, epsilon, mean_value
            )
        if budget is not None and iterations >= budget:
            return RegularityOutcome(
                partition, res, iterations, tuple(trace), False, epsilon, mean_value
            )
        refined = partition.refine_with(res.left, res.right)
        if max_parts is not None and refined.num_blocks > max_parts:
            return RegularityOutcome(
                partition, res, iterations, tuple(trace), False, epsilon, mean_value
            )
        gain = energy(f, refined) - trace[-1]
        if gain < epsilon**2 / 4 - ENERGY_GAIN_TOL:
            raise AssertionError(
                f"energy gain {gain} below eps^2/4 = {epsilon**2 / 4}; "
                "this indicates a bug in the violation search"
            )
        partition = refined
        trace.append(trace[-1] + gain)
        iterations += 1


def weak_regularity_scaled(
    f: Kernel, cap: float, delta: float, **kwargs
) -> RegularityOutcome:
    """Partition f/cap at accuracy delta^4.

    On a converged run the returned partition P satisfies
    ``cut_norm((f - f_P) 1_{f_P <= cap}) <= cap * delta^4``, the scaled
    guarantee the removal pipeline consumes.
    """
    if not (cap > 0):
        raise ValueError("cap must be positive")
    return weak_regularity(f.scale(1.0 / cap), delta**4, **kwargs)
