"""Numerical verifiers for the 5-cycle counting inequality.

Instances carry five spaces, a cycle of nonnegative kernels f together
with [0,1]-valued comparison kernels g, and the two measured hypothesis
quantities: eps (fourth root of the largest exact cut-norm deviation) and
C (largest squared L2 norm of a consecutive composition, floored at 1).
Back-computing eps from the measured deviations makes every instance
satisfy the hypotheses tightly, which is the hardest stress of the
conclusion's constant.  Everything uses exact cut norms, so instance
sides are capped at 14 points.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import BipartiteKernel, WeightedVertexSet
from .counting import cycle_product_density
from .cutnorm import cut_norm_exact

MARGIN_TOL = 1e-9
MAX_SIDE = 14


class CertificateError(AssertionError):
    """A verified inequality failed; indicates an implementation bug."""


def _compose_vals(a_vals, mid_weights, b_vals) -> np.ndarray:
    return a_vals @ (mid_weights[:, None] * b_vals)


@dataclass(frozen=True)
class CountingLemmaInstance:
    """Five spaces plus the f/g kernel cycle and the measured eps and C.

    f[i] and g[i] live on spaces[i] x spaces[(i+1) % 5]; g is [0,1]-valued.
    Construction recomputes the hypothesis quantities with exact cut norms
    and stores them, so holding an instance means the hypotheses hold.
    """

    spaces: tuple[WeightedVertexSet, ...]
    f: tuple[BipartiteKernel, ...]
    g: tuple[BipartiteKernel, ...]
    epsilon: float = 0.0
    c_bound: float = 1.0

    def __post_init__(self):
        if len(self.spaces) != 5 or len(self.f) != 5 or len(self.g) != 5:
            raise ValueError("need five spaces and five kernel pairs")
        for i in range(5):
            if self.spaces[i].size > MAX_SIDE:
                raise ValueError(
                    f"side {i} has {self.spaces[i].size} > {MAX_SIDE} points; "
                    "exact cut norms are required for certificates"
                )
            nxt = (i + 1) % 5
            for k in (self.f[i], self.g[i]):
                if not (
                    k.left.same_space(self.spaces[i]) and k.right.same_space(self.spaces[nxt])
                ):
                    raise ValueError(f"kernel {i} does not live on spaces {i} x {nxt}")
            if np.any(self.g[i].values > 1.0):
                raise ValueError("g kernels must take values in [0, 1]")
        deviations = [
            cut_norm_exact(
                self.f[i].values - self.g[i].values,
                self.spaces[i].weights,
                self.spaces[(i + 1) % 5].weights,
            ).value
            for i in range(5)
        ]
        eps = max(deviations) ** 0.25
        comps = []
        for i in range(5):
            prev = (i - 1) % 5
            comp = _compose_vals(
                self.f[prev].values, self.spaces[i].weights, self.f[i].values
            )
            l2 = float(
                self.spaces[prev].weights
                @ (comp * comp)
                @ self.spaces[(i + 1) % 5].weights
            )
            comps.append(l2)
        c_bound = max(1.0, max(comps))
        object.__setattr__(self, "epsilon", float(eps))
        object.__setattr__(self, "c_bound", float(c_bound))
        if eps >= 1.0:
            raise ValueError("measured eps must be below 1; regenerate with less noise")

    def f_pair(self, i: int, j: int) -> np.ndarray:
        """Values of f on the ordered adjacent pair (i, j)."""
        if (j - i) % 5 == 1:
            return self.f[i].values
        if (i - j) % 5 == 1:
            return self.f[j].values.T
        raise ValueError(f"({i}, {j}) is not an adjacent pair")

    def g_pair(self, i: int, j: int) -> np.ndarray:
        if (j - i) % 5 == 1:
            return self.g[i].values
        if (i - j) % 5 == 1:
            return self.g[j].values.T
        raise ValueError(f"({i}, {j}) is not an adjacent pair")

    def weights(self, i: int) -> np.ndarray:
        return self.spaces[i % 5].weights


def counting_lemma_rhs(instance: CountingLemmaInstance, epsilon: float | None = None) -> float:
    """Guaranteed lower bound for the f-cycle mean at a given accuracy."""
    eps = instance.epsilon if epsilon is None else epsilon
    g_mean = cycle_product_density(instance.g)
    return g_mean - 11.0 * instance.c_bound * eps


def verify_counting_lemma(instance: CountingLemmaInstance) -> tuple[float, float, float]:
    """lhs, rhs, and margin of the conclusion; raises if the margin dips
    below -1e-9, which would indicate a bug somewhere in the toolkit."""
    lhs = cycle_product_density(instance.f)
    rhs = counting_lemma_rhs(instance)
    margin = lhs - rhs
    if margin < -MARGIN_TOL:
        raise CertificateError(
            f"counting inequality violated: lhs={lhs}, rhs={rhs}, margin={margin}"
        )
    return lhs, rhs, margin


def _heavy_row_mask(vals: np.ndarray, right_weights: np.ndarray, cap: float) -> np.ndarray:
    row_means = vals @ right_weights
    return row_means <= cap


def verify_truncation_chain(instance: CountingLemmaInstance) -> dict:
    """Check every intermediate inequality of the counting argument.

    Covers, for each ordered adjacent pair: the heavy-row measure bound
    and the masked-kernel cut-norm bound; for each consecutive triple:
    the composition bounds before and after truncation at both heights.
    Raises CertificateError if any slack is below -1e-9; returns the
    per-step report either way it passes.
    """
    eps = instance.epsilon
    c = instance.c_bound
    inv2 = np.inf if eps == 0 else eps**-2
    inv1 = np.inf if eps == 0 else eps**-1
    report: dict[str, dict] = {}
    failures: list[str] = []

    def record(name: str, value: float, bound: float):
        slack = bound - value
        report[name] = {"value": value, "bound": bound, "slack": slack}
        if slack < -MARGIN_TOL:
            failures.append(name)

    pairs = [(i, (i + 1) % 5) for i in range(5)] + [((i + 1) % 5, i) for i in range(5)]
    masks = {}
    primed = {}
    for i, j in pairs:
        vals = instance.f_pair(i, j)
        wl, wr = instance.weights(i), instance.weights(j)
        mask = _heavy_row_mask(vals, wr, inv2)
        masks[(i, j)] = mask
        primed[(i, j)] = vals * mask[:, None]
        record(f"heavy_row_measure_{i}{j}", float(wl[~mask].sum()), 2 * eps**2)
        dev = cut_norm_exact(primed[(i, j)] - instance.g_pair(i, j), wl, wr).value
        record(f"masked_deviation_cut_{i}{j}", dev, 3 * eps**2)

    triples = []
    for j in range(5):
        for step in (1, -1):
            i = (j - step) % 5
            k = (j + step) % 5
            triples.append((i, j, k))
    for i, j, k in triples:
        wl, wm, wr = instance.weights(i), instance.weights(j), instance.weights(k)
        f_ij = instance.f_pair(i, j)
        g_ij = instance.g_pair(i, j)
        fp_jk = primed[(j, k)]
        g_jk = instance.g_pair(j, k)
        tag = f"{i}{j}{k}"
        comp_dev = _compose_vals(f_ij - g_ij, wm, fp_jk)
        record(f"deviation_compose_cut_{tag}", cut_norm_exact(comp_dev, wl, wr).value, eps**2)
        comp_gdev = _compose_vals(g_ij, wm, fp_jk - g_jk)
        record(f"g_compose_deviation_cut_{tag}", cut_norm_exact(comp_gdev, wl, wr).value, 3 * eps**2)
        full = _compose_vals(f_ij, wm, fp_jk)
        gg = _compose_vals(g_ij, wm, g_jk)
        record(f"compose_difference_cut_{tag}", cut_norm_exact(full - gg, wl, wr).value, 4 * eps**2)
        trunc1 = np.where(full > inv1, 0.0, full)
        record(f"truncated_e1_cut_{tag}", cut_norm_exact(trunc1 - gg, wl, wr).value, 5 * c * eps)
        trunc2 = np.where(full > inv2, 0.0, full)
        record(
            f"truncated_e2_cut_{tag}", cut_norm_exact(trunc2 - gg, wl, wr).value, 5 * c * eps**2
        )

    if failures:
        raise CertificateError(f"chain inequalities failed: {failures}")
    return report


# --- instance generators ------------------------------------------------------


def _random_space(rng: np.random.Generator, size: int, weighted: bool) -> WeightedVertexSet:
    if not weighted:
        return WeightedVertexSet.uniform(size)
    w = rng.random(size) + 0.2
    return WeightedVertexSet(w / w.sum())


def random_counting_instance(
    seed: int,
    max_points: int = 10,
    style: str = "perturbed",
) -> CountingLemmaInstance:
    """Seeded random instance satisfying the hypotheses tightly.

    Styles: ``perturbed`` adds independent clipped noise to a random
    [0,1]-valued g; ``averaged`` builds a blocky g and lets f fluctuate
    around it inside the blocks (the shape regularity partitions produce).
    """
    rng = np.random.default_rng(seed)
    weighted = bool(rng.integers(0, 2)) if style == "perturbed" else False
    sizes = [int(rng.integers(3, max_points + 1)) for _ in range(5)]
    spaces = tuple(_random_space(rng, s, weighted) for s in sizes)
    fs, gs = [], []
    for i in range(5):
        nl, nr = sizes[i], sizes[(i + 1) % 5]
        if style == "perturbed":
            g_vals = rng.random((nl, nr))
            noise = 0.25 * (rng.random((nl, nr)) - 0.5)
            f_vals = np.clip(g_vals + noise, 0.0, None)
        elif style == "averaged":
            bl = int(rng.integers(1, max(2, nl // 2 + 1)))
            br = int(rng.integers(1, max(2, nr // 2 + 1)))
            row_lab = rng.integers(0, bl, size=nl)
            col_lab = rng.integers(0, br, size=nr)
            means = rng.random((bl, br))
            g_vals = means[np.ix_(row_lab, col_lab)]
            jitter = 0.3 * (rng.random((nl, nr)) - 0.5)
            f_vals = np.clip(g_vals + jitter, 0.0, None)
        else:
            raise ValueError(f"unknown style {style!r}")
        fs.append(BipartiteKernel(spaces[i], spaces[(i + 1) % 5], f_vals))
        gs.append(BipartiteKernel(spaces[i], spaces[(i + 1) % 5], np.clip(g_vals, 0.0, 1.0)))
    return CountingLemmaInstance(spaces, tuple(fs), tuple(gs))


def identical_instance(seed: int, max_points: int = 10) -> CountingLemmaInstance:
    """f equal to g everywhere: measured eps is 0 and the margin collapses."""
    inst = random_counting_instance(seed, max_points)
    return CountingLemmaInstance(inst.spaces, inst.g, inst.g)


def run_counting_suite(
    instances: int, seed: int, max_points: int = 10, chain: bool = True
) -> dict:
    """Verify many random instances; returns a summary report."""
    margins = []
    chain_min_slack = np.inf
    for k in range(instances):
        style = "perturbed" if k % 2 == 0 else "averaged"
        inst = random_counting_instance(seed * 1_000_003 + k, max_points, style)
        lhs, rhs, margin = verify_counting_lemma(inst)
        margins.append(margin)
        if chain:
            rep = verify_truncation_chain(inst)
            chain_min_slack = min(
                chain_min_slack, min(step["slack"] for step in rep.values())
            )
    return {
        "instances": instances,
        "violations": 0,
        "min_margin": float(min(margins)) if margins else None,
        "chain_min_slack": None if not chain else float(chain_min_slack),
    }
