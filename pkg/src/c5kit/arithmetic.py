"""Integer-set machinery: equation solution counting, Sidon sets, avoiders.

Counts are exact integers throughout.  Two independent engines are kept:
nested meet-in-the-middle enumeration over partial sums, and integer
convolution of coefficient-dilated indicator polynomials (realized by
Kronecker substitution, so products are single big-integer multiplies).
Cross-check mode runs both and insists they agree.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache

from .core import GraphParseError


@dataclass(frozen=True)
class IntegerSet:
    """Sorted distinct integers inside [1, n]."""

    n: int
    elements: tuple[int, ...]

    def __post_init__(self):
        elems = tuple(sorted(set(int(x) for x in self.elements)))
        if len(elems) != len(self.elements):
            raise ValueError("elements must be distinct")
        if elems and (elems[0] < 1 or elems[-1] > self.n):
            raise ValueError(f"elements must lie in [1, {self.n}]")
        object.__setattr__(self, "elements", elems)

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, x) -> bool:
        return x in set(self.elements)

    def to_json(self) -> dict:
        return {"n": self.n, "elements": list(self.elements)}


def read_integer_set(path, n: int | None = None) -> IntegerSet:
    """Parse the one-integer-per-line format."""
    elems = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                elems.append(int(line))
            except ValueError:
                raise GraphParseError(f"malformed integer at line {lineno}") from None
    bound = n if n is not None else (max(elems) if elems else 1)
    return IntegerSet(bound, tuple(elems))


def write_integer_set(xs: IntegerSet, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for x in xs.elements:
            fh.write(f"{x}\n")


@dataclass(frozen=True)
class EquationSpec:
    """Linear equation sum(a_i x_i) = 0 with its triviality patterns.

    A pattern is a tuple of symbol ids, one per variable; a solution counts
    as trivial when its equality pattern is at least as coarse as some
    listed pattern.  Example: (x, y, y, x, y) is stored as (0, 1, 1, 0, 1).
    """

    coefficients: tuple[int, ...]
    trivial_patterns: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        coeffs = tuple(int(a) for a in self.coefficients)
        if any(a == 0 for a in coeffs):
            raise ValueError("coefficients must be nonzero")
        pats = []
        for pat in self.trivial_patterns:
            if len(pat) != len(coeffs):
                raise ValueError("pattern length must match the variable count")
            pats.append(tuple(int(s) for s in pat))
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "trivial_patterns", tuple(pats))

    @property
    def k(self) -> int:
        return len(self.coefficients)

    def is_translation_invariant(self) -> bool:
        return sum(self.coefficients) == 0

    def to_json(self) -> dict:
        return {
            "coefficients": list(self.coefficients),
            "trivial_patterns": [list(p) for p in self.trivial_patterns],
        }


def sidon_equation() -> EquationSpec:
    """x1 + x2 = x3 + x4; trivial when (x1,x2) equals (x3,x4) or (x4,x3)."""
    return EquationSpec((1, 1, -1, -1), ((0, 1, 0, 1), (0, 1, 1, 0)))


def avoid_equation(a: int, b: int) -> EquationSpec:
    """a x1 + a x2 + b x3 = a x4 + (a+b) x5 with its pattern list.

    The third pattern (y, y, x, x, y) is active only when a equals b.
    """
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be positive")
    patterns = [(0, 1, 1, 0, 1), (0, 1, 0, 1, 0)]
    if a == b:
        patterns.append((0, 0, 1, 1, 0))
    return EquationSpec((a, a, b, -a, -(a + b)), tuple(patterns))


def mean_equation(a1: int, a2: int, a3: int, a4: int) -> EquationSpec:
    """a1 x1 + ... + a4 x4 = (a1+..+a4) x5; trivial only when all equal."""
    if min(a1, a2, a3, a4) <= 0:
        raise ValueError("coefficients must be positive")
    return EquationSpec((a1, a2, a3, a4, -(a1 + a2 + a3 + a4)), ((0, 0, 0, 0, 0),))


def difference_ratio_equation(a: int, b: int) -> EquationSpec:
    """a(x1 - x2) = b(x3 - x4); trivial if both differences vanish, or, when
    a equals b, if (x1, x2) equals (x3, x4)."""
    patterns = [(0, 0, 1, 1)]
    if a == b:
        patterns.append((0, 1, 0, 1))
    return EquationSpec((a, -a, -b, b), tuple(patterns))


# --- counting engines -------------------------------------------------------

_ENGINES = ("enumeration", "convolution")


def _count_meet(coeffs, element_lists) -> int:
    """Meet-in-the-middle: hash partial sums of the first half."""
    k = len(coeffs)
    half = (k + 1) // 2
    left = Counter()
    left[0] = 1
    for a, xs in zip(coeffs[:half], element_lists[:half]):
        nxt: Counter = Counter()
        for s, c in left.items():
            for x in xs:
                nxt[s + a * x] += c
        left = nxt
        if not left:
            return 0
    right = Counter()
    right[0] = 1
    for a, xs in zip(coeffs[half:], element_lists[half:]):
        nxt = Counter()
        for s, c in right.items():
            for x in xs:
                nxt[s + a * x] += c
        right = nxt
        if not right:
            return 0
    small, big = (left, right) if len(left) <= len(right) else (right, left)
    return sum(c * big.get(-s, 0) for s, c in small.items())


def _count_convolution(coeffs, element_lists) -> int:
    """Coefficient of t^0 in the product of dilated indicator polynomials.

    Each factor is packed into one big integer (digits in base 2^B for a B
    exceeding the largest possible coefficient), so the polynomial product
    is exact integer multiplication; negative dilations are reflections
    tracked through an exponent offset.
    """
    sizes = [max(len(xs), 1) for xs in element_lists]
    prod_bound = 1
    for s in sizes:
        prod_bound *= s
    bits = max(prod_bound.bit_length() + 1, 8)
    shift_total = 0
    packed_product = 1
    for a, xs in zip(coeffs, element_lists):
        if not xs:
            return 0
        exps = [a * x for x in xs]
        lo = min(exps)
        shift_total += lo
        packed = 0
        for e in exps:
            packed += 1 << (bits * (e - lo))
        packed_product *= packed
    target = -shift_total
    if target < 0:
        return 0
    return (packed_product >> (bits * target)) & ((1 << bits) - 1)


def _merged_instance(coeffs, element_lists, blocks):
    """Collapse variables inside each block: sum coefficients, intersect sets."""
    merged_coeffs = []
    merged_sets = []
    for block in blocks:
        merged_coeffs.append(sum(coeffs[i] for i in block))
        sets = [set(element_lists[i]) for i in block]
        inter = set.intersection(*sets)
        merged_sets.append(sorted(inter))
    return merged_coeffs, merged_sets


def _count_raw(coeffs, element_lists, engine: str) -> int:
    """Exact solution count allowing zero coefficients (free variables)."""
    free = 1
    kept_c, kept_x = [], []
    for a, xs in zip(coeffs, element_lists):
        if a == 0:
            free *= len(xs)
            if free == 0:
                return 0
        else:
            kept_c.append(a)
            kept_x.append(list(xs))
    if not kept_c:
        return free
    if engine == "enumeration":
        return free * _count_meet(kept_c, kept_x)
    if engine == "convolution":
        return free * _count_convolution(kept_c, kept_x)
    raise ValueError(f"unknown engine {engine!r}")


def _set_partitions(items):
    """All set partitions of a sequence (Bell-number many)."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]
        yield [[first]] + part


def _pattern_blocks(pattern) -> list[list[int]]:
    groups: dict[int, list[int]] = {}
    for pos, sym in enumerate(pattern):
        groups.setdefault(sym, []).append(pos)
    return list(groups.values())


def _join_blocks(block_lists, k) -> list[list[int]]:
    """Finest partition coarser than every input (union-find join)."""
    parent = list(range(k))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for blocks in block_lists:
        for block in blocks:
            for other in block[1:]:
                ra, rb = find(block[0]), find(other)
                if ra != rb:
                    parent[rb] = ra
    groups: dict[int, list[int]] = {}
    for i in range(k):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def count_solutions(
    eq: EquationSpec,
    sets,
    filter: str = "all",
    engine: str = "enumeration",
    cross_check: bool = False,
) -> int:
    """Exact number of solutions to sum(a_i x_i) = 0 with x_i in sets[i].

    Filters: ``all`` counts every tuple; ``nontrivial`` removes tuples
    matching at least one of the equation's triviality patterns (union
    counted by inclusion-exclusion); ``distinct-variables`` keeps only
    tuples with pairwise distinct entries (Moebius inversion over the
    partition lattice).
    """
    if len(sets) != eq.k:
        raise ValueError(f"equation has {eq.k} variables, got {len(sets)} sets")
    element_lists = [list(s.elements if isinstance(s, IntegerSet) else s) for s in sets]
    for pat in eq.trivial_patterns:
        if len(pat) != eq.k:
            raise ValueError("pattern references unknown variables")

    def raw(coeffs, lists) -> int:
        val = _count_raw(coeffs, lists, engine)
        if cross_check:
            other_engine = "convolution" if engine == "enumeration" else "enumeration"
            other = _count_raw(coeffs, lists, other_engine)
            if other != val:
                raise AssertionError(
                    f"solution-count engines disagree: {engine}={val}, "
                    f"{other_engine}={other}"
                )
        return val

    def count_at_least(blocks) -> int:
        mc, ms = _merged_instance(eq.coefficients, element_lists, blocks)
        return raw(mc, ms)

    total = raw(list(eq.coefficients), element_lists)
    if filter == "all":
        return total
    if filter == "nontrivial":
        pattern_blocks = [_pattern_blocks(p) for p in eq.trivial_patterns]
        trivial = 0
        for mask in range(1, 1 << len(pattern_blocks)):
            chosen = [pattern_blocks[i] for i in range(len(pattern_blocks)) if (mask >> i) & 1]
            joined = _join_blocks(chosen, eq.k)
            sign = -1 if bin(mask).count("1") % 2 == 0 else 1
            trivial += sign * count_at_least(joined)
        return total - trivial
    if filter == "distinct-variables":
        result = 0
        for partition in _set_partitions(range(eq.k)):
            mobius = 1
            for block in partition:
                sz = len(block)
                mobius *= (-1) ** (sz - 1) * math.factorial(sz - 1)
            result += mobius * count_at_least(partition)
        return result
    raise ValueError(f"unknown filter {filter!r}")


def count_trivial(eq: EquationSpec, sets, engine: str = "enumeration") -> int:
    """Solutions matching at least one triviality pattern."""
    return count_solutions(eq, sets, "all", engine) - count_solutions(
        eq, sets, "nontrivial", engine
    )


# --- Sidon sets -------------------------------------------------------------


def additive_energy(xs: IntegerSet) -> int:
    """Number of quadruples with x1 + x2 = x3 + x4, exact."""
    sums: Counter = Counter()
    for a in xs.elements:
        for b in xs.elements:
            sums[a + b] += 1
    return sum(c * c for c in sums.values())


def is_sidon(xs: IntegerSet) -> bool:
    """True when the additive energy equals 2|X|^2 - |X| (only trivial quadruples)."""
    m = len(xs)
    return additive_energy(xs) == 2 * m * m - m


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


def erdos_turan_sidon(p: int) -> IntegerSet:
    """The classical p-element Sidon set {2pi + (i^2 mod p)} inside [1, 2p^2].

    Stored 1-based (every element shifted up by one).  The output is
    re-verified with is_sidon before being returned.
    """
    if not _is_prime(p):
        raise ValueError(f"{p} is not prime")
    elems = tuple(2 * p * i + (i * i) % p + 1 for i in range(p))
    out = IntegerSet(2 * p * p, elems)
    if not is_sidon(out):
        raise AssertionError("generator produced a non-Sidon set; this is a bug")
    return out


# --- avoiding-set constructions ---------------------------------------------


def behrend_avoiding(n: int, eq: EquationSpec) -> IntegerSet:
    """Digit-sphere set in [1, n] avoiding a1 x1 + .. + a4 x4 = (sum a) x5
    in distinct variables.

    Digits below theta in base A*(theta-1)+1 keep both sides carry-free, so
    any solution forces the digit vectors to coincide by convexity of the
    Euclidean norm; hence only the all-equal solutions survive, and those
    are not distinct-variable solutions.  For n at most 10^4 the guarantee
    is re-verified by count_solutions.
    """
    if n < 1:
        raise ValueError("n must be positive")
    coeffs = eq.coefficients
    if len(coeffs) != 5 or any(a <= 0 for a in coeffs[:4]) or coeffs[4] != -sum(coeffs[:4]):
        raise ValueError(
            "equation must have positive a1..a4 and right side (a1+a2+a3+a4) x5"
        )
    total = sum(coeffs[:4])
    best: tuple[int, ...] = (1,)
    max_dim = max(1, int(math.log2(n + 1)))
    for digits in range(1, max_dim + 1):
        for theta in range(2, 65):
            base = total * (theta - 1) + 1
            if base**digits > n + 1:
                break
            if theta**digits > 400_000:
                break
            spheres: dict[int, list[int]] = {}
            for vec_id in range(theta**digits):
                rem = vec_id
                norm = 0
                value = 0
                power = 1
                for _ in range(digits):
                    d = rem % theta
                    rem //= theta
                    norm += d * d
                    value += d * power
                    power *= base
                spheres.setdefault(norm, []).append(value + 1)
            candidate = max(spheres.values(), key=len)
            if len(candidate) > len(best):
                best = tuple(sorted(candidate))
    out = IntegerSet(n, best)
    if n <= 10_000:
        if count_solutions(eq, [out] * 5, "distinct-variables") != 0:
            raise AssertionError("sphere construction has a distinct-variable solution; bug")
    return out


def greedy_avoider(n: int, constraints) -> IntegerSet:
    """Scan 1..n, adding an element whenever no constraint gains a solution.

    ``constraints`` is a list of (EquationSpec, filter) pairs.  The final
    set is re-verified against every constraint with count_solutions.
    """
    chosen: list[int] = []
    for candidate in range(1, n + 1):
        trial = IntegerSet(n, tuple(chosen + [candidate]))
        ok = True
        for eq, filt in constraints:
            if count_solutions(eq, [trial] * eq.k, filt) != 0:
                ok = False
                break
        if ok:
            chosen.append(candidate)
    out = IntegerSet(n, tuple(chosen))
    for eq, filt in constraints:
        if count_solutions(eq, [out] * eq.k, filt) != 0:
            raise AssertionError("greedy avoider output violates a constraint; bug")
    return out


def prop17_constraints() -> list[tuple[EquationSpec, str]]:
    """The two requirement families for the unique-5-cycle construction:
    no nontrivial a(x1-x2) = b(x3-x4) for multipliers in {1,2,3,4,10}, and
    no nontrivial x1 + 2 x2 + 3 x3 + 4 x4 = 10 x5."""
    mults = (1, 2, 3, 4, 10)
    cons: list[tuple[EquationSpec, str]] = [
        (difference_ratio_equation(a, b), "nontrivial") for a in mults for b in mults
    ]
    cons.append((mean_equation(1, 2, 3, 4), "nontrivial"))
    return cons
