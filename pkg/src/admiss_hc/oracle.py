"""Exhaustive tree enumeration, exact optima and charging-argument diagnostics.

Heavy loops run on a compact encoding: a tree is a tuple of splits
``(left_mask, right_mask)`` in preorder together with parent positions, where
masks are bitsets over element indices. Contributions of each split are cached
per matrix, so scoring a tree is a handful of integer additions.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import lcm
from typing import Iterator, Optional, Sequence

from .core import ClusterTree, ElementSet, SimilarityMatrix
from .gentree import GeneratingCertificate, has_generating_tree
from .objective import ObjectiveSpec
from .scaling import SumScaling, f_step
from .solver import RscTrace

DEFAULT_ENUM_LIMIT = 10
DEFAULT_MINIMIZER_CAP = 10**6
_CACHE_N = 8


def double_factorial_count(n: int) -> int:
    """Number of labeled cluster trees on ``n`` leaves, ``(2n-3)!!``."""
    if n < 1:
        raise ValueError("n must be positive")
    count = 1
    for k in range(3, n + 1):
        count *= 2 * k - 3
    return count


def _insertions(t, k):
    yield (t, k)
    if isinstance(t, tuple):
        for left in _insertions(t[0], k):
            yield (left, t[1])
        for right in _insertions(t[1], k):
            yield (t[0], right)


def nested_trees(n: int) -> Iterator:
    """All labeled trees on ``0..n-1`` as nested tuples, by inserting leaf k into
    every edge (and above the root) of each tree on ``0..k-1``."""
    if n < 1:
        raise ValueError("n must be positive")

    def grow(t, k):
        if k == n:
            yield t
            return
        for t2 in _insertions(t, k):
            yield from grow(t2, k + 1)

    yield from grow(0, 1)


def _encode(t) -> tuple[tuple, tuple]:
    splits: list = []
    parents: list = []

    def walk(x, parent) -> int:
        if not isinstance(x, tuple):
            return 1 << x
        pos = len(splits)
        splits.append(None)
        parents.append(parent)
        left = walk(x[0], pos)
        right = walk(x[1], pos)
        splits[pos] = (left, right) if left < right else (right, left)
        return left | right

    walk(t, -1)
    return tuple(splits), tuple(parents)


def _canonical_nested(x):
    if not isinstance(x, tuple):
        return x, x
    (a, ma), (b, mb) = _canonical_nested(x[0]), _canonical_nested(x[1])
    return ((a, b), ma) if ma < mb else ((b, a), mb)


@lru_cache(maxsize=_CACHE_N + 1)
def _encoded_list(n: int) -> tuple:
    return tuple(_encode(t) for t in nested_trees(n))


def encoded_trees(n: int) -> Iterator[tuple[tuple, tuple]]:
    if n <= _CACHE_N:
        return iter(_encoded_list(n))
    return (_encode(t) for t in nested_trees(n))


def _check_limit(n: int, limit: int):
    if n > limit:
        raise ValueError(f"enumeration limited to n <= {limit}; got {n}")


def enumerate_trees(elements: ElementSet | int, limit: int = DEFAULT_ENUM_LIMIT) -> Iterator[ClusterTree]:
    """Every labeled cluster tree exactly once, children ordered by smallest leaf."""
    if isinstance(elements, int):
        elements = ElementSet.of_size(elements)
    _check_limit(elements.n, limit)
    for t in nested_trees(elements.n):
        yield ClusterTree.from_nested(elements, _canonical_nested(t)[0])


def tree_from_splits_mask(elements: ElementSet, splits: Sequence[tuple[int, int]]) -> ClusterTree:
    """Rebuild a :class:`ClusterTree` from preorder split masks."""
    by_mask = {left | right: (left, right) for left, right in splits}

    def build(mask):
        if mask & (mask - 1) == 0:
            return mask.bit_length() - 1
        left, right = by_mask[mask]
        return (build(left), build(right))

    full = (1 << elements.n) - 1
    return ClusterTree.from_nested(elements, build(full))


def _members(mask: int) -> list[int]:
    out, i = [], 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


class SplitTable:
    """Per-matrix cache of split contributions and forced generating weights."""

    def __init__(self, M: SimilarityMatrix):
        self.M = M
        self._members: dict[int, list[int]] = {}
        self._cross: dict[tuple[int, int], tuple[Fraction, Fraction, Optional[Fraction]]] = {}

    def members(self, mask: int) -> list[int]:
        m = self._members.get(mask)
        if m is None:
            m = self._members[mask] = _members(mask)
        return m

    def cross(self, split: tuple[int, int]):
        """(sum, max, common value or None) over cross pairs of the split."""
        rec = self._cross.get(split)
        if rec is None:
            vals = [self.M.row(x)[y] for x in self.members(split[0]) for y in self.members(split[1])]
            first = vals[0]
            common = first if all(v == first for v in vals) else None
            rec = self._cross[split] = (sum(vals, Fraction(0)), max(vals), common)
        return rec

    def contribution(self, split: tuple[int, int], spec: ObjectiveSpec) -> Fraction:
        s, mx, _ = self.cross(split)
        a, b = self.members(split[0]), self.members(split[1])
        return (s if spec.kind == "sum" else mx) * spec.scaling(len(a), len(b))

    def is_generating(self, splits, parents) -> bool:
        h = []
        for split, parent in zip(splits, parents):
            common = self.cross(split)[2]
            if common is None or (parent >= 0 and h[parent] > common):
                return False
            h.append(common)
        return True


@dataclass
class OptReport:
    opt_value: Fraction
    minimizers: list  # canonical ClusterTrees
    tree_count: int
    overflow: bool = False

    def minimizer_keys(self) -> set:
        return {T.canonical_key() for T in self.minimizers}


def _common_denominator(M: SimilarityMatrix, spec: ObjectiveSpec) -> int:
    """A denominator clearing every split contribution on ``M``."""
    den_m = 1
    for _, _, v in M.pairs():
        den_m = lcm(den_m, v.denominator)
    den_g = 1
    for a in range(1, M.n):
        for b in range(1, M.n - a + 1):
            den_g = lcm(den_g, Fraction(spec.scaling(a, b)).denominator)
    return den_m * den_g


def _as_int(q: Fraction) -> int:
    if q.denominator != 1:
        raise ArithmeticError("common denominator did not clear a contribution")
    return q.numerator


def brute_force_opt(
    M: SimilarityMatrix,
    spec: ObjectiveSpec,
    limit: int = DEFAULT_ENUM_LIMIT,
    cap: int = DEFAULT_MINIMIZER_CAP,
) -> OptReport:
    """Exact minimum of the objective over all trees, with the full argmin set."""
    n = M.n
    _check_limit(n, limit)
    if n == 1:
        return OptReport(Fraction(0), [ClusterTree.from_nested(M.elements, 0)], 1)
    table = SplitTable(M)
    den = _common_denominator(M, spec)
    scaled: dict = {}
    best = None
    best_trees: list = []
    count = 0
    overflow = False
    for splits, _ in encoded_trees(n):
        count += 1
        total = 0
        for sp in splits:
            c = scaled.get(sp)
            if c is None:
                c = scaled[sp] = _as_int(table.contribution(sp, spec) * den)
            total += c
        if best is None or total < best:
            best, best_trees, overflow = total, [splits], False
        elif total == best:
            if len(best_trees) < cap:
                best_trees.append(splits)
            else:
                overflow = True
    trees = [tree_from_splits_mask(M.elements, s).canonical() for s in best_trees]
    return OptReport(Fraction(best, den), trees, count, overflow)


def generating_tree_keys(M: SimilarityMatrix, limit: int = DEFAULT_ENUM_LIMIT) -> set:
    """Canonical keys of every generating tree of ``M`` (by enumeration)."""
    _check_limit(M.n, limit)
    if M.n == 1:
        return {frozenset()}
    table = SplitTable(M)
    return {
        frozenset(l | r for l, r in splits)
        for splits, parents in encoded_trees(M.n)
        if table.is_generating(splits, parents)
    }


@dataclass
class DPResult:
    opt_value: Fraction
    tree: ClusterTree
    minimizer_count: int


def dp_opt(M: SimilarityMatrix, spec: ObjectiveSpec) -> DPResult:
    """Exact optimum by dynamic programming over element subsets.

    Independent of the tree enumeration: the objective splits at the root into
    a root term plus the optima of both sides, so each subset's optimum is a
    minimum over its bipartitions. Also counts the optimal trees.
    """
    n = M.n
    table = SplitTable(M)
    best: dict[int, Fraction] = {}
    count: dict[int, int] = {}
    choice: dict[int, tuple[int, int]] = {}
    for i in range(n):
        best[1 << i] = Fraction(0)
        count[1 << i] = 1
    for mask in sorted(range(1, 1 << n), key=lambda m: bin(m).count("1")):
        if mask & (mask - 1) == 0:
            continue
        low = mask & -mask
        rest = mask ^ low
        value, ways, pick = None, 0, None
        sub = rest
        # left part always contains the lowest element; right part is nonempty
        while True:
            left = sub | low
            right = mask ^ left
            if right:
                sp = (left, right) if left < right else (right, left)
                v = table.contribution(sp, spec) + best[left] + best[right]
                w = count[left] * count[right]
                if value is None or v < value:
                    value, ways, pick = v, w, sp
                elif v == value:
                    ways += w
            if sub == 0:
                break
            sub = (sub - 1) & rest
        best[mask], count[mask], choice[mask] = value, ways, pick

    def build(mask):
        if mask & (mask - 1) == 0:
            return mask.bit_length() - 1
        left, right = choice[mask]
        return (build(left), build(right))

    full = (1 << n) - 1
    return DPResult(best[full], ClusterTree.from_nested(M.elements, build(full)), count[full])


# Instances ------------------------------------------------------------------


def random_tree_nested(n: int, rng: random.Random):
    """Uniform random labeled tree: insert leaf k at one of its 2k-1 positions."""
    t = 0
    for k in range(1, n):
        options = list(_insertions(t, k))
        t = options[rng.randrange(len(options))]
    return t


def random_generating_instance(n: int, seed: int, max_weight: int = 9) -> tuple[SimilarityMatrix, GeneratingCertificate]:
    """Random matrix with a known generating tree.

    Weights start at a root value in ``0..max_weight`` and never decrease toward
    the leaves; ``M(x, y)`` is the weight at ``lca(x, y)``.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    rng = random.Random(seed)
    elements = ElementSet.of_size(n)
    T = ClusterTree.from_nested(elements, random_tree_nested(n, rng))
    h: dict[int, Fraction] = {}
    for v in T.internal_nodes():  # preorder: parents first
        u = T.parent[v]
        low = 0 if u is None else int(h[u])
        h[v] = Fraction(rng.randint(low, max(low, max_weight)))
    rows = [[None] * n for _ in range(n)]
    for v, w in h.items():
        left, right = T.children[v]
        for x in T.leafsets[left]:
            for y in T.leafsets[right]:
                rows[x][y] = rows[y][x] = w
    return SimilarityMatrix(elements, rows), GeneratingCertificate(T, h)


def random_matrix(n: int, seed: int, max_num: int = 9, max_den: int = 3) -> SimilarityMatrix:
    """Fully random nonnegative rational similarities."""
    rng = random.Random(seed)
    return SimilarityMatrix.from_function(
        ElementSet.of_size(n), lambda i, j: Fraction(rng.randint(0, max_num), rng.randint(1, max_den))
    )


def four_block_instance(a: int, b: int, c: int, d: int) -> SimilarityMatrix:
    """Blocks A, B, C, D: 2 inside a block, 1 on A-B and C-D, 0 between A+B and C+D."""
    sizes = (a, b, c, d)
    if min(sizes) < 1:
        raise ValueError("block sizes must be positive")
    block = [k for k, s in enumerate(sizes) for _ in range(s)]

    def value(i, j):
        bi, bj = block[i], block[j]
        if bi == bj:
            return 2
        if {bi, bj} in ({0, 1}, {2, 3}):
            return 1
        return 0

    return SimilarityMatrix.from_function(ElementSet.of_size(len(block)), value)


# Admissibility experiments --------------------------------------------------


@dataclass
class Counterexample:
    index: int
    matrix: SimilarityMatrix
    minimizers: set
    generating: set
    source: str = "battery"


@dataclass
class ExperimentReport:
    spec: ObjectiveSpec
    checked: int = 0
    counterexamples: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.counterexamples


def check_instance(M: SimilarityMatrix, spec: ObjectiveSpec, limit: int = DEFAULT_ENUM_LIMIT) -> tuple[set, set]:
    """(minimizer keys, generating-tree keys) of one instance."""
    if not has_generating_tree(M):
        raise ValueError("instance has no generating tree")
    return brute_force_opt(M, spec, limit).minimizer_keys(), generating_tree_keys(M, limit)


def admissibility_experiment(
    spec: ObjectiveSpec,
    instances: Sequence[SimilarityMatrix],
    limit: int = DEFAULT_ENUM_LIMIT,
    stop_at_first: bool = False,
) -> ExperimentReport:
    report = ExperimentReport(spec)
    for k, M in enumerate(instances):
        mins, gens = check_instance(M, spec, limit)
        report.checked += 1
        if mins != gens:
            report.counterexamples.append(Counterexample(k, M, mins, gens))
            if stop_at_first:
                break
    return report


def generating_battery(count: int, n_min: int, n_max: int, seed: int = 0) -> list[SimilarityMatrix]:
    rng = random.Random(seed)
    out = []
    for k in range(count):
        n = rng.randint(n_min, n_max)
        out.append(random_generating_instance(n, seed * 1_000_003 + k)[0])
    return out


def find_nonadmissibility_witness(
    spec: ObjectiveSpec,
    seed: int = 0,
    count: int = 200,
    n_min: int = 3,
    n_max: int = 7,
    block_sum_max: int = 6,
) -> Optional[Counterexample]:
    """Search the four-block constructions, then a seeded random battery."""
    for total in range(4, block_sum_max + 1):
        for a in range(1, total - 2):
            for b in range(1, total - a - 1):
                for c in range(1, total - a - b):
                    d = total - a - b - c
                    M = four_block_instance(a, b, c, d)
                    mins, gens = check_instance(M, spec)
                    if mins != gens:
                        return Counterexample(-1, M, mins, gens, source=f"four-block({a},{b},{c},{d})")
    report = admissibility_experiment(spec, generating_battery(count, n_min, n_max, seed), stop_at_first=True)
    if report.counterexamples:
        return report.counterexamples[0]
    return None


# Charging diagnostics -------------------------------------------------------


def opt_partition(T_star: ClusterTree, t: int) -> list[frozenset]:
    """Maximal clusters of ``T_star`` with size at most ``max(t, 1)``."""
    n = T_star.n
    if not 0 <= t <= max(n - 1, 0):
        raise ValueError(f"t must be in [0, {n - 1}]")
    cap = max(t, 1)
    out, stack = [], [T_star.root]
    while stack:
        v = stack.pop()
        if len(T_star.leafsets[v]) <= cap:
            out.append(T_star.leafsets[v])
        else:
            stack.extend(T_star.children[v])
    return sorted(out, key=min)


def _separated_weight(M: SimilarityMatrix, blocks: list[frozenset], within: Optional[frozenset] = None) -> Fraction:
    block_of = {}
    for k, b in enumerate(blocks):
        for x in b:
            block_of[x] = k
    total = Fraction(0)
    for x, y, v in M.pairs():
        if block_of[x] != block_of[y] and (within is None or (x in within and y in within)):
            total += v
    return total


@dataclass(frozen=True)
class ChargingProfile:
    partitions: tuple  # OPT(t) for t = 0..n-1
    weights: tuple  # M(E_OPT(t))


def charging_profile(T_star: ClusterTree, M: SimilarityMatrix) -> ChargingProfile:
    if T_star.elements != M.elements:
        raise ValueError("tree does not match the matrix elements")
    parts = tuple(opt_partition(T_star, t) for t in range(M.n))
    return ChargingProfile(parts, tuple(_separated_weight(M, p) for p in parts))


def _require_solver_condition(s: SumScaling):
    if not isinstance(s, SumScaling) or not s.satisfies_solver_condition():
        raise ValueError("charging bounds need a SumScaling with lam, mu >= 0 and lam + 2 mu + nu > 0")


def charging_lower_bound(T_star: ClusterTree, M: SimilarityMatrix, s: SumScaling) -> Fraction:
    """``sum_t M(E_OPT(t)) * f(t)`` over ``t = 0..n-1``."""
    _require_solver_condition(s)
    prof = charging_profile(T_star, M)
    return sum((w * f_step(s, t) for t, w in enumerate(prof.weights)), Fraction(0))


def rsc_charge_sum(trace: RscTrace, T_star: ClusterTree, M: SimilarityMatrix, s: SumScaling) -> Fraction:
    """``sum_A s(A)/|A| * sum_{t=|A|//4}^{|A|//2 - 1} M(E_OPT(t) & A) * f(t)`` over RSC clusters."""
    _require_solver_condition(s)
    if trace.tree.elements != M.elements or T_star.elements != M.elements:
        raise ValueError("trace, optimal tree and matrix must share elements")
    parts = [opt_partition(T_star, t) for t in range(M.n)]
    total = Fraction(0)
    for rec in trace.records:
        size = len(rec.cluster)
        A = frozenset(rec.cluster)
        inner = Fraction(0)
        for t in range(size // 4, size // 2):
            inner += _separated_weight(M, parts[t], A) * f_step(s, t)
        total += Fraction(rec.s, size) * inner
    return total
