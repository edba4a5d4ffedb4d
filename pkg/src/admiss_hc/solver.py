"""Cut densities, sparsest-cut subroutines and recursive sparsest cut."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Callable, Iterable, Optional

from .core import ClusterTree, SimilarityMatrix, restrict

DEFAULT_MAX_EXACT_N = 20
DEFAULT_RESTARTS = 32


@dataclass(frozen=True)
class CutResult:
    side: tuple[int, ...]  # the side containing element 0 (lexicographically first)
    density: Fraction
    method: str
    phi_claim: Optional[Fraction] = None

    def other(self, n: int) -> tuple[int, ...]:
        s = set(self.side)
        return tuple(i for i in range(n) if i not in s)


def density(M: SimilarityMatrix, side: Iterable[int]) -> Fraction:
    y = set(side)
    n = M.n
    if not y or len(y) >= n or not y <= set(range(n)):
        raise ValueError("cut side must be a proper nonempty subset")
    rest = [j for j in range(n) if j not in y]
    total = sum((M.row(i)[j] for i in y for j in rest), Fraction(0))
    return total / (len(y) * len(rest))


def _integer_rows(M: SimilarityMatrix) -> tuple[list[list[int]], int]:
    """Similarities scaled to integers by their common denominator."""
    n = M.n
    den = 1
    for _, _, v in M.pairs():
        den = lcm(den, v.denominator)
    rows = [[0 if i == j else int(M.value(i, j) * den) for j in range(n)] for i in range(n)]
    return rows, den


def exact_sparsest_cut(M: SimilarityMatrix, max_n: int = DEFAULT_MAX_EXACT_N) -> CutResult:
    """Minimum-density bipartition by exhaustive search.

    Sides always contain element 0; ties go to the lexicographically smallest
    sorted side. Uses a Gray-code walk so each step updates the cut weight in
    O(n) integer operations.
    """
    n = M.n
    if n < 2:
        raise ValueError("need at least two elements to cut")
    if n > max_n:
        raise ValueError(f"exact sparsest cut limited to n <= {max_n}; got {n}")
    w, den = _integer_rows(M)
    free = n - 1  # elements 1..n-1 are toggled; bit k <-> element k+1
    in_side = [False] * n
    in_side[0] = True
    # to_side[j] = total weight from j to the current side
    to_side = [w[j][0] for j in range(n)]
    cut = sum(w[0][j] for j in range(1, n))
    size = 1
    best = None  # (cut, size, side tuple)

    def consider():
        nonlocal best
        if size == n:
            return
        prod = size * (n - size)
        if best is None:
            best = (cut, prod, tuple(i for i in range(n) if in_side[i]))
            return
        lhs, rhs = cut * best[1], best[0] * prod
        if lhs < rhs:
            best = (cut, prod, tuple(i for i in range(n) if in_side[i]))
        elif lhs == rhs:
            side = tuple(i for i in range(n) if in_side[i])
            if side < best[2]:
                best = (cut, prod, side)

    consider()
    for step in range(1, 1 << free):
        k = (step & -step).bit_length() - 1
        j = k + 1
        row = w[j]
        if in_side[j]:
            # moving j out: edges j-side become cut, edges j-rest stop being cut
            in_side[j] = False
            size -= 1
            rest_weight = sum(row) - to_side[j]
            cut += to_side[j] - rest_weight
            for i in range(n):
                to_side[i] -= row[i]
        else:
            in_side[j] = True
            size += 1
            rest_weight = sum(row) - to_side[j]
            cut += rest_weight - to_side[j]
            for i in range(n):
                to_side[i] += row[i]
        consider()

    cut_w, prod, side = best
    return CutResult(side, Fraction(cut_w, den * prod), "exact", Fraction(1))


def _normalize(side: set[int], n: int) -> tuple[int, ...]:
    if 0 not in side:
        side = set(range(n)) - side
    return tuple(sorted(side))


def local_search_cut(M: SimilarityMatrix, seed: int = 0, restarts: int = DEFAULT_RESTARTS) -> CutResult:
    """Best cut found by first-improvement single-element moves from random starts.

    A heuristic with no approximation guarantee; ``phi_claim`` is left empty.
    """
    n = M.n
    if n < 2:
        raise ValueError("need at least two elements to cut")
    if restarts < 1:
        raise ValueError("restarts must be positive")
    w, den = _integer_rows(M)
    rng = random.Random(seed)
    best = None  # (cut, prod, side)

    def better(c1, p1, s1, c2, p2, s2):
        lhs, rhs = c1 * p2, c2 * p1
        return lhs < rhs or (lhs == rhs and s1 < s2)

    for _ in range(restarts):
        k = rng.randint(1, n - 1)
        side = set(rng.sample(range(n), k))
        cut = sum(w[i][j] for i in side for j in range(n) if j not in side)
        improved = True
        while improved:
            improved = False
            for v in range(n):
                if (v in side and len(side) == 1) or (v not in side and len(side) == n - 1):
                    continue
                to_side = sum(w[v][i] for i in side if i != v)
                to_rest = sum(w[v][i] for i in range(n) if i not in side and i != v)
                if v in side:
                    new_cut, new_size = cut + to_side - to_rest, len(side) - 1
                else:
                    new_cut, new_size = cut + to_rest - to_side, len(side) + 1
                size = len(side)
                if new_cut * size * (n - size) < cut * new_size * (n - new_size):
                    side ^= {v}
                    cut = new_cut
                    improved = True
                    break
        cand = (cut, len(side) * (n - len(side)), _normalize(side, n))
        if best is None or better(*cand, *best):
            best = cand

    cut, prod, side = best
    return CutResult(side, Fraction(cut, den * prod), "local_search", None)


CutFn = Callable[[SimilarityMatrix], CutResult]


def exact_cut(max_n: int = DEFAULT_MAX_EXACT_N) -> CutFn:
    return lambda M: exact_sparsest_cut(M, max_n)


def local_cut(seed: int = 0, restarts: int = DEFAULT_RESTARTS) -> CutFn:
    return lambda M: local_search_cut(M, seed, restarts)


@dataclass(frozen=True)
class SplitRecord:
    cluster: tuple[int, ...]
    side: tuple[int, ...]
    other: tuple[int, ...]
    density: Fraction
    method: str

    @property
    def s(self) -> int:
        return min(len(self.side), len(self.other))


@dataclass(frozen=True)
class RscTrace:
    tree: ClusterTree
    records: tuple[SplitRecord, ...] = field(default=())


def rsc(M: SimilarityMatrix, cut: CutFn | None = None) -> RscTrace:
    """Recursive sparsest cut: split with ``cut``, recurse on both sides.

    Records are listed in preorder of the produced tree and use indices of ``M``.
    """
    cut = cut or exact_cut()
    records: list[SplitRecord] = []

    def build(cluster: tuple[int, ...]):
        if len(cluster) == 1:
            return cluster[0]
        res = cut(restrict(M, cluster))
        side = tuple(cluster[i] for i in res.side)
        chosen = set(side)
        other = tuple(x for x in cluster if x not in chosen)
        if not side or not other:
            raise ValueError("cut subroutine returned an improper bipartition")
        records.append(SplitRecord(cluster, side, other, res.density, res.method))
        return (build(side), build(other))

    nested = build(tuple(range(M.n)))
    return RscTrace(ClusterTree.from_nested(M.elements, nested), tuple(records))
