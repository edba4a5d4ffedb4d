"""Generating trees, their weight certificates, and the ultrametric bridge."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Optional

from .core import ClusterTree, ElementSet, SimilarityMatrix, lca


@dataclass(frozen=True)
class GeneratingCertificate:
    tree: ClusterTree
    h: dict  # internal node id -> Fraction


@dataclass(frozen=True)
class Ultrametric:
    elements: ElementSet
    d: tuple  # full table, zero diagonal
    c: Fraction

    def distance(self, i: int, j: int) -> Fraction:
        return self.d[i][j]

    def is_ultrametric(self) -> bool:
        n = self.elements.n
        for i, j in combinations(range(n), 2):
            if self.d[i][j] <= 0 or self.d[i][j] != self.d[j][i]:
                return False
        for x in range(n):
            for y in range(n):
                for z in range(n):
                    if len({x, y, z}) == 3 and self.d[x][z] > max(self.d[x][y], self.d[y][z]):
                        return False
        return True


def find_triple_violation(M: SimilarityMatrix) -> Optional[tuple[int, int, int]]:
    """First distinct ``(x, y, z)`` with ``M(x,z) < min(M(x,y), M(y,z))``, or None."""
    n = M.n
    for x in range(n):
        rx = M.row(x)
        for y in range(n):
            if y == x:
                continue
            ry = M.row(y)
            for z in range(n):
                if z == x or z == y:
                    continue
                if rx[z] < min(rx[y], ry[z]):
                    return x, y, z
    return None


def has_generating_tree(M: SimilarityMatrix) -> bool:
    return find_triple_violation(M) is None


def construct_generating_tree(M: SimilarityMatrix) -> Optional[GeneratingCertificate]:
    """Merge a most-similar pair into a super-element until one remains.

    The super-element inherits the similarities of its first member and takes
    that member's position; its weight is the merged similarity. Ties go to the
    lexicographically smallest pair of current positions.
    """
    if not has_generating_tree(M):
        return None
    n = M.n
    if n == 1:
        return GeneratingCertificate(ClusterTree.from_nested(M.elements, 0), {})
    items: list = list(range(n))  # nested structures
    rows = [list(M.row(i)) for i in range(n)]
    alive = list(range(n))  # current position -> row index
    weight_of_cluster: dict[frozenset, Fraction] = {}
    members = {i: frozenset((i,)) for i in range(n)}

    while len(alive) > 1:
        best, best_pair = None, None
        for p in range(len(alive)):
            rp = rows[alive[p]]
            for q in range(p + 1, len(alive)):
                v = rp[alive[q]]
                if best is None or v > best:
                    best, best_pair = v, (p, q)
        p, q = best_pair
        a, b = alive[p], alive[q]
        items[a] = (items[a], items[b])
        members[a] = members[a] | members[b]
        weight_of_cluster[members[a]] = best
        del alive[q]

    T = ClusterTree.from_nested(M.elements, items[alive[0]])
    h = {T.node_of_cluster(cl): w for cl, w in weight_of_cluster.items()}
    return GeneratingCertificate(T, h)


def verify_certificate(cert: GeneratingCertificate, M: SimilarityMatrix) -> bool:
    T, h = cert.tree, cert.h
    if T.elements != M.elements:
        raise ValueError("certificate tree does not match the matrix elements")
    internal = T.internal_nodes()
    if set(h) != set(internal):
        return False
    for v in internal:
        if h[v] < 0:
            return False
        u = T.parent[v]
        if u is not None and h[u] > h[v]:
            return False
    for x, y, m in M.pairs():
        if h[lca(T, x, y)] != m:
            return False
    return True


def is_generating(T: ClusterTree, M: SimilarityMatrix) -> Optional[dict]:
    """The forced weight map if ``T`` is a generating tree of ``M``, else None."""
    if T.elements != M.elements:
        raise ValueError("tree does not match the matrix elements")
    h = {}
    for v in T.internal_nodes():
        left, right = T.children[v]
        vals = {M.row(x)[y] for x in T.leafsets[left] for y in T.leafsets[right]}
        if len(vals) != 1:
            return None
        h[v] = vals.pop()
        u = T.parent[v]
        if u is not None and h[u] > h[v]:
            return None
    return h


def to_ultrametric(M: SimilarityMatrix) -> Optional[Ultrametric]:
    """``d(x, y) = c - M(x, y)`` with ``c = max M + 1``, if ``M`` passes the triple test."""
    if M.n < 2:
        raise ValueError("need at least two elements")
    if not has_generating_tree(M):
        return None
    c = M.max_value() + 1
    n = M.n
    d = tuple(tuple(Fraction(0) if i == j else c - M.value(i, j) for j in range(n)) for i in range(n))
    return Ultrametric(M.elements, d, c)


def from_ultrametric(U: Ultrametric) -> SimilarityMatrix:
    """Inverse map ``M(x, y) = c - d(x, y)``."""
    return SimilarityMatrix.from_function(U.elements, lambda i, j: U.c - U.d[i][j])
