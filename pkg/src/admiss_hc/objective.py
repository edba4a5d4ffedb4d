"""Sum-type and max-type cluster-tree objectives."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import ClusterTree, SimilarityMatrix
from .scaling import MaxScaling, Scaling, SumScaling, scaling_from_json, scaling_to_json

KINDS = ("sum", "max")


@dataclass(frozen=True)
class ObjectiveSpec:
    kind: str
    scaling: Scaling

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"objective kind must be one of {KINDS}, got {self.kind!r}")

    @classmethod
    def dasgupta(cls) -> "ObjectiveSpec":
        return cls("sum", SumScaling.dasgupta())

    @classmethod
    def from_json(cls, obj: dict) -> "ObjectiveSpec":
        """``{"kind": ..., coefficients..., "objective": "sum"|"max"}``.

        ``objective`` defaults to ``max`` for max scalings and ``sum`` otherwise.
        """
        scaling = scaling_from_json(obj)
        kind = obj.get("objective", "max" if isinstance(scaling, MaxScaling) else "sum")
        return cls(kind, scaling)

    def to_json(self) -> dict:
        out = scaling_to_json(self.scaling)
        out["objective"] = self.kind
        return out


def _check_disjoint(T: ClusterTree, v: int, w: int):
    if T.leafsets[v] & T.leafsets[w]:
        raise ValueError("cross terms need nodes with disjoint leaf sets")


def _check_match(T: ClusterTree, M: SimilarityMatrix):
    if T.elements != M.elements:
        raise ValueError("tree leaves do not match the matrix elements")


def cross_sum(T: ClusterTree, v: int, w: int, M: SimilarityMatrix) -> Fraction:
    _check_disjoint(T, v, w)
    total = Fraction(0)
    for x in T.leafsets[v]:
        row = M.row(x)
        for y in T.leafsets[w]:
            total += row[y]
    return total


def cross_max(T: ClusterTree, v: int, w: int, M: SimilarityMatrix) -> Fraction:
    _check_disjoint(T, v, w)
    return max(M.row(x)[y] for x in T.leafsets[v] for y in T.leafsets[w])


def gamma(T: ClusterTree, M: SimilarityMatrix, spec: ObjectiveSpec) -> Fraction:
    """Objective value: sum over internal nodes of cross term times g(child sizes)."""
    _check_match(T, M)
    cross = cross_sum if spec.kind == "sum" else cross_max
    g = spec.scaling
    total = Fraction(0)
    for v in T.internal_nodes():
        left, right = T.children[v]
        total += cross(T, left, right, M) * g(len(T.leafsets[left]), len(T.leafsets[right]))
    return total


def dasgupta(T: ClusterTree, M: SimilarityMatrix) -> Fraction:
    _check_match(T, M)
    total = Fraction(0)
    for v in T.internal_nodes():
        left, right = T.children[v]
        total += cross_sum(T, left, right, M) * len(T.leafsets[v])
    return total
