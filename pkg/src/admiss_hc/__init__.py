"""Admissible objectives for hierarchical clustering: exact evaluation, checks and oracles."""

from .core import ClusterTree, ElementSet, SimilarityMatrix, lca, matrix_from_entries, restrict, tree_from_splits
from .objective import ObjectiveSpec, cross_max, cross_sum, dasgupta, gamma
from .scaling import MaxScaling, PolyScaling, SumScaling, TableScaling, eval_g

__all__ = [
    "ClusterTree",
    "ElementSet",
    "MaxScaling",
    "ObjectiveSpec",
    "PolyScaling",
    "SimilarityMatrix",
    "SumScaling",
    "TableScaling",
    "cross_max",
    "cross_sum",
    "dasgupta",
    "eval_g",
    "gamma",
    "lca",
    "matrix_from_entries",
    "restrict",
    "tree_from_splits",
]
