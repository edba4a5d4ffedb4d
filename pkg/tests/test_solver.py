from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from admiss_hc import ElementSet, ObjectiveSpec, SimilarityMatrix, SumScaling, gamma, restrict, tree_from_splits
from admiss_hc.oracle import dp_opt, random_matrix
from admiss_hc.solver import density, exact_cut, exact_sparsest_cut, local_cut, local_search_cut, rsc

from conftest import matrices


def _all_sides(n):
    for k in range(1, n):
        for side in combinations(range(n), k):
            if 0 in side:
                yield side


def test_density_examples(blocks4):
    assert density(SimilarityMatrix.uniform(5), (0, 3)) == 1
    assert density(blocks4, (0, 1)) == 1
    assert density(blocks4, (0,)) == Fraction(4, 3)


def test_density_rejects_improper_sides(blocks4):
    for side in [(), (0, 1, 2, 3), (7,)]:
        with pytest.raises(ValueError):
            density(blocks4, side)


def test_exact_cut_examples(blocks4):
    res = exact_sparsest_cut(blocks4)
    assert res.side == (0, 1) and res.density == 1
    uni = exact_sparsest_cut(SimilarityMatrix.uniform(5))
    assert uni.density == 1 and uni.side == (0,)
    assert exact_sparsest_cut(SimilarityMatrix.uniform(4, 0)).density == 0


def test_exact_cut_size_limit():
    with pytest.raises(ValueError):
        exact_sparsest_cut(SimilarityMatrix.uniform(6), max_n=5)


@given(matrices(2, 9))
def test_exact_cut_is_minimum(M):
    res = exact_sparsest_cut(M)
    assert 0 in res.side
    assert res.density == density(M, res.side)
    best = min(density(M, s) for s in _all_sides(M.n))
    assert res.density == best
    assert res.side == min(s for s in _all_sides(M.n) if density(M, s) == best)


@given(matrices(2, 8), st.fractions(min_value=Fraction(1, 9), max_value=9, max_denominator=9))
def test_exact_cut_scale_equivariance(M, rho):
    a, b = exact_sparsest_cut(M), exact_sparsest_cut(M.scaled(rho))
    assert b.side == a.side
    assert b.density == rho * a.density


def test_local_search_examples(blocks4):
    for seed in range(10):
        assert local_search_cut(blocks4, seed).density == 1
    assert local_search_cut(SimilarityMatrix.uniform(6), 3).density == 1


def test_local_search_never_beats_exact():
    for k in range(100):
        M = random_matrix(2 + k % 9, 500 + k)
        assert local_search_cut(M, k, restarts=4).density >= exact_sparsest_cut(M).density


def test_local_search_deterministic():
    M = random_matrix(9, 11)
    assert local_search_cut(M, 5) == local_search_cut(M, 5)


def test_rsc_single_and_pair():
    M1 = SimilarityMatrix.uniform(1)
    t1 = rsc(M1)
    assert t1.tree.n == 1 and t1.records == ()
    t2 = rsc(SimilarityMatrix.uniform(2))
    assert t2.tree.nested() in ((0, 1), (1, 0)) and len(t2.records) == 1


def test_rsc_block_matrix(blocks4):
    T = rsc(blocks4, exact_cut()).tree
    assert T == tree_from_splits(blocks4.elements, (("0", "1"), ("2", "3")))


@given(matrices(1, 8), st.sampled_from(["exact", "local"]))
def test_rsc_output_is_valid_tree(M, kind):
    cut = exact_cut() if kind == "exact" else local_cut(1, 4)
    trace = rsc(M, cut)
    T = trace.tree
    assert T.elements == M.elements
    assert len(T.internal_nodes()) == M.n - 1
    assert len(trace.records) == M.n - 1
    assert [frozenset(r.cluster) for r in trace.records] == [T.leafsets[v] for v in T.internal_nodes()]


@given(matrices(2, 8))
def test_rsc_splits_are_sparsest(M):
    for rec in rsc(M).records:
        sub = restrict(M, rec.cluster)
        local = [rec.cluster.index(x) for x in rec.side]
        best = min(density(sub, s) for s in _all_sides(sub.n))
        assert rec.density == density(sub, local) == best


@given(matrices(2, 7), st.sampled_from([SumScaling(0, 0, 1), SumScaling(0, 1, 0), SumScaling(1, 0, 0)]))
def test_rsc_never_beats_opt(M, s):
    spec = ObjectiveSpec("sum", s)
    assert gamma(rsc(M).tree, M, spec) >= dp_opt(M, spec).opt_value
