import random
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from admiss_hc import ElementSet, MaxScaling, ObjectiveSpec, SimilarityMatrix, SumScaling, gamma, tree_from_splits
from admiss_hc.gentree import has_generating_tree, is_generating, verify_certificate
from admiss_hc.oracle import (
    admissibility_experiment,
    brute_force_opt,
    charging_lower_bound,
    charging_profile,
    double_factorial_count,
    dp_opt,
    enumerate_trees,
    find_nonadmissibility_witness,
    four_block_instance,
    generating_battery,
    generating_tree_keys,
    nested_trees,
    opt_partition,
    random_generating_instance,
    random_matrix,
    rsc_charge_sum,
)
from admiss_hc.solver import rsc

from conftest import matrices

DASGUPTA = ObjectiveSpec.dasgupta()
QUAD = ObjectiveSpec("sum", SumScaling(0, 1, 0))
MAX1 = ObjectiveSpec("max", MaxScaling(1))


def _shape(x):
    if not isinstance(x, tuple):
        return ()
    return tuple(sorted((_shape(x[0]), _shape(x[1]))))


@pytest.mark.parametrize("n,count", [(1, 1), (2, 1), (3, 3), (4, 15), (5, 105), (6, 945), (7, 10395), (8, 135135)])
def test_enumeration_counts(n, count):
    assert double_factorial_count(n) == count
    trees = list(enumerate_trees(n))
    assert len(trees) == count
    assert len(set(trees)) == count


def test_count_at_nine():
    assert sum(1 for _ in nested_trees(9)) == 2027025 == double_factorial_count(9)


def test_five_leaf_shapes():
    assert len({_shape(T.nested()) for T in enumerate_trees(5)}) == 3


def test_enumeration_limit():
    with pytest.raises(ValueError):
        next(enumerate_trees(11))


def test_opt_uniform_all_trees_optimal():
    rep = brute_force_opt(SimilarityMatrix.uniform(5), QUAD)
    assert len(rep.minimizers) == 105 and rep.tree_count == 105


def test_opt_three_element_example(xyz):
    rep = brute_force_opt(xyz, DASGUPTA)
    assert rep.minimizers == [tree_from_splits(xyz.elements, (("x", "z"), "y"))]
    # ((x,z),y): 2*2 + (1+1)*3
    assert rep.opt_value == 10
    values = sorted(gamma(T, xyz, DASGUPTA) for T in enumerate_trees(xyz.elements))
    assert values == [10, 11, 11]


def test_opt_pair():
    M = SimilarityMatrix.uniform(2, Fraction(3, 2))
    rep = brute_force_opt(M, QUAD)
    assert rep.opt_value == QUAD.scaling(1, 1) * Fraction(3, 2)
    assert len(rep.minimizers) == 1


def test_minimizer_cap_sets_overflow():
    rep = brute_force_opt(SimilarityMatrix.uniform(5), DASGUPTA, cap=10)
    assert rep.overflow and len(rep.minimizers) == 10


@settings(max_examples=25)
@given(matrices(2, 7), st.sampled_from([DASGUPTA, QUAD, MAX1, ObjectiveSpec("sum", SumScaling(1, "1/3", -2))]))
def test_brute_force_agrees_with_dp(M, spec):
    bf, dp = brute_force_opt(M, spec), dp_opt(M, spec)
    assert bf.opt_value == dp.opt_value
    assert len(bf.minimizers) == dp.minimizer_count
    assert gamma(dp.tree, M, spec) == dp.opt_value
    assert dp.tree in bf.minimizers
    assert all(gamma(T, M, spec) == bf.opt_value for T in bf.minimizers)


def test_generating_keys_match_is_generating():
    for seed in range(10):
        M = random_matrix(5, seed, max_num=2, max_den=1)
        brute = {T.canonical_key() for T in enumerate_trees(5) if is_generating(T, M) is not None}
        assert generating_tree_keys(M) == brute


def test_random_generating_instance_properties():
    for seed in range(40):
        M, cert = random_generating_instance(2 + seed % 8, seed)
        assert verify_certificate(cert, M)
        assert has_generating_tree(M)
    assert random_generating_instance(6, 3)[0] == random_generating_instance(6, 3)[0]
    assert random_generating_instance(6, 3)[0] != random_generating_instance(6, 4)[0]


def test_four_block_instance():
    M = four_block_instance(1, 2, 1, 1)
    assert M.n == 5
    assert M.value(1, 2) == 2 and M.value(0, 1) == 1 and M.value(0, 3) == 0 and M.value(3, 4) == 1
    assert has_generating_tree(M)


@pytest.mark.parametrize("spec", [DASGUPTA, MAX1], ids=["dasgupta", "max"])
def test_admissible_specs_have_no_counterexamples(spec):
    report = admissibility_experiment(spec, generating_battery(100, 3, 7, seed=1))
    assert report.checked == 100 and report.ok


def test_non_admissible_spec_has_counterexample():
    spec = ObjectiveSpec("sum", SumScaling.degree2(1, -9))
    ce = find_nonadmissibility_witness(spec)
    assert ce is not None and ce.minimizers != ce.generating
    # the battery alone also finds one
    report = admissibility_experiment(spec, generating_battery(100, 3, 7, seed=0), stop_at_first=True)
    assert not report.ok


def test_opt_partition_examples():
    T = tree_from_splits(list("abcd"), (("a", "b"), ("c", "d")))
    assert opt_partition(T, 3) == [frozenset({0, 1}), frozenset({2, 3})]
    assert opt_partition(T, 2) == [frozenset({0, 1}), frozenset({2, 3})]
    singles = [frozenset({i}) for i in range(4)]
    assert opt_partition(T, 1) == singles == opt_partition(T, 0)
    C = tree_from_splits(list("abcde"), ((((("a", "b"), "c"), "d"), "e")))
    assert opt_partition(C, 4) == [frozenset({0, 1, 2, 3}), frozenset({4})]


def test_charging_examples():
    dasg = SumScaling(0, 0, 1)
    M4 = SimilarityMatrix.uniform(4)
    T4 = dp_opt(M4, DASGUPTA).tree
    from admiss_hc.scaling import clique_value_sum

    assert charging_lower_bound(T4, M4, dasg) <= clique_value_sum(dasg, 4)
    s = SumScaling(1, 2, 3)
    M2 = SimilarityMatrix.uniform(2, Fraction(5, 2))
    T2 = dp_opt(M2, ObjectiveSpec("sum", s)).tree
    assert charging_lower_bound(T2, M2, s) == Fraction(5, 2) * s(1, 1)
    # n=2: one cluster, t ranges over {0}; s(A)/|A| = 1/2
    assert rsc_charge_sum(rsc(M2), T2, M2, s) == Fraction(1, 2) * Fraction(5, 2) * s(0, 1)
    Z = SimilarityMatrix.uniform(5, 0)
    TZ = dp_opt(Z, DASGUPTA).tree
    assert charging_lower_bound(TZ, Z, dasg) == 0
    assert rsc_charge_sum(rsc(Z), TZ, Z, dasg) == 0


def test_charging_rejects_bad_scaling():
    M = SimilarityMatrix.uniform(3)
    T = dp_opt(M, DASGUPTA).tree
    with pytest.raises(ValueError):
        charging_lower_bound(T, M, SumScaling(0, 0, -1))


def test_charge_sum_bounded_on_generating_instances():
    s = SumScaling(0, 1, 0)
    spec = ObjectiveSpec("sum", s)
    for seed in range(20):
        M = random_generating_instance(3 + seed % 6, seed)[0]
        T = dp_opt(M, spec).tree
        assert rsc_charge_sum(rsc(M), T, M, s) <= 2 * charging_lower_bound(T, M, s)


@settings(max_examples=30)
@given(matrices(2, 7), st.sampled_from([SumScaling(1, 0, 0), SumScaling(0, 1, 0), SumScaling(0, 0, 1), SumScaling(1, 1, -2)]))
def test_charging_inequalities(M, s):
    spec = ObjectiveSpec("sum", s)
    best = dp_opt(M, spec)
    lb = charging_lower_bound(best.tree, M, s)
    assert lb <= best.opt_value
    assert rsc_charge_sum(rsc(M), best.tree, M, s) <= 2 * lb


@settings(max_examples=30)
@given(matrices(2, 7))
def test_separated_weight_nonincreasing(M):
    T = dp_opt(M, QUAD).tree
    w = charging_profile(T, M).weights
    assert all(w[t] >= w[t + 1] for t in range(len(w) - 1))
