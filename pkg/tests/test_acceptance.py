"""Acceptance gate: one test per criterion, summarized at the end of the run."""

import time
from fractions import Fraction

import pytest

from admiss_hc import ElementSet, MaxScaling, ObjectiveSpec, SimilarityMatrix, SumScaling, eval_g, gamma
from admiss_hc.bench import DEFAULT_BATTERY, BenchConfig, run_bench
from admiss_hc.gentree import (
    construct_generating_tree,
    find_triple_violation,
    has_generating_tree,
    to_ultrametric,
    verify_certificate,
)
from admiss_hc.oracle import (
    admissibility_experiment,
    double_factorial_count,
    encoded_trees,
    enumerate_trees,
    find_nonadmissibility_witness,
    generating_battery,
    random_generating_instance,
    random_matrix,
)
from admiss_hc.scaling import f_prime, f_prime_case, quadratic_slice, ratio_bound_probe

BATTERY_SEED = 2024


def _fmt(q: Fraction) -> str:
    return f"{float(q):.6f}"


def test_c01_clique_constancy_sum(record_property):
    start = time.perf_counter()
    triples = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (2, 3, 5)]
    checked = 0
    for n in range(2, 8):
        M = SimilarityMatrix.uniform(n)
        trees = list(enumerate_trees(n))
        assert len(trees) == double_factorial_count(n)
        for lam, mu, nu in triples:
            expected = Fraction(lam, 5) * (n**5 - n) + Fraction(mu, 2) * (n**4 - n) + Fraction(nu, 3) * (n**3 - n)
            spec = ObjectiveSpec("sum", SumScaling(lam, mu, nu))
            for T in trees:
                assert gamma(T, M, spec) == expected
                checked += 1
    elapsed = time.perf_counter() - start
    record_property("detail", f"{checked} tree evaluations, {elapsed:.1f}s")
    assert elapsed < 60


def test_c02_clique_constancy_max(record_property):
    checked = 0
    for n in range(2, 8):
        M = SimilarityMatrix.uniform(n)
        for lam in (1, 2, Fraction(5, 3)):
            spec = ObjectiveSpec("max", MaxScaling(lam))
            expected = Fraction(lam) * (n * n - n) / 2
            for T in enumerate_trees(n):
                assert gamma(T, M, spec) == expected
                checked += 1
    record_property("detail", f"{checked} tree evaluations")


def test_c03_admissibility_set_equality(record_property):
    start = time.perf_counter()
    instances = generating_battery(100, 3, 7, seed=BATTERY_SEED)
    specs = {
        "dasgupta": ObjectiveSpec.dasgupta(),
        "quadratic(1,0)": ObjectiveSpec("sum", SumScaling.degree2(1, 0)),
        "max(1)": ObjectiveSpec("max", MaxScaling(1)),
    }
    bad = {}
    for name, spec in specs.items():
        report = admissibility_experiment(spec, instances)
        assert report.checked == 100
        bad[name] = len(report.counterexamples)
    elapsed = time.perf_counter() - start
    record_property("detail", f"counterexamples {bad}, {elapsed:.1f}s")
    assert all(v == 0 for v in bad.values())
    assert elapsed < 300


def test_c04_nonadmissibility_witness(record_property):
    spec = ObjectiveSpec("sum", SumScaling.degree2(1, -9))
    first = find_nonadmissibility_witness(spec, seed=BATTERY_SEED)
    again = find_nonadmissibility_witness(spec, seed=BATTERY_SEED)
    assert first is not None
    assert first.minimizers != first.generating
    assert has_generating_tree(first.matrix)
    assert again.matrix == first.matrix and again.source == first.source
    record_property(
        "detail",
        f"witness from {first.source}, n={first.matrix.n}, "
        f"{len(first.minimizers)} minimizers vs {len(first.generating)} generating trees",
    )


def test_c05_generating_tree_equivalence(record_property):
    positives = 0
    for k in range(500):
        n = 3 + k % 6
        if k % 2 == 0:
            M = random_generating_instance(n, BATTERY_SEED + k)[0]
        else:
            M = random_matrix(n, BATTERY_SEED + k, max_num=3, max_den=1)
        triple_ok = find_triple_violation(M) is None
        cert = construct_generating_tree(M)
        ultra = to_ultrametric(M)
        assert (cert is not None) == triple_ok == (ultra is not None)
        if cert is not None:
            positives += 1
            assert verify_certificate(cert, M)
            assert ultra.is_ultrametric()
    record_property("detail", f"{positives} of 500 matrices have a generating tree, all certificates verify")
    assert 0 < positives < 500


def _battery_summary():
    cfg = BenchConfig(seed=BATTERY_SEED, count=100, n_min=3, n_max=8, mode="mixed", scalings=DEFAULT_BATTERY)
    return run_bench(cfg)


@pytest.fixture(scope="module")
def battery():
    return _battery_summary()


def test_c06_charging_inequalities(battery, record_property):
    rows = battery.rows
    assert len(rows) == 100 * len(DEFAULT_BATTERY)
    lb_fail = sum(not r.lower_bound_ok for r in rows)
    charge_fail = sum(not r.charge_ok for r in rows)
    record_property("detail", f"{len(rows)} rows, lower-bound failures {lb_fail}, charge-sum failures {charge_fail}")
    assert lb_fail == 0 and charge_fail == 0


def test_c07_slice_extremes(record_property):
    degenerate = 0
    for lam, mu, nu in [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, -2)]:
        s = SumScaling(lam, mu, nu)
        for n in range(2, 201):
            vals = {k: eval_g(s, k, n - k) for k in range(1, n)}
            lo, hi = min(vals.values()), max(vals.values())
            argmin = {k for k, v in vals.items() if v == lo}
            argmax = {k for k, v in vals.items() if v == hi}
            balanced, extreme = {n // 2, (n + 1) // 2}, {1, n - 1}
            if s.lam * n + s.mu == 0:
                degenerate += 1
                assert balanced <= argmin and extreme <= argmax
            else:
                assert argmin == balanced and argmax == extreme
            for k in range(1, n):
                assert quadratic_slice(s, n, k) == vals[k]
    record_property("detail", f"4 x 199 slices, {degenerate} constant (lam n + mu = 0)")


def test_c08_charging_function_bounds(record_property):
    for lam, mu, nu in [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, -2)]:
        s = SumScaling(lam, mu, nu)
        for t in range(2, 2001):
            fp = f_prime(s, t)
            assert fp > 0
            assert f_prime_case(s, t) == fp
    probe = ratio_bound_probe(SumScaling(1, 0, 0), 10**4)
    target = Fraction(256, 21)
    record_property(
        "detail",
        f"ratio at 10^4 = {_fmt(probe.last_ratio)} (256/21 = {_fmt(target)}), "
        f"running max {_fmt(probe.max_ratio)} at t={probe.argmax_t}",
    )
    assert abs(probe.last_ratio - target) <= target / 20


def test_c09_rsc_ratio_report(battery, record_property):
    below = [r for r in battery.rows if r.rsc < r.opt]
    record_property(
        "detail",
        f"RSC/OPT max {_fmt(battery.max_ratio)}, mean {_fmt(battery.mean_ratio)} over {len(battery.ratios)} rows",
    )
    assert not below


def test_c10_enumeration_count(record_property):
    start = time.perf_counter()
    expected = [1, 3, 15, 105, 945, 10395, 135135]
    counts = []
    for n in range(2, 9):
        keys = {frozenset(l | r for l, r in splits) for splits, _ in encoded_trees(n)}
        counts.append(len(keys))
    assert counts == expected
    assert all(counts[i] == (2 * (i + 2) - 3) * counts[i - 1] for i in range(1, len(counts)))
    elapsed = time.perf_counter() - start
    record_property("detail", f"counts {counts}, {elapsed:.1f}s")
    assert elapsed < 60
