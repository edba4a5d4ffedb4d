from fractions import Fraction

import pytest
from hypothesis import settings, strategies as st

from admiss_hc import ElementSet, SimilarityMatrix, matrix_from_entries
from admiss_hc.core import ClusterTree
from admiss_hc.oracle import random_tree_nested

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

rationals = st.fractions(min_value=0, max_value=20, max_denominator=6)
signed = st.fractions(min_value=-20, max_value=20, max_denominator=6)


@st.composite
def matrices(draw, n_min=2, n_max=7):
    n = draw(st.integers(n_min, n_max))
    vals = draw(st.lists(rationals, min_size=n * (n - 1) // 2, max_size=n * (n - 1) // 2))
    it = iter(vals)
    rows = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            rows[i][j] = rows[j][i] = next(it)
    return SimilarityMatrix(ElementSet.of_size(n), rows)


@st.composite
def trees(draw, n):
    import random

    seed = draw(st.integers(0, 10**6))
    return ClusterTree.from_nested(ElementSet.of_size(n), random_tree_nested(n, random.Random(seed)))


@st.composite
def matrix_and_tree(draw, n_min=2, n_max=7):
    M = draw(matrices(n_min, n_max))
    return M, draw(trees(M.n))


@pytest.fixture
def xyz():
    """Three elements with M(x,z)=2 and 1 elsewhere."""
    return matrix_from_entries(["x", "y", "z"], [("x", "z", 2), ("x", "y", 1), ("y", "z", 1)])


@pytest.fixture
def violation():
    return matrix_from_entries(["x", "y", "z"], [("x", "y", 3), ("y", "z", 3), ("x", "z", 1)])


@pytest.fixture
def blocks4():
    """Two blocks {0,1},{2,3}: 2 inside, 1 across."""
    return SimilarityMatrix.from_function(ElementSet.of_size(4), lambda i, j: 2 if i // 2 == j // 2 else 1)


# Acceptance summary: one line per criterion ---------------------------------

_ACCEPTANCE: dict = {}


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    detail = dict(report.user_properties).get("detail", "")
    _ACCEPTANCE[name] = (report.outcome, detail, report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE):
        outcome, detail, dur = _ACCEPTANCE[name]
        status = "PASS" if outcome == "passed" else "FAIL"
        tr.write_line(f"{status}  {name}  ({dur:.1f}s)  {detail}")
