"""Query-count formulas against independently computed values."""

import math

import pytest

from cplq.cost.queries import (
    UAnyVariant,
    count_expected_queries,
    count_unitary_queries,
    maxfind_expected_queries,
    qsearch_expected_queries,
    qsearch_max_queries,
    randsearch_cutoff,
    randsearch_expected_iterations,
    uany_query_bound,
)
from helpers import oracle_qsearch_expected, oracle_qsearch_max, oracle_uany_bound

REL = 1e-9


def close(a, b):
    assert a == pytest.approx(b, rel=REL)


def test_qsearch_no_solutions():
    close(qsearch_expected_queries(100, 0, 0.5), 92.0)
    close(qsearch_expected_queries(100, 0, 0.5), oracle_qsearch_expected(100, 0, 0.5))


def test_qsearch_dense_solutions():
    # K >= N/4 branch
    expect = 2.0344 * (1 + 1 / (1 - 2.0344 / (9.2 * 2)))
    close(qsearch_expected_queries(4, 4, 0.3), expect)
    assert abs(expect - 4.3218) < 5e-4


def test_qsearch_single_solution():
    close(qsearch_expected_queries(100, 1, 0.77), 76.66666666666667)


def test_qsearch_max():
    close(qsearch_max_queries(2, 0.25), 9.2 * 2 * math.sqrt(2))
    close(qsearch_max_queries(1, 0.5), 9.2)
    close(qsearch_max_queries(20, 5e-4), oracle_qsearch_max(20, 5e-4))


def test_uany_bound():
    assert uany_query_bound(16, 0.5, UAnyVariant.DEFINITION) == 24
    assert uany_query_bound(16, 0.5, UAnyVariant.LEMMA) == 48
    assert uany_query_bound(1, 1.0, UAnyVariant.DEFINITION) == 3
    for n in (1, 2, 7, 100):
        for d in (1.0, 0.5, 0.01):
            assert uany_query_bound(n, d, UAnyVariant.DEFINITION) == oracle_uany_bound(n, d)
            assert uany_query_bound(n, d, UAnyVariant.LEMMA) == oracle_uany_bound(n, d, lemma=True)


def test_expected_below_max_on_grid():
    for n in (1, 2, 5, 33, 1000, 10**6):
        for eps in (0.9, 0.5, 0.1, 1e-3):
            cap = qsearch_max_queries(n, eps)
            for k in sorted({1, 2, max(1, n // 4), max(1, n // 2), n}):
                if k > n:
                    continue
                assert qsearch_expected_queries(n, k, eps) <= cap + 1e-9


def test_max_and_count_formulas():
    close(maxfind_expected_queries(100, 1 / 3), 597.4)
    close(maxfind_expected_queries(1, 1 / 3), 82.6)
    assert count_unitary_queries(7) == 7.0
    close(count_expected_queries(4, 2, 0.5), math.sqrt(8) * math.log(2))


def test_rand_search():
    assert randsearch_expected_iterations(4, 2, 0.1) == 2.0
    assert randsearch_expected_iterations(4, 0, 0.5) == math.ceil(4 * math.log(2))
    assert randsearch_cutoff(100, 0.1) == math.ceil(100 * math.log(10))


def test_precision_bounds():
    from cplq.cost.queries import Precision

    with pytest.raises(ValueError):
        Precision.eps(0.0)
    with pytest.raises(ValueError):
        Precision.delta(1.5)
    assert Precision.eps(1.0).value == 1.0


def test_monotone_budget():
    # cost cannot increase when the allowed error grows (stepwise constant)
    last = None
    for d in (0.01, 0.05, 0.1, 0.3, 0.5, 0.9, 1.0):
        q = uany_query_bound(64, d, UAnyVariant.DEFINITION)
        if last is not None:
            assert q <= last
        last = q
