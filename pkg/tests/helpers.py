"""Shared fixtures and small oracles for the test suite."""

from __future__ import annotations

import itertools
import math

from cplq.cpl import (
    EvalContext,
    Interpretation,
    State,
    check_program,
    load_interpretations,
    parse_program,
)
from cplq.cpl.typecheck import TypingContext

MATRIX_SEARCH_NM = """
declare Matrix(Fin<{n}>, Fin<{m}>) -> Bool end

def IsEntryZero(i: Fin<{n}>, j: Fin<{m}>) -> Bool
do
  e <- Matrix(i, j);
  e' <- not e;
  return e'
end

def IsRowAllOnes(i: Fin<{n}>) -> Bool
do
  hasZero <- any[IsEntryZero](i);
  ok <- not hasZero;
  return ok
end

def HasAllOnesRow() -> Bool
do
  ok <- any[IsRowAllOnes]();
  return ok
end

ok <- HasAllOnesRow()
"""


def matrix_search(n: int = 2, m: int = 2):
    """The matrix-search program at concrete sizes, checked."""
    return check_program(parse_program(MATRIX_SEARCH_NM.format(n=n, m=m)))


def matrix_interp(program, rows):
    n = len(rows)
    m = len(rows[0])
    return load_interpretations(
        program.fun_context,
        {"Matrix": {"kind": "dense", "dims": [n, m], "values": rows}},
    )


def matrix_ctx(program, rows) -> EvalContext:
    return EvalContext(program.fun_context, matrix_interp(program, rows))


def all_matrices(n: int, m: int):
    for bits in itertools.product((0, 1), repeat=n * m):
        yield [list(bits[i * m : (i + 1) * m]) for i in range(n)]


def all_ones_rows(rows) -> int:
    return sum(1 for row in rows if all(v == 1 for v in row))


# -- independent arithmetic oracles (no imports from the package) -------------

def oracle_qsearch_expected(n, k, eps):
    if k == 0:
        return 9.2 * math.ceil(math.log(1 / eps) / math.log(3)) * math.sqrt(n)
    f = 9.2 * math.sqrt(n) / (3 * math.sqrt(k)) if k < n / 4 else 2.0344
    return f * (1 + 1 / (1 - f / (9.2 * math.sqrt(n))))


def oracle_qsearch_max(n, eps):
    return 9.2 * math.ceil(math.log(1 / eps) / math.log(3)) * math.sqrt(n)


def oracle_uany_bound(n, delta, lemma=False):
    w = math.ceil(math.pi / 4 * math.sqrt(n)) * math.ceil(
        math.log(delta * delta / 4) / math.log(1 - 0.3914)
    )
    return 2 * w if lemma else w


def oracle_matrix_search_cost(n, m, k, eps, q=1.0, lemma=False):
    """Hand-unrolled cost recursion of the matrix-search entry statement."""
    outer = oracle_qsearch_expected(n, k, eps / 2)
    delta_p = (eps / 2) / (2 * oracle_qsearch_max(n, eps / 2))
    inner = oracle_uany_bound(m, delta_p / 8, lemma)
    return outer * 2 * inner * 4 * q


def oracle_matrix_search_cost_max(n, m, eps, q=1.0, lemma=False):
    outer = oracle_qsearch_max(n, eps / 2)
    delta_p = (eps / 2) / (2 * oracle_qsearch_max(n, eps / 2))
    inner = oracle_uany_bound(m, delta_p / 8, lemma)
    return outer * 2 * inner * 4 * q
