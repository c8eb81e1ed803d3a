"""Denotational semantics: expressions, statements, primitives, solution counts."""

import itertools
import random

import pytest

from cplq.cpl import (
    BOOL,
    CplError,
    EvalContext,
    FinType,
    Interpretation,
    State,
    TypingContext,
    Value,
    any_hat,
    count_hat,
    count_solutions,
    eval_expr,
    eval_stmt,
    load_interpretations,
    max_hat,
    parse_program,
    parse_stmt,
    check_program,
    run_entry,
)
from cplq.cpl.typecheck import elaborate_stmt
from genprog import ProgramGen
from helpers import all_matrices, all_ones_rows, matrix_ctx, matrix_search


def V(v, size=2):
    return Value(v, FinType(size))


def test_eval_add_modular():
    st = State([("x", V(3, 5)), ("y", V(4, 5))])
    out = eval_expr(parse_stmt("z <- x + y").expr, st)
    assert out == V((3 + 4) % 5, 5)


def test_eval_not_and_less():
    st = State([("b", V(0)), ("x", V(1, 4)), ("y", V(1, 4))])
    assert eval_expr(parse_stmt("z <- not b").expr, st) == V(1)
    assert eval_expr(parse_stmt("z <- x < y").expr, st) == V(0)


def test_eval_seq_and_const():
    p = check_program(parse_program("x <- const 2 : Fin<3>;\ny <- x + x"))
    ctx = EvalContext(p.fun_context, {})
    out = run_entry(ctx, p.entry)
    assert out["x"].value == 2 and out["y"].value == 1


def test_matrix_search_all_ones():
    p = matrix_search(2, 2)
    out = run_entry(matrix_ctx(p, [[1, 1], [1, 1]]), p.entry)
    assert out["ok"].value == 1


def test_matrix_search_diagonal():
    p = matrix_search(2, 2)
    out = run_entry(matrix_ctx(p, [[1, 0], [0, 1]]), p.entry)
    assert out["ok"].value == 0


def test_eval_against_bruteforce_all_matrices():
    p = matrix_search(2, 2)
    for rows in all_matrices(2, 2):
        out = run_entry(matrix_ctx(p, rows), p.entry)
        assert out["ok"].value == (1 if all_ones_rows(rows) > 0 else 0)


def test_any_hat_entry_zero():
    p = matrix_search(1, 2)
    phi = p.fun_context
    gamma = TypingContext([("i", FinType(1))])
    st = State([("i", Value(0, FinType(1)))])
    for row, want in ([[1, 1]], 0), ([[1, 0]], 1):
        ctx = matrix_ctx(p, row)
        assert any_hat(ctx, gamma, "IsEntryZero", ["i"], st).value == want


def test_any_hat_outer():
    p = matrix_search(2, 2)
    ctx = matrix_ctx(p, [[1, 1], [0, 1]])
    assert any_hat(ctx, TypingContext(), "IsRowAllOnes", [], State()).value == 1


def test_max_hat_identity():
    src = "declare F(Fin<4>) -> Fin<4> end\nm <- max[F]()"
    p = check_program(parse_program(src))
    interp = Interpretation.from_function(p.fun_context["F"], lambda v: v)
    ctx = EvalContext(p.fun_context, {"F": interp})
    assert max_hat(ctx, TypingContext(), "F", [], State()).value == 3
    out = run_entry(ctx, p.entry)
    assert out["m"] == Value(3, FinType(4))


def test_count_hat_rows():
    src = "declare P(Fin<3>) -> Bool end\nc <- count[P]()"
    p = check_program(parse_program(src))
    for row, want in ([0, 1, 0], 2), ([1, 1, 1], 0):
        interp = Interpretation.from_function(p.fun_context["P"], lambda v, r=row: 1 - r[v])
        ctx = EvalContext(p.fun_context, {"P": interp})
        got = count_hat(ctx, TypingContext(), "P", [], State())
        assert got == Value(want, FinType(4))


def test_count_solutions_matrix():
    p = matrix_search(3, 3)
    ctx = matrix_ctx(p, [[1, 1, 1], [1, 1, 1], [1, 1, 1]])
    assert count_solutions(ctx, TypingContext(), "IsRowAllOnes", [], State()) == 3
    # every row with exactly one zero: no all-ones row
    ctx0 = matrix_ctx(p, [[0, 1, 1], [1, 0, 1], [1, 1, 0]])
    assert count_solutions(ctx0, TypingContext(), "IsRowAllOnes", [], State()) == 0


def test_count_solutions_inner_row():
    p = matrix_search(1, 3)
    ctx = matrix_ctx(p, [[0, 0, 1]])
    gamma = TypingContext([("i", FinType(1))])
    st = State([("i", Value(0, FinType(1)))])
    assert count_solutions(ctx, gamma, "IsEntryZero", ["i"], st) == 2


def test_missing_interpretation():
    p = matrix_search(2, 2)
    with pytest.raises(CplError, match="missing interpretation"):
        EvalContext(p.fun_context, {})


def test_interpretation_totality_checked():
    p = matrix_search(2, 2)
    with pytest.raises(CplError, match="missing entry"):
        Interpretation(p.fun_context["Matrix"], {(0, 0): (1,)})


def test_table_kind_loading():
    src = "declare F(Fin<2>, Fin<2>) -> (Bool, Fin<3>) end\na, b <- F(x, y)"
    p = parse_program(src)
    doc = {"F": {"kind": "table", "entries": {f"{i},{j}": f"{(i+j)%2},{(i*j)%3}" for i in range(2) for j in range(2)}}}
    interps = load_interpretations(p.fun_context, doc)
    assert interps["F"](1, 1) == (0, 1)


def test_frame_property_and_determinism():
    for seed in range(100):
        gen = ProgramGen(random.Random(seed))
        p = gen.gen_program(n_defs=2)
        interps = gen.gen_interps(p)
        ctx = EvalContext(p.fun_context, interps)
        from cplq.cpl.typecheck import type_check_stmt

        gamma = type_check_stmt(p.fun_context, TypingContext(), p.entry)
        out1 = run_entry(ctx, p.entry)
        out2 = run_entry(ctx, p.entry)
        assert out1 == out2  # determinism
        assert set(out1.names()) == set(gamma.names())  # frame property


def test_any_hat_iff_solutions():
    rng = random.Random(5)
    src = "declare P(Fin<4>, Fin<4>) -> Bool end\nb <- any[P](x)"
    p = parse_program(src)
    phi = p.fun_context
    gamma = TypingContext([("x", FinType(4))])
    for _ in range(50):
        table = {(i, j): (rng.randint(0, 1),) for i in range(4) for j in range(4)}
        ctx = EvalContext(phi, {"P": Interpretation(phi["P"], table)})
        for x in range(4):
            st = State([("x", Value(x, FinType(4)))])
            k = count_solutions(ctx, gamma, "P", ["x"], st)
            assert (any_hat(ctx, gamma, "P", ["x"], st).value == 1) == (k >= 1)


def test_seq_compositionality():
    for seed in range(60):
        gen = ProgramGen(random.Random(seed))
        p = gen.gen_program(n_defs=2)
        from cplq.cpl.ast import Seq

        if not isinstance(p.entry, Seq):
            continue
        interps = gen.gen_interps(p)
        ctx = EvalContext(p.fun_context, interps)
        s1, s2 = p.entry.first, p.entry.rest
        whole = eval_stmt(ctx, TypingContext(), p.entry, State())
        o1 = eval_stmt(ctx, TypingContext(), s1, State())
        mid = State().concat(o1)
        o2 = eval_stmt(ctx, mid.typing_context(), s2, mid)
        assert whole == o1.concat(o2)
