"""Parsing, printing, typing and parameter resolution."""

import random

import pytest

from cplq.cpl import (
    BOOL,
    CplError,
    CplTypeError,
    FinType,
    FunDecl,
    TypingContext,
    check_program,
    parse_program,
    parse_stmt,
    print_program,
    resolve_params,
    type_check_expr,
    type_check_stmt,
)
from cplq.cpl.ast import BinOp, Const, UnOp, Var
from genprog import ProgramGen
from helpers import matrix_search, MATRIX_SEARCH_NM


def test_parse_matrix_search_library():
    src = MATRIX_SEARCH_NM.format(n="N", m="M").rsplit("ok <- HasAllOnesRow()", 1)[0]
    p = parse_program(src)
    assert p.entry is None  # library mode
    assert len(p.functions) == 4
    decls = [f for f in p.functions if isinstance(f, FunDecl)]
    assert [d.name for d in decls] == ["Matrix"]
    assert p.free_params() == {"N", "M"}


def test_parse_minimal_def():
    p = parse_program("def f() -> Bool do b <- const 1 : Bool; return b end")
    assert len(p.functions) == 1
    f = p.functions[0]
    assert f.returns == ("b",)


def test_parse_error_dangling_operator():
    with pytest.raises(CplError) as e:
        parse_stmt("x <- y +")
    assert e.value.line is not None


def test_duplicate_function_rejected():
    src = "def f() -> Bool do b <- const 1 : Bool; return b end\n" * 2
    with pytest.raises(CplError, match="duplicate function"):
        parse_program(src)


def test_resolve_params():
    p = parse_program(MATRIX_SEARCH_NM.format(n="N", m="M"))
    r = resolve_params(p, {"N": 20, "M": 10})
    assert r.free_params() == set()
    check_program(r)


def test_resolve_params_identity():
    p = matrix_search(2, 2)
    assert resolve_params(p, {}) == p


def test_resolve_params_missing():
    p = parse_program(MATRIX_SEARCH_NM.format(n="N", m="M"))
    with pytest.raises(CplTypeError, match="unbound parameter M"):
        resolve_params(p, {"N": 20})
    with pytest.raises(CplTypeError, match=">= 1"):
        resolve_params(p, {"N": 0, "M": 10})


def test_expr_typing_rules():
    ctx = TypingContext([("x", FinType(5)), ("y", FinType(5)), ("b", BOOL)])
    assert type_check_expr(ctx, BinOp("<", Var("x"), Var("y"))) == BOOL
    assert type_check_expr(ctx, UnOp("not", Var("b"))) == BOOL
    assert type_check_expr(ctx, BinOp("+", Var("x"), Var("y"))) == FinType(5)
    with pytest.raises(CplTypeError):
        type_check_expr(ctx, BinOp("+", Var("x"), Var("b")))
    with pytest.raises(CplTypeError):
        type_check_expr(ctx, UnOp("not", Var("x")))
    with pytest.raises(CplTypeError):
        type_check_expr(ctx, Var("zz"))


def test_bare_literal_inference():
    ctx = TypingContext([("x", FinType(5))])
    assert type_check_expr(ctx, BinOp("+", Var("x"), Const(3, None))) == FinType(5)
    with pytest.raises(CplTypeError):
        type_check_expr(ctx, Const(3, None))  # no context to infer from
    with pytest.raises(CplTypeError):
        type_check_expr(ctx, Const(7, FinType(5)))  # out of range


def test_stmt_typing_matrix_search():
    p = matrix_search(2, 2)
    phi = p.fun_context
    body = next(f for f in p.functions if f.name == "HasAllOnesRow").body
    out = type_check_stmt(phi, TypingContext(), body)
    assert out.items() == (("ok", BOOL),)
    entry_out = type_check_stmt(phi, TypingContext(), p.entry)
    assert entry_out.items() == (("ok", BOOL),)


def test_ssa_violation():
    p = matrix_search(2, 2)
    with pytest.raises(CplTypeError, match="already assigned"):
        type_check_stmt(
            p.fun_context,
            TypingContext([("x", BOOL)]),
            parse_stmt("x <- const 1 : Bool"),
        )


def test_any_typing():
    p = matrix_search(2, 2)
    out = type_check_stmt(p.fun_context, TypingContext(), parse_stmt("b <- any[IsRowAllOnes]()"))
    assert out["b"] == BOOL


def test_count_typing():
    src = (
        "declare P(Fin<3>) -> Bool end\n"
        "c <- count[P]()"
    )
    p = check_program(parse_program(src))
    out = type_check_stmt(p.fun_context, TypingContext(), p.entry)
    assert out["c"] == FinType(4)  # one more than the search-space size


def test_max_typing():
    src = (
        "declare F(Fin<3>) -> Fin<7> end\n"
        "m <- max[F]()"
    )
    p = check_program(parse_program(src))
    out = type_check_stmt(p.fun_context, TypingContext(), p.entry)
    assert out["m"] == FinType(7)


def test_predicate_shape_errors():
    src = "declare F(Fin<3>) -> Fin<7> end\nb <- any[F]()"
    with pytest.raises(CplTypeError, match="must return Bool"):
        check_program(parse_program(src))


def test_return_must_be_computed():
    src = "def f(x: Bool) -> Bool do y <- not x; return x end"
    with pytest.raises(CplTypeError, match="is a parameter"):
        check_program(parse_program(src))


def test_later_function_rejected():
    # g calls f, but f is defined after g
    src = (
        "def g() -> Bool do b <- f(); return b end\n"
        "def f() -> Bool do b <- const 1 : Bool; return b end"
    )
    with pytest.raises(CplError, match="unknown function"):
        check_program(parse_program(src))


def test_roundtrip_corpus():
    for seed in range(1000):
        p = ProgramGen(random.Random(seed)).gen_program(n_defs=2)
        assert check_program(parse_program(print_program(p))) == p


def test_unique_typing_and_monotonicity():
    for seed in range(200):
        p = ProgramGen(random.Random(seed)).gen_program(n_defs=2)
        phi = p.fun_context
        g1 = type_check_stmt(phi, TypingContext(), p.entry)
        g2 = type_check_stmt(phi, TypingContext(), p.entry)
        assert g1 == g2  # unique typing
        # monotone: output extends the input context, new entries appended
        base = TypingContext([("zzq", BOOL)])
        from cplq.cpl.ast import Seq

        out = type_check_stmt(phi, base, p.entry)
        assert out.items()[0] == ("zzq", BOOL)
        assert len(out) >= len(g1)


def test_bool_fin2_alias():
    p1 = parse_program("def f(x: Bool) -> Bool do y <- not x; return y end")
    p2 = parse_program("def f(x: Fin<2>) -> Fin<2> do y <- not x; return y end")
    assert p1 == p2
