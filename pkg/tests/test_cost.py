"""Cost functions: pinned values, structural laws, symbolic agreement."""

import math
import random

import pytest

from cplq.cpl import EvalContext, State, TypingContext, check_program, parse_program, parse_stmt
from cplq.cpl.ast import FinType
from cplq.cost import (
    CostConfig,
    SplitStrategy,
    Ticks,
    UAnyVariant,
    cost_q,
    cost_q_max,
    cost_u,
    evaluate_cost_expr,
    print_cost_expr,
    qsearch_expected_queries,
    qsearch_max_queries,
    symbolic_cost_u,
)
from cplq.cost.symbolic import DELTA, simplify
from genprog import ProgramGen
from helpers import (
    all_matrices,
    all_ones_rows,
    matrix_ctx,
    matrix_search,
    oracle_matrix_search_cost,
    oracle_matrix_search_cost_max,
)

DEF_CFG = CostConfig(uany_variant=UAnyVariant.DEFINITION)


def test_cost_q_single_declared_call():
    src = "declare F(Fin<4>) -> Bool end\nx <- const 1 : Fin<4>;\ny <- F(x)"
    p = check_program(parse_program(src))
    from cplq.cpl.evaluate import Interpretation

    ctx = EvalContext(p.fun_context, {"F": Interpretation.from_function(p.fun_context["F"], lambda v: 0)})
    stmt = parse_stmt("y <- F(x)")
    from cplq.cpl.evaluate import Value

    st = State([("x", Value(1, FinType(4)))])
    assert cost_q(ctx, DEF_CFG, 0.5, stmt, st) == 1.0
    cfg = CostConfig(ticks={"F": Ticks(3.5, 2)})
    assert cost_q(ctx, cfg, 0.5, stmt, st) == 3.5


def test_cost_q_matrix_search_pinned():
    p = matrix_search(2, 2)
    ctx = matrix_ctx(p, [[1, 1], [0, 1]])
    got = cost_q(ctx, DEF_CFG, 0.5, p.entry, State())
    assert got == pytest.approx(2347.4157760464013, rel=1e-9)
    assert got == pytest.approx(oracle_matrix_search_cost(2, 2, 1, 0.5), rel=1e-9)


def test_cost_q_max_matrix_search_pinned():
    p = matrix_search(2, 2)
    got = cost_q_max(p.fun_context, DEF_CFG, 0.5, p.entry)
    assert got == pytest.approx(26.021529547664947 * 528, rel=1e-9)
    assert got == pytest.approx(oracle_matrix_search_cost_max(2, 2, 0.5), rel=1e-9)


def test_cost_q_mirror_law():
    # half split: cost(eps, S1;S2, s) = cost(eps/2, S1, s) + cost(eps/2, S2, s')
    for seed in range(40):
        gen = ProgramGen(random.Random(seed))
        p = gen.gen_program(n_defs=2)
        from cplq.cpl.ast import Seq

        if not isinstance(p.entry, Seq):
            continue
        interps = gen.gen_interps(p)
        ctx = EvalContext(p.fun_context, interps)
        from cplq.cpl.evaluate import eval_stmt

        s1, s2 = p.entry.first, p.entry.rest
        eps = 0.37
        whole = cost_q(ctx, CostConfig(), eps, p.entry, State())
        mid = State().concat(eval_stmt(ctx, TypingContext(), s1, State()))
        parts = cost_q(ctx, CostConfig(), eps / 2, s1, State()) + cost_q(
            ctx, CostConfig(), eps / 2, s2, mid
        )
        assert whole == pytest.approx(parts, rel=1e-12)


def test_cost_u_examples():
    p = matrix_search(2, 2)
    phi = p.fun_context
    # single declared call costs twice its quantum tick, independent of delta
    stmt = parse_stmt("y <- Matrix(i, j)")
    for d in (1.0, 0.1):
        assert cost_u(phi, DEF_CFG, d, stmt) == 2.0
    # inner any at the unrolled budget
    inner = parse_stmt("hasZero <- any[IsEntryZero](i)")
    assert cost_u(phi, DEF_CFG, 0.00120093, inner) == pytest.approx(264.0)


def test_cost_u_sequence_of_declared_calls():
    src = (
        "declare F(Bool) -> Bool end\n"
        "declare G(Bool) -> Bool end\n"
        "x <- const 0 : Bool;\na <- F(x);\nb <- G(a)"
    )
    p = check_program(parse_program(src))
    cfg = CostConfig(ticks={"F": Ticks(1, 3), "G": Ticks(1, 5)})
    for d in (1.0, 0.5, 0.01):
        assert cost_u(p.fun_context, cfg, d, p.entry) == 2 * 3 + 2 * 5


def test_cost_q_any_det_early_exit():
    src = "declare P(Fin<3>) -> Bool end\nb <- any_det[P]()"
    p = check_program(parse_program(src))
    from cplq.cpl.evaluate import Interpretation

    phi = p.fun_context
    # solution at index 0: only one predicate call
    ctx = EvalContext(phi, {"P": Interpretation.from_function(phi["P"], lambda v: [1, 0, 0][v])})
    c1 = cost_q(ctx, DEF_CFG, 0.5, p.entry, State())
    assert c1 == 1.0
    # no solution: all three calls
    ctx0 = EvalContext(phi, {"P": Interpretation.from_function(phi["P"], lambda v: 0)})
    assert cost_q(ctx0, DEF_CFG, 0.5, p.entry, State()) == 3.0


def test_cost_q_any_rand_uniform_cost():
    # N=4, K=2 with constant predicate cost c: (N/K) * c + c = 3c
    src = "declare P(Fin<4>) -> Bool end\nb <- any_rand[P]()"
    p = check_program(parse_program(src))
    from cplq.cpl.evaluate import Interpretation

    phi = p.fun_context
    ctx = EvalContext(phi, {"P": Interpretation.from_function(phi["P"], lambda v: v % 2)})
    got = cost_q(ctx, DEF_CFG, 0.5, p.entry, State())
    assert got == pytest.approx(3.0, rel=1e-12)


def test_cost_q_any_rand_no_solutions_cutoff():
    src = "declare P(Fin<4>) -> Bool end\nb <- any_rand[P]()"
    p = check_program(parse_program(src))
    from cplq.cpl.evaluate import Interpretation

    phi = p.fun_context
    ctx = EvalContext(phi, {"P": Interpretation.from_function(phi["P"], lambda v: 0)})
    eps = 0.5
    got = cost_q(ctx, DEF_CFG, eps, p.entry, State())
    assert got == pytest.approx(math.ceil(4 * math.log(1 / eps)) * 1.0)


def test_cost_q_le_cost_q_max_random():
    rng = random.Random(0)
    p = matrix_search(2, 2)
    phi = p.fun_context
    for cfg in (DEF_CFG, CostConfig()):
        for eps in (0.5, 0.25):
            cap = cost_q_max(phi, cfg, eps, p.entry)
            for rows in all_matrices(2, 2):
                cq = cost_q(matrix_ctx(p, rows), cfg, eps, p.entry, State())
                assert cq <= cap + 1e-9


def test_factorized_form_random_sizes():
    # closed form: 8 * Qq(N, K, eps/2) * Qu(M, eps/(32*Qmax)) * q
    rng = random.Random(7)
    for variant in (UAnyVariant.DEFINITION, UAnyVariant.LEMMA):
        cfg = CostConfig(uany_variant=variant)
        for _ in range(20):
            n, m = rng.choice([2, 3]), rng.choice([2, 3])
            rows = [[rng.randint(0, 1) for _ in range(m)] for _ in range(n)]
            p = matrix_search(n, m)
            eps = rng.choice([0.5, 0.25, 0.1])
            got = cost_q(matrix_ctx(p, rows), cfg, eps, p.entry, State())
            k = all_ones_rows(rows)
            from cplq.cost.queries import uany_query_bound

            qmax = qsearch_max_queries(n, eps / 2)
            expect = (
                8
                * qsearch_expected_queries(n, k, eps / 2)
                * uany_query_bound(m, eps / (32 * qmax), variant)
            )
            assert got == pytest.approx(expect, rel=1e-9)


def test_lossless_split():
    # a sequence of an assignment (cannot fail) and an any: the any keeps the
    # full budget under the lossless strategy
    p = matrix_search(2, 2)
    phi = p.fun_context
    stmt = parse_stmt("z <- const 0 : Bool;\nhasZero <- any[IsEntryZero](i)")
    half = CostConfig(uany_variant=UAnyVariant.DEFINITION)
    lossless = CostConfig(uany_variant=UAnyVariant.DEFINITION, split=SplitStrategy.LOSSLESS)
    d = 0.3
    assert cost_u(phi, lossless, d, stmt) == cost_u(phi, half, d, parse_stmt("hasZero <- any[IsEntryZero](i)"))
    assert cost_u(phi, half, d, stmt) >= cost_u(phi, lossless, d, stmt)


def test_max_count_cost_rules():
    src = (
        "declare F(Fin<4>) -> Fin<4> end\n"
        "declare P(Fin<4>) -> Bool end\n"
        "m <- max[F]();\nc <- count[P]()"
    )
    p = check_program(parse_program(src))
    phi = p.fun_context
    from cplq.cpl.evaluate import Interpretation

    ctx = EvalContext(
        phi,
        {
            "F": Interpretation.from_function(phi["F"], lambda v: v),
            "P": Interpretation.from_function(phi["P"], lambda v: int(v == 2)),
        },
    )
    from cplq.cost.queries import count_expected_queries, count_max_queries, maxfind_expected_queries

    eps = 0.5
    m_stmt = parse_stmt("m <- max[F]()")
    q = maxfind_expected_queries(4, eps / 2)
    assert cost_q(ctx, DEF_CFG, eps, m_stmt, State()) == pytest.approx(q * 2.0, rel=1e-9)
    c_stmt = parse_stmt("c <- count[P]()")
    qc = count_expected_queries(4, 1, eps / 2)
    assert cost_q(ctx, DEF_CFG, eps, c_stmt, State()) == pytest.approx(qc * 2.0, rel=1e-9)
    # unitary sides
    from cplq.cost.queries import maxfind_unitary_queries

    d = 0.25
    assert cost_u(phi, DEF_CFG, d, m_stmt) == pytest.approx(
        maxfind_unitary_queries(4, d / 2) * 2.0, rel=1e-9
    )
    assert cost_u(phi, DEF_CFG, d, c_stmt) == pytest.approx(4 * 2.0, rel=1e-9)


def test_symbolic_matches_numeric_corpus():
    count = 0
    for seed in range(200):
        gen = ProgramGen(random.Random(seed))
        p = gen.gen_program(n_defs=2)
        phi = p.fun_context
        for cfg in (DEF_CFG, CostConfig()):
            expr = symbolic_cost_u(phi, cfg, p.entry)
            sexpr = simplify(expr)
            env = {DELTA: 0.0}
            for f in phi.declared():
                env[f"q_{f.name}"] = 1.0
            for d in (1.0, 0.5, 0.1, 0.037, 0.004, 1e-4):
                env[DELTA] = d
                num = cost_u(phi, cfg, d, p.entry)
                for e in (expr, sexpr):
                    sym = evaluate_cost_expr(e, env, cfg)
                    assert sym == pytest.approx(num, rel=1e-9, abs=1e-12)
        count += 1
        if count >= 50:
            break
    assert count >= 50


def test_symbolic_shape_matrix_search():
    src_lib = matrix_search(2, 2)
    phi = src_lib.fun_context
    body = next(f for f in src_lib.functions if f.name == "HasAllOnesRow").body
    text = print_cost_expr(simplify(symbolic_cost_u(phi, DEF_CFG, body)))
    assert text.startswith("8 × Qu(")
    assert text.count("Qu(") >= 2 and text.endswith("q_Matrix")


def test_no_declared_calls_costs_zero():
    p = check_program(parse_program("x <- const 1 : Bool;\ny <- not x"))
    ctx = EvalContext(p.fun_context, {})
    assert cost_q(ctx, DEF_CFG, 0.5, p.entry, State()) == 0.0
    assert cost_u(p.fun_context, DEF_CFG, 0.5, p.entry) == 0.0
