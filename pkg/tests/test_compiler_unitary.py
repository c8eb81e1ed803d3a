"""Unitary compilation: wrappers, the unitary search, cost and semantics."""

import itertools
import math
import random

import numpy as np
import pytest

from cplq.cpl import (
    BOOL,
    FinType,
    Interpretation,
    TypingContext,
    check_program,
    parse_program,
    parse_stmt,
)
from cplq.cpl.typecheck import type_check_stmt
from cplq.bqpl import (
    CCallMeas,
    ProcContext,
    UCall,
    UCallAdj,
    UProcDecl,
    UProcDef,
    check_proc_context,
    desugar,
    type_check_bqpl,
    useq_items,
)
from cplq.compiler import (
    CompileUnsupported,
    Emitter,
    build_uany,
    clean_proc,
    ctrl_clean_proc,
    ucompile,
    ucompile_fun,
)
from cplq.cost import CostConfig, UAnyVariant, cost_u, uany_counts, uany_query_bound
from cplq.sim import (
    DenseState,
    UnitaryRunner,
    WireSpace,
    ucost,
    unitary_distance,
    unitary_embedding,
)
from cplq.sim.states import FactoredState
from genprog import ProgramGen
from helpers import matrix_interp, matrix_search

CFG = CostConfig()  # lemma variant: matches the built search's query count


def count_calls(pi: ProcContext, root: str, target: str, kind=(UCall, UCallAdj)) -> int:
    """Syntactic call count of `target` reachable from `root`, after desugaring."""
    memo: dict[str, int] = {}

    def of_proc(name: str) -> int:
        if name in memo:
            return memo[name]
        proc = pi[name]
        if isinstance(proc, (UProcDecl,)):
            memo[name] = 0
            return 0
        memo[name] = of_stmt(desugar(proc.body))
        return memo[name]

    def of_stmt(w) -> int:
        total = 0
        for item in useq_items(w):
            if isinstance(item, (UCall, UCallAdj)):
                hit = isinstance(item, kind) and item.proc == target
                total += (1 if hit else 0) + of_proc(item.proc)
        return total

    return of_proc(root)


def make_pred_uproc(em: Emitter, table: dict[tuple[int, int], int], n: int = 2) -> str:
    """A declared uproc for a predicate table on Fin<n> x Fin<n> -> Bool."""
    params = TypingContext([("x", FinType(n)), ("y", FinType(n)), ("b", BOOL)])
    em.add(UProcDecl("P", params, 1))
    return "P"


def pred_embedding(table, n=2) -> np.ndarray:
    return unitary_embedding((n, n), (2,), lambda x, y: table[(x, y)])


def test_clean_cost_doubles():
    em = Emitter()
    em.add(UProcDecl("g", TypingContext([("x", BOOL), ("b", BOOL)]), 5))
    name = clean_proc(em, "g", ("b",))
    pi = em.context()
    wires = pi[name].params.names()
    assert ucost(pi, UCall(name, wires)) == 10.0


def test_clean_exact_embedding():
    # g = exact embedding of a 2-variable function; Clean[g] embeds it with
    # the original output restored to zero
    rng = random.Random(0)
    for _ in range(5):
        table = {(x, y): rng.randint(0, 1) for x in range(2) for y in range(2)}
        em = Emitter()
        em.add(
            UProcDecl(
                "g", TypingContext([("x", BOOL), ("y", BOOL), ("b", BOOL)]), 1
            )
        )
        name = clean_proc(em, "g", ("b",))
        pi = em.context()
        uhat = {"g": pred_embedding(table)}
        runner = UnitaryRunner(pi, uhat)
        m = runner.proc_matrix(name)
        # wrapper wires: (x, y, copy, b): embedding of f on (x, y) -> copy, with b aux
        want = np.kron(
            unitary_embedding((2, 2), (2,), lambda x, y: table[(x, y)]), np.eye(2)
        )
        # want has order (x, y, copy, b)? embedding acts on (x,y,copy); aux b last.
        # wrapper order is (x, y, copy, b) only if copy precedes b: check
        assert pi[name].params.names() == ("x", "y", "_cp0", "b")
        # compare action on zero-initialized aux columns
        space = WireSpace([("x", 2), ("y", 2), ("_cp0", 2), ("b", 2)])

        def col_u(values):
            st = DenseState.basis(space, values)
            st.apply_matrix(m, ("x", "y", "_cp0", "b"))
            return st

        def col_v(values):
            out = dict(values)
            out["_cp0"] = (values.get("_cp0", 0) + table[(values["x"], values["y"])]) % 2
            return DenseState.basis(space, out)

        d, _ = unitary_distance(space, {"b"}, col_u, col_v)
        assert d <= 1e-9


def test_ctrl_clean_control_off_identity():
    em = Emitter()
    em.add(UProcDecl("g", TypingContext([("x", BOOL), ("b", BOOL)]), 1))
    name = ctrl_clean_proc(em, "g", ("b",))
    pi = em.context()
    uhat = {"g": unitary_embedding((2,), (2,), lambda x: x)}
    runner = UnitaryRunner(pi, uhat)
    m = runner.proc_matrix(name)
    dim = m.shape[0]
    # control |0>: identity on every wire
    space_names = pi[name].params.names()
    assert space_names[0].startswith("_ctl")
    half = dim // 2
    assert np.allclose(m[:half, :half], np.eye(half), atol=1e-12)


def test_build_uany_n2_all_tables():
    # every predicate table on Fin<2> (fixed first argument): the built search
    # is within delta of the any-embedding
    delta = 1.0
    for bits in itertools.product((0, 1), repeat=4):
        table = {(x, y): bits[x * 2 + y] for x in range(2) for y in range(2)}
        em = Emitter()
        g = make_pred_uproc(em, table)
        name, params = build_uany(em, 2, delta, g, 1)
        pi = check_proc_context(em.context())
        n_g, n_r = uany_counts(2, delta)
        assert (n_g, n_r) == (2, 3)
        uhat = {"P": pred_embedding(table)}
        runner = UnitaryRunner(pi, uhat)
        space = WireSpace([(n, t.concrete_size) for n, t in params.items()])
        aux = set(space.names) - {"x", "_res"}

        def col_u(values):
            st = runner.make_state(space, values)
            runner.apply(st, UCall(name, tuple(space.names)))
            return st

        def col_v(values):
            out = dict(values)
            hit = int(any(table[(values["x"], y)] for y in range(2)))
            out["_res"] = (values.get("_res", 0) + hit) % 2
            return FactoredState.basis(space, out)

        d, lost = unitary_distance(space, aux, col_u, col_v)
        assert d <= delta + lost + 1e-9, (bits, d)


def test_build_uany_query_count():
    em = Emitter()
    g = make_pred_uproc(em, {(x, y): 0 for x in range(2) for y in range(2)}, n=16)
    em.procs.clear()
    params = TypingContext([("x", FinType(2)), ("y", FinType(16)), ("b", BOOL)])
    em.add(UProcDecl("P", params, 1))
    name, _ = build_uany(em, 16, 0.5, "P", 1)
    pi = em.context()
    combined = count_calls(pi, name, "P")
    # calls to P plus calls to its adjoint, counted syntactically: the pair
    # count is symmetric, so each side makes combined/2 calls
    each = combined // 2
    assert each == 2 * uany_query_bound(16, 0.5, UAnyVariant.DEFINITION)  # 48
    assert each == uany_query_bound(16, 0.5, UAnyVariant.LEMMA)
    assert each <= 2 * uany_query_bound(16, 0.5, UAnyVariant.DEFINITION)


def test_uany_or_fold_flips_output():
    # structural: the dirty procedure ends with an OR embedding over the runs
    em = Emitter()
    g = make_pred_uproc(em, {(x, y): 1 for x in range(2) for y in range(2)})
    name, _ = build_uany(em, 2, 0.5, g, 1)
    pi = em.context()
    dirty = next(n for n in pi.names() if n.startswith("UAnyDirty"))
    from cplq.bqpl.ast import UApply, EmbedOp
    from cplq.sim.unitary import or_embed_inputs

    items = useq_items(pi[dirty].body)
    last = items[-1]
    assert isinstance(last, UApply)
    assert or_embed_inputs(last.op) is not None
    assert last.wires[-1] == "_res"


def test_ucompile_declared_call():
    p = matrix_search(2, 2)
    phi = p.fun_context
    stmt = parse_stmt("e <- Matrix(i, j)")
    gamma = TypingContext([("i", FinType(2)), ("j", FinType(2))])
    res = ucompile(phi, gamma, CFG, 0.5, stmt)
    assert len(res.aux) == 1  # the dirty copy of the declared output
    assert ucost(res.pi, res.stmt) == 2.0
    full = type_check_stmt(phi, gamma, stmt).concat(res.aux)
    type_check_bqpl(res.pi, full, res.stmt)


def test_ucompile_fig9_structure():
    p = matrix_search(2, 2)
    phi = p.fun_context
    stmt = parse_stmt("hasZero <- any[IsEntryZero](i)")
    gamma = TypingContext([("i", FinType(2))])
    res = ucompile(phi, gamma, CFG, 0.0048, stmt)
    names = res.pi.names()
    assert any(n.startswith("CtrlClean[IsEntryZero]") for n in names)
    assert any(n.startswith("UAny") and not n.startswith("UAnyDirty") for n in names)
    check_proc_context(res.pi)


def test_ucompile_cost_theorem_matrix_search():
    p = matrix_search(2, 2)
    phi = p.fun_context
    gamma_out = type_check_stmt(phi, TypingContext(), p.entry)
    for delta in (1.0, 0.5, 0.1):
        res = ucompile(phi, TypingContext(), CFG, delta, p.entry)
        uc = ucost(res.pi, res.stmt)
        cu = cost_u(phi, CFG, delta, p.entry)
        assert uc <= cu * (1 + 1e-12)


def test_ucompile_cost_theorem_requires_lemma_variant():
    # the built search exceeds the definition-variant bound: the arbitration
    # that fixed the default to the lemma variant
    p = matrix_search(2, 2)
    phi = p.fun_context
    res = ucompile(phi, TypingContext(), CFG, 0.5, p.entry)
    uc = ucost(res.pi, res.stmt)
    cu_def = cost_u(phi, CostConfig(uany_variant=UAnyVariant.DEFINITION), 0.5, p.entry)
    assert uc > cu_def


def test_ucompile_unsupported_primitives():
    src = "declare F(Fin<3>) -> Fin<3> end\nm <- max[F]()"
    p = check_program(parse_program(src))
    with pytest.raises(CompileUnsupported, match="unsupported primitive"):
        ucompile(p.fun_context, TypingContext(), CFG, 0.5, p.entry)


def test_ucompile_semantics_small():
    # one-level nesting with a def predicate: the compiled operator is within
    # delta of the embedding of the classical semantics
    from cplq.pipeline import unitary_semantics_distance

    p = matrix_search(2, 2)
    phi = p.fun_context
    body = next(f for f in p.functions if f.name == "IsRowAllOnes").body
    gamma_in = TypingContext([("i", FinType(2))])
    for rows in ([[1, 1], [0, 1]], [[0, 0], [1, 1]]):
        interps = matrix_interp(p, rows)
        for delta in (0.9, 0.5):
            d, lost = unitary_semantics_distance(phi, interps, gamma_in, body, delta, CFG)
            assert d <= delta + lost + 1e-9


def test_ucompiled_corpus_type_checks():
    for seed in range(25):
        gen = ProgramGen(random.Random(seed))
        p = gen.gen_program(n_defs=2)
        phi = p.fun_context
        try:
            res = ucompile(phi, TypingContext(), CFG, 0.5, p.entry)
        except CompileUnsupported:
            continue
        check_proc_context(res.pi)
        gamma_out = type_check_stmt(phi, TypingContext(), p.entry)
        type_check_bqpl(res.pi, gamma_out.concat(res.aux), res.stmt)
