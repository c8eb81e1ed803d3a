"""Registered realizations of the search primitives.

Each builder receives the shared emitter, the analysis configuration, the
source function context, the primitive's precision budget, the predicate
name, and the number of fixed arguments. It emits whatever procedures it
needs and returns (procedure name, its parameter context); callers pass
(fixed args..., result, fresh auxiliaries...) positionally.
"""

from __future__ import annotations

from ..cpl.ast import BOOL, BinOp, Const, FinType, FunctionContext, Var
from ..cpl.typecheck import TypingContext, fun_signature
from ..bqpl.ast import (
    CAssign,
    CCall,
    CFor,
    CIf,
    CProcDef,
    CRandom,
    CRepeat,
    EmbedOp,
    UApply,
    UCall,
    UProcDef,
    UWith,
    cseq_of,
    useq_of,
)
from ..cost.queries import (
    qsearch_max_queries,
    randsearch_cutoff,
    uany_query_bound,
)
from .qany import build_qany
from .uany import build_uany
from .unitary import ucompile_fun


def _search_size(phi: FunctionContext, pred: str) -> int:
    in_types, _ = fun_signature(phi[pred])
    return in_types[-1].concrete_size


def _or_expr(names):
    out = Var(names[0])
    for n in names[1:]:
        out = BinOp("||", out, Var(n))
    return out


# ---------------------------------------------------------------------------
# `any`: quantum search
# ---------------------------------------------------------------------------

def build_any_unitary(em, cfg, phi, delta, pred, n_fixed):
    n = _search_size(phi, pred)
    delta_s = delta / 2
    queries = uany_query_bound(n, delta_s, cfg.uany_variant)
    delta_p = (delta - delta_s) / queries
    g = ucompile_fun(em, cfg, phi, delta_p / 2, pred)
    return build_uany(em, n, delta_s, g, n_fixed, pred_precision=delta_p / 2)


def build_any_classical(em, cfg, phi, eps, pred, n_fixed):
    n = _search_size(phi, pred)
    eps_s = eps / 2
    delta_p = ((eps - eps_s) / 2) / qsearch_max_queries(n, eps_s)
    g = ucompile_fun(em, cfg, phi, delta_p / 2, pred)
    return build_qany(em, n, eps_s, g, n_fixed, pred_precision=delta_p / 2)


# ---------------------------------------------------------------------------
# `any_det` / `any_rand`: classical search, unitary brute-force fallback
# ---------------------------------------------------------------------------

def build_bruteforce_unitary(em, cfg, phi, delta, pred, n_fixed):
    """Evaluate the predicate on every element, OR the outcome bits.

    Wrapped compute-uncompute, so it makes 2N predicate queries; the
    predicate is compiled at delta/(2N).
    """
    n = _search_size(phi, pred)
    g = ucompile_fun(em, cfg, phi, delta / (2 * n), pred)
    gp = em.procs[g].params
    names = gp.names()
    ins = names[:n_fixed]
    shared = names[n_fixed + 2:]  # predicate workspace, shared across values
    fin_n = FinType(n)

    steps = []
    bits = [f"_b{i}" for i in range(n)]
    for i in range(n):
        steps.append(
            UWith(
                UApply(("_x",), EmbedOp((), Const(i, fin_n))),
                UCall(g, tuple(ins) + ("_x", bits[i]) + tuple(shared)),
            )
        )
    fold = UApply(tuple(bits) + ("_res",), EmbedOp(tuple(bits), _or_expr(bits)))
    body = UWith(useq_of(steps), fold)
    params = TypingContext(
        [(i, gp[i]) for i in ins]
        + [("_res", BOOL), ("_x", fin_n)]
        + [(b, BOOL) for b in bits]
        + [(w, gp[w]) for w in shared]
    )
    name = em.add(
        UProcDef(
            em.fresh_proc("UClassicalAny"),
            params,
            body,
            precision=delta,
            tag=f"UClassicalAny[{n}, {g}]",
        )
    )
    return name, em.procs[name].params


def _pred_call_proc(em, cfg, phi, eps, pred):
    """Compile `b <- pred(..., y)` as a callable proc at failure budget eps."""
    from .quantum import compile_fun

    return compile_fun(em, cfg, phi, eps, pred)


def build_det_classical(em, cfg, phi, eps, pred, n_fixed):
    """Brute-force scan in order, stopping after the first solution."""
    n = _search_size(phi, pred)
    h = _pred_call_proc(em, cfg, phi, eps / n, pred)
    hp = em.procs[h].params
    names = hp.names()
    ins = names[:n_fixed]
    fin_n = FinType(n)
    body = cseq_of(
        [
            CAssign("_res", Const(0, BOOL)),
            CFor(
                "_x",
                fin_n,
                tuple(range(n)),
                cseq_of(
                    [
                        CAssign("_t", BinOp("=", Var("_res"), Const(0, BOOL))),
                        CIf("_t", CCall(h, tuple(ins) + ("_x", "_res"))),
                    ]
                ),
            ),
        ]
    )
    params = TypingContext([(i, hp[i]) for i in ins] + [("_res", BOOL)])
    locals_ = TypingContext([("_x", fin_n), ("_t", BOOL)])
    name = em.add(
        CProcDef(
            em.fresh_proc("DetAny"), params, locals_, body,
            precision=eps, tag=f"DetAny[{n}, {h}]",
        )
    )
    return name, em.procs[name].params


def build_rand_classical(em, cfg, phi, eps, pred, n_fixed):
    """Sampling with replacement, cut off after ceil(N ln(1/eps)) draws."""
    n = _search_size(phi, pred)
    budget = (eps / 2) / randsearch_cutoff(n, eps / 2)
    h = _pred_call_proc(em, cfg, phi, budget, pred)
    hp = em.procs[h].params
    names = hp.names()
    ins = names[:n_fixed]
    fin_n = FinType(n)
    body = CRepeat(
        randsearch_cutoff(n, eps),
        cseq_of(
            [
                CAssign("_t", BinOp("=", Var("_res"), Const(0, BOOL))),
                CIf(
                    "_t",
                    cseq_of(
                        [
                            CRandom("_x", fin_n),
                            CCall(h, tuple(ins) + ("_x", "_res")),
                        ]
                    ),
                ),
            ]
        ),
    )
    params = TypingContext([(i, hp[i]) for i in ins] + [("_res", BOOL)])
    locals_ = TypingContext([("_x", fin_n), ("_t", BOOL)])
    name = em.add(
        CProcDef(
            em.fresh_proc("RandAny"), params, locals_, body,
            precision=eps, tag=f"RandAny[{n}, {h}, {eps:.6g}]",
        )
    )
    return name, em.procs[name].params
