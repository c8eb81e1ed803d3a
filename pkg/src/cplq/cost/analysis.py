"""Input-dependent expected quantum cost, worst-case unitary cost, and
worst-case quantum cost of CPL statements.

The three functions recurse over statements. Queries to declared functions
carry configurable tick constants; sequencing splits the precision budget per
the configured strategy; the search primitives multiply a query-count formula
by the cost of one (unitary) predicate call at an appropriately divided
budget. The expected quantum cost evaluates the program classically along the
way to extract the solution counts the query formulas need.
"""

from __future__ import annotations

import math

from ..cpl.ast import (
    Assign,
    CallStmt,
    CplError,
    FunDecl,
    FunDef,
    FunctionContext,
    PrimCall,
    Seq,
    Stmt,
)
from ..cpl.evaluate import EvalContext, State, Value, count_solutions, eval_stmt
from ..cpl.typecheck import TypingContext, fun_signature
from .queries import (
    CostConfig,
    SplitStrategy,
    count_max_queries,
    count_expected_queries,
    maxfind_expected_queries,
    maxfind_unitary_queries,
    qsearch_expected_queries,
    qsearch_max_queries,
    randsearch_cutoff,
    randsearch_expected_iterations,
    uany_query_bound,
)

_FRESH_ARG = "_y"
_FRESH_OUT = "_b"


def _pred_call(pred: str, fixed_args: tuple[str, ...]) -> CallStmt:
    """The statement `b <- pred(args..., y)` whose cost the primitives scale."""
    return CallStmt((_FRESH_OUT,), pred, tuple(fixed_args) + (_FRESH_ARG,))


def _search_size(phi: FunctionContext, pred: str) -> int:
    in_types, _ = fun_signature(phi[pred])
    return in_types[-1].concrete_size


def _split(cfg: CostConfig, phi: FunctionContext, budget: float, s1: Stmt, s2: Stmt) -> tuple[float, float]:
    if cfg.split is SplitStrategy.HALF:
        return budget / 2, budget / 2
    f1, f2 = _can_fail(phi, s1), _can_fail(phi, s2)
    if f1 and f2:
        return budget / 2, budget / 2
    return budget, budget  # at most one side can consume the budget


def _can_fail(phi: FunctionContext, stmt: Stmt) -> bool:
    match stmt:
        case Assign():
            return False
        case Seq(a, b):
            return _can_fail(phi, a) or _can_fail(phi, b)
        case CallStmt(_, fname, _):
            f = phi[fname]
            return isinstance(f, FunDef) and _can_fail(phi, f.body)
        case PrimCall():
            return True
    raise CplError(f"not a statement: {stmt!r}")


# ---------------------------------------------------------------------------
# Unitary cost
# ---------------------------------------------------------------------------

def cost_u(phi: FunctionContext, cfg: CostConfig, delta: float, stmt: Stmt) -> float:
    """Worst-case query cost of a unitary implementation within norm error delta."""
    match stmt:
        case Assign():
            return 0.0
        case Seq(s1, s2):
            d1, d2 = _split(cfg, phi, delta, s1, s2)
            return cost_u(phi, cfg, d1, s1) + cost_u(phi, cfg, d2, s2)
        case CallStmt(_, fname, _):
            f = phi[fname]
            if isinstance(f, FunDecl):
                return 2 * cfg.quantum_tick(fname)
            assert isinstance(f, FunDef)
            return 2 * cost_u(phi, cfg, delta / 2, f.body)
        case PrimCall(_, prim, pred, args):
            from .. import registry

            return registry.get(prim).cost_u_rule(phi, cfg, delta, pred, args)
    raise CplError(f"not a statement: {stmt!r}")


def _u_any(phi, cfg, delta, pred, args):
    n = _search_size(phi, pred)
    queries = uany_query_bound(n, delta / 2, cfg.uany_variant)
    return queries * cost_u(phi, cfg, (delta / 2) / queries, _pred_call(pred, args))


def _u_bruteforce(phi, cfg, delta, pred, args):
    n = _search_size(phi, pred)
    return n * cost_u(phi, cfg, delta / n, _pred_call(pred, args))


def _u_max(phi, cfg, delta, pred, args):
    n = _search_size(phi, pred)
    queries = maxfind_unitary_queries(n, delta / 2)
    return queries * cost_u(phi, cfg, (delta / 2) / queries, _pred_call(pred, args))


PRIM_COST_U = {
    "any": _u_any,
    "any_det": _u_bruteforce,
    "any_rand": _u_bruteforce,
    "max": _u_max,
    "count": _u_bruteforce,
}


# ---------------------------------------------------------------------------
# Expected quantum cost (input-dependent)
# ---------------------------------------------------------------------------

def cost_q(
    ctx: EvalContext,
    cfg: CostConfig,
    eps: float,
    stmt: Stmt,
    state: State,
) -> float:
    """Expected query cost of the quantum realization on the given input."""
    phi = ctx.phi
    match stmt:
        case Assign():
            return 0.0
        case Seq(s1, s2):
            e1, e2 = _split(cfg, phi, eps, s1, s2)
            mid = state.concat(eval_stmt(ctx, state.typing_context(), s1, state))
            return cost_q(ctx, cfg, e1, s1, state) + cost_q(ctx, cfg, e2, s2, mid)
        case CallStmt(_, fname, args):
            f = phi[fname]
            if isinstance(f, FunDecl):
                return cfg.classical_tick(fname)
            assert isinstance(f, FunDef)
            inner = State(
                [(p, state[a]) for (p, _), a in zip(f.params, args)]
            )
            return cost_q(ctx, cfg, eps, f.body, inner)
        case PrimCall(_, prim, pred, args):
            from .. import registry

            return registry.get(prim).cost_q_rule(ctx, cfg, eps, pred, args, state)
    raise CplError(f"not a statement: {stmt!r}")


def _solutions(ctx: EvalContext, pred: str, args: tuple[str, ...], state: State) -> list[int]:
    from ..cpl.evaluate import _pred_value, _search_space

    fixed = [state[a] for a in args]
    _, n = _search_space(ctx, pred)
    return [v for v in range(n) if _pred_value(ctx, pred, fixed, v) == 1]


def _q_any(ctx, cfg, eps, pred, args, state):
    phi = ctx.phi
    n = _search_size(phi, pred)
    k = count_solutions(ctx, state.typing_context(), pred, list(args), state)
    expected = qsearch_expected_queries(n, k, eps / 2)
    pred_budget = (eps / 2) / (2 * qsearch_max_queries(n, eps / 2))
    return expected * cost_u(phi, cfg, pred_budget, _pred_call(pred, args))


def _q_det(ctx, cfg, eps, pred, args, state):
    from ..cpl.evaluate import _search_space

    phi = ctx.phi
    t, n = _search_space(ctx, pred)
    sols = _solutions(ctx, pred, args, state)
    v_fst = sols[0] if sols else n - 1
    call = _pred_call(pred, args)
    total = 0.0
    for v in range(v_fst + 1):
        ext = state.concat(State([(_FRESH_ARG, Value(v, t))]))
        total += cost_q(ctx, cfg, eps / n, call, ext)
    return total


def _q_rand(ctx, cfg, eps, pred, args, state):
    from ..cpl.evaluate import _search_space

    t, n = _search_space(ctx, pred)
    sols = set(_solutions(ctx, pred, args, state))
    k = len(sols)
    call = _pred_call(pred, args)
    budget = (eps / 2) / randsearch_cutoff(n, eps / 2)

    def c(v: int) -> float:
        ext = state.concat(State([(_FRESH_ARG, Value(v, t))]))
        return cost_q(ctx, cfg, budget, call, ext)

    iters = randsearch_expected_iterations(n, k, eps)
    total = 0.0
    if n > k:
        total += iters * sum(c(v) for v in range(n) if v not in sols) / (n - k)
    if k > 0:
        total += sum(c(v) for v in sols) / k
    return total


def _q_max(ctx, cfg, eps, pred, args, state):
    phi = ctx.phi
    n = _search_size(phi, pred)
    queries = maxfind_expected_queries(n, eps / 2)
    pred_budget = (eps / 2) / (2 * queries)
    return queries * cost_u(phi, cfg, pred_budget, _pred_call(pred, args))


def _q_count(ctx, cfg, eps, pred, args, state):
    phi = ctx.phi
    n = _search_size(phi, pred)
    c = count_solutions(ctx, state.typing_context(), pred, list(args), state)
    queries = count_expected_queries(n, c, eps / 2, cfg.count_constant)
    worst = count_max_queries(n, eps / 2, cfg.count_constant)
    pred_budget = (eps / 2) / (2 * worst)
    return queries * cost_u(phi, cfg, pred_budget, _pred_call(pred, args))


PRIM_COST_Q = {
    "any": _q_any,
    "any_det": _q_det,
    "any_rand": _q_rand,
    "max": _q_max,
    "count": _q_count,
}


# ---------------------------------------------------------------------------
# Worst-case quantum cost
# ---------------------------------------------------------------------------

def cost_q_max(phi: FunctionContext, cfg: CostConfig, eps: float, stmt: Stmt) -> float:
    """Maximum of the expected quantum cost over inputs and interpretations."""
    match stmt:
        case Assign():
            return 0.0
        case Seq(s1, s2):
            e1, e2 = _split(cfg, phi, eps, s1, s2)
            return cost_q_max(phi, cfg, e1, s1) + cost_q_max(phi, cfg, e2, s2)
        case CallStmt(_, fname, _):
            f = phi[fname]
            if isinstance(f, FunDecl):
                return cfg.classical_tick(fname)
            assert isinstance(f, FunDef)
            return cost_q_max(phi, cfg, eps, f.body)
        case PrimCall(_, prim, pred, args):
            from .. import registry

            return registry.get(prim).cost_q_max_rule(phi, cfg, eps, pred, args)
    raise CplError(f"not a statement: {stmt!r}")


def _qmax_any(phi, cfg, eps, pred, args):
    n = _search_size(phi, pred)
    worst = qsearch_max_queries(n, eps / 2)
    pred_budget = (eps / 2) / (2 * worst)
    return worst * cost_u(phi, cfg, pred_budget, _pred_call(pred, args))


def _qmax_det(phi, cfg, eps, pred, args):
    n = _search_size(phi, pred)
    return n * cost_q_max(phi, cfg, eps / n, _pred_call(pred, args))


def _qmax_rand(phi, cfg, eps, pred, args):
    n = _search_size(phi, pred)
    cutoff = randsearch_cutoff(n, eps)
    budget = (eps / 2) / randsearch_cutoff(n, eps / 2)
    return cutoff * cost_q_max(phi, cfg, budget, _pred_call(pred, args))


def _qmax_max(phi, cfg, eps, pred, args):
    n = _search_size(phi, pred)
    queries = maxfind_expected_queries(n, eps / 2)
    pred_budget = (eps / 2) / (2 * queries)
    return queries * cost_u(phi, cfg, pred_budget, _pred_call(pred, args))


def _qmax_count(phi, cfg, eps, pred, args):
    n = _search_size(phi, pred)
    worst = count_max_queries(n, eps / 2, cfg.count_constant)
    pred_budget = (eps / 2) / (2 * worst)
    return worst * cost_u(phi, cfg, pred_budget, _pred_call(pred, args))


PRIM_COST_Q_MAX = {
    "any": _qmax_any,
    "any_det": _qmax_det,
    "any_rand": _qmax_rand,
    "max": _qmax_max,
    "count": _qmax_count,
}
