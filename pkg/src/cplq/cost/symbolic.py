"""Symbolic unitary cost expressions.

`symbolic_cost_u` mirrors the numeric unitary cost recursion but builds an
expression tree over rationals, tick symbols (q_f), size parameters, the
budget symbol, and opaque query-count calls. Evaluating the tree at concrete
values reproduces the numeric cost; printing it yields formulas in the style

    8 x Qu(N, d/2/2) x Qu(M, ((d/2 - d/2/2)/Qu(N, d/2/2))/2/2/2) x q_Matrix
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..cpl.ast import (
    Assign,
    CallStmt,
    CplError,
    FinType,
    FunDecl,
    FunDef,
    FunctionContext,
    PrimCall,
    Seq,
    Stmt,
)
from ..cpl.typecheck import fun_signature
from .analysis import _can_fail
from .queries import (
    CostConfig,
    SplitStrategy,
    maxfind_unitary_queries,
    uany_query_bound,
)

DELTA = "δ"


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Sym:
    name: str


@dataclass(frozen=True)
class Add:
    lhs: "CostExpr"
    rhs: "CostExpr"


@dataclass(frozen=True)
class Mul:
    lhs: "CostExpr"
    rhs: "CostExpr"


@dataclass(frozen=True)
class Div:
    lhs: "CostExpr"
    rhs: "CostExpr"


@dataclass(frozen=True)
class Opaque:
    """Opaque query-count call, e.g. Qu(N, delta-expression)."""

    fn: str  # "Qu" or "Qmf_u"
    size: "CostExpr"
    budget: "CostExpr"


CostExpr = Num | Sym | Add | Mul | Div | Opaque


def evaluate(expr: CostExpr, env: dict[str, float], cfg: CostConfig) -> float:
    """Evaluate with symbol bindings: the budget symbol, size params, ticks."""
    match expr:
        case Num(v):
            return v
        case Sym(name):
            try:
                return env[name]
            except KeyError:
                raise CplError(f"unbound cost symbol {name!r}") from None
        case Add(a, b):
            return evaluate(a, env, cfg) + evaluate(b, env, cfg)
        case Mul(a, b):
            return evaluate(a, env, cfg) * evaluate(b, env, cfg)
        case Div(a, b):
            return evaluate(a, env, cfg) / evaluate(b, env, cfg)
        case Opaque(fn, size, budget):
            n = evaluate(size, env, cfg)
            if abs(n - round(n)) > 1e-9:
                raise CplError(f"non-integral search size {n}")
            d = evaluate(budget, env, cfg)
            if fn == "Qu":
                return float(uany_query_bound(int(round(n)), d, cfg.uany_variant))
            if fn == "Qmf_u":
                return maxfind_unitary_queries(int(round(n)), d)
            raise CplError(f"unknown opaque cost call {fn!r}")
    raise CplError(f"not a cost expression: {expr!r}")


def _size_expr(t: FinType) -> CostExpr:
    return Sym(t.size) if isinstance(t.size, str) else Num(float(t.size))


def _pred_size(phi: FunctionContext, pred: str) -> CostExpr:
    in_types, _ = fun_signature(phi[pred])
    return _size_expr(in_types[-1])


def symbolic_cost_u(
    phi: FunctionContext, cfg: CostConfig, stmt: Stmt, budget: CostExpr | None = None
) -> CostExpr:
    """Symbolic mirror of cost_u; sizes may remain unresolved parameters."""
    d = budget if budget is not None else Sym(DELTA)
    match stmt:
        case Assign():
            return Num(0.0)
        case Seq(s1, s2):
            if cfg.split is SplitStrategy.HALF or (_can_fail(phi, s1) and _can_fail(phi, s2)):
                d1: CostExpr = Div(d, Num(2.0))
                d2: CostExpr = Div(d, Num(2.0))
            else:
                d1 = d2 = d
            return Add(
                symbolic_cost_u(phi, cfg, s1, d1), symbolic_cost_u(phi, cfg, s2, d2)
            )
        case CallStmt(_, fname, _):
            f = phi[fname]
            if isinstance(f, FunDecl):
                return Mul(Num(2.0), Sym(f"q_{fname}"))
            assert isinstance(f, FunDef)
            return Mul(Num(2.0), symbolic_cost_u(phi, cfg, f.body, Div(d, Num(2.0))))
        case PrimCall(_, prim, pred, args):
            from .. import registry

            return registry.get(prim).symbolic_u_rule(phi, cfg, d, pred, args)
    raise CplError(f"not a statement: {stmt!r}")


def _pred_call_expr(phi, cfg, pred, args, budget):
    from .analysis import _pred_call

    return symbolic_cost_u(phi, cfg, _pred_call(pred, tuple(args)), budget)


def _sym_any(phi, cfg, d, pred, args):
    n = _pred_size(phi, pred)
    ds = Div(d, Num(2.0))
    q = Opaque("Qu", n, ds)
    return Mul(q, _pred_call_expr(phi, cfg, pred, args, Div(ds, q)))


def _sym_bruteforce(phi, cfg, d, pred, args):
    n = _pred_size(phi, pred)
    return Mul(n, _pred_call_expr(phi, cfg, pred, args, Div(d, n)))


def _sym_max(phi, cfg, d, pred, args):
    n = _pred_size(phi, pred)
    ds = Div(d, Num(2.0))
    q = Opaque("Qmf_u", n, ds)
    return Mul(q, _pred_call_expr(phi, cfg, pred, args, Div(ds, q)))


PRIM_SYMBOLIC_U = {
    "any": _sym_any,
    "any_det": _sym_bruteforce,
    "any_rand": _sym_bruteforce,
    "max": _sym_max,
    "count": _sym_bruteforce,
}


# ---------------------------------------------------------------------------
# Simplification and printing
# ---------------------------------------------------------------------------

def simplify(expr: CostExpr) -> CostExpr:
    """Drop zero addends, fold numeric products, flatten nested scalars.

    Reassociates floating-point products, so simplified trees agree with the
    originals only up to rounding (well within the 1e-9 checks used here).
    """
    match expr:
        case Add(a, b):
            a, b = simplify(a), simplify(b)
            if a == Num(0.0):
                return b
            if b == Num(0.0):
                return a
            return Add(a, b)
        case Mul(_, _):
            nums, rest = _split_product_simplified(expr)
            if not rest:
                return Num(nums)
            if nums == 0.0:
                return Num(0.0)
            out = rest[0]
            for r in rest[1:]:
                out = Mul(out, r)
            return out if nums == 1.0 else Mul(Num(nums), out)
        case Div(a, b):
            return Div(simplify(a), simplify(b))
        case Opaque(fn, size, budget):
            return Opaque(fn, simplify(size), simplify(budget))
        case _:
            return expr


def _split_product_simplified(expr: CostExpr) -> tuple[float, list[CostExpr]]:
    if isinstance(expr, Mul):
        n1, r1 = _split_product_simplified(expr.lhs)
        n2, r2 = _split_product_simplified(expr.rhs)
        return n1 * n2, r1 + r2
    e = simplify(expr)
    if isinstance(e, Num):
        return e.value, []
    if isinstance(e, Mul):
        return _split_product_simplified(e)
    return 1.0, [e]


def _fmt_num(v: float) -> str:
    if v == int(v):
        return str(int(v))
    return repr(v)


def print_cost_expr(expr: CostExpr) -> str:
    return _print(expr, top=True)


def _print(expr: CostExpr, top: bool = False) -> str:
    match expr:
        case Num(v):
            return _fmt_num(v)
        case Sym(name):
            return str(name)
        case Add(a, b):
            s = f"{_print(a)} + {_print(b)}"
            return s if top else f"({s})"
        case Mul(_, _):
            nums, rest = _split_product(expr)
            parts = []
            if nums != 1.0 or not rest:
                parts.append(_fmt_num(nums))
            parts.extend(_print(r) for r in rest)
            return " × ".join(parts)
        case Div(a, b):
            da = _print(a)
            if isinstance(a, (Add, Mul)):
                da = f"({da})"
            db = _print(b)
            if not isinstance(b, (Num, Sym)):
                db = f"({db})"
            return f"{da}/{db}"
        case Opaque(fn, size, budget):
            return f"{fn}({_print(size, top=True)}, {_print(budget, top=True)})"
    raise CplError(f"not a cost expression: {expr!r}")


def _split_product(expr: CostExpr) -> tuple[float, list[CostExpr]]:
    if isinstance(expr, Mul):
        n1, r1 = _split_product(expr.lhs)
        n2, r2 = _split_product(expr.rhs)
        return n1 * n2, r1 + r2
    if isinstance(expr, Num):
        return expr.value, []
    return 1.0, [expr]
