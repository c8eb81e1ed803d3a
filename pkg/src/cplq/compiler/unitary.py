"""Unitary compilation of CPL statements and functions to BQPL.

Statements compile to unitary statements over the source variables plus a
disjoint zero-initialized auxiliary context. Expressions become reversible
embeddings; function calls compile the callee and wrap it compute-uncompute
so intermediate values are restored; the search primitive splits its norm
budget between the search procedure and the predicate compilation.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..cpl.ast import (
    Assign,
    BinOp,
    CallStmt,
    Const,
    CplError,
    Expr,
    FinType,
    FunctionContext,
    FunDecl,
    FunDef,
    PrimCall,
    Seq,
    Stmt,
    UnOp,
    Var,
)
from ..cpl.typecheck import TypingContext, type_check_stmt
from ..bqpl.ast import EmbedOp, ProcContext, UApply, UCall, UProcDecl, UProcDef, UStmt, useq_of
from ..cost.analysis import _split
from ..cost.queries import CostConfig
from .emitter import Emitter


class CompileUnsupported(CplError):
    pass


@dataclass
class UCompileResult:
    stmt: UStmt
    aux: TypingContext
    pi: ProcContext


def free_vars(e: Expr) -> list[str]:
    out: list[str] = []

    def walk(x: Expr) -> None:
        match x:
            case Var(n):
                if n not in out:
                    out.append(n)
            case UnOp(_, a):
                walk(a)
            case BinOp(_, a, b):
                walk(a)
                walk(b)
            case _:
                pass

    walk(e)
    return out


def ucompile_fun(
    em: Emitter, cfg: CostConfig, phi: FunctionContext, delta: float, fname: str
) -> str:
    """Compile a function to a uproc (declarations become ticked decls)."""
    key = (fname, delta)
    if key in em.ucompile_fun_cache:
        return em.ucompile_fun_cache[key]
    f = phi[fname]
    if isinstance(f, FunDecl):
        params = TypingContext(
            list(zip(f.in_names, f.in_types)) + list(zip(f.out_names, f.out_types))
        )
        name = em.add(UProcDecl(fname, params, cfg.quantum_tick(fname)), source=fname)
    else:
        assert isinstance(f, FunDef)
        gamma_out = type_check_stmt(phi, TypingContext(list(f.params)), f.body)
        body_vars = gamma_out.minus(TypingContext(list(f.params)))
        outs = [(r, gamma_out[r]) for r in f.returns]
        rest = [(n, t) for n, t in body_vars.items() if n not in f.returns]
        w, aux = _ucompile(em, cfg, phi, delta, f.body)
        params = TypingContext(list(f.params) + outs + rest + aux)
        name = em.add(UProcDef(fname, params, w, precision=delta))
    em.ucompile_fun_cache[key] = name
    return name


def _alloc_aux(em: Emitter, items: list[tuple[str, FinType]]) -> list[tuple[str, FinType]]:
    return [(em.fresh_wire("aux"), t) for _, t in items]


def _ucompile(
    em: Emitter, cfg: CostConfig, phi: FunctionContext, delta: float, stmt: Stmt
) -> tuple[UStmt, list[tuple[str, FinType]]]:
    match stmt:
        case Assign(x, e):
            vs = free_vars(e)
            return UApply(tuple(vs) + (x,), EmbedOp(tuple(vs), e)), []
        case Seq(s1, s2):
            d1, d2 = _split(cfg, phi, delta, s1, s2)
            w1, a1 = _ucompile(em, cfg, phi, d1, s1)
            w2, a2 = _ucompile(em, cfg, phi, d2, s2)
            return useq_of([w1, w2]), a1 + a2
        case CallStmt(targets, fname, args):
            from .clean import clean_proc

            if len(set(args)) != len(args):
                raise CompileUnsupported(
                    f"aliased arguments in call to {fname!r}; wires pass by reference"
                )
            f = phi[fname]
            g = ucompile_fun(em, cfg, phi, delta / 2, fname)
            outs = f.out_names if isinstance(f, FunDecl) else f.returns
            wrapper = clean_proc(em, g, tuple(outs), precision=delta)
            sig = em.procs[wrapper].params
            n_pre = len(args)
            n_cp = len(targets)
            post = sig.items()[n_pre + n_cp:]
            aux = _alloc_aux(em, list(post))
            wires = tuple(args) + tuple(targets) + tuple(n for n, _ in aux)
            return UCall(wrapper, wires), aux
        case PrimCall(target, prim, pred, args):
            from .. import registry

            builder = registry.get(prim).unitary_builder
            if builder is None:
                raise CompileUnsupported(f"unsupported primitive {prim!r} in unitary compilation")
            name, params = builder(em, cfg, phi, delta, pred, len(args))
            post = params.items()[len(args) + 1:]
            aux = _alloc_aux(em, list(post))
            wires = tuple(args) + (target,) + tuple(n for n, _ in aux)
            return UCall(name, wires), aux
    raise CplError(f"not a statement: {stmt!r}")


def ucompile(
    phi: FunctionContext,
    gamma: TypingContext,
    cfg: CostConfig,
    delta: float,
    stmt: Stmt,
    em: Emitter | None = None,
) -> UCompileResult:
    em = em or Emitter()
    w, aux = _ucompile(em, cfg, phi, delta, stmt)
    return UCompileResult(w, TypingContext(aux), em.context())
