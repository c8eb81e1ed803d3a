"""General quantum compilation of CPL statements to classical BQPL.

Expressions become assignments; declared functions become ticked procedure
declarations queried classically; defined functions become procedures whose
bodies carry the caller's failure budget; the search primitives dispatch to
their registered realizations (expected-cost quantum search, deterministic
scan, or randomized sampling), with the predicate compiled unitarily at the
budget the cost analysis prescribes.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..cpl.ast import (
    Assign,
    CallStmt,
    CplError,
    FunctionContext,
    FunDecl,
    FunDef,
    PrimCall,
    Program,
    Seq,
    Stmt,
)
from ..cpl.typecheck import TypingContext, type_check_stmt
from ..bqpl.ast import CAssign, CCall, CProcDecl, CProcDef, CStmt, ProcContext, cseq_of
from ..cost.analysis import _split
from ..cost.queries import CostConfig
from .emitter import Emitter
from .unitary import CompileUnsupported


@dataclass
class CompileResult:
    stmt: CStmt
    pi: ProcContext


def compile_fun(
    em: Emitter, cfg: CostConfig, phi: FunctionContext, eps: float, fname: str
) -> str:
    key = (fname, eps)
    if key in em.compile_fun_cache:
        return em.compile_fun_cache[key]
    f = phi[fname]
    if isinstance(f, FunDecl):
        params = TypingContext(
            list(zip(f.in_names, f.in_types)) + list(zip(f.out_names, f.out_types))
        )
        name = em.add(CProcDecl(fname, params, cfg.classical_tick(fname)), source=fname)
    else:
        assert isinstance(f, FunDef)
        body = _compile(em, cfg, phi, eps, f.body)
        gamma_out = type_check_stmt(phi, TypingContext(list(f.params)), f.body)
        outs = [(r, gamma_out[r]) for r in f.returns]
        locals_ = [
            (n, t)
            for n, t in gamma_out.minus(TypingContext(list(f.params))).items()
            if n not in f.returns
        ]
        params = TypingContext(list(f.params) + outs)
        name = em.add(
            CProcDef(fname, params, TypingContext(locals_), body, precision=eps)
        )
    em.compile_fun_cache[key] = name
    return name


def _compile(
    em: Emitter, cfg: CostConfig, phi: FunctionContext, eps: float, stmt: Stmt
) -> CStmt:
    match stmt:
        case Assign(x, e):
            return CAssign(x, e)
        case Seq(s1, s2):
            e1, e2 = _split(cfg, phi, eps, s1, s2)
            return cseq_of([_compile(em, cfg, phi, e1, s1), _compile(em, cfg, phi, e2, s2)])
        case CallStmt(targets, fname, args):
            if len(set(args)) != len(args):
                raise CompileUnsupported(
                    f"aliased arguments in call to {fname!r}; wires pass by reference"
                )
            name = compile_fun(em, cfg, phi, eps, fname)
            return CCall(name, tuple(args) + tuple(targets))
        case PrimCall(target, prim, pred, args):
            from .. import registry

            builder = registry.get(prim).classical_builder
            if builder is None:
                raise CompileUnsupported(f"unsupported primitive {prim!r} in quantum compilation")
            name, params = builder(em, cfg, phi, eps, pred, len(args))
            return CCall(name, tuple(args) + (target,))
    raise CplError(f"not a statement: {stmt!r}")


def compile_stmt(
    phi: FunctionContext,
    gamma_out: TypingContext,
    cfg: CostConfig,
    eps: float,
    stmt: Stmt,
    em: Emitter | None = None,
) -> CompileResult:
    em = em or Emitter()
    c = _compile(em, cfg, phi, eps, stmt)
    return CompileResult(c, em.context())


@dataclass
class CompiledProgram:
    """A compiled entry statement plus everything needed to run it."""

    entry: CStmt
    gamma: TypingContext  # output typing context of the source statement
    pi: ProcContext
    main: str  # name of the emitted main procedure
    source_decl: dict[str, str]
    eps: float


def compile_program(
    phi: FunctionContext,
    entry: Stmt,
    cfg: CostConfig,
    eps: float,
    em: Emitter | None = None,
) -> CompiledProgram:
    """Compile an entry statement and wrap it in a Main procedure."""
    em = em or Emitter()
    gamma = type_check_stmt(phi, TypingContext(), entry)
    c = _compile(em, cfg, phi, eps, entry)
    main = em.add(CProcDef("Main", gamma, TypingContext(), c, precision=eps))
    return CompiledProgram(c, gamma, em.context(), main, dict(em.source_decl), eps)
