"""Type checking for BQPL statements and procedure contexts.

Checking elaborates bare integer literals (as in the source language) and
rejects aliasing: the same variable may not be passed twice to one call or
appear twice in one unitary application, since by-reference wire semantics
would break.
"""

from __future__ import annotations

from ..cpl.ast import BOOL, CplTypeError, FinType
from ..cpl.typecheck import TypingContext, elaborate_expr
from .ast import (
    AdjOp,
    BqplError,
    CAssign,
    CCall,
    CCallMeas,
    CCallMeasIndexed,
    CFor,
    CIf,
    CProcDecl,
    CProcDef,
    CRandom,
    CRandomRange,
    CRepeat,
    CSeq,
    CSkip,
    CStmt,
    CtrlOp,
    CWhileLeq,
    EmbedOp,
    GateOp,
    Proc,
    ProcContext,
    Refl0Op,
    UApply,
    UCall,
    UCallAdj,
    UnifOp,
    UnitaryOp,
    UProcDecl,
    UProcDef,
    USeq,
    USkip,
    UStmt,
    UWith,
)
from .transform import sel_var


def check_unitary_op(op: UnitaryOp, wire_types: tuple[FinType, ...]) -> UnitaryOp:
    match op:
        case GateOp("CNOT"):
            if wire_types != (BOOL, BOOL):
                raise BqplError(f"CNOT needs two Bool wires, got {wire_types}")
            return op
        case GateOp(name):
            if wire_types != (BOOL,):
                raise BqplError(f"{name} needs one Bool wire, got {wire_types}")
            return op
        case UnifOp(t) | Refl0Op(t):
            if wire_types != (t,):
                raise BqplError(f"{op} applies to one {t} wire, got {wire_types}")
            return op
        case AdjOp(inner):
            return AdjOp(check_unitary_op(inner, wire_types))
        case CtrlOp(inner):
            if not wire_types or wire_types[0] != BOOL:
                raise BqplError("controlled operator needs a leading Bool wire")
            return CtrlOp(check_unitary_op(inner, wire_types[1:]))
        case EmbedOp(params, expr):
            if len(wire_types) != len(params) + 1:
                raise BqplError(
                    f"Embed over {len(params)} inputs applies to {len(params) + 1} wires"
                )
            ctx = TypingContext(list(zip(params, wire_types[:-1])))
            try:
                t, expr2 = elaborate_expr(ctx, expr)
            except CplTypeError as e:
                raise BqplError(f"ill-typed Embed expression: {e}") from None
            if t != wire_types[-1]:
                raise BqplError(f"Embed output has type {t}, wire is {wire_types[-1]}")
            return EmbedOp(params, expr2)
    raise BqplError(f"not a unitary operator: {op!r}")


def _check_wires(gamma: TypingContext, wires: tuple[str, ...]) -> tuple[FinType, ...]:
    if len(set(wires)) != len(wires):
        raise BqplError(f"duplicate variable passed by reference: {wires}")
    try:
        return tuple(gamma[w] for w in wires)
    except CplTypeError as e:
        raise BqplError(str(e)) from None


def _proc_params(pi: ProcContext, name: str) -> TypingContext:
    return pi[name].params


def check_ustmt(pi: ProcContext, gamma: TypingContext, w: UStmt) -> UStmt:
    match w:
        case USkip():
            return w
        case UApply(wires, op):
            types = _check_wires(gamma, wires)
            return UApply(wires, check_unitary_op(op, types))
        case USeq(a, b):
            return USeq(check_ustmt(pi, gamma, a), check_ustmt(pi, gamma, b))
        case UCall(g, wires) | UCallAdj(g, wires):
            proc = pi[g]
            if not isinstance(proc, (UProcDef, UProcDecl)):
                raise BqplError(f"{g!r} is not a unitary procedure")
            types = _check_wires(gamma, wires)
            want = tuple(t for _, t in proc.params.items())
            if types != want:
                raise BqplError(f"call {g}: wire types {types} do not match {want}")
            return w
        case UWith(compute, body):
            return UWith(check_ustmt(pi, gamma, compute), check_ustmt(pi, gamma, body))
    raise BqplError(f"not a unitary statement: {w!r}")


def check_cstmt(pi: ProcContext, gamma: TypingContext, c: CStmt) -> CStmt:
    match c:
        case CSkip():
            return c
        case CAssign(x, e):
            try:
                t, e2 = elaborate_expr(gamma, e)
            except CplTypeError as err:
                raise BqplError(str(err)) from None
            if t != gamma[x]:
                raise BqplError(f"assignment to {x}: expression has type {t}, variable {gamma[x]}")
            return CAssign(x, e2)
        case CRandom(x, t):
            if gamma[x] != t:
                raise BqplError(f"{x} :=$ {t}: variable has type {gamma[x]}")
            return c
        case CRandomRange(x, y):
            if gamma[x].concrete_size < gamma[y].concrete_size:
                raise BqplError(
                    f"{x} :=$ [1..{y}]: target type {gamma[x]} cannot hold {gamma[y]}"
                )
            return c
        case CSeq(a, b):
            return CSeq(check_cstmt(pi, gamma, a), check_cstmt(pi, gamma, b))
        case CIf(b, body):
            if gamma[b] != BOOL:
                raise BqplError(f"if condition {b!r} must be Bool")
            return CIf(b, check_cstmt(pi, gamma, body))
        case CCall(h, args):
            proc = pi[h]
            if not isinstance(proc, (CProcDef, CProcDecl)):
                raise BqplError(f"{h!r} is not a classical procedure")
            types = _check_wires(gamma, args)
            want = tuple(t for _, t in proc.params.items())
            if types != want:
                raise BqplError(f"call {h}: argument types {types} do not match {want}")
            return c
        case CCallMeas(g, args):
            proc = pi[g]
            if not isinstance(proc, (UProcDef, UProcDecl)):
                raise BqplError(f"{g!r} is not a unitary procedure")
            types = _check_wires(gamma, args)
            want = tuple(t for _, t in proc.params.items())
            if len(types) > len(want) or types != want[: len(types)]:
                raise BqplError(
                    f"call_uproc_and_meas {g}: argument types {types} are not a prefix of {want}"
                )
            return c
        case CRepeat(k, body):
            return CRepeat(k, check_cstmt(pi, gamma, body))
        case CWhileLeq(k, b, body):
            if gamma[b] != BOOL:
                raise BqplError(f"while condition {b!r} must be Bool")
            return CWhileLeq(k, b, check_cstmt(pi, gamma, body))
        case CFor(x, t, values, body):
            if gamma[x] != t:
                raise BqplError(f"for variable {x} has type {gamma[x]}, loop declares {t}")
            for v in values:
                if not (0 <= v < t.concrete_size):
                    raise BqplError(f"for value {v} out of range for {t}")
            return CFor(x, t, values, check_cstmt(pi, gamma, body))
        case CCallMeasIndexed(base, index, t, values, args):
            if gamma[index] != t:
                raise BqplError(f"index {index} has type {gamma[index]}, call declares {t}")
            if sel_var(index) not in gamma or gamma[sel_var(index)] != BOOL:
                raise BqplError(f"indexed call needs Bool selector {sel_var(index)!r}")
            for v in values:
                check_cstmt(pi, gamma, CCallMeas(f"{base}_{v}", args))
            return c
    raise BqplError(f"not a classical statement: {c!r}")


def type_check_bqpl(pi: ProcContext, gamma: TypingContext, stmt) -> None:
    """Accept iff the statement is derivable; raises BqplError otherwise."""
    if isinstance(stmt, (USkip, UApply, USeq, UCall, UCallAdj, UWith)):
        check_ustmt(pi, gamma, stmt)
    else:
        check_cstmt(pi, gamma, stmt)


def check_proc(pi: ProcContext, proc: Proc) -> Proc:
    match proc:
        case UProcDef(name, params, body, precision, tag):
            return UProcDef(name, params, check_ustmt(pi, params, body), precision, tag)
        case CProcDef(name, params, locals_, body, precision, tag):
            gamma = params.concat(locals_)
            return CProcDef(name, params, locals_, check_cstmt(pi, gamma, body), precision, tag)
        case _:
            return proc


def check_proc_context(pi: ProcContext) -> ProcContext:
    """A procedure context is well-typed iff every body checks under it."""
    return ProcContext([check_proc(pi, p) for p in pi.procs()])
