"""Syntactic transformations: statement inversion and sugar expansion."""

from __future__ import annotations

from ..cpl.ast import BinOp, Const, Var
from .ast import (
    BqplError,
    CAssign,
    CCall,
    CCallMeas,
    CCallMeasIndexed,
    CFor,
    CIf,
    CRandom,
    CRandomRange,
    CRepeat,
    CSeq,
    CSkip,
    CStmt,
    CWhileLeq,
    UApply,
    UCall,
    UCallAdj,
    USeq,
    USkip,
    UStmt,
    UWith,
    adj,
    cseq_of,
    useq_of,
)


def invert(w: UStmt) -> UStmt:
    """Adjoint of a unitary statement; an involution on statements."""
    match w:
        case USkip():
            return w
        case UApply(wires, op):
            return UApply(wires, adj(op))
        case USeq(a, b):
            return USeq(invert(b), invert(a))
        case UCall(g, wires):
            return UCallAdj(g, wires)
        case UCallAdj(g, wires):
            return UCall(g, wires)
        case UWith(compute, body):
            # (S1; S2; Inv S1)^-1 = S1; Inv S2; Inv S1
            return UWith(compute, invert(body))
    raise BqplError(f"not a unitary statement: {w!r}")


def desugar_ustmt(w: UStmt) -> UStmt:
    match w:
        case USkip() | UApply() | UCall() | UCallAdj():
            return w
        case USeq(a, b):
            return useq_of([desugar_ustmt(a), desugar_ustmt(b)])
        case UWith(compute, body):
            c = desugar_ustmt(compute)
            return useq_of([c, desugar_ustmt(body), invert(c)])
    raise BqplError(f"not a unitary statement: {w!r}")


def desugar_cstmt(c: CStmt) -> CStmt:
    match c:
        case CSkip() | CAssign() | CRandom() | CRandomRange() | CCall() | CCallMeas():
            return c
        case CSeq(a, b):
            return cseq_of([desugar_cstmt(a), desugar_cstmt(b)])
        case CIf(b, body):
            return CIf(b, desugar_cstmt(body))
        case CRepeat(k, body):
            if k < 0:
                raise BqplError(f"negative repeat bound {k}")
            inner = desugar_cstmt(body)
            return cseq_of([inner] * k)
        case CWhileLeq(k, b, body):
            return desugar_cstmt(CRepeat(k, CIf(b, body)))
        case CFor(var, typ, values, body):
            inner = desugar_cstmt(body)
            steps: list[CStmt] = []
            for v in values:
                steps.append(CAssign(var, Const(v, typ)))
                steps.append(inner)
            return cseq_of(steps)
        case CCallMeasIndexed(base, index, typ, values, args):
            # selection variable `_sel_<index>` must be declared by the caller
            sel = sel_var(index)
            steps = []
            for v in values:
                steps.append(CAssign(sel, BinOp("=", Var(index), Const(v, typ))))
                steps.append(CIf(sel, CCallMeas(f"{base}_{v}", args)))
            return cseq_of(steps)
    raise BqplError(f"not a classical statement: {c!r}")


def sel_var(index: str) -> str:
    return f"_sel_{index}"


def desugar(stmt):
    """Expand all sugar in a unitary or classical statement."""
    if isinstance(stmt, (USkip, UApply, USeq, UCall, UCallAdj, UWith)):
        return desugar_ustmt(stmt)
    return desugar_cstmt(stmt)
