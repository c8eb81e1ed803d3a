"""Canonical text form for .bqpl programs.

Precision/provenance annotations are emitted as comments and ignored by the
parser; everything else round-trips.
"""

from __future__ import annotations

from ..cpl.printer import print_expr
from ..cpl.typecheck import TypingContext
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
    cseq_items,
    useq_items,
)


def _fmt_tick(v: float) -> str:
    return str(int(v)) if v == int(v) else repr(v)


def print_unitary_op(op: UnitaryOp) -> str:
    match op:
        case GateOp(name):
            return name
        case EmbedOp(params, expr):
            return f"Embed[({', '.join(params)}) => {print_expr(expr)}]"
        case UnifOp(t):
            return f"Unif[{t}]"
        case Refl0Op(t):
            return f"Refl0[{t}]"
        case AdjOp(inner):
            return f"Adj-{print_unitary_op(inner)}"
        case CtrlOp(inner):
            return f"Ctrl-{print_unitary_op(inner)}"
    raise BqplError(f"not a unitary operator: {op!r}")


def _block(lines: list[str], indent: str) -> str:
    inner = "\n".join(lines)
    return "{\n" + inner + "\n" + indent + "}"


def print_ustmt(w: UStmt, indent: str = "") -> str:
    match w:
        case USkip():
            return f"{indent}skip;"
        case UApply(wires, op):
            return f"{indent}{', '.join(wires)} *= {print_unitary_op(op)};"
        case USeq(_, _):
            return "\n".join(print_ustmt(s, indent) for s in useq_items(w))
        case UCall(g, wires):
            return f"{indent}call {g}({', '.join(wires)});"
        case UCallAdj(g, wires):
            return f"{indent}call† {g}({', '.join(wires)});"
        case UWith(compute, body):
            c = _block([print_ustmt(compute, indent + "  ")], indent)
            b = _block([print_ustmt(body, indent + "  ")], indent)
            return f"{indent}with {c} do {b}"
    raise BqplError(f"not a unitary statement: {w!r}")


def print_cstmt(c: CStmt, indent: str = "") -> str:
    match c:
        case CSkip():
            return f"{indent}skip;"
        case CAssign(x, e):
            return f"{indent}{x} := {print_expr(e)};"
        case CRandom(x, t):
            return f"{indent}{x} :=$ {t};"
        case CRandomRange(x, y):
            return f"{indent}{x} :=$ [1..{y}];"
        case CSeq(_, _):
            return "\n".join(print_cstmt(s, indent) for s in cseq_items(c))
        case CIf(b, body):
            return f"{indent}if ({b}) " + _block([print_cstmt(body, indent + "  ")], indent)
        case CCall(h, args):
            return f"{indent}call {h}({', '.join(args)});"
        case CCallMeas(g, args):
            return f"{indent}call_uproc_and_meas {g}({', '.join(args)});"
        case CRepeat(k, body):
            return f"{indent}repeat {k} " + _block([print_cstmt(body, indent + "  ")], indent)
        case CWhileLeq(k, b, body):
            return f"{indent}while[{k}] ({b}) " + _block([print_cstmt(body, indent + "  ")], indent)
        case CFor(x, t, values, body):
            vals = ", ".join(str(v) for v in values)
            head = f"{indent}for {x} in {{{vals}}} : {t} "
            return head + _block([print_cstmt(body, indent + "  ")], indent)
        case CCallMeasIndexed(base, index, t, values, args):
            vals = ", ".join(str(v) for v in values)
            return (
                f"{indent}call_uproc_and_meas {base}[{index} in {{{vals}}} : {t}]"
                f"({', '.join(args)});"
            )
    raise BqplError(f"not a classical statement: {c!r}")


def _params(ctx: TypingContext) -> str:
    return ", ".join(f"{n}: {t}" for n, t in ctx.items())


def print_proc(p: Proc) -> str:
    lines = []
    match p:
        case UProcDecl(name, params, tick):
            lines.append(f"declare uproc {name}({_params(params)}) :: tick({_fmt_tick(tick)})")
        case CProcDecl(name, params, tick):
            lines.append(f"declare proc {name}({_params(params)}) :: tick({_fmt_tick(tick)})")
        case UProcDef(name, params, body, precision, tag):
            if tag:
                lines.append(f"// {tag}")
            if precision is not None:
                lines.append(f"// precision: {precision:.6g}")
            lines.append(f"uproc {name}({_params(params)}) do " + _block([print_ustmt(body, "  ")], ""))
        case CProcDef(name, params, locals_, body, precision, tag):
            if tag:
                lines.append(f"// {tag}")
            if precision is not None:
                lines.append(f"// fail prob: {precision:.6g}")
            head = f"proc {name}({_params(params)})"
            if len(locals_):
                head += f"\n  {{ locals: ({_params(locals_)}) }}"
            lines.append(head + "\ndo " + _block([print_cstmt(body, "  ")], ""))
        case _:
            raise BqplError(f"not a procedure: {p!r}")
    return "\n".join(lines)


def print_bqpl(pi: ProcContext) -> str:
    procs = pi.procs()
    if not procs:
        return ""
    return "\n\n".join(print_proc(p) for p in procs) + "\n"
