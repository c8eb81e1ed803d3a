"""Canonical pretty-printer for CPL programs.

Emits one statement per line with two-space indentation inside function
bodies. parse(print(ast)) == ast.
"""

from __future__ import annotations

from .ast import (
    Assign,
    BinOp,
    CallStmt,
    Const,
    Expr,
    FunDecl,
    FunDef,
    Function,
    PrimCall,
    Program,
    Stmt,
    UnOp,
    Var,
    seq_items,
)


def print_expr(e: Expr, nested: bool = False) -> str:
    match e:
        case Var(name):
            return name
        case Const(v, None):
            return str(v)
        case Const(v, t):
            return f"const {v} : {t}"
        case UnOp(op, a):
            s = f"{op} {print_expr(a, nested=True)}"
            return f"({s})" if nested else s
        case BinOp(op, a, b):
            s = f"{print_expr(a, nested=True)} {op} {print_expr(b, nested=True)}"
            return f"({s})" if nested else s
    raise TypeError(f"not an expression: {e!r}")


def print_stmt_line(s: Stmt) -> str:
    match s:
        case Assign(x, e):
            return f"{x} <- {print_expr(e)}"
        case CallStmt(targets, f, args):
            return f"{', '.join(targets)} <- {f}({', '.join(args)})"
        case PrimCall(target, prim, pred, args):
            return f"{target} <- {prim}[{pred}]({', '.join(args)})"
    raise TypeError(f"not a simple statement: {s!r}")


def print_stmt(s: Stmt, indent: str = "") -> str:
    lines = [indent + print_stmt_line(item) for item in seq_items(s)]
    return ";\n".join(lines)


def print_function(f: Function) -> str:
    if isinstance(f, FunDecl):
        ins = ", ".join(str(t) for t in f.in_types)
        if len(f.out_types) == 1:
            outs = str(f.out_types[0])
        else:
            outs = "(" + ", ".join(str(t) for t in f.out_types) + ")"
        return f"declare {f.name}({ins}) -> {outs} end"
    assert isinstance(f, FunDef)
    params = ", ".join(f"{n}: {t}" for n, t in f.params)
    if len(f.ret_types) == 1:
        outs = str(f.ret_types[0])
    else:
        outs = "(" + ", ".join(str(t) for t in f.ret_types) + ")"
    body = print_stmt(f.body, indent="  ")
    rets = ", ".join(f.returns)
    return f"def {f.name}({params}) -> {outs}\ndo\n{body};\n  return {rets}\nend"


def print_program(p: Program) -> str:
    parts = [print_function(f) for f in p.functions]
    if p.entry is not None:
        parts.append(print_stmt(p.entry))
    return "\n\n".join(parts) + "\n"
