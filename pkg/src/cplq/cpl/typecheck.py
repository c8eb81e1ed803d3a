"""Typing for CPL: contexts, expression/statement rules, parameter resolution.

Statement checking enforces SSA (every assigned variable is fresh) and
returns the extended output context. Checking also elaborates the AST: bare
integer literals pick up the type of the other operand of their enclosing
binary operation.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ast import (
    ARITH_OPS,
    BOOL,
    Assign,
    BinOp,
    CallStmt,
    Const,
    CplTypeError,
    Expr,
    FinType,
    FunctionContext,
    FunDecl,
    FunDef,
    Function,
    LOGIC_OPS,
    PrimCall,
    Program,
    REL_OPS,
    Seq,
    Stmt,
    UnOp,
    Var,
)


class TypingContext:
    """Ordered, insertion-preserving map from variable names to types."""

    def __init__(self, items: list[tuple[str, FinType]] | None = None):
        self._items: tuple[tuple[str, FinType], ...] = tuple(items or [])
        self._index = {n: t for n, t in self._items}
        if len(self._index) != len(self._items):
            raise CplTypeError("duplicate variable in typing context")

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def __getitem__(self, name: str) -> FinType:
        try:
            return self._index[name]
        except KeyError:
            raise CplTypeError(f"unbound variable {name!r}") from None

    def __len__(self) -> int:
        return len(self._items)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, TypingContext) and self._items == other._items

    def __iter__(self):
        return iter(self._items)

    def items(self) -> tuple[tuple[str, FinType], ...]:
        return self._items

    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self._items)

    def extend(self, name: str, typ: FinType) -> "TypingContext":
        if name in self._index:
            raise CplTypeError(f"variable {name!r} already assigned")
        return TypingContext(list(self._items) + [(name, typ)])

    def concat(self, other: "TypingContext") -> "TypingContext":
        return TypingContext(list(self._items) + list(other._items))

    def minus(self, other: "TypingContext") -> "TypingContext":
        return TypingContext([(n, t) for n, t in self._items if n not in other])

    def __repr__(self) -> str:
        inner = ", ".join(f"{n}: {t}" for n, t in self._items)
        return "{" + inner + "}"


def type_check_expr(ctx: TypingContext, expr: Expr) -> FinType:
    typ, _ = elaborate_expr(ctx, expr)
    return typ


def elaborate_expr(ctx: TypingContext, expr: Expr) -> tuple[FinType, Expr]:
    """Type an expression, filling in the types of bare literals."""
    match expr:
        case Var(name):
            return ctx[name], expr
        case Const(v, None):
            raise CplTypeError(f"cannot infer type of bare literal {v}")
        case Const(v, t):
            if t.is_concrete() and not (0 <= v < t.concrete_size):
                raise CplTypeError(f"constant {v} out of range for {t}")
            return t, expr
        case UnOp("not", a):
            ta, ea = elaborate_expr(ctx, a)
            if ta != BOOL:
                raise CplTypeError(f"'not' needs Bool, got {ta}")
            return BOOL, UnOp("not", ea)
        case BinOp(op, a, b):
            # infer bare-literal operands from the opposite side
            if isinstance(a, Const) and a.typ is None:
                tb, eb = elaborate_expr(ctx, b)
                ta, ea = elaborate_expr(ctx, Const(a.value, tb))
            elif isinstance(b, Const) and b.typ is None:
                ta, ea = elaborate_expr(ctx, a)
                tb, eb = elaborate_expr(ctx, Const(b.value, ta))
            else:
                ta, ea = elaborate_expr(ctx, a)
                tb, eb = elaborate_expr(ctx, b)
            if op in LOGIC_OPS:
                if ta != BOOL or tb != BOOL:
                    raise CplTypeError(f"{op!r} needs Bool operands, got {ta}, {tb}")
                return BOOL, BinOp(op, ea, eb)
            if ta != tb:
                raise CplTypeError(f"operand type mismatch for {op!r}: {ta} vs {tb}")
            if op in REL_OPS:
                return BOOL, BinOp(op, ea, eb)
            if op in ARITH_OPS:
                return ta, BinOp(op, ea, eb)
            raise CplTypeError(f"unknown operator {op!r}")
    raise TypeError(f"not an expression: {expr!r}")


def fun_signature(f: Function) -> tuple[tuple[FinType, ...], tuple[FinType, ...]]:
    if isinstance(f, FunDecl):
        return f.in_types, f.out_types
    return f.in_types, f.ret_types


def type_check_stmt(
    phi: FunctionContext, ctx: TypingContext, stmt: Stmt
) -> TypingContext:
    ctx2, _ = elaborate_stmt(phi, ctx, stmt)
    return ctx2


def elaborate_stmt(
    phi: FunctionContext, ctx: TypingContext, stmt: Stmt
) -> tuple[TypingContext, Stmt]:
    match stmt:
        case Assign(x, e):
            t, e2 = elaborate_expr(ctx, e)
            return ctx.extend(x, t), Assign(x, e2)
        case Seq(s1, s2):
            c1, e1 = elaborate_stmt(phi, ctx, s1)
            c2, e2 = elaborate_stmt(phi, c1, s2)
            return c2, Seq(e1, e2)
        case CallStmt(targets, fname, args):
            f = phi[fname]
            in_types, out_types = fun_signature(f)
            if len(args) != len(in_types):
                raise CplTypeError(
                    f"{fname} expects {len(in_types)} arguments, got {len(args)}"
                )
            for a, t in zip(args, in_types):
                if ctx[a] != t:
                    raise CplTypeError(f"argument {a!r} of {fname}: expected {t}, got {ctx[a]}")
            if len(targets) != len(out_types):
                raise CplTypeError(
                    f"{fname} returns {len(out_types)} values, got {len(targets)} targets"
                )
            out = ctx
            for x, t in zip(targets, out_types):
                out = out.extend(x, t)
            return out, stmt
        case PrimCall(target, prim, pred, args):
            f = phi[pred]
            in_types, out_types = fun_signature(f)
            if len(in_types) < 1:
                raise CplTypeError(f"{prim} predicate {pred!r} needs at least one argument")
            if len(args) != len(in_types) - 1:
                raise CplTypeError(
                    f"{prim}[{pred}] expects {len(in_types) - 1} fixed arguments, got {len(args)}"
                )
            for a, t in zip(args, in_types[:-1]):
                if ctx[a] != t:
                    raise CplTypeError(f"argument {a!r} of {prim}[{pred}]: expected {t}, got {ctx[a]}")
            search_t = in_types[-1]
            if len(out_types) != 1:
                raise CplTypeError(f"{prim} predicate {pred!r} must return a single value")
            if prim in ("any", "any_det", "any_rand", "count"):
                if out_types[0] != BOOL:
                    raise CplTypeError(f"{prim} predicate {pred!r} must return Bool")
            # max accepts any Fin<M> result
            if prim == "max":
                result_t = out_types[0]
            elif prim == "count":
                if not search_t.is_concrete():
                    raise CplTypeError("count needs a concrete search space size")
                result_t = FinType(search_t.concrete_size + 1)
            else:
                result_t = BOOL
            return ctx.extend(target, result_t), stmt
    raise TypeError(f"not a statement: {stmt!r}")


def check_function(phi: FunctionContext, f: Function) -> Function:
    """Check a def's body under its visible prefix context; elaborate it."""
    if isinstance(f, FunDecl):
        return f
    ctx = TypingContext(list(f.params))
    out, body = elaborate_stmt(phi, ctx, f.body)
    param_names = set(f.in_names)
    for r, t in zip(f.returns, f.ret_types):
        if r in param_names:
            raise CplTypeError(f"def {f.name}: returned variable {r!r} is a parameter")
        if r not in out:
            raise CplTypeError(f"def {f.name}: returned variable {r!r} not computed")
        if out[r] != t:
            raise CplTypeError(f"def {f.name}: return {r!r} has type {out[r]}, declared {t}")
    return FunDef(f.name, f.params, f.ret_types, body, f.returns)


def check_program(program: Program) -> Program:
    """Type-check the whole program and return its elaborated form.

    Each body is checked under the functions defined before it; the entry
    statement is checked under the full context starting from empty.
    """
    unresolved = program.free_params()
    if unresolved:
        raise CplTypeError(f"unresolved parameters: {sorted(unresolved)}")
    phi = FunctionContext()
    funs: list[Function] = []
    for f in program.functions:
        f2 = check_function(phi, f)
        phi.add(f2)
        funs.append(f2)
    entry = program.entry
    if entry is not None:
        _, entry = elaborate_stmt(phi, TypingContext(), entry)
    return Program(tuple(funs), entry)


# ---------------------------------------------------------------------------
# Parameter resolution
# ---------------------------------------------------------------------------

def resolve_params(program: Program, bindings: dict[str, int]) -> Program:
    """Substitute named size parameters by concrete values (all >= 1)."""
    free = program.free_params()
    missing = sorted(free - set(bindings))
    if missing:
        raise CplTypeError(f"unbound parameter {missing[0]}")
    for name, v in bindings.items():
        if name in free and v < 1:
            raise CplTypeError(f"parameter {name} must be >= 1, got {v}")

    def of_type(t: FinType) -> FinType:
        if isinstance(t.size, str):
            return FinType(bindings[t.size])
        return t

    def of_expr(e: Expr) -> Expr:
        match e:
            case Const(v, t) if t is not None:
                return Const(v, of_type(t))
            case UnOp(op, a):
                return UnOp(op, of_expr(a))
            case BinOp(op, a, b):
                return BinOp(op, of_expr(a), of_expr(b))
            case _:
                return e

    def of_stmt(s: Stmt) -> Stmt:
        match s:
            case Assign(x, e):
                return Assign(x, of_expr(e))
            case Seq(a, b):
                return Seq(of_stmt(a), of_stmt(b))
            case _:
                return s

    funs: list[Function] = []
    for f in program.functions:
        if isinstance(f, FunDecl):
            funs.append(
                FunDecl(
                    f.name,
                    tuple(of_type(t) for t in f.in_types),
                    tuple(of_type(t) for t in f.out_types),
                )
            )
        else:
            funs.append(
                FunDef(
                    f.name,
                    tuple((n, of_type(t)) for n, t in f.params),
                    tuple(of_type(t) for t in f.ret_types),
                    of_stmt(f.body),
                    f.returns,
                )
            )
    entry = of_stmt(program.entry) if program.entry is not None else None
    return Program(tuple(funs), entry)
