"""AST for the CPL source language.

A program is a list of function declarations/definitions followed by an
optional entry statement. Types are finite integer ranges Fin<N>, where N is a
literal or a named integer parameter resolved before analysis. Bool is an
alias for Fin<2>. The statement language is SSA: every assigned variable is
fresh.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class FinType:
    """Fin<size>: integers 0..size-1. `size` is an int or a parameter name."""

    size: int | str

    def is_concrete(self) -> bool:
        return isinstance(self.size, int)

    @property
    def concrete_size(self) -> int:
        if not isinstance(self.size, int):
            raise ValueError(f"type Fin<{self.size}> has unresolved parameter")
        return self.size

    def __str__(self) -> str:
        if self.size == 2:
            return "Bool"
        return f"Fin<{self.size}>"


BOOL = FinType(2)


# ---------------------------------------------------------------------------
# Expressions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    value: int
    typ: FinType | None  # None for bare literals; inferred during type checking


@dataclass(frozen=True)
class UnOp:
    op: str  # "not"
    arg: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str  # "=", "<", "+", "&&", "||"
    lhs: "Expr"
    rhs: "Expr"


Expr = Var | Const | UnOp | BinOp

REL_OPS = ("=", "<")
LOGIC_OPS = ("&&", "||")
ARITH_OPS = ("+",)


# ---------------------------------------------------------------------------
# Statements
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Assign:
    target: str
    expr: Expr


@dataclass(frozen=True)
class Seq:
    first: "Stmt"
    rest: "Stmt"


@dataclass(frozen=True)
class CallStmt:
    targets: tuple[str, ...]
    func: str
    args: tuple[str, ...]


PRIMITIVES = ("any", "any_det", "any_rand", "max", "count")


@dataclass(frozen=True)
class PrimCall:
    """target <- prim[pred](args): search over the predicate's last argument."""

    target: str
    prim: str
    pred: str
    args: tuple[str, ...]


Stmt = Assign | Seq | CallStmt | PrimCall


def seq_of(stmts: list["Stmt"]) -> "Stmt":
    """Right-associated sequence of statements."""
    if not stmts:
        raise ValueError("empty statement list")
    out = stmts[-1]
    for s in reversed(stmts[:-1]):
        out = Seq(s, out)
    return out


def seq_items(stmt: Stmt) -> list[Stmt]:
    items: list[Stmt] = []
    while isinstance(stmt, Seq):
        items.append(stmt.first)
        stmt = stmt.rest
    items.append(stmt)
    return items


# ---------------------------------------------------------------------------
# Functions and programs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FunDef:
    name: str
    params: tuple[tuple[str, FinType], ...]
    ret_types: tuple[FinType, ...]
    body: Stmt
    returns: tuple[str, ...]

    @property
    def in_names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.params)

    @property
    def in_types(self) -> tuple[FinType, ...]:
        return tuple(t for _, t in self.params)


@dataclass(frozen=True)
class FunDecl:
    name: str
    in_types: tuple[FinType, ...]
    out_types: tuple[FinType, ...]

    @property
    def in_names(self) -> tuple[str, ...]:
        return tuple(f"in_{i}" for i in range(len(self.in_types)))

    @property
    def out_names(self) -> tuple[str, ...]:
        return tuple(f"out_{i}" for i in range(len(self.out_types)))


Function = FunDef | FunDecl


class FunctionContext:
    """Ordered map from function names to definitions/declarations.

    A function body may only reference functions defined earlier, which rules
    out recursion.
    """

    def __init__(self, funs: list[Function] | None = None):
        self._funs: dict[str, Function] = {}
        for f in funs or []:
            self.add(f)

    def add(self, f: Function) -> None:
        if f.name in self._funs:
            raise CplError(f"duplicate function name {f.name!r}")
        self._funs[f.name] = f

    def __contains__(self, name: str) -> bool:
        return name in self._funs

    def __getitem__(self, name: str) -> Function:
        try:
            return self._funs[name]
        except KeyError:
            raise CplError(f"unknown function {name!r}") from None

    def functions(self) -> list[Function]:
        return list(self._funs.values())

    def names(self) -> list[str]:
        return list(self._funs)

    def declared(self) -> list[FunDecl]:
        return [f for f in self._funs.values() if isinstance(f, FunDecl)]

    def prefix_of(self, name: str) -> "FunctionContext":
        """The context visible to `name`'s body: all earlier entries."""
        out = FunctionContext()
        for f in self._funs.values():
            if f.name == name:
                break
            out.add(f)
        return out


@dataclass(frozen=True)
class Program:
    functions: tuple[Function, ...]
    entry: Stmt | None

    @property
    def fun_context(self) -> FunctionContext:
        return FunctionContext(list(self.functions))

    def free_params(self) -> set[str]:
        names: set[str] = set()

        def of_type(t: FinType) -> None:
            if isinstance(t.size, str):
                names.add(t.size)

        def of_expr(e: Expr) -> None:
            match e:
                case Const(_, t) if t is not None:
                    of_type(t)
                case UnOp(_, a):
                    of_expr(a)
                case BinOp(_, a, b):
                    of_expr(a)
                    of_expr(b)
                case _:
                    pass

        def of_stmt(s: Stmt) -> None:
            match s:
                case Assign(_, e):
                    of_expr(e)
                case Seq(a, b):
                    of_stmt(a)
                    of_stmt(b)
                case _:
                    pass

        for f in self.functions:
            if isinstance(f, FunDecl):
                for t in f.in_types + f.out_types:
                    of_type(t)
            else:
                for _, t in f.params:
                    of_type(t)
                for t in f.ret_types:
                    of_type(t)
                of_stmt(f.body)
        if self.entry is not None:
            of_stmt(self.entry)
        return names


class CplError(Exception):
    """Parse or semantic error in a CPL program."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.line = line
        self.col = col
        if line is not None:
            message = f"{line}:{col}: {message}"
        super().__init__(message)


class CplTypeError(CplError):
    pass
