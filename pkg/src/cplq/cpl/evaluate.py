"""Deterministic denotational semantics for CPL.

States are ordered maps from variable names to typed values. Evaluating a
statement returns only the newly bound variables. Declared functions are
interpreted by total tables supplied as input data; `+` is addition modulo
the operand type's size, matching the XOR-style unitary embedding used by the
compiler.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

from .ast import (
    BOOL,
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
from .typecheck import TypingContext, fun_signature


@dataclass(frozen=True)
class Value:
    value: int
    typ: FinType

    def __post_init__(self):
        size = self.typ.concrete_size
        if not (0 <= self.value < size):
            raise CplError(f"value {self.value} out of range for {self.typ}")


class State:
    """Ordered map variable -> Value, keyed consistently with a TypingContext."""

    def __init__(self, items: list[tuple[str, Value]] | None = None):
        self._items: dict[str, Value] = dict(items or [])

    def __contains__(self, name: str) -> bool:
        return name in self._items

    def __getitem__(self, name: str) -> Value:
        try:
            return self._items[name]
        except KeyError:
            raise CplError(f"variable {name!r} not in state") from None

    def __len__(self) -> int:
        return len(self._items)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, State) and self._items == other._items

    def items(self) -> list[tuple[str, Value]]:
        return list(self._items.items())

    def names(self) -> list[str]:
        return list(self._items)

    def concat(self, other: "State") -> "State":
        overlap = set(self._items) & set(other._items)
        if overlap:
            raise CplError(f"state concatenation overlaps on {sorted(overlap)}")
        return State(self.items() + other.items())

    def typing_context(self) -> TypingContext:
        return TypingContext([(n, v.typ) for n, v in self._items.items()])

    def __repr__(self) -> str:
        inner = ", ".join(f"{n}: {v.value}" for n, v in self._items.items())
        return "{" + inner + "}"


# ---------------------------------------------------------------------------
# Interpretations of declared functions
# ---------------------------------------------------------------------------

class Interpretation:
    """Total table for one declared function."""

    def __init__(self, decl: FunDecl, table: dict[tuple[int, ...], tuple[int, ...]]):
        self.decl = decl
        self.table = table
        sizes = [t.concrete_size for t in decl.in_types]
        for ins in itertools.product(*[range(s) for s in sizes]):
            if ins not in table:
                raise CplError(f"interpretation of {decl.name!r} missing entry {ins}")
        for ins, outs in table.items():
            if len(outs) != len(decl.out_types):
                raise CplError(f"interpretation of {decl.name!r}: bad arity at {ins}")
            for o, t in zip(outs, decl.out_types):
                if not (0 <= o < t.concrete_size):
                    raise CplError(
                        f"interpretation of {decl.name!r}: output {o} out of range for {t}"
                    )

    def __call__(self, *args: int) -> tuple[int, ...]:
        return self.table[tuple(args)]

    @classmethod
    def from_function(cls, decl: FunDecl, fn) -> "Interpretation":
        sizes = [t.concrete_size for t in decl.in_types]
        table = {}
        for ins in itertools.product(*[range(s) for s in sizes]):
            out = fn(*ins)
            if isinstance(out, int):
                out = (out,)
            table[ins] = tuple(out)
        return cls(decl, table)

    @classmethod
    def from_matrix(cls, decl: FunDecl, rows: list[list[int]]) -> "Interpretation":
        table = {
            (i, j): (v,) for i, row in enumerate(rows) for j, v in enumerate(row)
        }
        return cls(decl, table)


class EvalContext:
    """Function context plus the interpretation of every declared function."""

    def __init__(self, phi: FunctionContext, interps: dict[str, Interpretation]):
        declared = {f.name for f in phi.declared()}
        missing = declared - set(interps)
        if missing:
            raise CplError(f"missing interpretation for declared function(s) {sorted(missing)}")
        extra = set(interps) - declared
        if extra:
            raise CplError(f"interpretation given for unknown function(s) {sorted(extra)}")
        self.phi = phi
        self.interps = interps

    def interp(self, name: str) -> Interpretation:
        try:
            return self.interps[name]
        except KeyError:
            raise CplError(f"missing interpretation for declared function {name!r}") from None


def load_interpretations(phi: FunctionContext, doc: dict) -> dict[str, Interpretation]:
    """Parse the interpretation-file JSON format.

    {"Matrix": {"kind": "dense", "dims": [N, M], "values": [[...], ...]},
     "f": {"kind": "table", "entries": {"i,j": "o1,o2", ...}}}
    """
    out: dict[str, Interpretation] = {}
    for name, spec in doc.items():
        if name not in phi or not isinstance(phi[name], FunDecl):
            raise CplError(f"interpretation for {name!r}, which is not a declared function")
        decl = phi[name]
        assert isinstance(decl, FunDecl)
        kind = spec.get("kind")
        if kind == "dense":
            dims = spec["dims"]
            values = spec["values"]
            if len(dims) != 2 or len(decl.in_types) != 2:
                raise CplError(f"dense interpretation of {name!r} needs a 2-argument function")
            if [t.concrete_size for t in decl.in_types] != list(dims):
                raise CplError(f"dense dims {dims} do not match declaration of {name!r}")
            out[name] = Interpretation.from_matrix(decl, values)
        elif kind == "table":
            table = {}
            for k, v in spec["entries"].items():
                ins = tuple(int(x) for x in str(k).split(",")) if str(k) else ()
                outs = tuple(int(x) for x in str(v).split(","))
                table[ins] = outs
            out[name] = Interpretation(decl, table)
        else:
            raise CplError(f"unknown interpretation kind {kind!r} for {name!r}")
    return out


def load_interpretation_file(phi: FunctionContext, path: str) -> dict[str, Interpretation]:
    with open(path, "r", encoding="utf-8") as fh:
        return load_interpretations(phi, json.load(fh))


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def eval_expr(expr: Expr, state: State) -> Value:
    match expr:
        case Var(name):
            return state[name]
        case Const(v, t):
            if t is None:
                raise CplError(f"unelaborated bare literal {v}")
            return Value(v, t)
        case UnOp("not", a):
            va = eval_expr(a, state)
            return Value(1 - va.value, BOOL)
        case BinOp(op, a, b):
            va = eval_expr(a, state)
            vb = eval_expr(b, state)
            match op:
                case "+":
                    size = va.typ.concrete_size
                    return Value((va.value + vb.value) % size, va.typ)
                case "=":
                    return Value(int(va.value == vb.value), BOOL)
                case "<":
                    return Value(int(va.value < vb.value), BOOL)
                case "&&":
                    return Value(va.value & vb.value, BOOL)
                case "||":
                    return Value(va.value | vb.value, BOOL)
    raise CplError(f"cannot evaluate expression {expr!r}")


def _search_space(ctx: EvalContext, pred: str) -> tuple[FinType, int]:
    in_types, _ = fun_signature(ctx.phi[pred])
    t = in_types[-1]
    return t, t.concrete_size


def _call_function(ctx: EvalContext, fname: str, arg_values: list[Value]) -> list[Value]:
    f = ctx.phi[fname]
    if isinstance(f, FunDecl):
        outs = ctx.interp(fname)(*[v.value for v in arg_values])
        return [Value(o, t) for o, t in zip(outs, f.out_types)]
    assert isinstance(f, FunDef)
    inner = State([(p, v) for (p, _), v in zip(f.params, arg_values)])
    result = eval_stmt(ctx, inner.typing_context(), f.body, inner)
    full = inner.concat(result)
    return [full[r] for r in f.returns]


def _pred_value(ctx: EvalContext, pred: str, fixed: list[Value], v: int) -> int:
    t, _ = _search_space(ctx, pred)
    outs = _call_function(ctx, pred, fixed + [Value(v, t)])
    return outs[0].value


def any_hat(
    ctx: EvalContext,
    gamma: TypingContext,
    pred: str,
    fixed_args: list[str],
    state: State,
) -> Value:
    """1 iff the predicate holds for some value of its last argument.

    Shared reference semantics for any, any_det and any_rand.
    """
    fixed = [state[a] for a in fixed_args]
    _, n = _search_space(ctx, pred)
    hit = any(_pred_value(ctx, pred, fixed, v) == 1 for v in range(n))
    return Value(int(hit), BOOL)


def max_hat(
    ctx: EvalContext,
    gamma: TypingContext,
    pred: str,
    fixed_args: list[str],
    state: State,
) -> Value:
    f = ctx.phi[pred]
    _, out_types = fun_signature(f)
    fixed = [state[a] for a in fixed_args]
    _, n = _search_space(ctx, pred)
    best = max(_pred_value(ctx, pred, fixed, v) for v in range(n))
    return Value(best, out_types[0])


def count_hat(
    ctx: EvalContext,
    gamma: TypingContext,
    pred: str,
    fixed_args: list[str],
    state: State,
) -> Value:
    t, n = _search_space(ctx, pred)
    k = count_solutions(ctx, gamma, pred, fixed_args, state)
    return Value(k, FinType(n + 1))


def count_solutions(
    ctx: EvalContext,
    gamma: TypingContext,
    pred: str,
    fixed_args: list[str],
    state: State,
) -> int:
    """K: number of satisfying values of the searched argument, by exhaustion."""
    fixed = [state[a] for a in fixed_args]
    _, n = _search_space(ctx, pred)
    return sum(1 for v in range(n) if _pred_value(ctx, pred, fixed, v) == 1)


def eval_stmt(ctx: EvalContext, gamma: TypingContext, stmt: Stmt, state: State) -> State:
    """Evaluate a statement; the result holds exactly the newly bound variables."""
    match stmt:
        case Assign(x, e):
            return State([(x, eval_expr(e, state))])
        case Seq(s1, s2):
            out1 = eval_stmt(ctx, gamma, s1, state)
            mid = state.concat(out1)
            out2 = eval_stmt(ctx, mid.typing_context(), s2, mid)
            return out1.concat(out2)
        case CallStmt(targets, fname, args):
            outs = _call_function(ctx, fname, [state[a] for a in args])
            return State(list(zip(targets, outs)))
        case PrimCall(target, prim, pred, args):
            largs = list(args)
            if prim in ("any", "any_det", "any_rand"):
                v = any_hat(ctx, gamma, pred, largs, state)
            elif prim == "max":
                v = max_hat(ctx, gamma, pred, largs, state)
            elif prim == "count":
                v = count_hat(ctx, gamma, pred, largs, state)
            else:
                raise CplError(f"unknown primitive {prim!r}")
            return State([(target, v)])
    raise CplError(f"cannot evaluate statement {stmt!r}")


def run_entry(ctx: EvalContext, stmt: Stmt, state: State | None = None) -> State:
    state = state or State()
    return eval_stmt(ctx, state.typing_context(), stmt, state)
