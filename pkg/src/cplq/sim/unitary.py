"""Unitary semantics of BQPL: operator matrices, statement evaluation, cost.

Statements evaluate to operators applied wire-locally to a state backend.
Small defined procedures are collapsed into cached dense matrices so deeply
repeated subroutine calls cost one operator application each. Big Embed
operators whose expression is an OR of all inputs are applied via a rank-two
product decomposition on the factored backend instead of being materialized.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ..cpl.ast import BinOp, Expr, FinType, Var
from ..cpl.evaluate import State as CplState, Value, eval_expr
from ..cpl.typecheck import TypingContext
from ..bqpl.ast import (
    AdjOp,
    BqplError,
    CtrlOp,
    EmbedOp,
    GateOp,
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
from ..bqpl.transform import desugar_ustmt, invert
from .states import DenseState, FactoredState, SimError, State, WireSpace

_H = np.array([[1, 1], [1, -1]], dtype=np.complex128) / math.sqrt(2)
_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
_CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128
)

PROC_MATRIX_DIM = 1 << 11  # collapse defined uprocs up to this dimension
DENSE_STATE_DIM = 1 << 12  # prefer the dense backend below this dimension
OR_DECOMP_MIN_WIRES = 10  # use the rank-2 OR decomposition beyond this


def unitary_embedding(
    in_sizes: tuple[int, ...], out_sizes: tuple[int, ...], fn
) -> np.ndarray:
    """|sigma>|omega> -> |sigma>|omega (+) f(sigma)> with componentwise mod-add."""
    din = math.prod(in_sizes) if in_sizes else 1
    dout = math.prod(out_sizes) if out_sizes else 1
    dim = din * dout
    m = np.zeros((dim, dim), dtype=np.complex128)
    for ins in itertools.product(*[range(s) for s in in_sizes]) if in_sizes else [()]:
        f = fn(*ins)
        if isinstance(f, int):
            f = (f,)
        i_in = 0
        for v, s in zip(ins, in_sizes):
            i_in = i_in * s + v
        for outs in itertools.product(*[range(s) for s in out_sizes]) if out_sizes else [()]:
            i_om = 0
            i_tgt = 0
            for v, fv, s in zip(outs, f, out_sizes):
                i_om = i_om * s + v
                i_tgt = i_tgt * s + (v + fv) % s
            m[i_in * dout + i_tgt, i_in * dout + i_om] = 1.0
    return m


_op_cache: dict[tuple, np.ndarray] = {}


def op_matrix(op: UnitaryOp, sizes: tuple[int, ...]) -> np.ndarray:
    key = (op, sizes)
    got = _op_cache.get(key)
    if got is not None:
        return got
    m = _op_matrix(op, sizes)
    _op_cache[key] = m
    return m


def _op_matrix(op: UnitaryOp, sizes: tuple[int, ...]) -> np.ndarray:
    match op:
        case GateOp("X"):
            return _X
        case GateOp("Z"):
            return _Z
        case GateOp("H"):
            return _H
        case GateOp("CNOT"):
            return _CNOT
        case UnifOp(t):
            n = t.concrete_size
            om = np.exp(2j * math.pi / n)
            j, k = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
            return (om ** (j * k)) / math.sqrt(n)
        case Refl0Op(t):
            n = t.concrete_size
            d = -np.ones(n, dtype=np.complex128)
            d[0] = 1.0
            return np.diag(d)
        case AdjOp(inner):
            return op_matrix(inner, sizes).conj().T
        case CtrlOp(inner):
            m = op_matrix(inner, sizes[1:])
            d = m.shape[0]
            out = np.eye(2 * d, dtype=np.complex128)
            out[d:, d:] = m
            return out
        case EmbedOp(params, expr):
            in_sizes = sizes[:-1]
            types = [FinType(s) for s in in_sizes]
            out_t = FinType(sizes[-1])

            def fn(*vals: int) -> int:
                st = CplState(
                    [(p, Value(v, t)) for p, v, t in zip(params, vals, types)]
                )
                return eval_expr(expr, st).value

            return unitary_embedding(in_sizes, (sizes[-1],), fn)
    raise BqplError(f"not a unitary operator: {op!r}")


def or_embed_inputs(op: UnitaryOp) -> tuple[str, ...] | None:
    """If op is Embed[(a1..ak) => a1 || ... || ak], the inputs; else None.

    Adjoint wrappers are stripped: XOR-embedding a Bool expression is an
    involution, so the adjoint is the same operator (callers only use this
    for all-Bool wire lists).
    """
    while isinstance(op, AdjOp):
        op = op.op
    if not isinstance(op, EmbedOp):
        return None
    seen: list[str] = []

    def walk(e: Expr) -> bool:
        match e:
            case Var(n):
                seen.append(n)
                return True
            case BinOp("||", a, b):
                return walk(a) and walk(b)
            case _:
                return False

    if not walk(op.expr):
        return None
    if sorted(seen) != sorted(op.params) or len(set(seen)) != len(seen):
        return None
    return tuple(seen)


class UnitaryRunner:
    """Applies unitary statements of a procedure context to states."""

    def __init__(
        self,
        pi: ProcContext,
        uhat: dict[str, np.ndarray] | None = None,
        lossy_tol: float = 0.0,
    ):
        self.pi = pi
        self.uhat = uhat or {}
        self.lossy_tol = lossy_tol
        self._proc_mat: dict[str, np.ndarray | None] = {}
        self._proc_dims: dict[str, int] = {}

    # -- space helpers --------------------------------------------------------

    def proc_space(self, name: str) -> WireSpace:
        proc = self.pi[name]
        return WireSpace([(n, t.concrete_size) for n, t in proc.params.items()])

    def make_state(self, space: WireSpace, values: dict[str, int]) -> State:
        if space.dim <= DENSE_STATE_DIM:
            return DenseState.basis(space, values)
        st = FactoredState.basis(space, values)
        st.lossy_tol = self.lossy_tol
        return st

    # -- procedure matrices ---------------------------------------------------

    def proc_matrix(self, name: str) -> np.ndarray | None:
        """Dense matrix of a procedure if it is small enough; cached."""
        if name in self._proc_mat:
            return self._proc_mat[name]
        proc = self.pi[name]
        if isinstance(proc, UProcDecl):
            m = self.uhat.get(name)
            if m is None:
                raise SimError(f"no unitary interpretation for declared uproc {name!r}")
            self._proc_mat[name] = m
            return m
        assert isinstance(proc, UProcDef)
        space = self.proc_space(name)
        if space.dim > PROC_MATRIX_DIM:
            self._proc_mat[name] = None
            return None
        # evolve all basis columns at once: a dense state with a column axis
        cols = WireSpace([("__col", space.dim)] + [(n, space.sizes[n]) for n in space.names])
        tensor = np.eye(space.dim, dtype=np.complex128).reshape(cols.shape())
        st = DenseState(cols, tensor)
        self.apply(st, proc.body, rename=None)
        m = st.tensor.reshape(space.dim, space.dim).T.copy()
        self._proc_mat[name] = m
        return m

    # -- statement application -------------------------------------------------

    def apply(self, state: State, stmt: UStmt, rename: dict[str, str] | None = None) -> None:
        r = rename or {}
        match stmt:
            case USkip():
                return
            case USeq(a, b):
                self.apply(state, a, rename)
                self.apply(state, b, rename)
                return
            case UWith(compute, body):
                self.apply(state, compute, rename)
                self.apply(state, body, rename)
                self.apply(state, invert(compute), rename)
                return
            case UApply(wires, op):
                actual = tuple(r.get(w, w) for w in wires)
                inputs = or_embed_inputs(op)
                if (
                    inputs is not None
                    and isinstance(state, FactoredState)
                    and len(actual) >= OR_DECOMP_MIN_WIRES
                    and all(state.space.sizes[w] == 2 for w in actual)
                ):
                    base = op
                    while isinstance(base, AdjOp):
                        base = base.op
                    wire_of = dict(zip(base.params, actual[:-1]))
                    state.apply_or_embed(tuple(wire_of[p] for p in inputs), actual[-1])
                    return
                sizes = tuple(state.space.sizes[w] for w in actual)
                state.apply_matrix(op_matrix(op, sizes), actual)
                return
            case UCall(g, wires) | UCallAdj(g, wires):
                adjoint = isinstance(stmt, UCallAdj)
                actual = tuple(r.get(w, w) for w in wires)
                m = self.proc_matrix(g)
                if m is not None:
                    state.apply_matrix(m.conj().T if adjoint else m, actual)
                    return
                proc = self.pi[g]
                assert isinstance(proc, UProcDef)
                params = proc.params.names()
                inner = dict(zip(params, actual))
                body = invert(proc.body) if adjoint else proc.body
                self.apply(state, body, inner)
                return
        raise BqplError(f"not a unitary statement: {stmt!r}")

    def run_proc(self, name: str, values: dict[str, int]) -> State:
        """Apply a procedure to a basis input over its own parameter space."""
        space = self.proc_space(name)
        st = self.make_state(space, values)
        proc = self.pi[name]
        if isinstance(proc, UProcDecl):
            st.apply_matrix(self.proc_matrix(name), tuple(space.names))
        else:
            self.apply(st, proc.body)
        return st


@dataclass
class UnitaryAction:
    """The denotation of a unitary statement over a typing context."""

    runner: UnitaryRunner
    gamma: TypingContext
    stmt: UStmt

    @property
    def space(self) -> WireSpace:
        return WireSpace([(n, t.concrete_size) for n, t in self.gamma.items()])

    def column(self, values: dict[str, int]) -> State:
        st = self.runner.make_state(self.space, values)
        self.runner.apply(st, self.stmt)
        return st

    def matrix(self) -> np.ndarray:
        space = self.space
        if space.dim > PROC_MATRIX_DIM:
            raise SimError("statement too large to materialize")
        cols = WireSpace([("__col", space.dim)] + [(n, space.sizes[n]) for n in space.names])
        tensor = np.eye(space.dim, dtype=np.complex128).reshape(cols.shape())
        st = DenseState(cols, tensor)
        self.runner.apply(st, self.stmt)
        return st.tensor.reshape(space.dim, space.dim).T.copy()


def eval_unitary_stmt(ctx, gamma: TypingContext, w: UStmt) -> UnitaryAction:
    """Denotational semantics of a unitary statement as an applicable operator."""
    runner = ctx.runner if hasattr(ctx, "runner") else UnitaryRunner(ctx)
    return UnitaryAction(runner, gamma, desugar_ustmt(w))


# ---------------------------------------------------------------------------
# Unitary cost
# ---------------------------------------------------------------------------

def ucost(pi: ProcContext, w: UStmt) -> float:
    """Total tick cost of a unitary statement (built-ins are free)."""
    memo: dict[str, float] = {}
    return _ucost(pi, desugar_ustmt(w), memo)


def _ucost(pi: ProcContext, w: UStmt, memo: dict[str, float]) -> float:
    match w:
        case USkip() | UApply(_, _):
            return 0.0
        case USeq(a, b):
            return _ucost(pi, a, memo) + _ucost(pi, b, memo)
        case UCall(g, _) | UCallAdj(g, _):
            if g not in memo:
                proc = pi[g]
                if isinstance(proc, UProcDecl):
                    memo[g] = float(proc.tick)
                else:
                    assert isinstance(proc, UProcDef)
                    memo[g] = _ucost(pi, desugar_ustmt(proc.body), memo)
            return memo[g]
    raise BqplError(f"not a unitary statement: {w!r}")


def ucost_breakdown(pi: ProcContext, w: UStmt) -> dict[str, float]:
    """Tick cost per declared procedure (the ledger decomposition of ucost)."""
    memo: dict[str, dict[str, float]] = {}
    return _breakdown(pi, desugar_ustmt(w), memo)


def _breakdown(pi: ProcContext, w: UStmt, memo) -> dict[str, float]:
    match w:
        case USkip() | UApply(_, _):
            return {}
        case USeq(a, b):
            out = _breakdown(pi, a, memo)
            for k, v in _breakdown(pi, b, memo).items():
                out[k] = out.get(k, 0.0) + v
            return out
        case UCall(g, _) | UCallAdj(g, _):
            if g not in memo:
                proc = pi[g]
                if isinstance(proc, UProcDecl):
                    memo[g] = {g: float(proc.tick)}
                else:
                    assert isinstance(proc, UProcDef)
                    memo[g] = _breakdown(pi, desugar_ustmt(proc.body), memo)
            return dict(memo[g])
    raise BqplError(f"not a unitary statement: {w!r}")
