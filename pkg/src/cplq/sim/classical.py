"""Probabilistic semantics and expected cost of classical BQPL statements.

Distributions are sparse maps over the values of a typing context. Branches
split distributions; measured unitary calls zero-pad the unpassed wires,
evolve the called procedure, and read the Born marginal of the passed wires
(the unmeasured wires are discarded). Support entries below a tiny threshold
are pruned and the dropped mass is accumulated into a reported error bound,
together with any truncation tracked by the factored unitary backend.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..cpl.ast import BOOL, CplError, Expr
from ..cpl.evaluate import State as CplState, Value, eval_expr
from ..cpl.typecheck import TypingContext
from ..bqpl.ast import (
    BqplError,
    CAssign,
    CCall,
    CCallMeas,
    CIf,
    CProcDecl,
    CProcDef,
    CRandom,
    CRandomRange,
    CSeq,
    CSkip,
    CStmt,
    ProcContext,
    UProcDecl,
    UProcDef,
)
from ..bqpl.transform import desugar_cstmt
from .states import WireSpace
from .unitary import UnitaryRunner, ucost, ucost_breakdown

PRUNE_TOL = 1e-15


class ProbDist:
    """Sparse distribution over the value space of a typing context."""

    def __init__(
        self,
        gamma: TypingContext,
        probs: dict[tuple[int, ...], float],
        err: float = 0.0,
    ):
        self.gamma = gamma
        self.names = gamma.names()
        self.probs = probs
        self.err = err  # total-variation-scale error bound from pruning/truncation

    @classmethod
    def point(cls, gamma: TypingContext, values: dict[str, int]) -> "ProbDist":
        key = tuple(values.get(n, 0) for n in gamma.names())
        return cls(gamma, {key: 1.0})

    def total(self) -> float:
        return sum(self.probs.values())

    def prune(self) -> "ProbDist":
        dropped = sum(p for p in self.probs.values() if p < PRUNE_TOL)
        if dropped:
            self.probs = {k: p for k, p in self.probs.items() if p >= PRUNE_TOL}
            self.err += dropped
        return self

    def value_index(self, name: str) -> int:
        return self.names.index(name)

    def as_state(self, key: tuple[int, ...]) -> CplState:
        return CplState(
            [(n, Value(v, self.gamma[n])) for n, v in zip(self.names, key)]
        )

    def map_support(self, fn) -> "ProbDist":
        out: dict[tuple[int, ...], float] = {}
        for k, p in self.probs.items():
            k2 = fn(k)
            out[k2] = out.get(k2, 0.0) + p
        return ProbDist(self.gamma, out, self.err)

    def marginal(self, names: list[str]) -> dict[tuple[int, ...], float]:
        idx = [self.names.index(n) for n in names]
        out: dict[tuple[int, ...], float] = {}
        for k, p in self.probs.items():
            key = tuple(k[i] for i in idx)
            out[key] = out.get(key, 0.0) + p
        return out

    def copy(self) -> "ProbDist":
        return ProbDist(self.gamma, dict(self.probs), self.err)


def tv_distance(mu: ProbDist | dict, nu: ProbDist | dict) -> float:
    """Total variation distance, 0.5 * L1."""
    pm = mu.probs if isinstance(mu, ProbDist) else mu
    pn = nu.probs if isinstance(nu, ProbDist) else nu
    keys = set(pm) | set(pn)
    return 0.5 * sum(abs(pm.get(k, 0.0) - pn.get(k, 0.0)) for k in keys)


@dataclass
class QEvalContext:
    """Procedure context with classical and unitary interpretations."""

    pi: ProcContext
    chat: dict[str, object] = field(default_factory=dict)  # name -> callable on tuples
    uhat: dict[str, np.ndarray] = field(default_factory=dict)
    lossy_tol: float = 5e-3  # factored-backend truncation threshold (tracked)

    def __post_init__(self):
        self.runner = UnitaryRunner(self.pi, self.uhat, lossy_tol=self.lossy_tol)
        self._meas_cache: dict[tuple, tuple[dict, float]] = {}
        self._call_cache: dict[tuple, tuple[dict, float]] = {}
        self._desugared: dict[str, CStmt] = {}

    def body_of(self, name: str) -> CStmt:
        if name not in self._desugared:
            proc = self.pi[name]
            assert isinstance(proc, CProcDef)
            self._desugared[name] = desugar_cstmt(proc.body)
        return self._desugared[name]

    # -- measured unitary calls ------------------------------------------------

    def measure_uproc(
        self, name: str, passed: tuple[int, ...]
    ) -> tuple[dict[tuple[int, ...], float], float]:
        """Outcome distribution of call_uproc_and_meas on a basis input."""
        key = (name, passed)
        got = self._meas_cache.get(key)
        if got is not None:
            return got
        proc = self.pi[name]
        params = proc.params.names()
        if len(passed) > len(params):
            raise BqplError(f"too many arguments measured for {name!r}")
        values = {params[i]: v for i, v in enumerate(passed)}
        st = self.runner.run_proc(name, values)
        marg = st.marginal(tuple(params[: len(passed)]))
        total = sum(marg.values())
        err = 2.0 * getattr(st, "lost", 0.0) + abs(1.0 - total)
        if total > 0:
            marg = {k: p / total for k, p in marg.items()}
        self._meas_cache[key] = (marg, err)
        return marg, err


# ---------------------------------------------------------------------------
# Probabilistic evaluation
# ---------------------------------------------------------------------------

def eval_classical_stmt(
    ctx: QEvalContext, gamma: TypingContext, c: CStmt, mu: ProbDist
) -> ProbDist:
    return _eval(ctx, gamma, desugar_cstmt(c), mu).prune()


def _eval(ctx: QEvalContext, gamma: TypingContext, c: CStmt, mu: ProbDist) -> ProbDist:
    match c:
        case CSkip():
            return mu
        case CSeq(a, b):
            return _eval(ctx, gamma, b, _eval(ctx, gamma, a, mu))
        case CAssign(x, e):
            xi = mu.value_index(x)

            def step(key: tuple[int, ...]) -> tuple[int, ...]:
                v = eval_expr(e, mu.as_state(key)).value
                return key[:xi] + (v,) + key[xi + 1:]

            return mu.map_support(step)
        case CRandom(x, t):
            xi = mu.value_index(x)
            n = t.concrete_size
            out: dict[tuple[int, ...], float] = {}
            for k, p in mu.probs.items():
                for v in range(n):
                    k2 = k[:xi] + (v,) + k[xi + 1:]
                    out[k2] = out.get(k2, 0.0) + p / n
            return ProbDist(gamma, out, mu.err)
        case CRandomRange(x, y):
            xi = mu.value_index(x)
            yi = mu.value_index(y)
            out = {}
            for k, p in mu.probs.items():
                upper = k[yi]
                if upper < 1:
                    k2 = k[:xi] + (0,) + k[xi + 1:]
                    out[k2] = out.get(k2, 0.0) + p
                    continue
                for v in range(1, upper + 1):
                    k2 = k[:xi] + (v,) + k[xi + 1:]
                    out[k2] = out.get(k2, 0.0) + p / upper
            return ProbDist(gamma, out, mu.err)
        case CIf(b, body):
            bi = mu.value_index(b)
            taken = {k: p for k, p in mu.probs.items() if k[bi] == 1}
            rest = {k: p for k, p in mu.probs.items() if k[bi] != 1}
            if not taken:
                return mu
            sub = _eval(ctx, gamma, body, ProbDist(gamma, taken, 0.0))
            out = dict(rest)
            for k, p in sub.probs.items():
                out[k] = out.get(k, 0.0) + p
            return ProbDist(gamma, out, mu.err + sub.err)
        case CCall(h, args):
            return _eval_call(ctx, gamma, h, args, mu)
        case CCallMeas(g, args):
            idx = [mu.value_index(a) for a in args]
            out = {}
            err = mu.err
            for k, p in mu.probs.items():
                outcomes, e = ctx.measure_uproc(g, tuple(k[i] for i in idx))
                err += p * e
                for vals, q in outcomes.items():
                    k2 = list(k)
                    for i, v in zip(idx, vals):
                        k2[i] = v
                    key2 = tuple(k2)
                    out[key2] = out.get(key2, 0.0) + p * q
            return ProbDist(gamma, out, err)
    raise BqplError(f"not a core classical statement: {c!r}")


def _eval_call(
    ctx: QEvalContext, gamma: TypingContext, h: str, args: tuple[str, ...], mu: ProbDist
) -> ProbDist:
    proc = ctx.pi[h]
    idx = [mu.value_index(a) for a in args]
    out: dict[tuple[int, ...], float] = {}
    err = mu.err
    if isinstance(proc, CProcDecl):
        fn = ctx.chat.get(h)
        if fn is None:
            raise BqplError(f"no classical interpretation for declared proc {h!r}")
        for k, p in mu.probs.items():
            vals = fn(tuple(k[i] for i in idx))
            k2 = list(k)
            for i, v in zip(idx, vals):
                k2[i] = v
            key2 = tuple(k2)
            out[key2] = out.get(key2, 0.0) + p
        return ProbDist(gamma, out, err)
    assert isinstance(proc, CProcDef)
    for k, p in mu.probs.items():
        sub, e = _run_cproc(ctx, h, tuple(k[i] for i in idx))
        err += p * e
        for vals, q in sub.items():
            k2 = list(k)
            for i, v in zip(idx, vals):
                k2[i] = v
            key2 = tuple(k2)
            out[key2] = out.get(key2, 0.0) + p * q
    return ProbDist(gamma, out, err)


def _run_cproc(
    ctx: QEvalContext, h: str, arg_values: tuple[int, ...]
) -> tuple[dict[tuple[int, ...], float], float]:
    """Run a defined proc body from deterministic arguments, zeroed locals.

    Returns the marginal over the parameters (locals are discarded).
    """
    key = (h, arg_values)
    got = ctx._call_cache.get(key)
    if got is not None:
        return got
    proc = ctx.pi[h]
    assert isinstance(proc, CProcDef)
    inner_ctx = proc.params.concat(proc.locals)
    names = proc.params.names()
    values = {n: v for n, v in zip(names, arg_values)}
    mu0 = ProbDist.point(inner_ctx, values)
    mu1 = _eval(ctx, inner_ctx, ctx.body_of(h), mu0).prune()
    result = mu1.marginal(list(names))
    ctx._call_cache[key] = (result, mu1.err)
    return result, mu1.err


# ---------------------------------------------------------------------------
# Expected quantum cost
# ---------------------------------------------------------------------------

def expected_cost(
    ctx: QEvalContext,
    gamma: TypingContext,
    c: CStmt,
    mu: ProbDist,
    ledger: dict[str, float] | None = None,
) -> float:
    """Expected tick cost of a classical statement on input distribution mu."""
    return _cost(ctx, gamma, desugar_cstmt(c), mu, ledger, 1.0)


def _cost(ctx, gamma, c, mu: ProbDist, ledger, weight: float) -> float:
    match c:
        case CSkip() | CAssign(_, _) | CRandom(_, _) | CRandomRange(_, _):
            return 0.0
        case CSeq(a, b):
            first = _cost(ctx, gamma, a, mu, ledger, weight)
            mid = _eval(ctx, gamma, a, mu).prune()
            return first + _cost(ctx, gamma, b, mid, ledger, weight)
        case CIf(b, body):
            bi = mu.value_index(b)
            taken = {k: p for k, p in mu.probs.items() if k[bi] == 1}
            mass = sum(taken.values())
            total = mu.total()
            if mass == 0.0 or total == 0.0:
                return 0.0
            cond = ProbDist(gamma, {k: p / mass for k, p in taken.items()}, 0.0)
            pr = mass / total
            return pr * _cost(ctx, gamma, body, cond, ledger, weight * pr)
        case CCall(h, args):
            proc = ctx.pi[h]
            if isinstance(proc, CProcDecl):
                if ledger is not None:
                    ledger[h] = ledger.get(h, 0.0) + weight * proc.tick
                return float(proc.tick)
            assert isinstance(proc, CProcDef)
            inner_ctx = proc.params.concat(proc.locals)
            names = proc.params.names()
            idx = [mu.value_index(a) for a in args]
            zeros = tuple(0 for _ in proc.locals.names())
            inner_probs: dict[tuple[int, ...], float] = {}
            for k, p in mu.probs.items():
                key = tuple(k[i] for i in idx) + zeros
                inner_probs[key] = inner_probs.get(key, 0.0) + p
            inner_mu = ProbDist(inner_ctx, inner_probs, 0.0)
            return _cost(ctx, inner_ctx, ctx.body_of(h), inner_mu, ledger, weight)
        case CCallMeas(g, args):
            from ..bqpl.ast import UCall

            wires = tuple(ctx.pi[g].params.names())
            cost = ucost(ctx.pi, UCall(g, wires))
            if ledger is not None:
                for name, v in ucost_breakdown(ctx.pi, UCall(g, wires)).items():
                    ledger[name] = ledger.get(name, 0.0) + weight * v
            return cost
    raise BqplError(f"not a core classical statement: {c!r}")
