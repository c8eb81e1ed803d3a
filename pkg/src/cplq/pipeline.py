"""End-to-end helpers: compile, wire interpretations, simulate, report costs.

These functions connect the source-language front end, the cost analysis, the
compilers and the simulator; the CLI is a thin wrapper around them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .cpl.ast import CplError, FunctionContext, FunDecl, Program, Stmt, CallStmt, FunDef
from .cpl.evaluate import EvalContext, Interpretation, State, eval_stmt
from .cpl.typecheck import TypingContext, type_check_stmt
from .bqpl.ast import CProcDecl, UProcDecl
from .compiler.quantum import CompiledProgram, compile_program
from .cost.queries import CostConfig
from .sim.classical import ProbDist, QEvalContext, eval_classical_stmt, expected_cost, tv_distance
from .sim.unitary import unitary_embedding


def entry_statement(program: Program, entry: str | None) -> Stmt:
    """The statement to analyze: the file's entry, or a named function's body.

    Selecting a function analyzes its body directly (the function must take
    no arguments), matching the convention that per-function cost reports are
    for one execution of the function.
    """
    if entry is None:
        if program.entry is None:
            raise CplError("program has no entry statement; use an entry function")
        return program.entry
    phi = program.fun_context
    f = phi[entry]
    if isinstance(f, FunDecl):
        raise CplError(f"entry {entry!r} is a declaration")
    assert isinstance(f, FunDef)
    if f.params:
        raise CplError(f"entry function {entry!r} must take no arguments")
    return f.body


def build_qeval(cp: CompiledProgram, interps: dict[str, Interpretation]) -> QEvalContext:
    """Interpretation contexts for the compiled program's declared procs.

    Declared uprocs get the unitary embedding of the source interpretation;
    declared procs get the classical overwrite semantics (inputs preserved,
    outputs replaced).
    """
    uhat = {}
    chat = {}
    for name, src in cp.source_decl.items():
        proc = cp.pi[name]
        interp = interps[src]
        in_sizes = tuple(t.concrete_size for t in interp.decl.in_types)
        n_in = len(in_sizes)
        out_sizes = tuple(t.concrete_size for t in interp.decl.out_types)
        if isinstance(proc, UProcDecl):
            uhat[name] = unitary_embedding(in_sizes, out_sizes, lambda *a, _f=interp: _f(*a))
        elif isinstance(proc, CProcDecl):
            def overwrite(vals: tuple[int, ...], _f=interp, _k=n_in) -> tuple[int, ...]:
                return vals[:_k] + tuple(_f(*vals[:_k]))

            chat[name] = overwrite
    return QEvalContext(cp.pi, chat, uhat)


@dataclass
class SimulationReport:
    distribution: dict[tuple[int, ...], float]
    names: list[str]
    expected_cost: float
    tick_ledger: dict[str, float]
    pruning_bound: float
    tv_to_reference: float | None = None

    def to_json(self) -> dict:
        return {
            "variables": self.names,
            "distribution": {",".join(map(str, k)): v for k, v in sorted(self.distribution.items())},
            "expected_cost": self.expected_cost,
            "tick_ledger": self.tick_ledger,
            "pruning_error_bound": self.pruning_bound,
            "tv_distance_to_classical": self.tv_to_reference,
        }


def simulate_compiled(
    cp: CompiledProgram,
    interps: dict[str, Interpretation],
    phi: FunctionContext | None = None,
    entry: Stmt | None = None,
    inputs: dict[str, int] | None = None,
) -> SimulationReport:
    """Exact distribution propagation of a compiled program from sigma;0."""
    qctx = build_qeval(cp, interps)
    mu0 = ProbDist.point(cp.gamma, inputs or {})
    ledger: dict[str, float] = {}
    cost = expected_cost(qctx, cp.gamma, cp.entry, mu0.copy(), ledger)
    mu = eval_classical_stmt(qctx, cp.gamma, cp.entry, mu0)
    tv = None
    if phi is not None and entry is not None:
        ref = classical_reference(phi, interps, entry, cp.gamma, inputs)
        tv = tv_distance(mu, ref)
    return SimulationReport(
        distribution=mu.probs,
        names=list(mu.names),
        expected_cost=cost,
        tick_ledger=ledger,
        pruning_bound=mu.err,
        tv_to_reference=tv,
    )


def classical_reference(
    phi: FunctionContext,
    interps: dict[str, Interpretation],
    entry: Stmt,
    gamma: TypingContext,
    inputs: dict[str, int] | None = None,
) -> ProbDist:
    """The deterministic source semantics as a point distribution over gamma."""
    from .cpl.evaluate import Value

    ctx = EvalContext(phi, interps)
    inputs = inputs or {}
    in_ctx = TypingContext([(n, gamma[n]) for n in inputs])
    sigma = State([(n, Value(v, gamma[n])) for n, v in inputs.items()])
    out = eval_stmt(ctx, in_ctx, entry, sigma)
    full = sigma.concat(out)
    values = {n: full[n].value if n in full else 0 for n in gamma.names()}
    return ProbDist.point(gamma, values)


def all_matrices(n: int, m: int):
    """Every 0/1 matrix of shape n x m."""
    import itertools

    for bits in itertools.product((0, 1), repeat=n * m):
        yield [list(bits[i * m : (i + 1) * m]) for i in range(n)]


def unitary_semantics_distance(
    phi: FunctionContext,
    interps: dict[str, Interpretation],
    gamma_in: TypingContext,
    stmt: Stmt,
    delta: float,
    cfg: CostConfig,
    lossy_tol: float = 1e-9,
) -> tuple[float, float]:
    """Distance of the unitary compilation to the source semantics embedding.

    Compiles the statement at norm error delta, then measures the operator
    distance (restricted to zero-initialized auxiliaries) between the
    compiled unitary and |sigma>|omega> -> |sigma>|omega (+) sem(sigma)>.
    Returns (distance, tracked truncation bound).
    """
    from .compiler.emitter import Emitter
    from .compiler.unitary import ucompile
    from .cpl.evaluate import Value
    from .sim.metrics import unitary_distance
    from .sim.states import FactoredState, WireSpace
    from .sim.unitary import UnitaryRunner

    em = Emitter()
    res = ucompile(phi, gamma_in, cfg, delta, stmt, em)
    gamma_out = type_check_stmt(phi, gamma_in, stmt)
    new_vars = gamma_out.minus(gamma_in)
    full = gamma_out.concat(res.aux)
    space = WireSpace([(n, t.concrete_size) for n, t in full.items()])
    aux_names = set(res.aux.names())

    uhat = {}
    for name, src in em.source_decl.items():
        interp = interps[src]
        in_sizes = tuple(t.concrete_size for t in interp.decl.in_types)
        out_sizes = tuple(t.concrete_size for t in interp.decl.out_types)
        uhat[name] = unitary_embedding(in_sizes, out_sizes, lambda *a, _f=interp: _f(*a))
    runner = UnitaryRunner(res.pi, uhat, lossy_tol=lossy_tol)

    ctx = EvalContext(phi, interps)

    def col_u(values: dict[str, int]):
        st = runner.make_state(space, values)
        runner.apply(st, res.stmt)
        return st

    def col_v(values: dict[str, int]):
        sigma = State([(n, Value(values[n], gamma_in[n])) for n in gamma_in.names()])
        out = eval_stmt(ctx, gamma_in, stmt, sigma)
        target = dict(values)
        for n, t in new_vars.items():
            size = t.concrete_size
            target[n] = (values.get(n, 0) + out[n].value) % size
        return FactoredState.basis(space, target)

    return unitary_distance(space, aux_names, col_u, col_v)
