"""Unitary search procedure over the last argument of a unitary predicate.

For a predicate procedure g with wires (inputs..., y: Fin<N>, b: Bool,
workspace...), emits a fixed-iteration amplitude-amplification procedure that
writes whether g has a satisfying y into a result wire, within norm error
delta on zero-initialized auxiliaries.

Per run, an iteration-count register is put into uniform superposition over
{0..N_g-1} and each Grover step fires conditioned on the count, realizing a
uniform mixture of iteration counts; a final checked query writes the run's
verdict. Runs use private candidate/verdict/count registers (a shared count
register would not be restored by the closing uncompute and would corrupt
later runs), and the run verdicts are OR-folded into the result. The whole
procedure is wrapped compute-copy-uncompute so its workspace is returned to
zero.

Per run the loop makes N_g - 1 conditioned queries plus one verification
query; with the outer wrapper the total query count to g and to its adjoint
is 2 * N_g * N_r each, matching the lemma-variant query bound.
"""

from __future__ import annotations

from ..cpl.ast import BOOL, BinOp, Const, CplError, Expr, FinType, Var
from ..cpl.typecheck import TypingContext
from ..bqpl.ast import (
    AdjOp,
    CNOT,
    EmbedOp,
    GateOp,
    Refl0Op,
    UApply,
    UCall,
    UnifOp,
    UProcDef,
    UStmt,
    UWith,
    useq_of,
)
from ..cost.queries import uany_counts
from .clean import ctrl_clean_proc
from .emitter import Emitter


def _or_expr(names: list[str]) -> Expr:
    out: Expr = Var(names[0])
    for n in names[1:]:
        out = BinOp("||", out, Var(n))
    return out


def build_uany(
    em: Emitter,
    n: int,
    delta: float,
    g: str,
    n_in: int,
    pred_precision: float | None = None,
) -> tuple[str, TypingContext]:
    """Emit the unitary any-search over g's last input; returns (name, params)."""
    gproc = em.procs[g]
    gp = gproc.params
    names = gp.names()
    if len(names) < n_in + 2:
        raise CplError(f"predicate {g!r} has too few wires for the argument split")
    ins = names[:n_in]
    y = names[n_in]
    b_out = names[n_in + 1]
    dirty = names[n_in + 1:]  # predicate output + workspace, shared across runs
    if gp[y].concrete_size != n or gp[b_out] != BOOL:
        raise CplError(f"predicate {g!r} is not shaped (..., Fin<{n}>, Bool, ...)")

    n_g, n_r = uany_counts(n, delta)
    cg = ctrl_clean_proc(
        em, g, (b_out,), precision=None if pred_precision is None else 2 * pred_precision
    )
    fin_n = FinType(n)
    fin_g = FinType(n_g)

    runs: list[UStmt] = []
    ok_wires = []
    for j in range(1, n_r + 1):
        xs, ok, ni = f"_xs{j}", f"_ok{j}", f"_ni{j}"
        ok_wires.append(ok)
        prep = useq_of(
            [
                UApply((ni,), UnifOp(fin_g)),
                UApply((ok,), GateOp("X")),
                UApply((ok,), GateOp("H")),
            ]
        )
        steps: list[UStmt] = [UApply((xs,), UnifOp(fin_n))]
        for lim in range(n_g - 1):
            gate = EmbedOp(("t",), BinOp("<", Var("t"), Const(lim + 1, fin_g)))
            steps.append(UApply((ni, "_c"), gate))
            steps.append(UCall(cg, ("_c",) + tuple(ins) + (xs, ok) + tuple(dirty)))
            steps.append(UApply((xs,), AdjOp(UnifOp(fin_n))))
            steps.append(UApply((xs,), Refl0Op(fin_n)))
            steps.append(UApply((xs,), UnifOp(fin_n)))
            steps.append(UApply((ni, "_c"), gate))
        runs.append(UWith(prep, useq_of(steps)))
        runs.append(
            UWith(
                UApply(("_c",), GateOp("X")),
                UCall(cg, ("_c",) + tuple(ins) + (xs, ok) + tuple(dirty)),
            )
        )
    fold = UApply(
        tuple(ok_wires) + ("_res",),
        EmbedOp(tuple(f"a{j}" for j in range(1, n_r + 1)), _or_expr([f"a{j}" for j in range(1, n_r + 1)])),
    )
    dirty_items = [(w, gp[w]) for w in dirty]
    run_items = []
    for j in range(1, n_r + 1):
        run_items += [(f"_xs{j}", fin_n), (f"_ok{j}", BOOL), (f"_ni{j}", fin_g)]
    aux_items = dirty_items + run_items + [("_c", BOOL)]

    dirty_params = TypingContext([(i, gp[i]) for i in ins] + [("_res", BOOL)] + aux_items)
    dirty_name = em.add(
        UProcDef(em.fresh_proc("UAnyDirty"), dirty_params, useq_of(runs + [fold]))
    )

    params = TypingContext(
        [(i, gp[i]) for i in ins] + [("_res", BOOL), ("_resd", BOOL)] + aux_items
    )
    inner_wires = tuple(ins) + ("_resd",) + tuple(w for w, _ in aux_items)
    body = UWith(
        UCall(dirty_name, inner_wires),
        UApply(("_resd", "_res"), CNOT),
    )
    name = em.fresh_proc("UAny")
    proc = UProcDef(
        name,
        params,
        body,
        precision=delta,
        tag=f"UAny[{n}, {delta:.6g}, {g}]",
    )
    name = em.add(proc)
    return name, params
