"""Expected-cost quantum search as a classical BQPL procedure.

The procedure repeats ceil(log3(1/eps)) independent runs. Each run walks a
fixed schedule of Grover iteration counts (a geometric ramp, floored and
capped at sqrt(N)), samples an iteration count up to the schedule entry, runs
that many coherent Grover steps, measures a candidate, and verifies it with
one further checked query. The schedule is truncated so that one run's
iterations plus verification queries stay within the per-run budget
9.2*sqrt(N), which keeps every execution path inside the worst-case query
bound. A run that has found a solution freezes (the done flag is recomputed
from the output at the start of each run), so later runs cannot lose it.
"""

from __future__ import annotations

import math

from ..cpl.ast import BOOL, BinOp, Const, CplError, FinType, UnOp, Var
from ..cpl.typecheck import TypingContext
from ..bqpl.ast import (
    CAssign,
    CCallMeas,
    CCallMeasIndexed,
    CFor,
    CIf,
    CProcDef,
    CRandomRange,
    CRepeat,
    CSeq,
    GateOp,
    Refl0Op,
    UApply,
    UCall,
    UnifOp,
    AdjOp,
    UProcDef,
    UWith,
    cseq_of,
    useq_of,
)
from ..bqpl.transform import sel_var
from ..cost.queries import GROVER_ALPHA
from .clean import clean_proc
from .emitter import Emitter


def qsearch_schedule(n: int) -> list[int]:
    """Grover iteration counts per schedule step, for a search space of size n.

    Entries are floor(min(1.2^k * 1.2, sqrt(n))) for k = 0, 1, ...; the list
    is truncated while the per-run query budget 9.2*sqrt(n) still covers all
    iterations plus one verification query per step.
    """
    lam = m = 6 / 5
    budget = GROVER_ALPHA * math.sqrt(n)
    cap = math.floor(math.sqrt(n))
    out: list[int] = []
    used = 0.0
    k = 0
    while True:
        j = min(math.floor(min(m * lam**k, math.sqrt(n))), cap)
        j = max(j, 1)
        if used + j + 1 > budget:
            break
        out.append(j)
        used += j + 1
        k += 1
    return out


def build_qany(
    em: Emitter,
    n: int,
    eps: float,
    g: str,
    n_in: int,
    pred_precision: float | None = None,
) -> tuple[str, TypingContext]:
    """Emit the quantum search proc over g's last input; returns (name, params)."""
    gproc = em.procs[g]
    gp = gproc.params
    names = gp.names()
    if len(names) < n_in + 2:
        raise CplError(f"predicate {g!r} has too few wires for the argument split")
    ins = names[:n_in]
    y = names[n_in]
    b_out = names[n_in + 1]
    aux = names[n_in + 2:]
    if gp[y].concrete_size != n or gp[b_out] != BOOL:
        raise CplError(f"predicate {g!r} is not shaped (..., Fin<{n}>, Bool, ...)")

    n_runs = math.ceil(math.log(1 / eps, 3))
    schedule = qsearch_schedule(n)
    q_max = math.ceil(GROVER_ALPHA * math.sqrt(n))
    cap = q_max + math.floor(math.sqrt(n)) + 2
    fin_cap = FinType(cap)
    fin_n = FinType(n)

    gc = clean_proc(
        em, g, (b_out,), precision=None if pred_precision is None else 2 * pred_precision
    )

    name = em.fresh_proc("QAny")
    grover_base = f"{name}_grover"
    for j in sorted(set(schedule)):
        steps = [
            UCall(gc, tuple(ins) + ("_xs", "_res") + (b_out,) + tuple(aux)),
            UApply(("_xs",), AdjOp(UnifOp(fin_n))),
            UApply(("_xs",), Refl0Op(fin_n)),
            UApply(("_xs",), UnifOp(fin_n)),
        ]
        body = useq_of(
            [UApply(("_xs",), UnifOp(fin_n))]
            + [
                UWith(
                    useq_of([UApply(("_res",), GateOp("X")), UApply(("_res",), GateOp("H"))]),
                    useq_of(steps * j),
                )
            ]
        )
        params = TypingContext(
            [(i, gp[i]) for i in ins]
            + [("_res", BOOL), ("_xs", fin_n)]
            + [(w, gp[w]) for w in (b_out,) + tuple(aux)]
        )
        em.add(UProcDef(f"{grover_base}_{j}", params, body))

    # classical driver
    out_wire = "ok" if "ok" not in ins else "_out"
    qsum, jvar, jlim, xs, nd = "_qsum", "_j", "_jlim", "_xs", "_nd"
    leq_qmax = BinOp(
        "||",
        BinOp("<", Var(qsum), Const(q_max, fin_cap)),
        BinOp("=", Var(qsum), Const(q_max, fin_cap)),
    )
    step = cseq_of(
        [
            CRandomRange(jvar, jlim),
            CAssign(qsum, BinOp("+", Var(qsum), Var(jvar))),
            CAssign(nd, BinOp("&&", Var(nd), leq_qmax)),
            CIf(
                nd,
                cseq_of(
                    [
                        CCallMeasIndexed(
                            grover_base,
                            jvar,
                            fin_cap,
                            tuple(sorted(set(schedule))),
                            tuple(ins) + (out_wire, xs),
                        ),
                        CCallMeas(gc, tuple(ins) + (xs, out_wire)),
                        CAssign(nd, BinOp("&&", Var(nd), UnOp("not", Var(out_wire)))),
                    ]
                ),
            ),
        ]
    )
    run = cseq_of(
        [
            CAssign(nd, UnOp("not", Var(out_wire))),
            CAssign(qsum, Const(0, fin_cap)),
            CFor(jlim, fin_cap, tuple(schedule), step),
        ]
    )
    body = CRepeat(n_runs, run)
    params = TypingContext([(i, gp[i]) for i in ins] + [(out_wire, BOOL)])
    locals_ = TypingContext(
        [
            (nd, BOOL),
            (qsum, fin_cap),
            (jvar, fin_cap),
            (jlim, fin_cap),
            (xs, fin_n),
            (sel_var(jvar), BOOL),
        ]
    )
    proc = CProcDef(
        name,
        params,
        locals_,
        body,
        precision=eps,
        tag=f"QAny[{n}, {eps:.6g}, {g}]",
    )
    name = em.add(proc)
    return name, params
