"""Compute-uncompute wrappers.

Clean[g] calls g, copies a subset of its wires onto fresh ones, then calls
g's adjoint, restoring g's outputs and workspace. CtrlClean controls only the
copy. Wrapper signatures put the fresh copies right after the wires that
precede the copied ones, so measured calls can pass exactly
(inputs..., fresh outputs...) as a prefix.
"""

from __future__ import annotations

from ..cpl.ast import BOOL, Var
from ..cpl.typecheck import TypingContext
from ..bqpl.ast import (
    BqplError,
    CtrlOp,
    EmbedOp,
    UApply,
    UCall,
    UCallAdj,
    UProcDecl,
    UProcDef,
    useq_of,
)
from .emitter import Emitter

_IDENTITY = EmbedOp(("x",), Var("x"))


def _wrapper(
    em: Emitter,
    g: str,
    out_names: tuple[str, ...],
    ctrl: bool,
    precision: float | None,
) -> str:
    proc = em.procs.get(g)
    if proc is None:
        raise BqplError(f"cannot wrap unknown procedure {g!r}")
    params = proc.params
    for o in out_names:
        if o not in params:
            raise BqplError(f"{g!r} has no wire {o!r}")
    g_wires = params.names()
    first_out = min(g_wires.index(o) for o in out_names)
    pre = [(n, params[n]) for n in g_wires[:first_out]]
    post = [(n, params[n]) for n in g_wires[first_out:]]

    # internal names for the control/copy wires, deterministic but avoiding g's
    taken = set(g_wires)

    def local(base: str) -> str:
        k = 0
        while f"_{base}{k}" in taken:
            k += 1
        taken.add(f"_{base}{k}")
        return f"_{base}{k}"

    ctrl_wire = local("ctl") if ctrl else None
    copies = [local("cp") for _ in out_names]

    sig: list[tuple[str, object]] = []
    if ctrl_wire is not None:
        sig.append((ctrl_wire, BOOL))
    sig.extend(pre)
    for cp, o in zip(copies, out_names):
        sig.append((cp, params[o]))
    sig.extend(post)

    body = [UCall(g, tuple(g_wires))]
    for o, cp in zip(out_names, copies):
        if ctrl_wire is not None:
            body.append(UApply((ctrl_wire, o, cp), CtrlOp(_IDENTITY)))
        else:
            body.append(UApply((o, cp), _IDENTITY))
    body.append(UCallAdj(g, tuple(g_wires)))
    kind = "CtrlClean" if ctrl else "Clean"
    name = f"{kind}[{g}]"
    wrapper = UProcDef(name, TypingContext(sig), useq_of(body), precision=precision)
    return em.add(wrapper)


def clean_proc(
    em: Emitter,
    g: str,
    out_names: tuple[str, ...],
    precision: float | None = None,
) -> str:
    """Emit Clean[g, outs -> fresh copies]; returns its name. Costs twice g.

    Signature: (wires of g before the first output, fresh copies, remaining
    wires of g including the outputs). Measured callers can therefore pass
    (inputs..., copies...) as a prefix.
    """
    return _wrapper(em, g, out_names, ctrl=False, precision=precision)


def ctrl_clean_proc(
    em: Emitter,
    g: str,
    out_names: tuple[str, ...],
    precision: float | None = None,
) -> str:
    """Emit CtrlClean[g, ...]: like Clean but the copy is controlled."""
    return _wrapper(em, g, out_names, ctrl=True, precision=precision)
