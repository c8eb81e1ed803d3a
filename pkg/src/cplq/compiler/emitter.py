"""Shared compilation state: fresh names, emitted procedures, caches.

One Emitter instance threads through a whole compilation (including the
unitary sub-compilations a quantum compilation triggers), which makes name
generation deterministic and gives the structural mirror law for sequences:
compiling S1;S2 equals compiling S1 then S2 against the same emitter.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..bqpl.ast import CProcDef, Proc, ProcContext, UProcDef
from ..cpl.typecheck import TypingContext


def _strip(p: Proc) -> Proc:
    if isinstance(p, UProcDef):
        return UProcDef(p.name, p.params, p.body)
    if isinstance(p, CProcDef):
        return CProcDef(p.name, p.params, p.locals, p.body)
    return p


class Emitter:
    def __init__(self):
        self.procs: dict[str, Proc] = {}
        self.source_decl: dict[str, str] = {}  # emitted decl name -> source function
        self._counters: dict[str, int] = {}
        self._wire_counter = 0
        self.ucompile_fun_cache: dict = {}
        self.compile_fun_cache: dict = {}
        self.prim_cache: dict = {}

    # -- names ----------------------------------------------------------------

    def fresh_proc(self, base: str) -> str:
        self._counters[base] = self._counters.get(base, 0) + 1
        name = f"{base}{self._counters[base]}"
        while name in self.procs:
            self._counters[base] += 1
            name = f"{base}{self._counters[base]}"
        return name

    def fresh_wire(self, base: str = "aux") -> str:
        self._wire_counter += 1
        return f"_{base}{self._wire_counter}"

    def fresh_wires(self, ctx: TypingContext, base: str = "aux") -> TypingContext:
        return TypingContext([(self.fresh_wire(base), t) for _, t in ctx.items()])

    # -- procedure emission -----------------------------------------------------

    def add(self, proc: Proc, source: str | None = None) -> str:
        """Register a procedure; dedupe identical ones, suffix collisions."""
        name = proc.name
        existing = self.procs.get(name)
        if existing is not None:
            if _strip(existing) == _strip(proc):
                return name
            k = 2
            while f"{name}_{k}" in self.procs:
                base = self.procs[f"{name}_{k}"]
                if _strip(base) == _strip(_rename(proc, f"{name}_{k}")):
                    return f"{name}_{k}"
                k += 1
            name = f"{name}_{k}"
            proc = _rename(proc, name)
        self.procs[name] = proc
        if source is not None:
            self.source_decl[name] = source
        return name

    def context(self) -> ProcContext:
        return ProcContext(list(self.procs.values()))


def _rename(p: Proc, name: str) -> Proc:
    if isinstance(p, UProcDef):
        return UProcDef(name, p.params, p.body, p.precision, p.tag)
    if isinstance(p, CProcDef):
        return CProcDef(name, p.params, p.locals, p.body, p.precision, p.tag)
    return type(p)(name, p.params, p.tick)
