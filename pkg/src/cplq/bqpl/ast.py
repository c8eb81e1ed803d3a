"""AST for the BQPL target language.

BQPL has a unitary fragment (statements denoting unitary operators over typed
quantum wires) and a classical fragment (probabilistic statements over typed
classical variables) that can invoke-and-measure unitary procedures. All
procedure arguments are passed by reference; there is no allocation. Bounded
loops, for-loops, indexed measured calls and the compute-uncompute block are
syntax sugar over the core.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..cpl.ast import Expr, FinType
from ..cpl.typecheck import TypingContext


class BqplError(Exception):
    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        if line is not None:
            message = f"{line}:{col}: {message}"
        super().__init__(message)


# ---------------------------------------------------------------------------
# Unitary operators
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GateOp:
    name: str  # "X" | "Z" | "H" | "CNOT"


@dataclass(frozen=True)
class EmbedOp:
    """Embed[(x1, ..., xk) => E]: reversible embedding of a classical expression.

    Acts on k input wires plus one output wire; input wire types are taken
    from the application site.
    """

    params: tuple[str, ...]
    expr: Expr


@dataclass(frozen=True)
class UnifOp:
    typ: FinType  # Fourier transform; maps |0> to the uniform superposition


@dataclass(frozen=True)
class Refl0Op:
    typ: FinType  # 2|0><0| - I


@dataclass(frozen=True)
class AdjOp:
    op: "UnitaryOp"


@dataclass(frozen=True)
class CtrlOp:
    op: "UnitaryOp"  # prepends one Bool control wire


UnitaryOp = GateOp | EmbedOp | UnifOp | Refl0Op | AdjOp | CtrlOp

X = GateOp("X")
Z = GateOp("Z")
H = GateOp("H")
CNOT = GateOp("CNOT")


def adj(op: UnitaryOp) -> UnitaryOp:
    """Structural adjoint; Adj-Adj-U normalizes to U."""
    if isinstance(op, AdjOp):
        return op.op
    return AdjOp(op)


# ---------------------------------------------------------------------------
# Unitary statements
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class USkip:
    pass


@dataclass(frozen=True)
class UApply:
    wires: tuple[str, ...]
    op: UnitaryOp


@dataclass(frozen=True)
class USeq:
    first: "UStmt"
    rest: "UStmt"


@dataclass(frozen=True)
class UCall:
    proc: str
    wires: tuple[str, ...]


@dataclass(frozen=True)
class UCallAdj:
    proc: str
    wires: tuple[str, ...]


@dataclass(frozen=True)
class UWith:
    """Sugar: with S1 do S2  ==  S1; S2; Inv(S1)."""

    compute: "UStmt"
    body: "UStmt"


UStmt = USkip | UApply | USeq | UCall | UCallAdj | UWith


def useq_of(stmts: list[UStmt]) -> UStmt:
    items = [s for s in stmts if not isinstance(s, USkip)]
    if not items:
        return USkip()
    out = items[-1]
    for s in reversed(items[:-1]):
        out = USeq(s, out)
    return out


def useq_items(stmt: UStmt) -> list[UStmt]:
    items: list[UStmt] = []
    while isinstance(stmt, USeq):
        items.append(stmt.first)
        stmt = stmt.rest
    items.append(stmt)
    return items


# ---------------------------------------------------------------------------
# Classical statements
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CSkip:
    pass


@dataclass(frozen=True)
class CAssign:
    target: str
    expr: Expr


@dataclass(frozen=True)
class CRandom:
    target: str
    typ: FinType  # x :=$ T, uniform over the type


@dataclass(frozen=True)
class CRandomRange:
    """x :=$ [1..y]: uniform over {1..value of y}; 0 if y holds 0.

    Grammar extension needed by the quantum search procedure's iteration
    sampling.
    """

    target: str
    upper: str  # variable name


@dataclass(frozen=True)
class CSeq:
    first: "CStmt"
    rest: "CStmt"


@dataclass(frozen=True)
class CIf:
    cond: str  # Bool variable
    body: "CStmt"


@dataclass(frozen=True)
class CCall:
    proc: str
    args: tuple[str, ...]


@dataclass(frozen=True)
class CCallMeas:
    """call_uproc_and_meas g(xs): run g on |xs>|0...>, measure the passed wires."""

    proc: str
    args: tuple[str, ...]


@dataclass(frozen=True)
class CRepeat:
    count: int
    body: "CStmt"


@dataclass(frozen=True)
class CWhileLeq:
    count: int
    cond: str
    body: "CStmt"


@dataclass(frozen=True)
class CFor:
    """for x in {v1, ..., vk} { body }: assigns each value to x in turn."""

    var: str
    typ: FinType
    values: tuple[int, ...]
    body: "CStmt"


@dataclass(frozen=True)
class CCallMeasIndexed:
    """call_uproc_and_meas base_{j}(xs): dispatch on the value of j."""

    base: str
    index: str
    typ: FinType  # type of the index variable
    values: tuple[int, ...]
    args: tuple[str, ...]


CStmt = (
    CSkip
    | CAssign
    | CRandom
    | CRandomRange
    | CSeq
    | CIf
    | CCall
    | CCallMeas
    | CRepeat
    | CWhileLeq
    | CFor
    | CCallMeasIndexed
)


def cseq_of(stmts: list[CStmt]) -> CStmt:
    items = [s for s in stmts if not isinstance(s, CSkip)]
    if not items:
        return CSkip()
    out = items[-1]
    for s in reversed(items[:-1]):
        out = CSeq(s, out)
    return out


def cseq_items(stmt: CStmt) -> list[CStmt]:
    items: list[CStmt] = []
    while isinstance(stmt, CSeq):
        items.append(stmt.first)
        stmt = stmt.rest
    items.append(stmt)
    return items


# ---------------------------------------------------------------------------
# Procedures
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class UProcDef:
    name: str
    params: TypingContext
    body: UStmt
    precision: float | None = None  # norm error annotation, emitted as a comment
    tag: str | None = None  # provenance annotation, emitted as a comment


@dataclass(frozen=True)
class UProcDecl:
    name: str
    params: TypingContext
    tick: float


@dataclass(frozen=True)
class CProcDef:
    name: str
    params: TypingContext
    locals: TypingContext
    body: CStmt
    precision: float | None = None  # failure probability annotation
    tag: str | None = None


@dataclass(frozen=True)
class CProcDecl:
    name: str
    params: TypingContext
    tick: float


Proc = UProcDef | UProcDecl | CProcDef | CProcDecl


class ProcContext:
    """Ordered map from procedure names to procedures."""

    def __init__(self, procs: list[Proc] | None = None):
        self._procs: dict[str, Proc] = {}
        for p in procs or []:
            self.add(p)

    def add(self, p: Proc) -> None:
        if p.name in self._procs:
            if self._procs[p.name] == p:
                return  # identical re-registration is harmless
            raise BqplError(f"procedure name collision: {p.name!r}")
        self._procs[p.name] = p

    def merge(self, other: "ProcContext") -> "ProcContext":
        out = ProcContext(list(self._procs.values()))
        for p in other._procs.values():
            out.add(p)
        return out

    def __contains__(self, name: str) -> bool:
        return name in self._procs

    def __getitem__(self, name: str) -> Proc:
        try:
            return self._procs[name]
        except KeyError:
            raise BqplError(f"unknown procedure {name!r}") from None

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ProcContext) and self._procs == other._procs

    def procs(self) -> list[Proc]:
        return list(self._procs.values())

    def names(self) -> list[str]:
        return list(self._procs)
