from .ast import (
    AdjOp,
    BqplError,
    CAssign,
    CCall,
    CCallMeas,
    CCallMeasIndexed,
    CFor,
    CIf,
    CNOT,
    CProcDecl,
    CProcDef,
    CRandom,
    CRandomRange,
    CRepeat,
    CSeq,
    CSkip,
    CStmt,
    CtrlOp,
    CWhileLeq,
    EmbedOp,
    GateOp,
    H,
    Proc,
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
    X,
    Z,
    adj,
    cseq_items,
    cseq_of,
    useq_items,
    useq_of,
)
from .parser import parse_bqpl
from .printer import print_bqpl, print_cstmt, print_proc, print_unitary_op, print_ustmt
from .transform import desugar, desugar_cstmt, desugar_ustmt, invert, sel_var
from .typecheck import (
    check_proc_context,
    check_unitary_op,
    type_check_bqpl,
)


def strip_annotations(pi: ProcContext) -> ProcContext:
    """Drop precision/tag comments (the parser ignores them)."""
    out = []
    for p in pi.procs():
        if isinstance(p, UProcDef):
            out.append(UProcDef(p.name, p.params, p.body))
        elif isinstance(p, CProcDef):
            out.append(CProcDef(p.name, p.params, p.locals, p.body))
        else:
            out.append(p)
    return ProcContext(out)
