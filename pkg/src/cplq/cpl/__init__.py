from .ast import (
    BOOL,
    Assign,
    BinOp,
    CallStmt,
    Const,
    CplError,
    CplTypeError,
    Expr,
    FinType,
    FunDecl,
    FunDef,
    Function,
    FunctionContext,
    PrimCall,
    Program,
    Seq,
    Stmt,
    UnOp,
    Var,
    seq_items,
    seq_of,
)
from .evaluate import (
    EvalContext,
    Interpretation,
    State,
    Value,
    any_hat,
    count_hat,
    count_solutions,
    eval_expr,
    eval_stmt,
    load_interpretation_file,
    load_interpretations,
    max_hat,
    run_entry,
)
from .parser import parse_program, parse_stmt
from .printer import print_expr, print_program, print_stmt
from .typecheck import (
    TypingContext,
    check_program,
    elaborate_stmt,
    fun_signature,
    resolve_params,
    type_check_expr,
    type_check_stmt,
)
