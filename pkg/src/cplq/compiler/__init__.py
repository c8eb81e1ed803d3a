from .clean import clean_proc, ctrl_clean_proc
from .emitter import Emitter
from .qany import build_qany, qsearch_schedule
from .quantum import CompiledProgram, CompileResult, compile_fun, compile_program, compile_stmt
from .uany import build_uany
from .unitary import CompileUnsupported, UCompileResult, ucompile, ucompile_fun
