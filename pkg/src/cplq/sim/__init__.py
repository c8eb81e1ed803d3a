from .classical import (
    ProbDist,
    QEvalContext,
    eval_classical_stmt,
    expected_cost,
    tv_distance,
)
from .metrics import (
    basis_assignments,
    is_unitary,
    unitary_distance,
    unitary_distance_columns,
    unitary_distance_matrices,
)
from .states import DenseState, FactoredState, SimError, WireSpace
from .unitary import (
    UnitaryAction,
    UnitaryRunner,
    eval_unitary_stmt,
    op_matrix,
    ucost,
    ucost_breakdown,
    unitary_embedding,
)
