from .analysis import cost_q, cost_q_max, cost_u
from .queries import (
    CostConfig,
    Precision,
    PrecisionKind,
    SplitStrategy,
    Ticks,
    UAnyVariant,
    count_expected_queries,
    count_max_queries,
    count_unitary_queries,
    load_ticks,
    load_ticks_file,
    maxfind_expected_queries,
    maxfind_unitary_queries,
    qsearch_expected_queries,
    qsearch_max_queries,
    randsearch_cutoff,
    randsearch_expected_iterations,
    uany_counts,
    uany_query_bound,
)
from .symbolic import CostExpr, evaluate as evaluate_cost_expr, print_cost_expr, symbolic_cost_u
