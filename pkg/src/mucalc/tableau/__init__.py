"""Tableau engine: regular back-edge tableaux, rule machinery, trace analysis,
tableau games and the satisfiability decision."""

from .graph import (BackEdge, Edge, NABLA_RULES, PLAIN_RULES, REFUTATION_RULES,
                    RegularTableau, WIDE_RULES, canon_trace, is_consistent,
                    is_modal_label)
from .build import (DEFAULT_NODE_BUDGET, TableauBudgetError, build_tableau,
                    build_narrow_tableau, check_cover_form)
from .traces import (Lasso, TraceGraph, TraceLasso, branch_even_by_detector,
                     branch_even_by_traces, covers_factors, destutter,
                     enumerate_lassos, factor_set, insertion_sequence,
                     trace_set)
from .game import SatResult, build_tableau_game, decide_sat

__all__ = [
    "BackEdge", "Edge", "NABLA_RULES", "PLAIN_RULES", "REFUTATION_RULES",
    "RegularTableau", "WIDE_RULES", "canon_trace", "is_consistent",
    "is_modal_label",
    "DEFAULT_NODE_BUDGET", "TableauBudgetError", "build_tableau",
    "build_narrow_tableau", "check_cover_form",
    "Lasso", "TraceGraph", "TraceLasso", "branch_even_by_detector",
    "branch_even_by_traces", "covers_factors", "destutter",
    "enumerate_lassos", "factor_set", "insertion_sequence", "trace_set",
    "SatResult", "build_tableau_game", "decide_sat",
]
