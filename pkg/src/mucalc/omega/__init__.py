"""Omega-automata: parity automata, lasso membership, determinization,
complementation and the tableau-branch evenness detector."""

from .automaton import (LassoWord, ParityAutomaton, ResourceBudgetError,
                        even_cycle_exists, from_hoa, product_priority_run,
                        to_hoa)
from .determinize import (DEFAULT_STATE_BUDGET, LazyDetAutomaton,
                          complement_determinize, compress_priorities,
                          determinize, parity_to_buchi)
from .trace_automaton import (INIT_STATE, TraceAutomaton, init_letter,
                              step_letter, trace_detector)

__all__ = [
    "LassoWord", "ParityAutomaton", "ResourceBudgetError", "even_cycle_exists",
    "from_hoa", "product_priority_run", "to_hoa",
    "DEFAULT_STATE_BUDGET", "LazyDetAutomaton", "complement_determinize",
    "compress_priorities", "determinize", "parity_to_buchi",
    "INIT_STATE", "TraceAutomaton", "init_letter", "step_letter",
    "trace_detector",
]
