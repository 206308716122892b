"""The branch-evenness detector of a well-named formula.

A tableau branch is read as a word whose letters are edge descriptors: an
initial letter carrying the root label, then one letter per rule application
carrying the source label and the full trace map of the step.  (Label-set
pairs alone would be ambiguous: {a|b, a, b} reduces to {a, b} in two ways with
different trace maps, so letters carry the map itself.)

The nondeterministic automaton built here tracks one trace and accepts odd
traces via the shifted priorities; its determinized complement accepts exactly
the words of even branches.
"""

from __future__ import annotations

from typing import Iterable, Mapping

from ..formula.binding import BindingInfo
from ..formula.syntax import Formula
from .determinize import (DEFAULT_STATE_BUDGET, LazyDetAutomaton,
                          parity_to_buchi)

INIT_STATE = ("<init>",)

TraceMap = Mapping[Formula, frozenset]


def init_letter(label: Iterable[Formula]):
    return ("init", frozenset(label))


def step_letter(src_label: Iterable[Formula], trace: TraceMap):
    items = tuple(sorted(((f, frozenset(img)) for f, img in trace.items()),
                         key=lambda kv: kv[0].key))
    return ("step", frozenset(src_label), items)


def extended_subformulas(formula: Formula) -> frozenset:
    """Sub(phi) closed under the leftover disjunctions that modal-rule
    premises introduce for each cover group."""
    from ..formula.syntax import Cover, big_or

    out = set(formula.subformulas())
    for g in formula.subformulas():
        if isinstance(g, Cover):
            out |= big_or(g.members).subformulas()
    return frozenset(out)


class TraceAutomaton:
    """Nondeterministic parity automaton over the extended subformula set plus
    an initial state; accepts exactly the branch words carrying a non-even
    trace."""

    def __init__(self, formula: Formula, info: BindingInfo | None = None):
        self.formula = formula
        self.info = info or BindingInfo(formula)
        self.states = [INIT_STATE] + list(extended_subformulas(formula))

    def priority(self, q) -> int:
        if q == INIT_STATE:
            return 0
        return self.info.priority_of(q) + 1

    def max_priority(self) -> int:
        return max(self.priority(q) for q in self.states)

    def delta(self, q, letter) -> frozenset:
        kind = letter[0]
        if q == INIT_STATE:
            if kind == "init":
                return frozenset(letter[1])
            return frozenset()
        if kind != "step":
            return frozenset()
        for f, img in letter[2]:
            if f == q:
                return img
        return frozenset()


_detector_cache: dict = {}


def trace_detector(formula: Formula, info: BindingInfo | None = None,
                   budget: int = DEFAULT_STATE_BUDGET) -> LazyDetAutomaton:
    """Deterministic parity automaton accepting exactly the even branch words
    (the complement of the odd-trace detector); cached per formula."""
    key = (formula, budget)
    if key not in _detector_cache:
        ta = TraceAutomaton(formula, info)
        buchi = parity_to_buchi([INIT_STATE], ta.delta, ta.priority,
                                ta.max_priority(), len(ta.states))
        _detector_cache[key] = LazyDetAutomaton(buchi, flip=True, budget=budget)
    return _detector_cache[key]
