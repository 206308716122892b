"""Trace analysis on regular tableaux: lasso enumeration, per-branch parity by
direct trace inspection and by the determinized branch detector, and the
(inserted) trace-factor sets used when matching tableaux against each other."""

from __future__ import annotations

from dataclasses import dataclass

import networkx as nx

from ..formula.syntax import Cover, Formula, big_or, sorted_formulas
from ..omega.automaton import even_cycle_exists
from .graph import Edge, NABLA_RULES, RegularTableau


@dataclass(frozen=True)
class Lasso:
    """A regular branch: edge path from the root, then a repeating edge cycle."""

    stem: tuple
    cycle: tuple

    @property
    def entry(self) -> int:
        return self.cycle[0].src


def effective_digraph(t: RegularTableau) -> nx.DiGraph:
    g = nx.DiGraph()
    for nid in t.nodes:
        g.add_node(nid)
        for e in t.out_edges(nid):
            g.add_edge(nid, e.target, edge=e)
    return g


def _edge(g: nx.DiGraph, a: int, b: int) -> Edge:
    return g.edges[a, b]["edge"]


def enumerate_lassos(t: RegularTableau, cap: int = 512) -> list[Lasso]:
    """Lasso branches built from simple cycles of the back-edge graph with a
    shortest access stem from the root."""
    g = effective_digraph(t)
    out: list[Lasso] = []
    for cycle in nx.simple_cycles(g):
        entry = None
        stem_nodes = None
        for node in cycle:
            try:
                sp = nx.shortest_path(g, t.root, node)
            except nx.NetworkXNoPath:
                continue
            if stem_nodes is None or len(sp) < len(stem_nodes):
                stem_nodes, entry = sp, node
        if entry is None:
            continue
        i = cycle.index(entry)
        ordered = cycle[i:] + cycle[:i]
        stem = tuple(_edge(g, a, b) for a, b in zip(stem_nodes, stem_nodes[1:]))
        cyc = tuple(_edge(g, a, b)
                    for a, b in zip(ordered, ordered[1:] + [ordered[0]]))
        out.append(Lasso(stem, cyc))
        if len(out) >= cap:
            break
    return out


# -- branch parity ------------------------------------------------------------------


def branch_even_by_detector(t: RegularTableau, lasso: Lasso, detector) -> bool:
    """Run the deterministic branch detector around the lasso and take the
    maximal priority emitted on the repeating segment."""
    state = detector.delta(detector.initial, t.init_word_letter())
    for e in lasso.stem:
        state = detector.delta(state, t.letter_of(e))
    seen: dict = {}
    emitted: list = []
    pos = 0
    while (pos, state) not in seen:
        seen[(pos, state)] = len(emitted)
        letter = t.letter_of(lasso.cycle[pos])
        emitted.append(detector.step_priority(state, letter))
        state = detector.delta(state, letter)
        pos = (pos + 1) % len(lasso.cycle)
    start = seen[(pos, state)]
    return max(emitted[start:]) % 2 == 0


class TraceGraph:
    """Product of a lasso with the trace functions: nodes (formula, position)."""

    def __init__(self, t: RegularTableau, lasso: Lasso):
        self.t = t
        self.edges = list(lasso.stem) + list(lasso.cycle)
        self.loop_to = len(lasso.stem)
        self.total = len(self.edges)
        self.sources = [(f, 0) for f in t.nodes[t.root].label]

    def succ(self, node):
        f, i = node
        if i >= self.total:
            return []
        j = i + 1 if i + 1 < self.total else self.loop_to
        return [(g, j) for g in self.edges[i].image(f)]

    def priority(self, node) -> int:
        return self.t.info.priority_of(node[0])

    def has_trace_of_parity(self, parity: int) -> bool:
        return even_cycle_exists(self.succ, self.priority, self.sources, parity)


def branch_even_by_traces(t: RegularTableau, lasso: Lasso) -> bool:
    """A branch is even iff every trace on it is even, i.e. no reachable odd
    trace cycle exists."""
    return not TraceGraph(t, lasso).has_trace_of_parity(1)


@dataclass(frozen=True)
class TraceLasso:
    cycle_formulas: tuple
    even: bool


def trace_set(t: RegularTableau, lasso: Lasso, cap: int = 256) -> list[TraceLasso]:
    """The trace lassos on a regular branch, each with its parity verdict."""
    tg = TraceGraph(t, lasso)
    g = nx.DiGraph()
    stack = list(tg.sources)
    seen = set(stack)
    while stack:
        v = stack.pop()
        g.add_node(v)
        for w in tg.succ(v):
            g.add_edge(v, w)
            if w not in seen:
                seen.add(w)
                stack.append(w)
    out: list[TraceLasso] = []
    for cycle in nx.simple_cycles(g):
        forms = tuple(f for f, _ in cycle)
        top = max(tg.priority(v) for v in cycle)
        out.append(TraceLasso(forms, even=top % 2 == 0))
        if len(out) >= cap:
            break
    return out


# -- trace factors --------------------------------------------------------------------


def destutter(seq: tuple) -> tuple:
    out: list = []
    for x in seq:
        if not out or out[-1] != x:
            out.append(x)
    return tuple(out)


def insertion_sequence(cover: Cover, into: Formula) -> tuple:
    """The inserted disjunction descent for a cover reduced to one member."""
    members = sorted_formulas(cover.members)
    rest = [m for m in members if m != into]
    seq = [big_or(members)]
    remaining = list(members)
    while len(remaining) > 2:
        drop = next(m for m in remaining if m != into and m in rest)
        remaining.remove(drop)
        seq.append(big_or(remaining))
    return tuple(seq)


def factor_set(t: RegularTableau, sources, path, inserted: bool = False) -> frozenset:
    """All destuttered trace factors along an edge path, one per trace choice,
    starting from each source formula.  With `inserted`, cover-to-member steps
    are interpolated through the disjunction descent."""
    results: set = set()

    def walk(i: int, f: Formula, acc: tuple):
        if i == len(path):
            results.add(destutter(acc))
            return
        e = path[i]
        images = e.image(f)
        for g in images:
            mid: tuple = ()
            if inserted and isinstance(f, Cover) and g in f.members and \
               e.rule in NABLA_RULES:
                mid = insertion_sequence(f, g)
            walk(i + 1, g, acc + mid + (g,))

    for f in sources:
        walk(0, f, (f,))
    return frozenset(results)


def covers_factors(left: frozenset, right: frozenset) -> bool:
    """Every factor on the right has an equivalent factor on the left."""
    return right <= left
