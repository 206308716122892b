"""Parity automata over finite alphabets and lasso-word membership.

Acceptance is max-parity: a run is accepting iff the largest priority seen
infinitely often is even.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Hashable, Iterable

import networkx as nx


class ResourceBudgetError(RuntimeError):
    """Raised when a construction exceeds its configured state budget."""


@dataclass(frozen=True)
class LassoWord:
    prefix: tuple
    cycle: tuple

    def __post_init__(self):
        if not self.cycle:
            raise ValueError("lasso cycle must be non-empty")

    def letters(self) -> tuple:
        return self.prefix + self.cycle

    @classmethod
    def parse(cls, text: str, sep: str = "|") -> "LassoWord":
        pre, _, cyc = text.partition(sep)
        return cls(tuple(pre.split()) if pre.strip() else (),
                   tuple(cyc.split()))

    def __str__(self) -> str:
        return " ".join(map(str, self.prefix)) + " | " + " ".join(map(str, self.cycle))


def even_cycle_exists(succ: Callable, priority: Callable,
                      sources: Iterable, parity: int = 0) -> bool:
    """True iff some cycle reachable from `sources` has max priority of the
    given parity.  Decided per descending priority via SCC analysis."""
    g = nx.DiGraph()
    reachable = set()
    stack = list(sources)
    while stack:
        v = stack.pop()
        if v in reachable:
            continue
        reachable.add(v)
        g.add_node(v)
        for w in succ(v):
            g.add_edge(v, w)
            stack.append(w)
    if not reachable:
        return False
    prios = sorted({priority(v) for v in reachable}, reverse=True)
    for p in prios:
        if p % 2 != parity:
            continue
        sub = g.subgraph(v for v in reachable if priority(v) <= p)
        for comp in nx.strongly_connected_components(sub):
            if not any(priority(v) == p for v in comp):
                continue
            if len(comp) > 1 or any(sub.has_edge(v, v) for v in comp):
                return True
    return False


class ParityAutomaton:
    """Explicit-alphabet parity automaton, possibly nondeterministic."""

    def __init__(self, states: Iterable, alphabet: Iterable, initial,
                 priority: dict, transitions: dict, letter_info: dict | None = None):
        self.states = list(states)
        self.alphabet = list(alphabet)
        self.initial = initial
        self.priority = dict(priority)
        self.transitions = {k: frozenset(v) for k, v in transitions.items()}
        self.letter_info = dict(letter_info or {})
        if initial not in set(self.states):
            raise ValueError("initial state is unknown")
        for (q, a), tgt in self.transitions.items():
            if q not in self.priority or not set(tgt) <= set(self.states):
                raise ValueError("transition mentions unknown states")

    def delta(self, q, a) -> frozenset:
        return self.transitions.get((q, a), frozenset())

    @property
    def deterministic(self) -> bool:
        return all(len(self.delta(q, a)) == 1 for q in self.states for a in self.alphabet)

    def is_total(self) -> bool:
        return all(len(self.delta(q, a)) >= 1 for q in self.states for a in self.alphabet)

    # -- membership -----------------------------------------------------------

    def accepts(self, word: LassoWord) -> bool:
        """Membership of the ultimately periodic word prefix.cycle^omega,
        by cycle analysis on the product with the word positions."""
        letters = word.letters()
        for a in letters:
            if a not in set(self.alphabet):
                raise KeyError(f"unknown letter {a!r}")
        total = len(letters)
        start_cycle = len(word.prefix)

        def succ(node):
            q, i = node
            j = i + 1 if i + 1 < total else start_cycle
            return [(q2, j) for q2 in self.delta(q, letters[i])]

        return even_cycle_exists(
            succ=succ,
            priority=lambda node: self.priority[node[0]],
            sources=[(self.initial, 0)])

    def run(self, path: Iterable) -> list:
        """State sequence of the unique run on a finite word (deterministic
        and total automata only)."""
        seq = [self.initial]
        for a in path:
            tgt = self.delta(seq[-1], a)
            if len(tgt) != 1:
                raise ValueError("run is only defined for deterministic, total automata")
            seq.append(next(iter(tgt)))
        return seq


def product_priority_run(automaton: ParityAutomaton, path: Iterable) -> list:
    return automaton.run(path)


# -- HOA import/export ---------------------------------------------------------


def _parity_acceptance(k: int) -> str:
    """Canonical 'parity max even k' acceptance formula."""
    # Inf(k-1) | (Fin(k-2) & (Inf(k-3) | ...)) with even sets accepting
    def build(i: int) -> str:
        if i < 0:
            return "f"
        if i % 2 == 0:
            rest = build(i - 1)
            return f"Inf({i})" if rest == "f" else f"Inf({i}) | ({rest})"
        rest = build(i - 1)
        return f"Fin({i})" if rest == "f" else f"Fin({i}) & ({rest})"

    return build(k - 1) if k > 0 else "f"


def to_hoa(a: ParityAutomaton) -> str:
    """HOA v1 text; letters are encoded in binary over fresh APs l0, l1, ..."""
    import math

    letters = list(a.alphabet)
    nbits = max(1, math.ceil(math.log2(max(len(letters), 2))))
    ids = {q: i for i, q in enumerate(a.states)}
    k = max(a.priority.values(), default=0) + 1
    lines = [
        "HOA: v1",
        f"States: {len(a.states)}",
        f"Start: {ids[a.initial]}",
        f"AP: {nbits} " + " ".join(f'"l{i}"' for i in range(nbits)),
        f"acc-name: parity max even {k}",
        f"Acceptance: {k} {_parity_acceptance(k)}",
        "--BODY--",
    ]
    for q in a.states:
        lines.append(f"State: {ids[q]} {{{a.priority[q]}}}")
        for li, letter in enumerate(letters):
            bits = " & ".join(f"{'' if (li >> b) & 1 else '!'}{b}" for b in range(nbits))
            for q2 in sorted(a.delta(q, letter), key=lambda s: ids[s]):
                lines.append(f"[{bits}] {ids[q2]}")
    lines.append("--END--")
    return "\n".join(lines) + "\n"


def from_hoa(text: str, letters: list | None = None) -> ParityAutomaton:
    """Parse the subset of HOA produced by to_hoa."""
    import re

    header, _, body = text.partition("--BODY--")
    start = int(re.search(r"^Start:\s*(\d+)", header, re.M).group(1))
    nstates = int(re.search(r"^States:\s*(\d+)", header, re.M).group(1))
    nbits = int(re.search(r"^AP:\s*(\d+)", header, re.M).group(1))
    if letters is None:
        letters = list(range(2 ** nbits))
    priority: dict = {}
    transitions: dict = {}
    current = None
    for raw in body.splitlines():
        line = raw.strip()
        if not line or line == "--END--":
            continue
        m = re.match(r"State:\s*(\d+)\s*\{(\d+)\}", line)
        if m:
            current = int(m.group(1))
            priority[current] = int(m.group(2))
            continue
        m = re.match(r"\[(.*)\]\s*(\d+)", line)
        if m and current is not None:
            code = 0
            for part in m.group(1).split("&"):
                part = part.strip()
                neg = part.startswith("!")
                bit = int(part.lstrip("!"))
                if not neg:
                    code |= 1 << bit
            if code < len(letters):
                key = (current, letters[code])
                transitions.setdefault(key, set()).add(int(m.group(2)))
    states = list(range(nstates))
    for q in states:
        priority.setdefault(q, 0)
    return ParityAutomaton(states, letters, start, priority, transitions)
