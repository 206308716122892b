"""Determinization and complementation of parity automata.

Pipeline: nondeterministic parity -> nondeterministic Buchi (priority-phase
gadget, polynomial) -> deterministic parity via Safra/Piterman compact
history trees -> parity flip for the complement.

The history-tree step keeps node names compact with an order-preserving
renaming after every transition and emits a priority from the least name
that died (odd) or was greened by a vertical merge (even).  Priorities here
use the max-even convention throughout: the min-parity event value c is
mapped to K - c for a fixed even bound K.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Hashable, Iterable

from .automaton import LassoWord, ParityAutomaton, ResourceBudgetError

DEFAULT_STATE_BUDGET = 2 ** 18

EMPTY_TREE = ("<empty>",)


@dataclass
class Buchi:
    """Nondeterministic Buchi automaton with callable transitions."""

    initial: frozenset
    delta: Callable[[Hashable, Hashable], Iterable]
    accepting: Callable[[Hashable], bool]
    size_bound: int


def parity_to_buchi(initial, delta: Callable, priority: Callable,
                    max_priority: int, size_bound: int) -> Buchi:
    """Phase gadget: guess the eventual even cap k of the run; in phase k only
    states of priority <= k are allowed and priority-k states are accepting."""
    evens = [k for k in range(0, max_priority + 1) if k % 2 == 0]

    def bdelta(state, letter):
        phase, q = state[0], state[1]
        out = []
        for q2 in delta(q, letter):
            if phase == "b":
                out.append(("b", q2))
                # enter the even-cap phase exactly at a cap-priority state: a
                # run with even max-inf k still has such entry points after
                # the priorities settle below k
                if priority(q2) in evens:
                    out.append(("c", q2, priority(q2)))
            else:
                k = state[2]
                if priority(q2) <= k:
                    out.append(("c", q2, k))
        return out

    def accepting(state):
        return state[0] == "c" and priority(state[1]) == state[2]

    return Buchi(initial=frozenset(("b", q) for q in initial),
                 delta=bdelta, accepting=accepting,
                 size_bound=size_bound * (1 + len(evens)))


class HistoryTrees:
    """Deterministic transition system of compact Safra trees over a Buchi
    automaton, with per-step parity events."""

    def __init__(self, buchi: Buchi):
        self.buchi = buchi
        self.k_bound = 2 * buchi.size_bound + 2
        self._index: dict = {}

    def _idx(self, q) -> int:
        if q not in self._index:
            self._index[q] = len(self._index)
        return self._index[q]

    def initial_tree(self):
        if not self.buchi.initial:
            return EMPTY_TREE
        return self._encode({1: set(self.buchi.initial)}, {1: []})

    def _encode(self, labels: dict, children: dict):
        def enc(name):
            lab = tuple(sorted(labels[name], key=self._idx))
            return (name, lab, tuple(enc(c) for c in children[name]))
        return enc(1)

    @staticmethod
    def _decode(tree):
        labels: dict = {}
        children: dict = {}

        def dec(node):
            name, lab, kids = node
            labels[name] = set(lab)
            children[name] = [k[0] for k in kids]
            for k in kids:
                dec(k)
        dec(tree)
        return labels, children

    def initial_priority(self) -> int:
        return 1

    def step(self, tree, letter):
        """One deterministic step; returns (next tree, emitted max-even priority)."""
        if tree == EMPTY_TREE:
            return EMPTY_TREE, 1
        labels, children = self._decode(tree)
        real = set(labels)
        next_temp = max(real) + 1
        # branch accepting parts into fresh youngest children
        for v in sorted(real):
            fpart = {q for q in labels[v] if self.buchi.accepting(q)}
            if fpart:
                labels[next_temp] = set(fpart)
                children[next_temp] = []
                children[v].append(next_temp)
                next_temp += 1
        # powerset transition at every node
        for v in list(labels):
            out: set = set()
            for q in labels[v]:
                out.update(self.buchi.delta(q, letter))
            labels[v] = out
        # horizontal merge: a state stays only in the oldest sibling branch
        def hmerge(v, stolen):
            labels[v] -= stolen
            claimed: set = set()
            for c in children[v]:
                hmerge(c, stolen | claimed)
                claimed |= labels[c]
        hmerge(1, set())
        removed: set = set()

        def kill_empty(v):
            for c in list(children[v]):
                kill_empty(c)
            if not labels[v] and v != 1:
                parent = next(p for p, cs in children.items() if v in cs)
                children[parent].remove(v)
                _drop(v)

        def _drop(v):
            for c in list(children[v]):
                _drop(c)
            if v in real:
                removed.add(v)
            del labels[v], children[v]

        kill_empty(1)
        if not labels[1]:
            # the whole run set died: death of the root
            return EMPTY_TREE, self.k_bound - 1
        greened: set = set()

        def green(v):
            union: set = set()
            for c in children[v]:
                union |= labels[c]
            if children[v] and union == labels[v]:
                if v in real:
                    greened.add(v)
                for c in list(children[v]):
                    _drop(c)
                children[v] = []
            else:
                for c in list(children[v]):
                    green(c)
        green(1)
        e = min(removed) if removed else None
        f = min(greened) if greened else None
        if f is not None and (e is None or f < e):
            c = 2 * f
        elif e is not None:
            c = 2 * e - 1
        else:
            c = self.k_bound - 1
        # compact names, preserving relative order
        rename = {old: i + 1 for i, old in enumerate(sorted(labels))}
        labels = {rename[v]: lab for v, lab in labels.items()}
        children = {rename[v]: [rename[c] for c in cs] for v, cs in children.items()
                    if v in rename}
        return self._encode(labels, children), self.k_bound - c


class LazyDetAutomaton:
    """Deterministic parity automaton with on-demand transitions.

    States are history trees; priorities are emitted per transition
    (`step_priority`).  `flip` adds one to every emitted priority, which
    complements the recognized language.
    """

    def __init__(self, buchi: Buchi, flip: bool, budget: int = DEFAULT_STATE_BUDGET):
        self._trees = HistoryTrees(buchi)
        self._flip = 1 if flip else 0
        self._budget = budget
        self.initial = self._trees.initial_tree()
        self._step: dict = {}
        self._seen = {self.initial}

    def _lookup(self, state, letter):
        key = (state, letter)
        if key not in self._step:
            nxt, emitted = self._trees.step(state, letter)
            if nxt not in self._seen:
                if len(self._seen) >= self._budget:
                    raise ResourceBudgetError(
                        f"determinization exceeded the {self._budget}-state budget")
                self._seen.add(nxt)
            self._step[key] = (nxt, emitted + self._flip)
        return self._step[key]

    def delta(self, state, letter):
        return self._lookup(state, letter)[0]

    def step_priority(self, state, letter) -> int:
        return self._lookup(state, letter)[1]

    def run(self, word: Iterable) -> list:
        seq = [self.initial]
        for a in word:
            seq.append(self.delta(seq[-1], a))
        return seq

    def state_count(self) -> int:
        return len(self._seen)

    def accepts_lasso(self, word: LassoWord) -> bool:
        state = self.initial
        for a in word.prefix:
            state = self.delta(state, a)
        pos = 0
        seen_at: dict = {}
        emitted: list = []
        while (pos, state) not in seen_at:
            seen_at[(pos, state)] = len(emitted)
            letter = word.cycle[pos]
            emitted.append(self.step_priority(state, letter))
            state = self.delta(state, letter)
            pos = (pos + 1) % len(word.cycle)
        start = seen_at[(pos, state)]
        top = max(emitted[start:])
        return top % 2 == 0


def compress_priorities(values: Iterable[int]) -> dict:
    """Order- and parity-preserving map from a priority set to a dense range."""
    vs = sorted(set(values))
    out: dict = {}
    prev_src: int | None = None
    prev_dst = 0
    for v in vs:
        if prev_src is None:
            dst = v % 2
        else:
            dst = prev_dst if v % 2 == prev_dst % 2 else prev_dst + 1
        out[v] = dst
        prev_src, prev_dst = v, dst
    return out


def determinize(a: ParityAutomaton, complement: bool,
                budget: int = DEFAULT_STATE_BUDGET) -> ParityAutomaton:
    """Explicit deterministic total parity automaton for L(a) or its
    complement; states are (tree, incoming priority) pairs."""
    maxp = max(a.priority.values(), default=0)
    buchi = parity_to_buchi([a.initial], a.delta, lambda q: a.priority[q],
                            maxp, len(a.states))
    lazy = LazyDetAutomaton(buchi, flip=complement, budget=budget)
    init = (lazy.initial, 1 + (1 if complement else 0))
    states = [init]
    seen = {init}
    transitions: dict = {}
    i = 0
    while i < len(states):
        q = states[i]
        i += 1
        for letter in a.alphabet:
            q2 = (lazy.delta(q[0], letter), lazy.step_priority(q[0], letter))
            transitions[(q, letter)] = {q2}
            if q2 not in seen:
                seen.add(q2)
                states.append(q2)
    cmap = compress_priorities(q[1] for q in states)
    ids = {q: i for i, q in enumerate(states)}
    out_tr = {(ids[q], letter): {ids[q2] for q2 in tgt}
              for (q, letter), tgt in transitions.items()}
    return ParityAutomaton(
        states=[ids[q] for q in states],
        alphabet=list(a.alphabet),
        initial=ids[init],
        priority={ids[q]: cmap[q[1]] for q in states},
        transitions=out_tr,
        letter_info=dict(a.letter_info))


def complement_determinize(a: ParityAutomaton,
                           budget: int = DEFAULT_STATE_BUDGET) -> ParityAutomaton:
    """Deterministic total automaton for the complement of L(a)."""
    return determinize(a, complement=True, budget=budget)
