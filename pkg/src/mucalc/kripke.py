"""Kripke models, fixpoint denotation and evaluation games.

Model checking is available through both routes: direct Knaster-Tarski
iteration (`denote`) and the evaluation game (`model_check`), which must
agree (Streett-Emerson at desk scale).
"""

from __future__ import annotations

import json
from typing import Iterable, Mapping

from . import parity_game as pg
from .formula import syntax as S
from .formula.binding import BindingInfo
from .formula.normalize import expand_covers
from .formula.syntax import (And, Bot, Box, Cover, Diamond, Formula, Mu,
                             NegVar, Nu, Or, Top, TopI, Var)


class UnboundVariableError(KeyError):
    pass


class KripkeModel:
    def __init__(self, worlds: Iterable[str], edges: Iterable[tuple[str, str]],
                 valuation: Mapping[str, Iterable[str]]):
        self.worlds = tuple(sorted(set(worlds)))
        if not self.worlds:
            raise ValueError("a Kripke model needs a non-empty set of worlds")
        wset = set(self.worlds)
        self.edges = frozenset((a, b) for a, b in edges)
        for a, b in self.edges:
            if a not in wset or b not in wset:
                raise ValueError(f"edge ({a!r}, {b!r}) mentions an unknown world")
        self.valuation = {p: frozenset(ws) for p, ws in valuation.items()}
        for p, ws in self.valuation.items():
            if not ws <= wset:
                raise ValueError(f"valuation of {p!r} mentions unknown worlds")
        self._succ = {w: tuple(sorted(b for a, b in self.edges if a == w))
                      for w in self.worlds}

    def successors(self, w: str) -> tuple:
        return self._succ[w]

    def to_dict(self) -> dict:
        return {
            "worlds": list(self.worlds),
            "edges": sorted([a, b] for a, b in self.edges),
            "valuation": {p: sorted(ws) for p, ws in sorted(self.valuation.items())},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "KripkeModel":
        for key in ("worlds", "edges", "valuation"):
            if key not in d:
                raise ValueError(f"model is missing the {key!r} field")
        return cls(d["worlds"], [tuple(e) for e in d["edges"]], d["valuation"])

    @classmethod
    def from_json(cls, text: str) -> "KripkeModel":
        return cls.from_dict(json.loads(text))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def denote(f: Formula, model: KripkeModel, env: Mapping[str, frozenset] | None = None
           ) -> frozenset:
    """The set of worlds satisfying f, by the inductive clauses with
    Knaster-Tarski iteration for the fixpoints."""
    env = dict(env or {})
    worlds = frozenset(model.worlds)

    def lookup(name: str) -> frozenset:
        if name in env:
            return env[name]
        if name in model.valuation:
            return model.valuation[name]
        raise UnboundVariableError(f"no value for free variable {name!r}")

    def go(g: Formula, env: dict) -> frozenset:
        if isinstance(g, (Top, TopI)):
            return worlds
        if isinstance(g, Bot):
            return frozenset()
        if isinstance(g, Var):
            if g.name in env:
                return env[g.name]
            return lookup(g.name)
        if isinstance(g, NegVar):
            return worlds - (env[g.name] if g.name in env else lookup(g.name))
        if isinstance(g, Or):
            return go(g.left, env) | go(g.right, env)
        if isinstance(g, And):
            return go(g.left, env) & go(g.right, env)
        if isinstance(g, Diamond):
            sub = go(g.sub, env)
            return frozenset(w for w in worlds if any(t in sub for t in model.successors(w)))
        if isinstance(g, Box):
            sub = go(g.sub, env)
            return frozenset(w for w in worlds if all(t in sub for t in model.successors(w)))
        if isinstance(g, Cover):
            subs = [go(m, env) for m in g.members]
            ok = set()
            for w in worlds:
                ts = model.successors(w)
                if all(any(t in d for t in ts) for d in subs) and \
                   all(any(t in d for d in subs) for t in ts):
                    ok.add(w)
            return frozenset(ok)
        if isinstance(g, (Mu, Nu)):
            current = frozenset() if isinstance(g, Mu) else worlds
            for _ in range(len(worlds) + 1):
                env2 = dict(env)
                env2[g.var] = current
                nxt = go(g.body, env2)
                if nxt == current:
                    return current
                current = nxt
            raise AssertionError("fixpoint iteration did not converge")
        raise TypeError(f"unknown formula node {g!r}")

    return go(f, env)


def build_evaluation_game(f: Formula, model: KripkeModel, s0: str) -> pg.ParityGame:
    """Evaluation game over Sub(f) x worlds; eleven-row move table, priorities
    from the formula priority table.  Cover modalities are expanded first."""
    if s0 not in model.worlds:
        raise KeyError(f"{s0!r} is not a world of the model")
    f = expand_covers(f)
    info = BindingInfo(f)
    game = pg.ParityGame()
    initial = (f, s0)

    def holds(p: str, s: str) -> bool:
        return s in model.valuation.get(p, frozenset())

    seen: set = set()
    stack = [initial]
    moves: list[tuple] = []
    while stack:
        pos = stack.pop()
        if pos in seen:
            continue
        seen.add(pos)
        psi, s = pos
        succs: list[tuple] = []
        if isinstance(psi, Bot):
            owner = 0
        elif isinstance(psi, (Top, TopI)):
            owner = 1
        elif isinstance(psi, Var) and psi.name in info.bound:
            owner = 0
            succs = [(info.bodies[psi.name], s)]
        elif isinstance(psi, Var):
            owner = 1 if holds(psi.name, s) else 0
        elif isinstance(psi, NegVar):
            owner = 0 if holds(psi.name, s) else 1
        elif isinstance(psi, And):
            owner = 1
            succs = [(psi.left, s), (psi.right, s)]
        elif isinstance(psi, Or):
            owner = 0
            succs = [(psi.left, s), (psi.right, s)]
        elif isinstance(psi, Box):
            owner = 1
            succs = [(psi.sub, t) for t in model.successors(s)]
        elif isinstance(psi, Diamond):
            owner = 0
            succs = [(psi.sub, t) for t in model.successors(s)]
        elif isinstance(psi, (Mu, Nu)):
            owner = 0
            succs = [(psi.body, s)]
        else:
            raise TypeError(f"unknown formula node {psi!r}")
        game.add_position(pos, owner, info.priority_of(psi),
                          label=f"{S.pretty(psi)} @ {s}")
        for nxt in succs:
            moves.append((pos, nxt))
            stack.append(nxt)
    for v, w in moves:
        game.add_edge(v, w)
    game.initial = initial
    return game


def model_check(f: Formula, model: KripkeModel, s0: str) -> bool:
    """True iff s0 satisfies f, decided by solving the evaluation game."""
    game = build_evaluation_game(f, model, s0)
    solution = pg.solve(game)
    return solution.winner[game.initial] == 0
