"""Finite parity games: arena, Zielonka solver with memoryless strategies,
play validation, pgsolver-format io and DOT export.

Player 0 wins an infinite play iff the maximal priority seen infinitely often
is even; a finite play is lost by the owner of its final (dead-end) position.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

Position = Hashable


class ParityGame:
    def __init__(self, initial: Position | None = None):
        self.owner: dict[Position, int] = {}
        self.priority: dict[Position, int] = {}
        self.succ: dict[Position, list] = {}
        self.label: dict[Position, str] = {}
        self.order: dict[Position, int] = {}
        self.initial = initial

    def add_position(self, v: Position, owner: int, priority: int, label: str = ""):
        if owner not in (0, 1):
            raise ValueError("owner must be 0 or 1")
        if v in self.owner:
            raise ValueError(f"duplicate position {v!r}")
        self.owner[v] = owner
        self.priority[v] = priority
        self.succ[v] = []
        self.label[v] = label or str(v)
        self.order[v] = len(self.order)
        return v

    def add_edge(self, v: Position, w: Position):
        if v not in self.owner or w not in self.owner:
            raise KeyError("both endpoints must be positions")
        if w not in self.succ[v]:
            self.succ[v].append(w)

    @property
    def positions(self) -> list:
        return sorted(self.owner, key=self.order.get)

    def is_dead_end(self, v: Position) -> bool:
        return not self.succ[v]


@dataclass
class Solution:
    winner: dict = field(default_factory=dict)
    strategy0: dict = field(default_factory=dict)
    strategy1: dict = field(default_factory=dict)

    def region(self, player: int) -> set:
        return {v for v, w in self.winner.items() if w == player}

    def strategy(self, player: int) -> dict:
        return self.strategy0 if player == 0 else self.strategy1


def _attractor(game: ParityGame, within: set, targets: set, player: int,
               strategy: dict) -> set:
    """Player-`player` attractor of `targets` inside `within`; records the
    attracting moves for positions owned by `player`."""
    attr = set(targets)
    frontier = True
    while frontier:
        frontier = False
        for v in within:
            if v in attr:
                continue
            succs = [w for w in game.succ[v] if w in within]
            if game.owner[v] == player:
                pick = next((w for w in succs if w in attr), None)
                if pick is not None:
                    attr.add(v)
                    strategy[v] = pick
                    frontier = True
            else:
                if all(w in attr for w in succs):
                    attr.add(v)
                    frontier = True
    return attr


def _zielonka(game: ParityGame, region: set) -> tuple[dict, dict, dict]:
    if not region:
        return {}, {}, {}
    p = max(game.priority[v] for v in region)
    player = p % 2
    targets = {v for v in region if game.priority[v] == p}
    s_attr: dict = {}
    attr = _attractor(game, region, targets, player, s_attr)
    win_sub, s0_sub, s1_sub = _zielonka(game, region - attr)
    opp_region = {v for v, w in win_sub.items() if w == 1 - player}
    strategies = (s0_sub, s1_sub)
    if not opp_region:
        winner = {v: player for v in region}
        s_own = dict(strategies[player])
        s_own.update(s_attr)
        for v in sorted(targets, key=game.order.get):
            if game.owner[v] == player and v not in s_own:
                succs = [w for w in game.succ[v] if w in region]
                if succs:
                    s_own[v] = min(succs, key=game.order.get)
        out = (s_own, strategies[1 - player]) if player == 0 else (strategies[1 - player], s_own)
        return winner, out[0], out[1]
    s_opp_attr: dict = {}
    b = _attractor(game, region, opp_region, 1 - player, s_opp_attr)
    win2, s0_2, s1_2 = _zielonka(game, region - b)
    winner = dict(win2)
    for v in b:
        winner[v] = 1 - player
    strategies2 = (s0_2, s1_2)
    s_opp = dict(strategies2[1 - player])
    s_opp.update(s_opp_attr)
    s_opp.update({v: w for v, w in strategies[1 - player].items() if v in opp_region})
    s_own = strategies2[player]
    out = (s_own, s_opp) if player == 0 else (s_opp, s_own)
    return winner, out[0], out[1]


_SINK0 = ("__sink__", 0)
_SINK1 = ("__sink__", 1)


def solve(game: ParityGame) -> Solution:
    """Winning regions and memoryless strategies (Zielonka recursion).

    Dead ends stay in the reported game: they are won by the opponent of
    their owner and carry no strategy entry.
    """
    work = ParityGame()
    for v in game.positions:
        work.add_position(v, game.owner[v], game.priority[v])
    sinks_used = False
    for v in game.positions:
        for w in game.succ[v]:
            work.add_edge(v, w)
        if game.is_dead_end(v):
            sinks_used = True
    if sinks_used:
        work.add_position(_SINK0, 1, 0)
        work.add_position(_SINK1, 0, 1)
        work.add_edge(_SINK0, _SINK0)
        work.add_edge(_SINK1, _SINK1)
        for v in game.positions:
            if game.is_dead_end(v):
                work.add_edge(v, _SINK0 if game.owner[v] == 1 else _SINK1)
    winner, s0, s1 = _zielonka(work, set(work.owner))
    sol = Solution()
    for v in game.positions:
        sol.winner[v] = winner[v]
    for v, w in s0.items():
        if v not in (_SINK0, _SINK1) and w not in (_SINK0, _SINK1):
            sol.strategy0[v] = w
    for v, w in s1.items():
        if v not in (_SINK0, _SINK1) and w not in (_SINK0, _SINK1):
            sol.strategy1[v] = w
    return sol


def validate_play(game: ParityGame, prefix: Sequence, cycle: Sequence = ()) -> int:
    """Winner of a play: a finite maximal play, or a lasso prefix.cycle^omega."""
    prefix = list(prefix)
    cycle = list(cycle)
    path = prefix + cycle
    if not path:
        raise ValueError("empty play")
    for v, w in zip(path, path[1:]):
        if w not in game.succ[v]:
            raise ValueError(f"play is not edge-consistent at {v!r} -> {w!r}")
    if cycle:
        if cycle[0] not in game.succ[path[-1]]:
            raise ValueError("cycle is not closed")
        top = max(game.priority[v] for v in cycle)
        return 0 if top % 2 == 0 else 1
    last = path[-1]
    if not game.is_dead_end(last):
        raise ValueError("finite play does not end in a dead end")
    return 1 - game.owner[last]


# -- io ---------------------------------------------------------------------------


def to_pgsolver(game: ParityGame) -> str:
    ids = {v: i for i, v in enumerate(game.positions)}
    lines = [f"parity {len(ids) - 1 if ids else 0};"]
    for v in game.positions:
        succs = ",".join(str(ids[w]) for w in game.succ[v])
        lines.append(f'{ids[v]} {game.priority[v]} {game.owner[v]} {succs} "{game.label[v]}";')
    return "\n".join(lines) + "\n"


def from_pgsolver(text: str) -> ParityGame:
    game = ParityGame()
    edges: list[tuple[int, int]] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("parity"):
            continue
        line = line.rstrip(";")
        label = ""
        if '"' in line:
            line, label = line.split('"', 1)
            label = label.rstrip('"')
        parts = line.split()
        if len(parts) < 3:
            raise ValueError(f"bad pgsolver line: {raw!r}")
        ident, prio, owner = int(parts[0]), int(parts[1]), int(parts[2])
        game.add_position(ident, owner, prio, label)
        if len(parts) > 3 and parts[3]:
            edges.extend((ident, int(t)) for t in parts[3].split(","))
    for v, w in edges:
        game.add_edge(v, w)
    if game.positions and game.initial is None:
        game.initial = game.positions[0]
    return game


def to_dot(game: ParityGame, solution: Solution | None = None) -> str:
    ids = {v: i for i, v in enumerate(game.positions)}
    out = ["digraph parity_game {"]
    for v in game.positions:
        shape = "ellipse" if game.owner[v] == 0 else "box"
        color = ""
        if solution is not None:
            color = ', style=filled, fillcolor="{}"'.format(
                "palegreen" if solution.winner[v] == 0 else "lightcoral")
        out.append(f'  n{ids[v]} [label="{game.label[v]}\\n{game.priority[v]}", '
                   f'shape={shape}{color}];')
    for v in game.positions:
        for w in game.succ[v]:
            out.append(f"  n{ids[v]} -> n{ids[w]};")
    out.append("}")
    return "\n".join(out) + "\n"
