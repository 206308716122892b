"""Parity games: the worked example, play validation, solver correctness
against brute-force strategy enumeration, and io."""

import itertools
import random

import pytest

from mucalc import parity_game as pg


def figure_game() -> pg.ParityGame:
    g = pg.ParityGame()
    for v, prio, owner in [("v1", 2, 0), ("v2", 3, 1), ("v3", 1, 1),
                           ("v4", 3, 1), ("v5", 0, 0)]:
        g.add_position(v, owner, prio)
    for a, b in [("v1", "v2"), ("v1", "v3"), ("v2", "v3"), ("v2", "v4"),
                 ("v3", "v1"), ("v3", "v4"), ("v4", "v3"), ("v4", "v5")]:
        g.add_edge(a, b)
    g.initial = "v1"
    return g


def test_example_plays():
    g = figure_game()
    assert pg.validate_play(g, ["v1", "v2"], ["v3", "v1"]) == 0
    assert pg.validate_play(g, ["v1", "v2", "v4", "v5"]) == 1


def test_play_validation_errors():
    g = figure_game()
    with pytest.raises(ValueError):
        pg.validate_play(g, ["v1", "v4"])          # not an edge
    with pytest.raises(ValueError):
        pg.validate_play(g, ["v1", "v2"])          # not maximal
    with pytest.raises(ValueError):
        pg.validate_play(g, ["v1"], ["v2", "v4"])  # cycle not closed


def test_dead_end_loses_for_owner():
    g = pg.ParityGame()
    g.add_position("a", 1, 0)
    assert pg.validate_play(g, ["a"]) == 0
    sol = pg.solve(g)
    assert sol.winner["a"] == 0
    g2 = pg.ParityGame()
    g2.add_position("a", 0, 0)
    assert pg.solve(g2).winner["a"] == 1


def test_self_loop_priority_zero():
    g = pg.ParityGame()
    g.add_position("a", 1, 0)
    g.add_edge("a", "a")
    assert pg.solve(g).winner["a"] == 0


def random_game(rng: random.Random, max_positions: int = 8,
                max_priority: int = 6) -> pg.ParityGame:
    g = pg.ParityGame()
    n = rng.randrange(1, max_positions + 1)
    for i in range(n):
        g.add_position(i, rng.randrange(2), rng.randrange(max_priority + 1))
    for i in range(n):
        for j in range(n):
            if rng.random() < 0.3:
                g.add_edge(i, j)
    return g


def _play_winner(game, strategies, start):
    seen = {}
    path = [start]
    while True:
        cur = path[-1]
        if not game.succ[cur]:
            return 1 - game.owner[cur]
        if cur in seen:
            cycle = path[seen[cur]:]
            top = max(game.priority[v] for v in cycle[:-1] or cycle)
            return top % 2
        seen[cur] = len(path) - 1
        path.append(strategies[game.owner[cur]][cur])


def brute_force_regions(game: pg.ParityGame) -> dict:
    """Game value by enumeration of all memoryless strategy profiles."""
    owned = {0: [v for v in game.positions
                 if game.owner[v] == 0 and game.succ[v]],
             1: [v for v in game.positions
                 if game.owner[v] == 1 and game.succ[v]]}
    options = {p: list(itertools.product(*(game.succ[v] for v in owned[p])))
               for p in (0, 1)}
    winner = {}
    for start in game.positions:
        win0 = False
        for choice0 in options[0]:
            s0 = dict(zip(owned[0], choice0))
            if all(_play_winner(game, {0: s0, 1: dict(zip(owned[1], c1))},
                                start) == 0
                   for c1 in options[1]):
                win0 = True
                break
        winner[start] = 0 if win0 else 1
    return winner


def test_solver_against_brute_force():
    rng = random.Random(123)
    for _ in range(120):
        g = random_game(rng, max_positions=6)
        sol = pg.solve(g)
        assert sol.winner == brute_force_regions(g)


def test_figure_game_regions_brute_force():
    g = figure_game()
    assert pg.solve(g).winner == brute_force_regions(g)


def test_determinacy_partition():
    rng = random.Random(5)
    for _ in range(60):
        g = random_game(rng)
        sol = pg.solve(g)
        assert set(sol.winner) == set(g.positions)
        assert sol.region(0) | sol.region(1) == set(g.positions)
        assert not sol.region(0) & sol.region(1)


def _strategy_lassos(game, player, strategy, start, path=()):
    """All plays from `start` when `player` follows `strategy` and the
    opponent plays arbitrarily; yields winners of each maximal play."""
    cur = path + (start,)
    v = start
    if v in path:
        cycle = cur[cur.index(v):-1]
        yield max(game.priority[u] for u in cycle) % 2
        return
    succs = game.succ[v]
    if not succs:
        yield 1 - game.owner[v]
        return
    if game.owner[v] == player:
        yield from _strategy_lassos(game, player, strategy, strategy[v], cur)
    else:
        for w in succs:
            yield from _strategy_lassos(game, player, strategy, w, cur)


def test_strategy_soundness():
    rng = random.Random(99)
    for _ in range(60):
        g = random_game(rng, max_positions=7)
        sol = pg.solve(g)
        for player in (0, 1):
            strategy = sol.strategy(player)
            for v in sol.region(player):
                for outcome in _strategy_lassos(g, player, strategy, v):
                    assert outcome == player


def test_pgsolver_roundtrip():
    g = figure_game()
    text = pg.to_pgsolver(g)
    g2 = pg.from_pgsolver(text)
    assert len(g2.positions) == 5
    ids = {v: i for i, v in enumerate(g.positions)}
    for v in g.positions:
        assert g2.priority[ids[v]] == g.priority[v]
        assert g2.owner[ids[v]] == g.owner[v]
        assert sorted(g2.succ[ids[v]]) == sorted(ids[w] for w in g.succ[v])


def test_dot_export():
    g = figure_game()
    dot = pg.to_dot(g, pg.solve(g))
    assert dot.startswith("digraph") and "v1" in dot
