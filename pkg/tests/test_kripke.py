"""Kripke semantics: denotation clauses, fixpoints, evaluation games and the
two model-checking routes."""

import json
import random

import pytest

from mucalc.formula import parse, negate, to_well_named
from mucalc.formula import syntax as S
from mucalc.kripke import (KripkeModel, UnboundVariableError,
                           build_evaluation_game, denote, model_check)
from mucalc import parity_game as pg

from conftest import random_formula, random_model


def test_denote_top_is_all_worlds(chain_model):
    assert denote(parse("T"), chain_model) == frozenset(chain_model.worlds)
    assert denote(parse("F"), chain_model) == frozenset()
    assert denote(S.TopI(2), chain_model) == frozenset(chain_model.worlds)


def test_denote_reachability(chain_model):
    f = to_well_named(parse("mu x. (<>x \\/ p)"))
    assert denote(f, chain_model) == frozenset(["w0", "w1", "w2"])


def test_denote_infinitely_often():
    m = KripkeModel(["s"], [("s", "s")], {"p": []})
    f = to_well_named(parse("nu y. mu x. ((<>y /\\ p) \\/ (<>x /\\ ~p))"))
    assert denote(f, m) == frozenset()
    m2 = KripkeModel(["s"], [("s", "s")], {"p": ["s"]})
    assert denote(f, m2) == frozenset(["s"])


def test_denote_unbound_variable():
    m = KripkeModel(["s"], [], {})
    with pytest.raises(UnboundVariableError):
        denote(parse("q"), m)
    assert denote(parse("q"), m, env={"q": frozenset(["s"])}) == frozenset(["s"])


def test_denote_duality():
    rng = random.Random(2)
    for _ in range(100):
        f = to_well_named(random_formula(rng, depth=3))
        m = random_model(rng, max_worlds=4)
        if any(x not in m.valuation for x in f.free_vars):
            continue
        assert denote(negate(f), m) == frozenset(m.worlds) - denote(f, m)


def test_denote_monotone_in_environment():
    rng = random.Random(9)
    for _ in range(60):
        f = to_well_named(random_formula(rng, depth=3, props=("p", "h")))
        if S.NegVar("h") in f.subformulas() or "h" not in f.free_vars:
            continue
        m = random_model(rng, max_worlds=4, props=("p",))
        worlds = list(m.worlds)
        small = frozenset(w for w in worlds if rng.random() < 0.4)
        big = small | frozenset(w for w in worlds if rng.random() < 0.4)
        assert denote(f, m, env={"h": small}) <= denote(f, m, env={"h": big})


def test_fixpoint_iterations_bounded():
    # a chain of n worlds converges in at most n steps per level
    n = 6
    worlds = [f"w{i}" for i in range(n)]
    m = KripkeModel(worlds, [(f"w{i}", f"w{i+1}") for i in range(n - 1)],
                    {"p": [f"w{n-1}"]})
    f = to_well_named(parse("mu x. (p \\/ <>x)"))
    assert denote(f, m) == frozenset(worlds)


def test_evaluation_game_rows(chain_model):
    f = to_well_named(parse("mu x. (<>x \\/ p)"))
    game = build_evaluation_game(f, chain_model, "w0")
    body = parse("<>x \\/ p")
    pos = (body, "w0")
    assert game.owner[pos] == 0
    assert set(game.succ[pos]) == {(parse("<>x"), "w0"), (parse("p"), "w0")}
    bot = (S.BOT, "w0")
    game2 = build_evaluation_game(to_well_named(parse("F \\/ p")), chain_model, "w0")
    assert game2.owner[bot] == 0 and game2.is_dead_end(bot)
    var_pos = (S.Var("x"), "w1")
    assert game.owner[var_pos] == 0
    assert game.succ[var_pos] == [(body, "w1")]


def test_model_check_chain(chain_model):
    f = to_well_named(parse("mu x. (<>x \\/ p)"))
    assert model_check(f, chain_model, "w0")
    assert not model_check(parse("F"), chain_model, "w0")
    with pytest.raises(KeyError):
        model_check(f, chain_model, "nowhere")


def test_game_denotation_agreement():
    rng = random.Random(77)
    checked = 0
    while checked < 200:
        f = to_well_named(random_formula(rng, depth=3))
        m = random_model(rng, max_worlds=4)
        if any(x not in m.valuation for x in f.free_vars):
            continue
        s = rng.choice(m.worlds)
        assert model_check(f, m, s) == (s in denote(f, m))
        checked += 1


def test_model_json_roundtrip(chain_model):
    again = KripkeModel.from_json(chain_model.to_json())
    assert again.to_dict() == chain_model.to_dict()


def test_model_loader_validates():
    with pytest.raises(ValueError):
        KripkeModel([], [], {})
    with pytest.raises(ValueError):
        KripkeModel(["a"], [("a", "b")], {})
    with pytest.raises(ValueError):
        KripkeModel(["a"], [], {"p": ["b"]})
    with pytest.raises(ValueError):
        KripkeModel.from_dict({"worlds": ["a"], "edges": []})
