"""Shared fixtures: curated corpora and small random generators."""

import random

import pytest

from mucalc.formula import parse, normalize
from mucalc.formula import syntax as S
from mucalc.kripke import KripkeModel

# (source, satisfiable?) -- the 40-formula satisfiability corpus; every SAT
# entry has a model with at most three worlds, every UNSAT entry clashes
# locally or carries only odd traces
SAT_CORPUS = [
    ("T", True),
    ("F", False),
    ("p", True),
    ("~p", True),
    ("p /\\ ~p", False),
    ("p \\/ ~p", True),
    ("p /\\ q", True),
    ("p /\\ (~p \\/ q)", True),
    ("(p \\/ q) /\\ (~p /\\ ~q)", False),
    ("<>T", True),
    ("[]F", True),
    ("<>T /\\ []F", False),
    ("<>p /\\ []~p", False),
    ("<>p /\\ []q", True),
    ("<> <> p", True),
    ("[] <> p", True),
    ("<>(p /\\ ~p)", False),
    ("[](p /\\ ~p)", True),
    ("nabla{}", True),
    ("nabla{} /\\ <>T", False),
    ("nabla{p, ~p}", True),
    ("nabla{p} /\\ nabla{~p}", False),
    ("mu x. <>x", False),
    ("nu x. <>x", True),
    ("mu x. []x", True),
    ("nu x. []x", True),
    ("mu x. (p \\/ <>x)", True),
    ("mu x. (p /\\ <>x)", False),
    ("nu x. (p /\\ <>x)", True),
    ("nu x. (p /\\ []x)", True),
    ("mu x. (<>x \\/ []x)", True),
    ("nu x. (<>x /\\ []F)", False),
    ("nu x. (<>x /\\ ~p) /\\ p", False),
    ("nu y. mu x. ((p /\\ <>y) \\/ <>x)", True),
    ("mu x. nu y. (p /\\ <>y \\/ <>x)", True),
    ("nu x. (<>x /\\ <>~p /\\ []p)", False),
    ("(mu x. <>x) \\/ q", True),
    ("(nu x. <>x) /\\ (mu y. (q \\/ <>y))", True),
    ("[](p \\/ q) /\\ <>(~p /\\ ~q)", False),
    ("nu x. nabla{x, p}", True),
]

# inputs for the normal-form construction; small enough that the double
# unsatisfiability check completes quickly
ANF_CORPUS = [
    "p",
    "~p",
    "T",
    "F",
    "p /\\ q",
    "p \\/ q",
    "p /\\ (q \\/ ~r)",
    "(p \\/ q) /\\ r",
    "<>p",
    "[]p",
    "<>p /\\ []q",
    "<>(p \\/ q)",
    "[](p /\\ q)",
    "nabla{}",
    "nabla{p} \\/ nabla{}",
    "nabla{p, q}",
    "nabla{nabla{p}}",
    "mu x. <>x",
    "nu x. <>x",
    "mu x. (p \\/ <>x)",
    "nu x. (p /\\ <>x)",
    "mu x. nabla{x, T}",
    "nu x. nabla{x, T}",
    "nu y. nabla{nabla{y, q}, p}",
    "nu x. (p /\\ []x)",
]

# automaton normal forms with a positive guarded x for the certificate chain
CLAIM_G_CORPUS = [
    "nabla{x, T} /\\ p",
    "nabla{x} \\/ nabla{}",
    "nabla{x, p}",
    "nabla{x, T} \\/ q",
    "nabla{x, q} \\/ (p /\\ ~p)",
    "nabla{nabla{x, T}}",
    "nabla{x} \\/ (nabla{} /\\ p)",
    "nabla{nabla{x}, p}",
    "nabla{x, nu z. nabla{z}}",
    "p \\/ q",  # vacuous fixpoint
]


@pytest.fixture(scope="session")
def sat_corpus():
    return [(src, normalize(parse(src)), status) for src, status in SAT_CORPUS]


@pytest.fixture(scope="session")
def anf_corpus():
    return [(src, normalize(parse(src))) for src in ANF_CORPUS]


@pytest.fixture(scope="session")
def claim_g_corpus():
    return [(src, normalize(parse(src))) for src in CLAIM_G_CORPUS]


@pytest.fixture(scope="session")
def chain_model():
    return KripkeModel(["w0", "w1", "w2"], [("w0", "w1"), ("w1", "w2")],
                       {"p": ["w2"], "q": ["w0"]})


def random_formula(rng: random.Random, depth: int, props=("p", "q"),
                   bound=(), modal=True) -> S.Formula:
    """Random negation-normal-form formula over diamond/box syntax."""
    if depth <= 0:
        pool = [S.Var(p) for p in props] + [S.NegVar(p) for p in props] + \
            [S.TOP, S.BOT] + [S.Var(x) for x in bound]
        return rng.choice(pool)
    kind = rng.randrange(8)
    if kind in (0, 1):
        return S.Or(random_formula(rng, depth - 1, props, bound, modal),
                    random_formula(rng, depth - 1, props, bound, modal))
    if kind in (2, 3):
        return S.And(random_formula(rng, depth - 1, props, bound, modal),
                     random_formula(rng, depth - 1, props, bound, modal))
    if kind == 4 and modal:
        return S.Diamond(random_formula(rng, depth - 1, props, bound, modal))
    if kind == 5 and modal:
        return S.Box(random_formula(rng, depth - 1, props, bound, modal))
    if kind == 6:
        name = f"v{rng.randrange(1000)}"
        body = S.Or(S.Diamond(S.Var(name)),
                    random_formula(rng, depth - 1, props, bound + (name,), modal))
        return S.Mu(name, body) if rng.random() < 0.5 else S.Nu(name, body)
    return random_formula(rng, depth - 1, props, bound, modal)


def random_model(rng: random.Random, max_worlds: int = 5,
                 props=("p", "q")) -> KripkeModel:
    n = rng.randrange(1, max_worlds + 1)
    worlds = [f"s{i}" for i in range(n)]
    edges = [(a, b) for a in worlds for b in worlds if rng.random() < 0.4]
    valuation = {p: [w for w in worlds if rng.random() < 0.5] for p in props}
    return KripkeModel(worlds, edges, valuation)
