"""Formula core: grammar, negation, normal forms, binding analysis,
substitution and closure."""

import random

import pytest
from hypothesis import given, settings, strategies as st

from mucalc.formula import (BindingInfo, ParseError, alpha_equal, big_or,
                            closure, is_well_named, negate, normalize, parse,
                            substitute, substitute_tracked, to_cover_form,
                            to_json, from_json, to_source, to_well_named,
                            well_named_violations)
from mucalc.formula import syntax as S
from mucalc.formula.binding import alternation_depth
from mucalc.kripke import KripkeModel, denote

from conftest import random_formula, random_model


# -- parsing ---------------------------------------------------------------------


def test_parse_paper_example():
    f = parse("mu x. (<>x \\/ p)")
    assert f == S.Mu("x", S.Or(S.Diamond(S.Var("x")), S.Var("p")))


def test_parse_atoms():
    assert parse("T") == S.TOP
    assert parse("F") == S.BOT
    assert parse("T_3") == S.TopI(3)
    assert parse("~p") == S.NegVar("p")


def test_parse_precedence():
    # binders reach only the next unary term; \/ binds tighter than /\
    assert parse("mu x. <>x \\/ p") == S.Or(S.Mu("x", S.Diamond(S.Var("x"))),
                                            S.Var("p"))
    assert parse("a /\\ b \\/ c") == S.And(S.Var("a"),
                                           S.Or(S.Var("b"), S.Var("c")))
    assert parse("p -> q") == S.Or(S.NegVar("p"), S.Var("q"))


def test_parse_nabla():
    f = parse("nabla{p, q /\\ r}")
    assert isinstance(f, S.Cover) and len(f.members) == 2
    assert parse("nabla{}") == S.Cover([])


def test_parse_negative_occurrence_rejected():
    with pytest.raises(ParseError):
        parse("mu x. ~x")


def test_parse_negation_only_on_variables():
    with pytest.raises(ParseError):
        parse("~(p /\\ q)")
    with pytest.raises(ParseError):
        parse("~T")


def test_parse_errors_carry_position():
    with pytest.raises(ParseError) as err:
        parse("p /\\")
    assert "position" in str(err.value)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_print_parse_roundtrip(seed):
    f = random_formula(random.Random(seed), depth=4)
    assert parse(to_source(f)) == f


# -- negation ---------------------------------------------------------------------


def _rewrite_negation(f):
    """Independent oracle: apply the negation clauses once, top-down."""
    if isinstance(f, S.Top):
        return S.BOT
    if isinstance(f, S.Bot):
        return S.TOP
    if isinstance(f, S.TopI):
        return S.BOT
    if isinstance(f, S.Var):
        return S.NegVar(f.name)
    if isinstance(f, S.NegVar):
        return S.Var(f.name)
    if isinstance(f, S.Or):
        return S.And(_rewrite_negation(f.left), _rewrite_negation(f.right))
    if isinstance(f, S.And):
        return S.Or(_rewrite_negation(f.left), _rewrite_negation(f.right))
    if isinstance(f, S.Diamond):
        return S.Box(_rewrite_negation(f.sub))
    if isinstance(f, S.Box):
        return S.Diamond(_rewrite_negation(f.sub))
    if isinstance(f, (S.Mu, S.Nu)):
        # ~(sigma x.phi(x)) = dual sigma x. ~phi(~x): negating the substituted
        # negative occurrence makes x positive again
        body = _rewrite_negation(f.body)

        def unflip(g):
            if isinstance(g, S.NegVar) and g.name == f.var:
                return S.Var(f.var)
            if isinstance(g, S.Var) and g.name == f.var:
                raise AssertionError("negation left a negative occurrence")
            if isinstance(g, (S.Mu, S.Nu)) and g.var == f.var:
                return g
            if isinstance(g, S.Or):
                return S.Or(unflip(g.left), unflip(g.right))
            if isinstance(g, S.And):
                return S.And(unflip(g.left), unflip(g.right))
            if isinstance(g, S.Diamond):
                return S.Diamond(unflip(g.sub))
            if isinstance(g, S.Box):
                return S.Box(unflip(g.sub))
            if isinstance(g, S.Cover):
                return S.Cover(unflip(m) for m in g.members)
            if isinstance(g, (S.Mu, S.Nu)):
                return type(g)(g.var, unflip(g.body))
            return g

        kind = S.Nu if isinstance(f, S.Mu) else S.Mu
        return kind(f.var, unflip(body))
    raise AssertionError(f"unexpected node {f!r}")


def test_negate_paper_example():
    f = parse("mu x. (<>x \\/ p)")
    assert negate(f) == parse("nu x. ([]x /\\ ~p)")


def test_negate_matches_rewriter_oracle():
    rng = random.Random(11)
    for _ in range(300):
        f = random_formula(rng, depth=4)
        assert negate(f) == _rewrite_negation(f)


def test_negate_involution():
    rng = random.Random(7)
    for _ in range(1000):
        f = random_formula(rng, depth=4)
        assert negate(negate(f)) == f


def test_negate_indexed_top():
    assert negate(S.TopI(4)) == S.BOT


def test_negate_cover_shape():
    f = parse("nabla{p, q}")
    n = negate(f)
    subs = n.subformulas()
    assert S.Or(S.Cover([S.NegVar("p")]), S.Cover([])) in subs
    assert S.Or(S.Cover([S.NegVar("q")]), S.Cover([])) in subs
    assert S.Cover([negate(big_or([S.Var("p"), S.Var("q")])), S.TOP]) in subs


# -- well-named form -----------------------------------------------------------------


def test_wnf_collapse_unguarded():
    assert to_well_named(parse("mu x. (x \\/ p)")) == S.Var("p")
    assert to_well_named(parse("nu x. (x \\/ p)")) == S.TOP


def test_wnf_renames_duplicate_binders():
    f = to_well_named(parse("(mu x. <>x) /\\ (mu x. <>x)"))
    assert isinstance(f, S.And)
    assert f.left.var != f.right.var
    assert not well_named_violations(f)


def test_wnf_idempotent_up_to_names():
    f = to_well_named(parse("mu x. nu y. (<>x \\/ <>y)"))
    assert alpha_equal(to_well_named(f), f)


def test_wnf_machine_checked_clauses():
    rng = random.Random(23)
    for _ in range(200):
        f = random_formula(rng, depth=4)
        wn = to_well_named(f)
        assert well_named_violations(wn) == []


def test_wnf_preserves_denotation():
    rng = random.Random(5)
    for _ in range(120):
        f = random_formula(rng, depth=3)
        wn = to_well_named(f)
        m = random_model(rng, max_worlds=3)
        env = {x: frozenset() for x in (f.free_vars | wn.free_vars)
               if x not in m.valuation}
        assert denote(f, m, env) == denote(wn, m, env)


# -- cover form ------------------------------------------------------------------------


def test_cover_form_paper_clauses():
    assert to_cover_form(parse("<>p")) == S.Cover([S.Var("p"), S.TOP])
    assert to_cover_form(parse("[]p")) == S.Or(S.Cover([]), S.Cover([S.Var("p")]))
    assert to_cover_form(parse("p \\/ q")) == parse("p \\/ q")


def test_cover_form_preserves_denotation():
    rng = random.Random(31)
    for _ in range(80):
        f = to_well_named(random_formula(rng, depth=3))
        cf = to_cover_form(f)
        m = random_model(rng, max_worlds=4)
        env = {x: frozenset() for x in f.free_vars if x not in m.valuation}
        assert denote(f, m, env) == denote(cf, m, env)


# -- alternation depth and priorities -----------------------------------------------------


def test_alternation_depth_paper_example():
    f = parse("mu x. nu y. (<>x \\/ mu z. (<>z /\\ []y))")
    assert alternation_depth(f) == 3


def test_alternation_depth_basics():
    assert alternation_depth(parse("p")) == 0
    assert alternation_depth(parse("mu x. <>x")) == 1
    assert alternation_depth(parse("mu x. mu y. <>(x /\\ y)")) == 1


def _chains_oracle(info):
    """Exhaustive alternating-chain enumeration."""
    best = 0
    stack = [(x, 1) for x in info.bound]
    while stack:
        x, length = stack.pop()
        best = max(best, length)
        for y in info.dep_succ[x]:
            if y != x and info.kinds[y] != info.kinds[x]:
                stack.append((y, length + 1))
    return best


def test_alternation_depth_chain_oracle():
    rng = random.Random(17)
    for _ in range(100):
        f = to_well_named(random_formula(rng, depth=4))
        info = BindingInfo(f)
        assert info.alternation_depth() == _chains_oracle(info)


def _priority_oracle(info):
    """Independent five-case table."""
    out = {}
    for x, body in info.bodies.items():
        alt = info.alt_of_binder(x)
        mu = info.kinds[x] == "mu"
        if mu and alt % 2 == 0:
            out[body] = alt - 1
        elif mu:
            out[body] = alt
        elif alt % 2 == 1:
            out[body] = alt - 1
        else:
            out[body] = alt
    return out


def test_priorities_examples_and_oracle():
    info = BindingInfo(parse("mu x. <>x"))
    assert info.priority_of(parse("<>x")) == 1
    info2 = BindingInfo(parse("nu y. []y"))
    assert info2.priority_of(parse("[]y")) == 0
    rng = random.Random(3)
    for _ in range(100):
        f = to_well_named(random_formula(rng, depth=4))
        info = BindingInfo(f)
        assert info.priorities() == _priority_oracle(info)
        alt = info.alternation_depth()
        for x in info.bound:
            prio = info.priority_of(info.bodies[x])
            assert (prio % 2 == 1) == (info.kinds[x] == "mu")
            assert prio <= alt
        for psi in f.subformulas():
            if psi not in info.bodies.values():
                assert info.priority_of(psi) == 0


# -- substitution -------------------------------------------------------------------------


def test_substitute_simple():
    f = parse("<>x \\/ p")
    assert substitute(f, "x", parse("mu y. <>y")) == parse("<>(mu y. <>y) \\/ p")


def test_substitute_renames_capture():
    f = parse("mu y. (x /\\ <>y)")
    out = substitute(f, "x", parse("nu y. []y"))
    assert is_well_named(out)
    assert isinstance(out, S.Mu) and isinstance(out.body.left, S.Nu)
    assert out.var != out.body.left.var


def test_substitute_identity():
    f = parse("mu y. (x /\\ <>y)")
    assert alpha_equal(substitute(f, "x", S.Var("x")), f)


def test_substitute_disjointness_equations():
    rng = random.Random(41)
    for _ in range(100):
        host = to_well_named(random_formula(rng, depth=3, props=("p", "x")))
        if "x" not in host.free_vars or S.NegVar("x") in host.subformulas():
            continue
        arg = to_well_named(random_formula(rng, depth=3))
        res = substitute_tracked(host, "x", arg)
        hb, hf = res.result.bound_vars, res.result.free_vars
        copies = [c.formula for c in res.copies]
        assert len(copies) >= 1
        # host bound names avoid every free and bound name of every copy
        host_bound = hb - set().union(*(c.bound_vars for c in copies)) \
            if copies else hb
        for c in copies:
            assert not host_bound & c.free_vars
            assert not c.bound_vars & (hf | {res.variable})
        for c1 in copies:
            for c2 in copies:
                if c1 is not c2:
                    assert not c1.bound_vars & c2.bound_vars
                    assert not c1.bound_vars & c2.free_vars
        assert well_named_violations(res.result) == []


# -- closure --------------------------------------------------------------------------------


def test_closure_examples():
    ctx = parse("(p /\\ q) \\/ mu x. <>x")
    info = BindingInfo(to_well_named(ctx))
    assert info.closure(parse("p /\\ q")) == {parse("p /\\ q"), parse("p"),
                                              parse("q")}
    assert info.closure(parse("mu x. <>x")) == {parse("mu x. <>x"),
                                                parse("<>x")}
    assert info.closure(S.Var("x")) == {S.Var("x"), parse("<>x")}


def _closure_oracle(info, gamma):
    out = {gamma}
    changed = True
    while changed:
        changed = False
        for g in list(out):
            nxt = []
            if isinstance(g, (S.And, S.Or)):
                nxt = [g.left, g.right]
            elif isinstance(g, (S.Mu, S.Nu)):
                nxt = [g.body]
            elif isinstance(g, S.Var) and g.name in info.bound:
                nxt = [info.bodies[g.name]]
            for h in nxt:
                if h not in out:
                    out.add(h)
                    changed = True
    return frozenset(out)


def test_closure_saturation_oracle_and_monotone():
    rng = random.Random(13)
    for _ in range(100):
        f = to_well_named(random_formula(rng, depth=4))
        info = BindingInfo(f)
        for g in list(f.subformulas())[:8]:
            cl = info.closure(g)
            assert cl == _closure_oracle(info, g)
            for part in g.children():
                if isinstance(g, (S.And, S.Or)):
                    assert info.closure(part) <= cl


# -- serialization -----------------------------------------------------------------------


def test_json_roundtrip():
    rng = random.Random(19)
    for _ in range(100):
        f = random_formula(rng, depth=4)
        assert from_json(to_json(f)) == f


def test_cover_children_canonical():
    a = S.Cover([S.Var("q"), S.Var("p"), S.Var("p")])
    b = S.Cover([S.Var("p"), S.Var("q")])
    assert a == b and a.members == b.members
