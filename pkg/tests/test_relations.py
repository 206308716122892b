"""Tableau relations: bisimulation and consequence checking, the search
against narrow targets, composition, and the certificate chain."""

import itertools
import random

import networkx as nx
import pytest

from mucalc.anf import build_anf
from mucalc.formula import normalize, parse
from mucalc.relations import (ClaimGError, NodeRelation, check_bisimulation,
                              check_consequence, claim_g_certificate,
                              compose_relations, dual_even_cycle,
                              find_bisimulation, find_consequence)
from mucalc.tableau import build_narrow_tableau, build_tableau
from mucalc.tableau.graph import RegularTableau
from mucalc.tableau import rules as R


def identity_relation(t: RegularTableau, kind: str = "bisimulation") -> NodeRelation:
    pairs = set()
    modal, choice = t.modal_nodes(), t.choice_nodes()
    for nid in t.nodes:
        if nid in modal or nid in choice:
            pairs.add((nid, nid))
    return NodeRelation(t, t, frozenset(pairs), kind)


def test_identity_is_a_bisimulation(sat_corpus):
    for src, f, _ in sat_corpus[:10]:
        t = build_tableau(f)
        rel = identity_relation(t)
        assert check_bisimulation(t, t, rel), src


def test_anf_witness_is_a_bisimulation(anf_corpus):
    for src, alpha in anf_corpus[:10]:
        res = build_anf(alpha)
        rel = NodeRelation(res.base, res.rebuilt, res.relation, "bisimulation")
        assert check_bisimulation(res.base, res.rebuilt, rel), src


def test_converse_of_bisimulation(anf_corpus):
    for src, alpha in anf_corpus[:6]:
        res = build_anf(alpha)
        converse = NodeRelation(res.rebuilt, res.base,
                                frozenset((b, a) for a, b in res.relation),
                                "bisimulation")
        assert check_bisimulation(res.rebuilt, res.base, converse), src


def test_bisimulation_implies_consequence(anf_corpus):
    for src, alpha in anf_corpus[:8]:
        res = build_anf(alpha)
        rel = NodeRelation(res.base, res.rebuilt, res.relation, "consequence")
        assert check_consequence(res.base, res.rebuilt, rel), src


# -- the paper's two tableaux -----------------------------------------------------


def _tableau_from_plan(formula, plan) -> RegularTableau:
    """plan: node -> (rule, principal, [children]) over explicit labels."""
    t = RegularTableau(formula)
    ids = {}
    for label in plan:
        ids[label] = t.new_node(label)
    t.root = ids[next(iter(plan))]
    for label, (rule, principal, children) in plan.items():
        if not children:
            continue
        if rule == "or":
            prem = R.or_premises(label, principal)
        elif rule == "and":
            prem = R.and_premises(label, principal)
        else:
            raise AssertionError(rule)
        traces = []
        kids = []
        for child in children:
            tr = next(tr for lab, tr in prem if lab == child)
            traces.append(tr)
            kids.append(ids[child])
        t.set_children(ids[label], kids, traces, rule, principal)
    return t


def _label(*parts):
    return frozenset(parse(p) for p in parts)


@pytest.fixture(scope="module")
def paper_pair():
    """T1 reduces conjunctions eagerly; T2 interleaves and has {p, q, r}
    leaves."""
    whole = "(p /\\ (q \\/ r)) /\\ (q \\/ r)"
    f = parse(whole)
    inner = parse("p /\\ (q \\/ r)")
    qr = parse("q \\/ r")
    t1 = _tableau_from_plan(f, {
        _label(whole): ("and", f, [_label("p /\\ (q \\/ r)", "q \\/ r")]),
        _label("p /\\ (q \\/ r)", "q \\/ r"):
            ("and", inner, [_label("p", "q \\/ r")]),
        _label("p", "q \\/ r"): ("or", qr, [_label("p", "q"), _label("p", "r")]),
        _label("p", "q"): (None, None, []),
        _label("p", "r"): (None, None, []),
    })
    t2 = _tableau_from_plan(f, {
        _label(whole): ("and", f, [_label("p /\\ (q \\/ r)", "q \\/ r")]),
        _label("p /\\ (q \\/ r)", "q \\/ r"):
            ("or", qr, [_label("p /\\ (q \\/ r)", "q"),
                        _label("p /\\ (q \\/ r)", "r")]),
        _label("p /\\ (q \\/ r)", "q"):
            ("and", inner, [_label("p", "q \\/ r", "q")]),
        _label("p /\\ (q \\/ r)", "r"):
            ("and", inner, [_label("p", "q \\/ r", "r")]),
        _label("p", "q \\/ r", "q"):
            ("or", qr, [_label("p", "q"), _label("p", "q", "r")]),
        _label("p", "q \\/ r", "r"):
            ("or", qr, [_label("p", "q", "r"), _label("p", "r")]),
        _label("p", "q"): (None, None, []),
        _label("p", "q", "r"): (None, None, []),
        _label("p", "r"): (None, None, []),
    })
    return t1, t2


def test_default_policy_matches_t1(paper_pair):
    t1, _ = paper_pair
    built = build_tableau(parse("(p /\\ (q \\/ r)) /\\ (q \\/ r)"), share=False)
    assert sorted(n.label for n in built.nodes.values()) == \
        sorted(n.label for n in t1.nodes.values())


def test_paper_pair_not_bisimilar(paper_pair):
    t1, t2 = paper_pair
    assert find_bisimulation(t1, t2) is None
    assert find_bisimulation(t2, t1) is None


def test_t2_consequence_t1(paper_pair):
    t1, t2 = paper_pair
    rel = find_consequence(t2, t1)
    assert rel is not None
    assert check_consequence(t2, t1, rel)


def test_t1_is_narrow_t2_is_not(paper_pair):
    t1, t2 = paper_pair
    for t, expected in ((t1, True), (t2, False)):
        narrow = all(t.info.reducible_in(n.principal, n.label)
                     for n in t.nodes.values()
                     if n.children and n.principal is not None)
        assert narrow == expected


# -- consequence search ------------------------------------------------------------


def test_consequence_to_narrow(sat_corpus):
    for src, f, _ in sat_corpus[:14]:
        left = build_tableau(f, share=False)
        right = build_narrow_tableau(f, share=False)
        rel = find_consequence(left, right)
        assert rel is not None, src
        assert check_consequence(left, right, rel), src


def test_consequence_narrow_to_itself(sat_corpus):
    for src, f, _ in sat_corpus[:6]:
        t = build_narrow_tableau(f, share=False)
        rel = find_consequence(t, t)
        assert rel is not None and check_consequence(t, t, rel), src


def test_composition_validates(sat_corpus):
    for src, f, _ in sat_corpus[:8]:
        a = build_tableau(f, share=False)
        b = build_narrow_tableau(f, share=False)
        z1 = find_consequence(a, b)
        z2 = find_consequence(b, b)
        if z1 is None or z2 is None:
            continue
        composed = compose_relations(z1, z2)
        assert check_consequence(a, b, composed), src


# -- the dual-parity cycle search ----------------------------------------------------


def test_dual_even_cycle_against_enumeration():
    rng = random.Random(8)
    for _ in range(200):
        n = rng.randrange(2, 7)
        g = nx.DiGraph()
        prio = {}
        for v in range(n):
            g.add_node(v)
            prio[v] = (rng.randrange(4), rng.randrange(4))
        for a in range(n):
            for b in range(n):
                if rng.random() < 0.3:
                    g.add_edge(a, b)
        got = dual_even_cycle(g, set(g.nodes), lambda v: prio[v]) is not None
        want = False
        for cyc in nx.simple_cycles(g):
            if max(prio[v][0] for v in cyc) % 2 == 0 and \
               max(prio[v][1] for v in cyc) % 2 == 0:
                want = True
                break
        if want and not got:
            raise AssertionError("missed a dual-even cycle")
        if got and not want:
            # a closed walk through two single-parity cycles can realize the
            # dual-even maxima even when no simple cycle does
            comp_ok = False
            for comp in nx.strongly_connected_components(g):
                cycles = [c for c in nx.simple_cycles(g.subgraph(comp))]
                for c1, c2 in itertools.product(cycles, repeat=2):
                    walk = set(c1) | set(c2)
                    if max(prio[v][0] for v in walk) % 2 == 0 and \
                       max(prio[v][1] for v in walk) % 2 == 0:
                        comp_ok = True
            assert comp_ok, "claimed a dual-even walk that no cycle pair shows"


# -- the certificate chain ------------------------------------------------------------


def test_claim_g_corpus(claim_g_corpus):
    for src, ah in claim_g_corpus:
        res = claim_g_certificate(ah, "x")
        assert res.relation.pairs
        assert check_consequence(res.left_tableau, res.right_tableau,
                                 res.relation), src
        for name, link in res.links:
            assert link.pairs, (src, name)


def test_claim_g_rejects_non_anf():
    with pytest.raises(ValueError):
        claim_g_certificate(normalize(parse("nabla{x} /\\ nabla{q}")), "x")


def test_claim_g_rejects_unguarded():
    with pytest.raises(ValueError):
        claim_g_certificate(parse("x /\\ p"), "x")
