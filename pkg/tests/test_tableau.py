"""Tableau engine: rule shapes, policies, satisfiability with verified
witnesses, trace analysis and serialization."""

import random

import pytest

from mucalc.formula import normalize, parse, to_well_named
from mucalc.formula import syntax as S
from mucalc.formula.binding import BindingInfo
from mucalc.kripke import KripkeModel, denote, model_check
from mucalc.omega import trace_detector
from mucalc.tableau import (branch_even_by_detector, branch_even_by_traces,
                            build_narrow_tableau, build_tableau,
                            build_tableau_game, decide_sat, destutter,
                            enumerate_lassos, factor_set, insertion_sequence,
                            trace_set)
from mucalc.tableau.graph import RegularTableau, is_consistent
from mucalc.tableau.rules import nabla_premises

from conftest import SAT_CORPUS, random_formula


def test_nabla_premise_count():
    # the modal rule has one premise per member of each cover group
    label = frozenset([S.Cover([parse("p"), parse("q")]),
                       S.Cover([parse("r")]), parse("~s")])
    assert len(nabla_premises(label)) == 3
    child, tr = nabla_premises(label)[0]
    assert tr[parse("~s")] == frozenset()


def test_eager_conjunction_shape():
    # (p /\ (q \/ r)) /\ (q \/ r) under the default policy: conjunctions
    # first, so no leaf carries {p, q, r}
    f = normalize(parse("(p /\\ (q \\/ r)) /\\ (q \\/ r)"))
    t = build_tableau(f, share=False)
    leaves = [t.nodes[n].label for n in t.nodes if t.is_leaf(n)]
    assert frozenset([parse("p"), parse("q"), parse("r")]) not in leaves
    assert frozenset([parse("p"), parse("q")]) in leaves
    assert frozenset([parse("p"), parse("r")]) in leaves


def test_inconsistent_modal_leaf():
    t = build_tableau(normalize(parse("p /\\ ~p")))
    leaves = [n for n in t.nodes if t.is_leaf(n)]
    assert len(leaves) == 1
    assert not is_consistent(t.nodes[leaves[0]].label)


def test_narrow_reducibility():
    rng = random.Random(14)
    checked = 0
    while checked < 60:
        f = normalize(random_formula(rng, depth=3))
        if f.is_literal:
            continue
        t = build_narrow_tableau(f)
        info = t.info
        for nid, n in t.nodes.items():
            if n.children and n.rule != "nabla" and n.principal is not None:
                assert info.reducible_in(n.principal, n.label), \
                    f"{S.pretty(n.principal)} not reducible in {S.label_str(n.label)}"
        checked += 1


def test_every_branch_closes():
    # every node of the finite structure is a leaf, an inner node, or a loop
    rng = random.Random(4)
    for _ in range(40):
        f = normalize(random_formula(rng, depth=3))
        t = build_tableau(f)
        for nid, n in t.nodes.items():
            assert n.children or n.back is not None or t.is_leaf(nid)


DECIDE_CASES = [
    ("p /\\ ~p", "UNSAT"),
    ("mu x. nabla{x, T}", "UNSAT"),
    ("nu x. nabla{x, T}", "SAT"),
    ("T", "SAT"),
]


@pytest.mark.parametrize("src,expected", DECIDE_CASES)
def test_decide_sat_basic(src, expected):
    result = decide_sat(parse(src))
    assert result.verdict == expected
    if expected == "SAT":
        assert model_check(result.formula, result.model, result.world)


def test_decide_sat_nu_witness_small():
    result = decide_sat(parse("nu x. nabla{x, T}"))
    assert result.verdict == "SAT"
    assert len(result.model.worlds) <= 4
    assert model_check(result.formula, result.model, result.world)


def test_decide_sat_corpus(sat_corpus):
    for src, f, satisfiable in sat_corpus:
        result = decide_sat(f, assume_normalized=True)
        assert result.verdict == ("SAT" if satisfiable else "UNSAT"), src
        if satisfiable:
            assert model_check(f, result.model, result.world), src


def test_sat_agrees_with_small_model_search(sat_corpus):
    """Every satisfiable corpus formula has a model with at most three
    worlds; brute-force search is the oracle."""
    def exists_small_model(f, max_worlds=3):
        props = sorted(f.free_vars)
        for n in range(1, max_worlds + 1):
            worlds = [f"u{i}" for i in range(n)]
            pairs = [(a, b) for a in worlds for b in worlds]
            for edges in range(2 ** len(pairs)):
                chosen = [pairs[i] for i in range(len(pairs))
                          if (edges >> i) & 1]
                for val in range(2 ** (len(props) * n)):
                    valuation = {}
                    k = 0
                    for p in props:
                        valuation[p] = [w for i, w in enumerate(worlds)
                                        if (val >> (k + i)) & 1]
                        k += n
                    m = KripkeModel(worlds, chosen, valuation)
                    if denote(f, m):
                        return True
        return False

    rng = random.Random(0)
    sample = [entry for entry in sat_corpus if entry[1].size <= 8]
    for src, f, satisfiable in rng.sample(sample, min(8, len(sample))):
        assert exists_small_model(f) == satisfiable, src


def test_game_positions_and_owners():
    f = normalize(parse("nu x. nabla{x, T}"))
    det = trace_detector(f)
    t = build_tableau(f, detector=det)
    game = build_tableau_game(t, det)
    for nid in t.nodes:
        modal = t.is_modal(nid)
        expected = 1 if modal and is_consistent(t.nodes[nid].label) else 0
        assert game.owner[nid] == expected


def test_trace_set_mu_odd_nu_even():
    for src, even in (("mu x. nabla{x, T}", False), ("nu x. nabla{x, T}", True)):
        f = normalize(parse(src))
        det = trace_detector(f)
        t = build_tableau(f, detector=det)
        lassos = enumerate_lassos(t)
        assert lassos
        for lasso in lassos:
            traces = trace_set(t, lasso)
            assert len(traces) == 1
            assert traces[0].even == even
            assert branch_even_by_traces(t, lasso) == even
            assert branch_even_by_detector(t, lasso, det) == even


def test_detector_matches_trace_analysis(sat_corpus):
    for src, f, _ in sat_corpus:
        det = trace_detector(f)
        t = build_tableau(f, detector=det)
        for lasso in enumerate_lassos(t, cap=40):
            assert branch_even_by_detector(t, lasso, det) == \
                branch_even_by_traces(t, lasso), src


def _tree_path(t, src, dst):
    """Edge path over tree children from src to dst."""
    stack = [(src, ())]
    while stack:
        cur, path = stack.pop()
        if cur == dst:
            return path
        n = t.nodes[cur]
        for c, tr in zip(n.children, n.traces):
            from mucalc.tableau.graph import Edge
            stack.append((c, path + (Edge(cur, c, n.rule, tr, n.label),)))
    raise AssertionError("no tree path")


def test_branch_parity_matches_loop_priority():
    # the priority entering a loop node dominates its certified cycle, so
    # the parity of that lasso is the parity of the loop node's priority
    from mucalc.tableau.traces import Lasso
    for src in ("mu x. nabla{x, T}", "nu x. nabla{x, T}",
                "nu y. mu x. ((p /\\ <>y) \\/ <>x)"):
        f = normalize(parse(src))
        det = trace_detector(f)
        t = build_tableau(f, detector=det, share=False)
        for nid, n in t.nodes.items():
            if n.back is not None and not n.children:
                target = n.back.target
                around = _tree_path(t, target, nid)
                back = next(e for e in t.out_edges(nid)
                            if e.target == around[0].target)
                cycle = around[1:] + (back,)
                stem = _tree_path(t, t.root, target) + (around[0],)
                lasso = Lasso(stem, cycle)
                assert branch_even_by_detector(t, lasso, det) == \
                    (n.prio % 2 == 0)


def test_inserted_trace_parity():
    # tr and tr+ have the same parity: inserted formulas are disjunctions
    # with priority zero
    f = normalize(parse("nu x. nabla{x, p /\\ q}"))
    info = BindingInfo(f)
    cover = next(g for g in f.subformulas() if isinstance(g, S.Cover))
    seq = insertion_sequence(cover, cover.members[0])
    assert all(info.priority_of(g) == 0 for g in seq)


def test_factor_sets_destuttered():
    f = normalize(parse("(p /\\ (q \\/ r)) /\\ (q \\/ r)"))
    t = build_tableau(f, share=False)
    m, path = t.segment_paths(t.root)[0]
    factors = factor_set(t, t.nodes[t.root].label, path)
    for fac in factors:
        assert fac == destutter(fac)
        assert fac[0] == f


def test_tableau_json_roundtrip():
    f = normalize(parse("nu x. nabla{x, p}"))
    t = build_tableau(f)
    again = RegularTableau.from_dict(t.to_dict())
    assert again.to_dict() == t.to_dict()
    assert again.nodes[again.root].label == t.nodes[t.root].label


def test_dot_export():
    t = build_tableau(normalize(parse("p /\\ ~p")))
    dot = t.to_dot()
    assert dot.startswith("digraph") and "shape=box" in dot
