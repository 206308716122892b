"""Tableau games on the back-edge quotient and the satisfiability decision.

Player 2 (solver player 0) claims satisfiability and owns non-modal and
inconsistent-modal positions; Player 3 (solver player 1) owns consistent
modal positions.  Priorities come from the deterministic branch detector via
the stat annotation, so an infinite play is won by Player 2 exactly when the
corresponding branch is even.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .. import parity_game as pg
from ..formula.normalize import normalize
from ..formula.syntax import Formula, NegVar
from ..kripke import KripkeModel, model_check
from ..omega.trace_automaton import trace_detector
from .build import build_tableau
from .graph import BackEdge, RegularTableau, is_consistent


def build_tableau_game(t: RegularTableau, detector) -> pg.ParityGame:
    """Parity game on the nodes of the back-edge graph.

    A silent loop node plays exactly like its return node: it carries its own
    incoming priority and moves directly to the return node's children.
    """
    root = t.nodes[t.root]
    expected = detector.delta(detector.initial, t.init_word_letter())
    if root.stat is None:
        t.annotate_stats(detector)
    elif root.stat != expected:
        raise ValueError("detector does not match the tableau's stat annotation")
    game = pg.ParityGame()
    for nid in sorted(t.nodes):
        n = t.nodes[nid]
        modal = t.is_modal(nid)
        owner = 1 if modal and is_consistent(n.label) else 0
        game.add_position(nid, owner, n.prio)
    for nid in sorted(t.nodes):
        for e in t.out_edges(nid):
            game.add_edge(nid, e.target)
    game.initial = t.root
    return game


@dataclass
class SatResult:
    verdict: str  # "SAT" | "UNSAT"
    formula: Formula
    tableau: RegularTableau
    game: pg.ParityGame
    solution: pg.Solution
    model: KripkeModel | None = None
    world: str | None = None
    refutation: RegularTableau | None = None


def decide_sat(f: Formula, assume_normalized: bool = False) -> SatResult:
    """Tableau-game satisfiability with verified witnesses.

    SAT verdicts carry a model extracted from Player 2's winning tree that is
    re-checked with the evaluation game; UNSAT verdicts carry Player 3's
    winning tree as a refutation.
    """
    if not assume_normalized:
        f = normalize(f)
    detector = trace_detector(f)
    t = build_tableau(f, detector=detector)
    game = build_tableau_game(t, detector)
    sol = pg.solve(game)
    if sol.winner[t.root] == 0:
        model, world = _extract_model(t, sol)
        if not model_check(f, model, world):
            raise AssertionError("extracted model failed verification")
        return SatResult("SAT", f, t, game, sol, model=model, world=world)
    refutation = _extract_refutation(t, sol)
    return SatResult("UNSAT", f, t, game, sol, refutation=refutation)


def _near_world(t: RegularTableau, sol: pg.Solution, nid: int) -> int:
    while not t.is_modal(nid):
        nid = sol.strategy0[nid]
    return nid


def _extract_model(t: RegularTableau, sol: pg.Solution) -> tuple[KripkeModel, str]:
    start = _near_world(t, sol, t.root)
    worlds: set = set()
    edges: list = []
    stack = [start]
    while stack:
        s = stack.pop()
        if s in worlds:
            continue
        worlds.add(s)
        for e in t.out_edges(s):
            s2 = _near_world(t, sol, e.target)
            edges.append((s, s2))
            stack.append(s2)
    name = {s: f"w{s}" for s in worlds}
    props = sorted(t.formula.free_vars)
    valuation = {p: [name[s] for s in worlds if NegVar(p) not in t.nodes[s].label]
                 for p in props}
    model = KripkeModel([name[s] for s in worlds],
                        [(name[a], name[b]) for a, b in edges], valuation)
    return model, name[start]


def _extract_refutation(t: RegularTableau, sol: pg.Solution) -> RegularTableau:
    """Player 3's winning tree: all Player-2 moves, one move per consistent
    modal node, yielding a refutation with single-premise modal steps.
    Silent loop nodes are materialized with their return node's (restricted)
    children, so the result is a finite graph whose cycles run through
    ordinary child edges."""
    keep: set = set()
    plan: dict = {}
    stack = [t.root]
    while stack:
        nid = stack.pop()
        if nid in keep:
            continue
        keep.add(nid)
        edges = t.out_edges(nid)
        if not edges:
            plan[nid] = []
            continue
        if t.is_modal(nid) and is_consistent(t.nodes[nid].label):
            chosen = sol.strategy1[nid]
            edges = [e for e in edges if e.target == chosen]
            rule = "nabla_r"
        else:
            rule = edges[0].rule
        plan[nid] = [(e, rule) for e in edges]
        stack.extend(e.target for e, _ in plan[nid])
    out = RegularTableau(t.formula, t.info)
    remap: dict = {}
    for nid in sorted(keep):
        src = t.nodes[nid]
        remap[nid] = out.new_node(src.label, stat=src.stat)
        out.nodes[remap[nid]].prio = src.prio
    out.root = remap[t.root]
    for nid in sorted(keep):
        entries = plan[nid]
        if not entries:
            continue
        rule = entries[0][1]
        out.set_children(remap[nid], [remap[e.target] for e, _ in entries],
                         [e.trace_map() for e, _ in entries], rule,
                         t.nodes[t.effective(nid)].principal)
    return out
