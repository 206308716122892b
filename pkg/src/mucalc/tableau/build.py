"""Tableau construction as a finite back-edge graph.

Branches close with a silent back edge as soon as a (label, stat) pair
repeats along the path with the priority-minimality side condition: every
stat priority between the return node and the loop node is at most the
priority at the pair.  Every infinite branch of the deterministic expansion
hits such a pair, so the construction terminates.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..formula.binding import BindingInfo
from ..formula.syntax import (And, Box, Cover, Diamond, Formula, Mu, Nu, Or,
                              Var)
from ..omega.determinize import LazyDetAutomaton
from ..omega.trace_automaton import step_letter, trace_detector
from .graph import BackEdge, RegularTableau, is_consistent, is_modal_label
from . import rules as R

DEFAULT_NODE_BUDGET = 100_000


class TableauBudgetError(RuntimeError):
    pass


def check_cover_form(f: Formula):
    for g in f.subformulas():
        if isinstance(g, (Diamond, Box)):
            raise ValueError("tableau construction expects cover-form formulas")


@dataclass
class _Policy:
    narrow: bool = False

    def pick(self, info: BindingInfo, label: frozenset):
        """The formula to reduce in a non-modal label, with its rule tag."""
        groups: dict[str, list] = {"and": [], "or": [], "sigma": [], "reg": []}
        for g in label:
            if isinstance(g, And):
                groups["and"].append(g)
            elif isinstance(g, Or):
                groups["or"].append(g)
            elif isinstance(g, (Mu, Nu)):
                groups["sigma"].append(g)
            elif isinstance(g, Var) and g.name in info.bound:
                groups["reg"].append(g)
        if self.narrow:
            candidates = sorted(
                (g for gs in groups.values() for g in gs
                 if info.reducible_in(g, label)),
                key=lambda f: f.key)
            if not candidates:
                raise AssertionError(
                    "no reducible formula in a non-modal label; "
                    "input is not well-named")
            g = candidates[0]
            for tag, gs in groups.items():
                if g in gs:
                    return tag, g
        for tag in ("and", "or", "sigma", "reg"):
            if groups[tag]:
                return tag, min(groups[tag], key=lambda f: f.key)
        raise AssertionError("no applicable rule in a non-modal label")


def _premises(info: BindingInfo, tag: str, label: frozenset, principal):
    if tag == "and":
        return R.and_premises(label, principal)
    if tag == "or":
        return R.or_premises(label, principal)
    if tag == "sigma":
        return R.sigma_premises(label, principal)
    if tag == "reg":
        return R.reg_premises(info, label, principal)
    raise ValueError(tag)


def build_tableau(f: Formula, policy: str = "default",
                  detector: LazyDetAutomaton | None = None,
                  node_budget: int = DEFAULT_NODE_BUDGET,
                  share: bool = True) -> RegularTableau:
    """Back-edge tableau for a closed, well-named, cover-form formula.

    With `share`, completed subtrees are reused across siblings whenever the
    (label, stat) pair repeats: the expansion is deterministic in that pair,
    so the unwinding is unchanged and the result is a back-edge DAG.  The ANF
    construction needs a plain tree and passes share=False.
    """
    check_cover_form(f)
    info = BindingInfo(f)
    det = detector or trace_detector(f, info)
    pol = _Policy(narrow=policy == "narrow")
    t = RegularTableau(f, info)
    root = t.new_node([f])
    init = t.init_word_letter()
    t.nodes[root].stat = det.delta(det.initial, init)
    t.nodes[root].prio = det.step_priority(det.initial, init)
    done: dict = {}
    # path entries: (node id, label, stat, priority)
    path: list = []
    stack: list = [("exit", root, None), ("enter", root, 0)]
    while stack:
        action, nid, extra = stack.pop()
        if action == "exit":
            node = t.nodes[nid]
            if node.back is None:
                done.setdefault((node.label, node.stat, node.prio), nid)
            continue
        depth = extra
        del path[depth:]
        node = t.nodes[nid]
        label, stat, prio = node.label, node.stat, node.prio
        # loop closure: nearest ancestor with equal (label, stat) such that
        # every priority in between is at most prio
        running = prio
        return_at = None
        for anc_id, anc_label, anc_stat, anc_prio in reversed(path):
            running = max(running, anc_prio)
            if running > prio:
                break
            if anc_label == label and anc_stat == stat and anc_prio == prio:
                return_at = anc_id
                break
        if return_at is not None:
            t.set_back(nid, BackEdge(return_at, "silent"))
            continue
        path.append((nid, label, stat, prio))
        modal = is_modal_label(label, info.bound)
        if modal and not is_consistent(label):
            continue  # inconsistent modal leaf
        if modal:
            premises = R.nabla_premises(label)
            rule, principal = "nabla", None
        else:
            rule, principal = pol.pick(info, label)
            premises = _premises(info, rule, label, principal)
        if not premises:
            continue  # consistent modal label without usable cover groups
        if len(t.nodes) + len(premises) > node_budget:
            raise TableauBudgetError(
                f"tableau exceeded the {node_budget}-node budget")
        children, traces = [], []
        fresh: list = []
        for child_label, tr in premises:
            letter = step_letter(label, tr)
            stat2 = det.delta(stat, letter)
            prio2 = det.step_priority(stat, letter)
            reuse = done.get((child_label, stat2, prio2)) if share else None
            if reuse is not None:
                children.append(reuse)
            else:
                cid = t.new_node(child_label, stat=stat2)
                t.nodes[cid].prio = prio2
                children.append(cid)
                fresh.append(cid)
            traces.append(tr)
        t.set_children(nid, children, traces, rule, principal)
        for cid in reversed(fresh):
            stack.append(("exit", cid, None))
            stack.append(("enter", cid, depth + 1))
    return t


def build_narrow_tableau(f: Formula,
                         detector: LazyDetAutomaton | None = None,
                         share: bool = True) -> RegularTableau:
    """Tableau that always reduces a formula no other label member can
    regenerate; such a formula always exists in a non-modal label."""
    return build_tableau(f, policy="narrow", detector=detector, share=share)
