"""Regular tableaux: finite back-edge graphs whose unwindings are (wide)
tableaux, refutations, or ANF reconstructions.

Back edges come in two kinds.  A *silent* edge identifies a loop node with an
equally-labeled return node: in the unwinding the loop node adopts the return
node's rule and children.  A *step* edge is itself a rule application (used by
the ANF reconstruction, where a loop leaf labeled {x} regenerates into the
binder body node): in the unwinding the loop node gets a copy of the target
as its only child.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from ..formula import syntax as S
from ..formula.binding import BindingInfo
from ..formula.syntax import (And, Cover, Formula, Mu, Nu, Or, Var,
                              from_dict, to_dict)
from ..omega.trace_automaton import init_letter, step_letter

NABLA_RULES = frozenset({"nabla", "nabla_w", "nabla_r"})
WIDE_RULES = frozenset({"eps1", "eps2", "or_w", "and_w", "sigma_w", "reg_w", "nabla_w"})
PLAIN_RULES = frozenset({"or", "and", "sigma", "reg", "nabla"})
REFUTATION_RULES = frozenset({"or", "and", "sigma", "reg", "weak", "nabla_r"})


@dataclass(frozen=True)
class BackEdge:
    target: int
    kind: str  # "silent" | "step"
    rule: str | None = None
    trace: tuple = ()  # canonical trace items for step edges

    def trace_map(self) -> dict:
        return {f: img for f, img in self.trace}


@dataclass(frozen=True)
class Edge:
    src: int
    target: int
    rule: str | None
    trace: tuple  # canonical ((formula, frozenset), ...) items
    src_label: frozenset

    def trace_map(self) -> dict:
        return {f: img for f, img in self.trace}

    def image(self, f: Formula) -> frozenset:
        for g, img in self.trace:
            if g == f:
                return img
        return frozenset()


def canon_trace(trace: Mapping[Formula, Iterable[Formula]]) -> tuple:
    return tuple(sorted(((f, frozenset(img)) for f, img in trace.items()),
                        key=lambda kv: kv[0].key))


@dataclass
class Node:
    id: int
    label: frozenset
    rule: str | None = None
    principal: Formula | None = None
    children: tuple = ()
    traces: tuple = ()  # one canonical trace per child
    back: BackEdge | None = None
    stat: object = None
    prio: int = 0  # branch-detector priority emitted on the incoming step


class RegularTableau:
    def __init__(self, formula: Formula, info: BindingInfo | None = None):
        self.formula = formula
        self.info = info or BindingInfo(formula)
        self.nodes: dict[int, Node] = {}
        self.root: int = -1
        self._next = 0

    def new_node(self, label: Iterable[Formula], rule: str | None = None,
                 stat: object = None) -> int:
        nid = self._next
        self._next += 1
        self.nodes[nid] = Node(id=nid, label=frozenset(label), rule=rule, stat=stat)
        if self.root < 0:
            self.root = nid
        return nid

    def set_children(self, nid: int, children: Iterable[int],
                     traces: Iterable[Mapping], rule: str,
                     principal: Formula | None = None):
        n = self.nodes[nid]
        n.children = tuple(children)
        n.traces = tuple(canon_trace(t) for t in traces)
        n.rule = rule
        n.principal = principal

    def set_back(self, nid: int, back: BackEdge):
        self.nodes[nid].back = back

    # -- structure queries ------------------------------------------------------

    def effective(self, nid: int) -> int:
        seen = set()
        while True:
            n = self.nodes[nid]
            if n.back is not None and n.back.kind == "silent" and not n.children:
                if nid in seen:
                    raise ValueError("cycle of silent back edges")
                seen.add(nid)
                nid = n.back.target
            else:
                return nid

    def label(self, nid: int) -> frozenset:
        return self.nodes[nid].label

    def out_edges(self, nid: int) -> list[Edge]:
        e = self.effective(nid)
        n = self.nodes[e]
        if n.children:
            return [Edge(e, c, n.rule, t, n.label)
                    for c, t in zip(n.children, n.traces)]
        if n.back is not None and n.back.kind == "step":
            return [Edge(e, n.back.target, n.back.rule, n.back.trace, n.label)]
        return []

    def is_leaf(self, nid: int) -> bool:
        return not self.out_edges(nid)

    def is_modal(self, nid: int) -> bool:
        e = self.effective(nid)
        n = self.nodes[e]
        if n.children:
            return n.rule in NABLA_RULES
        if n.back is not None and n.back.kind == "step":
            return n.back.rule in NABLA_RULES
        return True  # leaf

    def choice_nodes(self) -> frozenset:
        """Nodes that occur as choice nodes somewhere in the unwinding."""
        out = {self.root}
        for nid in self.nodes:
            if self.is_modal(nid):
                for e in self.out_edges(nid):
                    out.add(e.target)
        return frozenset(out)

    def modal_nodes(self) -> frozenset:
        return frozenset(n for n in self.nodes if self.is_modal(n))

    def near_modals(self, nid: int) -> tuple:
        """Modal nodes reachable without crossing a modal rule application."""
        return tuple(sorted({m for m, _ in self.segment_paths(nid)}))

    def segment_paths(self, nid: int) -> list[tuple[int, tuple]]:
        """(modal node, edge path) pairs for every no-intermediate-modal path."""
        out: list = []

        def walk(cur: int, path: tuple, onstack: frozenset):
            if self.is_modal(cur):
                out.append((cur, path))
                return
            eff = self.effective(cur)
            if eff in onstack:
                raise ValueError("non-modal cycle; not a (wide) tableau")
            for e in self.out_edges(cur):
                walk(e.target, path + (e,), onstack | {eff})

        walk(nid, (), frozenset())
        return out

    def next_modals(self, nid: int) -> tuple:
        if not self.is_modal(nid):
            raise ValueError(f"node {nid} is not modal")
        out: set = set()
        for e in self.out_edges(nid):
            out.update(self.near_modals(e.target))
        return tuple(sorted(out))

    def modal_segments(self, nid: int) -> list[tuple[int, tuple]]:
        """(next modal node, edge path incl. the modal step) for modal nid."""
        out: list = []
        for e in self.out_edges(nid):
            for m, path in self.segment_paths(e.target):
                out.append((m, (e,) + path))
        return out

    # -- letters ------------------------------------------------------------------

    def init_word_letter(self):
        return init_letter(self.nodes[self.root].label)

    @staticmethod
    def letter_of(edge: Edge):
        return step_letter(edge.src_label, dict(edge.trace))

    def annotate_stats(self, detector):
        """Assign stat and incoming priority along tree edges."""
        root = self.nodes[self.root]
        init = self.init_word_letter()
        root.stat = detector.delta(detector.initial, init)
        root.prio = detector.step_priority(detector.initial, init)
        stack = [self.root]
        while stack:
            nid = stack.pop()
            n = self.nodes[nid]
            for c, t in zip(n.children, n.traces):
                letter = step_letter(n.label, dict(t))
                self.nodes[c].stat = detector.delta(n.stat, letter)
                self.nodes[c].prio = detector.step_priority(n.stat, letter)
                stack.append(c)

    # -- serialization ----------------------------------------------------------

    def to_dict(self) -> dict:
        nodes = []
        for nid in sorted(self.nodes):
            n = self.nodes[nid]
            item: dict = {
                "id": nid,
                "label": [to_dict(f) for f in S.sorted_formulas(n.label)],
                "rule": n.rule,
                "children": list(n.children),
                "modal": self.is_modal(nid),
            }
            if n.principal is not None:
                item["principal"] = to_dict(n.principal)
            if n.back is not None:
                item["back"] = {"target": n.back.target, "kind": n.back.kind,
                                "rule": n.back.rule}
            nodes.append(item)
        return {"formula": to_dict(self.formula), "root": self.root, "nodes": nodes}

    @classmethod
    def from_dict(cls, d: dict) -> "RegularTableau":
        formula = from_dict(d["formula"])
        t = cls(formula)
        ids = sorted(item["id"] for item in d["nodes"])
        remap = {old: i for i, old in enumerate(ids)}
        by_id = {item["id"]: item for item in d["nodes"]}
        for old in ids:
            item = by_id[old]
            t.new_node([from_dict(f) for f in item["label"]], rule=item.get("rule"))
        t.root = remap[d["root"]]
        for old in ids:
            item = by_id[old]
            nid = remap[old]
            children = [remap[c] for c in item.get("children", [])]
            if children:
                label = t.nodes[nid].label
                traces = [_infer_trace(t, label, t.nodes[c].label, item.get("rule"),
                                       item.get("principal"))
                          for c in children]
                t.set_children(nid, children, traces, item["rule"],
                               from_dict(item["principal"]) if "principal" in item else None)
            if "back" in item:
                b = item["back"]
                t.set_back(nid, BackEdge(remap[b["target"]], b["kind"], b.get("rule")))
        return t

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def to_dot(self) -> str:
        out = ["digraph tableau {"]
        for nid in sorted(self.nodes):
            n = self.nodes[nid]
            shape = "box" if self.is_modal(nid) else "ellipse"
            rule = f"\\n[{n.rule}]" if n.rule else ""
            out.append(f'  n{nid} [label="{S.label_str(n.label)}{rule}", shape={shape}];')
            for c in n.children:
                out.append(f"  n{nid} -> n{c};")
            if n.back is not None:
                style = "dashed" if n.back.kind == "silent" else "dotted"
                out.append(f"  n{nid} -> n{n.back.target} [style={style}];")
        out.append("}")
        return "\n".join(out) + "\n"


def _infer_trace(t: RegularTableau, label: frozenset, child: frozenset,
                 rule: str | None, principal_json) -> dict:
    from .rules import premise_trace
    principal = from_dict(principal_json) if principal_json else None
    return premise_trace(t.info, label, child, rule, principal)


def is_modal_label(label: frozenset, bound: frozenset) -> bool:
    for f in label:
        if isinstance(f, (Or, And, Mu, Nu)):
            return False
        if isinstance(f, Var) and f.name in bound:
            return False
    return True


def is_consistent(label: frozenset) -> bool:
    names = set()
    for f in label:
        if isinstance(f, S.Bot):
            return False
        if isinstance(f, Var):
            names.add(f.name)
    return not any(isinstance(f, S.NegVar) and f.name in names for f in label)
