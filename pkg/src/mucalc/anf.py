"""Automaton normal form: the syntactic predicate and the construction that
assigns an ANF to a back-edge tableau bottom-up, rebuilds a back-edge tableau
for the assigned formula, and emits the correspondence function and the
bisimulation witness relating the two structures.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .formula import syntax as S
from .formula.binding import BindingInfo
from .formula.normalize import all_names, fresh_name, occurs_unguarded
from .formula.syntax import (And, Cover, Formula, Mu, Nu, Or, TopI, Var,
                             and_parts, big_and, big_or, is_top_literal)
from .omega.trace_automaton import trace_detector
from .tableau.build import build_narrow_tableau
from .tableau.graph import BackEdge, RegularTableau, is_consistent
from .tableau.rules import nabla_groups


# -- the syntactic predicate -----------------------------------------------------


def strip_tops(f: Formula, indices: frozenset | None = None) -> Formula:
    """Erase indexed-top conjuncts (bookkeeping decorations); with `indices`,
    only the listed ones."""

    def hit(g: Formula) -> bool:
        return isinstance(g, TopI) and (indices is None or g.index in indices)

    if isinstance(f, And):
        a, b = strip_tops(f.left, indices), strip_tops(f.right, indices)
        if hit(a):
            return b
        if hit(b):
            return a
        return And(a, b)
    if isinstance(f, Or):
        return Or(strip_tops(f.left, indices), strip_tops(f.right, indices))
    if isinstance(f, Cover):
        return Cover(strip_tops(m, indices) for m in f.members)
    if isinstance(f, (Mu, Nu)):
        return type(f)(f.var, strip_tops(f.body, indices))
    return f


def _strip_topi(f: Formula) -> Formula:
    return strip_tops(f)


def is_anf(f: Formula) -> bool:
    """Membership in the automaton-normal-form class.

    Clauses: literal conjunctions; disjunctions with disjoint binding; guarded
    sigma-abstractions whose body has no conjunction regenerating the bound
    variable (indexed-top decorations x /\\ T_i are exempt bookkeeping); cover
    conjunctions with a literal tail; indexed-top conjunctions.
    """
    if f.is_literal:
        return True
    if isinstance(f, Or):
        if f.left.bound_vars & f.right.free_vars or \
           f.left.free_vars & f.right.bound_vars:
            return False
        return is_anf(f.left) and is_anf(f.right)
    if isinstance(f, (Mu, Nu)):
        x, body = f.var, f.body
        if S.NegVar(x) in body.subformulas():
            return False
        if x not in body.free_vars or occurs_unguarded(body, x):
            return False
        for g in _strip_topi(body).subformulas():
            if isinstance(g, And) and (g.left == Var(x) or g.right == Var(x)):
                return False
        return is_anf(body)
    if isinstance(f, And):
        parts = list(and_parts(f))
        covers = [p for p in parts if isinstance(p, Cover)]
        lits = [p for p in parts if p.is_literal]
        if len(covers) + len(lits) != len(parts):
            if isinstance(f.right, TopI):
                return is_anf(f.left)
            if isinstance(f.left, TopI):
                return is_anf(f.right)
            return False
        if not covers:
            return True
        if len(covers) != 1:
            return False
        c = covers[0]
        bound: set = set()
        for m in c.members:
            bound |= m.bound_vars
        if any(isinstance(l, Var) and l.name in bound for l in lits):
            return False
        return is_anf(c)
    if isinstance(f, Cover):
        for m1 in f.members:
            for m2 in f.members:
                if m1 != m2 and m1.bound_vars & m2.free_vars:
                    return False
        return all(is_anf(m) for m in f.members)
    return False


# -- the construction ---------------------------------------------------------------


class AnfError(ValueError):
    pass


@dataclass
class AnfResult:
    alpha: Formula
    formula: Formula
    base: RegularTableau
    rebuilt: RegularTableau
    relation: frozenset = frozenset()          # Z over (base node, rebuilt node)
    zplus_base_of: dict = field(default_factory=dict)   # rebuilt -> base node
    entry_of: dict = field(default_factory=dict)        # base -> section entry
    assignment: dict = field(default_factory=dict)      # base node -> anf(t)
    f_map: dict = field(default_factory=dict)  # Sub'(anf) member -> base label
    introduced_tops: frozenset = frozenset()
    loop_vars: dict = field(default_factory=dict)       # base loop leaf -> name
    groups: dict = field(default_factory=dict)  # modal base -> [(cover, [(child, member)])]
    chi_tables: dict = field(default_factory=dict)


def build_anf(alpha: Formula, base: RegularTableau | None = None) -> AnfResult:
    """Bottom-up ANF assignment over a narrow back-edge tableau, followed by
    reconstruction: unfold the inserted binder chains, re-expand conjunction
    tails, redirect loop edges into the binder chain, and float the indexed
    tops down to the next modal step."""
    det = trace_detector(alpha)
    if base is None:
        base = build_narrow_tableau(alpha, det, share=False)

    used_names = set(all_names(alpha))
    top_counter = [max((g.index for g in alpha.subformulas()
                        if isinstance(g, TopI)), default=-1) + 1]
    introduced: set[int] = set()

    def fresh_top() -> TopI:
        idx = top_counter[0]
        top_counter[0] += 1
        introduced.add(idx)
        return TopI(idx)

    loop_vars: dict[int, str] = {}
    loops_of: dict[int, list] = {}
    for nid in sorted(base.nodes):
        n = base.nodes[nid]
        if n.back is not None and not n.children:
            if n.back.kind != "silent":
                raise AnfError("base tableau must use silent back edges")
            name = fresh_name("z", used_names)
            used_names.add(name)
            loop_vars[nid] = name
            loops_of.setdefault(n.back.target, []).append(nid)

    lits_of = {nid: sorted((f for f in base.nodes[nid].label if f.is_literal),
                           key=lambda f: f.key)
               for nid in base.nodes}
    anf: dict[int, Formula] = {}
    pad_of: dict[int, TopI] = {}     # disambiguating decoration on cover children
    groups: dict[int, list] = {}

    def sigma_wrap(nid: int, core: Formula) -> Formula:
        if nid not in loops_of:
            return core
        kind = Mu if base.nodes[nid].prio % 2 == 1 else Nu
        out = core
        for leaf in reversed(loops_of[nid]):
            out = kind(loop_vars[leaf], out)
        return out

    def assign(nid: int) -> Formula:
        n = base.nodes[nid]
        if nid in loop_vars:
            anf[nid] = Var(loop_vars[nid])
            return anf[nid]
        if not n.children:
            lits = lits_of[nid]
            covers = [g for g in n.label if isinstance(g, Cover)]
            if covers and is_consistent(n.label):
                # consistent modal leaf with only empty cover groups: the
                # deadlock constraint must survive into the assignment
                core = And(Cover([]), big_and(lits)) if lits else Cover([])
            else:
                core = big_and(lits) if lits else fresh_top()
        else:
            kids = [assign(c) for c in n.children]
            if n.rule == "nabla":
                seen: set = set()
                for i, c in enumerate(n.children):
                    if kids[i] in seen:
                        pad = fresh_top()
                        pad_of[c] = pad
                        kids[i] = And(kids[i], pad)
                        anf[c] = kids[i]
                    seen.add(kids[i])
                covers, _ = nabla_groups(n.label)
                gs, idx = [], 0
                for c in covers:
                    pairs = []
                    for member in c.members:
                        pairs.append((n.children[idx], member))
                        idx += 1
                    gs.append((c, pairs))
                groups[nid] = gs
                cover_part = Cover(kids)
                lits = lits_of[nid]
                core = And(cover_part, big_and(lits)) if lits else cover_part
            elif n.rule == "or":
                core = Or(kids[0], kids[1])
            else:  # and / sigma / reg
                core = And(kids[0], fresh_top())
        anf[nid] = sigma_wrap(nid, core)
        return anf[nid]

    result_formula = assign(base.root)
    info = BindingInfo(result_formula)

    # -- reconstruction -------------------------------------------------------

    rebuilt = RegularTableau(result_formula, info)
    zplus_base_of: dict[int, int] = {}
    entry_of: dict[int, int] = {}
    back_node_of: dict[int, int] = {}    # loop leaf -> rebuilt node carrying {x}
    chain_target: dict[int, int] = {}    # loop leaf -> rebuilt chain node

    def new(label, base_id) -> int:
        rid = rebuilt.new_node(label)
        zplus_base_of[rid] = base_id
        return rid

    def and_step(cur: int, base_id: int, principal: And) -> int:
        label = rebuilt.nodes[cur].label
        ctx = label - {principal}
        parts = frozenset((principal.left, principal.right))
        nxt = new(ctx | parts, base_id)
        tr = {g: frozenset((g,)) for g in ctx}
        tr[principal] = parts
        rebuilt.set_children(cur, [nxt], [tr], "and", principal)
        return nxt

    def build_section(nid: int, tops: frozenset) -> int:
        n = base.nodes[nid]
        form = anf[nid]
        ent = new({form} | tops, nid)
        entry_of[nid] = ent
        cur = ent
        if nid in pad_of:  # peel the disambiguating decoration first
            cur = and_step(cur, nid, form)
            tops = tops | {pad_of[nid]}
            form = form.left
        if nid in loop_vars:
            back_node_of[nid] = cur
            return ent
        for leaf in loops_of.get(nid, []):
            assert isinstance(form, (Mu, Nu)) and form.var == loop_vars[leaf]
            ctx = rebuilt.nodes[cur].label - {form}
            nxt = new(ctx | {form.body}, nid)
            tr = {g: frozenset((g,)) for g in ctx}
            tr[form] = frozenset((form.body,))
            rebuilt.set_children(cur, [nxt], [tr], "sigma", form)
            chain_target[leaf] = nxt
            cur, form = nxt, form.body
        if not n.children:
            while True:
                ands = sorted((g for g in rebuilt.nodes[cur].label
                               if isinstance(g, And)), key=lambda f: f.key)
                if not ands:
                    return ent
                cur = and_step(cur, nid, ands[0])
        if n.rule == "nabla":
            while True:
                ands = sorted((g for g in rebuilt.nodes[cur].label
                               if isinstance(g, And)), key=lambda f: f.key)
                if not ands:
                    break
                cur = and_step(cur, nid, ands[0])
            label = rebuilt.nodes[cur].label
            cover = next(g for g in label if isinstance(g, Cover))
            children, traces = [], []
            for c in n.children:
                cid = build_section(c, frozenset())
                children.append(cid)
                tr = {g: frozenset() for g in label if g != cover}
                tr[cover] = frozenset((anf[c],))
                traces.append(tr)
            rebuilt.set_children(cur, children, traces, "nabla", None)
        elif n.rule == "or":
            assert isinstance(form, Or)
            ctx = rebuilt.nodes[cur].label - {form}
            children, traces = [], []
            for c, part in zip(n.children, (form.left, form.right)):
                cid = build_section(c, tops)
                children.append(cid)
                tr = {g: frozenset((g,)) for g in ctx}
                tr[form] = frozenset((part,))
                traces.append(tr)
            rebuilt.set_children(cur, children, traces, "or", form)
        else:  # and / sigma / reg with the indexed-top decoration
            assert isinstance(form, And) and isinstance(form.right, TopI)
            nxt_tops = tops | {form.right}
            ctx = rebuilt.nodes[cur].label - {form}
            cid = build_section(n.children[0], nxt_tops)
            tr = {g: frozenset((g,)) for g in ctx}
            tr[form] = frozenset((form.left, form.right))
            rebuilt.set_children(cur, [cid], [tr], "and", form)
        return ent

    rebuilt.root = build_section(base.root, frozenset())

    for leaf, name in loop_vars.items():
        rid = back_node_of[leaf]
        target = chain_target[leaf]
        body = info.bodies[name]
        tr: dict = {}
        for g in rebuilt.nodes[rid].label:
            if g == Var(name):
                tr[g] = frozenset((body,))
            elif g in rebuilt.nodes[target].label:
                tr[g] = frozenset((g,))
            else:
                tr[g] = frozenset()
        from .tableau.graph import canon_trace
        rebuilt.set_back(rid, BackEdge(target, "step", "reg", canon_trace(tr)))

    # -- Z and the correspondence function ------------------------------------

    base_modal, base_choice = base.modal_nodes(), base.choice_nodes()
    reb_modal, reb_choice = rebuilt.modal_nodes(), rebuilt.choice_nodes()
    relation = set()

    def add_pair(bid: int, rid: int):
        if (bid in base_modal and rid in reb_modal) or \
           (bid in base_choice and rid in reb_choice):
            relation.add((bid, rid))

    for rid, bid in zplus_base_of.items():
        add_pair(bid, rid)
    # a silent loop node stands for its return node in the unwinding, so it
    # inherits that node's partners
    for nid in base.nodes:
        n = base.nodes[nid]
        if n.back is not None and n.back.kind == "silent" and not n.children:
            eff = base.effective(nid)
            for bid, rid in list(relation):
                if bid == eff:
                    add_pair(nid, rid)

    bound = result_formula.bound_vars
    f_map: dict[Formula, frozenset] = {}
    for rid in rebuilt.nodes:
        bid = zplus_base_of[rid]
        for member in rebuilt.nodes[rid].label:
            if (member.free_vars | member.bound_vars) & bound:
                if member in f_map and f_map[member] != base.nodes[bid].label:
                    raise AnfError(f"ambiguous correspondence for {S.pretty(member)}")
                f_map[member] = base.nodes[bid].label

    return AnfResult(alpha=alpha, formula=result_formula, base=base,
                     rebuilt=rebuilt, relation=frozenset(relation),
                     zplus_base_of=zplus_base_of, entry_of=entry_of,
                     assignment=anf, f_map=f_map,
                     introduced_tops=frozenset(introduced),
                     loop_vars=loop_vars, groups=groups,
                     chi_tables=_chi_tables(groups, anf))


def _chi_tables(groups: dict, anf: dict) -> dict:
    """f on the designated disjunction layers of each modal section.

    Group-level partial disjunctions map to the full leftover set; a prefix
    within group k swaps the k-th leftover for the disjunction of the premise
    members reduced so far.
    """
    tables: dict[Formula, frozenset] = {}
    for gs in groups.values():
        if not gs:
            continue
        all_leftovers = frozenset(big_or(c.members) for c, _ in gs)
        group_folds = []
        for c, pairs in gs:
            others = frozenset(big_or(c2.members) for c2, _ in gs if c2 != c)
            fold = None
            for idx in range(1, len(pairs) + 1):
                child, member = pairs[idx - 1]
                tables.setdefault(anf[child], others | {big_or([member])})
                fold = anf[child] if fold is None else Or(fold, anf[child])
                cors = big_or(m for _, m in pairs[:idx])
                tables.setdefault(fold, others | {cors})
            if fold is not None:
                group_folds.append(fold)
        outer = None
        for gfold in group_folds:
            outer = gfold if outer is None else Or(outer, gfold)
            tables.setdefault(outer, all_leftovers)
    return tables


def designated_disjunction(result: AnfResult, base_modal_node: int) -> Formula | None:
    """The grouped disjunction of a modal section, folded group-major in
    premise order."""
    gs = result.groups.get(base_modal_node)
    if not gs:
        return None
    outer = None
    for _, pairs in gs:
        fold = None
        for child, _ in pairs:
            a = result.assignment[child]
            fold = a if fold is None else Or(fold, a)
        if fold is not None:
            outer = fold if outer is None else Or(outer, fold)
    return outer


def correspondence_f(result: AnfResult, psi: Formula) -> frozenset:
    """The correspondence function: a section formula maps to its base node's
    label; designated-disjunction layers follow the chi extension."""
    if psi in result.f_map:
        return result.f_map[psi]
    if psi in result.chi_tables:
        return result.chi_tables[psi]
    raise KeyError(f"{S.pretty(psi)} is outside the domain of f")
