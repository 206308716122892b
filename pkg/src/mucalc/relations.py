"""Relations between regular tableaux: bisimulation and consequence checking
(with the branch-parity condition decided exactly on synchronized products of
deterministic branch detectors), the bottom-up consequence search against a
narrow target, the two wide-tableau relabelings, and the certificate chain
for the fixpoint-unfolding consequence.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import networkx as nx

from .anf import AnfResult, build_anf
from .formula import syntax as S
from .formula.binding import BindingInfo
from .formula.normalize import SubstResult, substitute_tracked
from .formula.syntax import (And, Cover, Formula, Mu, Nu, Or, TopI, Var,
                             is_top_literal)
from .omega.trace_automaton import trace_detector
from .tableau.build import build_narrow_tableau, build_tableau
from .tableau.graph import (BackEdge, Edge, NABLA_RULES, RegularTableau,
                            canon_trace, is_consistent)
from .tableau.rules import (and_premises, eps_premise, nabla_child,
                            nabla_groups, or_premises, reg_premises,
                            sigma_premises)
from .tableau.traces import factor_set


@dataclass(frozen=True)
class NodeRelation:
    left: RegularTableau
    right: RegularTableau
    pairs: frozenset
    kind: str = "consequence"

    def to_dict(self) -> dict:
        return {"kind": self.kind, "pairs": sorted(map(list, self.pairs))}


@dataclass
class CheckReport:
    ok: bool
    condition: str = ""
    witness: tuple = ()

    def __bool__(self) -> bool:
        return self.ok


def _label_lits(label: frozenset) -> frozenset:
    return frozenset(f for f in label if f.is_literal and not is_top_literal(f))


def _classify(rel: NodeRelation):
    lm, lc = rel.left.modal_nodes(), rel.left.choice_nodes()
    rm, rc = rel.right.modal_nodes(), rel.right.choice_nodes()
    mm = {p for p in rel.pairs if p[0] in lm and p[1] in rm}
    cc = {p for p in rel.pairs if p[0] in lc and p[1] in rc}
    stray = rel.pairs - mm - cc
    if stray:
        raise ValueError(f"pairs outside modal x modal and choice x choice: {sorted(stray)}")
    return mm, cc


# -- the parity condition --------------------------------------------------------


def _segments_with_state(t: RegularTableau, detector, start_state, start_prio: int,
                         nid: int):
    """(modal node, state after the segment, max priority en route) tuples,
    one per segment path; the maximum covers the entry priority and every
    priority emitted along the path."""
    out = []
    for m, path in t.segment_paths(nid):
        q = start_state
        top = start_prio
        for e in path:
            letter = t.letter_of(e)
            top = max(top, detector.step_priority(q, letter))
            q = detector.delta(q, letter)
        out.append((m, path, q, top))
    return out


def _modal_steps_with_state(t: RegularTableau, detector, state, nid: int):
    """Like _segments_with_state but crossing the modal step at nid first."""
    out = []
    for e in t.out_edges(nid):
        letter = t.letter_of(e)
        q = detector.delta(state, letter)
        p0 = detector.step_priority(state, letter)
        for m, p, q2, top in _segments_with_state(t, detector, q, p0, e.target):
            out.append((m, (e,) + p, q2, top))
    return out


def parity_violation(left: RegularTableau, right: RegularTableau,
                     mm: set) -> tuple | None:
    """A reachable product lasso whose left branch is even and right branch is
    odd, or None.  Both branches range over associated pairs only."""
    det_l = trace_detector(left.formula)
    det_r = trace_detector(right.formula)

    def prio(node):
        # per-node priorities are the maxima over the segments into the node;
        # right parity is read through the odd-detector (flipped even-detector)
        _, _, _, _, pa, pb = node
        return pa, pb + 1

    il, ir = left.init_word_letter(), right.init_word_letter()
    q0l = det_l.delta(det_l.initial, il)
    q0r = det_r.delta(det_r.initial, ir)
    p0l = det_l.step_priority(det_l.initial, il)
    p0r = det_r.step_priority(det_r.initial, ir)
    inits = []
    for m, _, qa, pa in _segments_with_state(left, det_l, q0l, p0l, left.root):
        for m2, _, qb, pb in _segments_with_state(right, det_r, q0r, p0r, right.root):
            if (m, m2) in mm:
                inits.append((m, m2, qa, qb, pa, pb))
    succ_cache: dict = {}

    def succ(node):
        if node in succ_cache:
            return succ_cache[node]
        t, t2, qa, qb = node[:4]
        out = []
        for u, _, qa2, pa in _modal_steps_with_state(left, det_l, qa, t):
            for u2, _, qb2, pb in _modal_steps_with_state(right, det_r, qb, t2):
                if (u, u2) in mm:
                    out.append((u, u2, qa2, qb2, pa, pb))
        succ_cache[node] = out
        return out

    g = nx.DiGraph()
    seen = set(inits)
    stack = list(inits)
    for v in inits:
        g.add_node(v)
    while stack:
        v = stack.pop()
        for w in succ(v):
            g.add_edge(v, w)
            if w not in seen:
                seen.add(w)
                stack.append(w)
    if not seen:
        return None
    hit = dual_even_cycle(g, seen, prio)
    if hit is None:
        return None
    witness, pa, pb = hit
    return (witness[0], witness[1], pa, pb)


def dual_even_cycle(g: nx.DiGraph, nodes: set, prio) -> tuple | None:
    """A closed walk whose maxima in both priority coordinates are even,
    found per SCC of priority-capped subgraphs; None if there is none."""
    pa_values = sorted({prio(v)[0] for v in nodes}, reverse=True)
    pb_values = sorted({prio(v)[1] for v in nodes}, reverse=True)
    for pa in pa_values:
        if pa % 2:
            continue
        for pb in pb_values:
            if pb % 2:
                continue
            sub = g.subgraph(v for v in nodes
                             if prio(v)[0] <= pa and prio(v)[1] <= pb)
            for comp in nx.strongly_connected_components(sub):
                if len(comp) == 1 and not sub.has_edge(*(tuple(comp) * 2)):
                    continue
                if any(prio(v)[0] == pa for v in comp) and \
                   any(prio(v)[1] == pb for v in comp):
                    return (next(iter(comp)), pa, pb)
    return None


# -- condition checks ----------------------------------------------------------------


def check_bisimulation(left: RegularTableau, right: RegularTableau,
                       rel: NodeRelation) -> CheckReport:
    """The seven conditions of tableau bisimulation, decided on the back-edge
    quotients; parity via the product construction, both directions."""
    try:
        mm, cc = _classify(rel)
    except ValueError as err:
        return CheckReport(False, "well-formed", (str(err),))
    if (left.root, right.root) not in rel.pairs:
        return CheckReport(False, "root", (left.root, right.root))
    for t, t2 in sorted(mm):
        if _label_lits(left.label(t)) != _label_lits(right.label(t2)):
            return CheckReport(False, "prop", (t, t2))
        l_children = [e.target for e in left.out_edges(t)]
        r_children = [e.target for e in right.out_edges(t2)]
        for u in l_children:
            if not any((u, u2) in cc for u2 in r_children):
                return CheckReport(False, "forth-modal", (t, t2, u))
        for u2 in r_children:
            if not any((u, u2) in cc for u in l_children):
                return CheckReport(False, "back-modal", (t, t2, u2))
    for u, u2 in sorted(cc):
        near_l, near_r = left.near_modals(u), right.near_modals(u2)
        for m in near_l:
            if not any((m, m2) in mm for m2 in near_r):
                return CheckReport(False, "forth-choice", (u, u2, m))
        for m2 in near_r:
            if not any((m, m2) in mm for m in near_l):
                return CheckReport(False, "back-choice", (u, u2, m2))
    w = parity_violation(left, right, mm)
    if w is not None:
        return CheckReport(False, "parity", w)
    w = parity_violation(right, left, {(b, a) for a, b in mm})
    if w is not None:
        return CheckReport(False, "parity-converse", w)
    return CheckReport(True)


def check_consequence(left: RegularTableau, right: RegularTableau,
                      rel: NodeRelation) -> CheckReport:
    """The six conditions of tableau consequence (superset prop, next-modal
    forth, child back with dead-end escapes, no back-on-choice, one-sided
    parity)."""
    try:
        mm, cc = _classify(rel)
    except ValueError as err:
        return CheckReport(False, "well-formed", (str(err),))
    if (left.root, right.root) not in rel.pairs:
        return CheckReport(False, "root", (left.root, right.root))
    for t, t2 in sorted(mm):
        if not _label_lits(left.label(t)) >= _label_lits(right.label(t2)):
            return CheckReport(False, "prop", (t, t2))
        right_dead = not right.out_edges(t2)
        left_dead = not left.out_edges(t)
        if not right_dead:
            for u in left.next_modals(t):
                if not any((u, u2) in mm for u2 in right.next_modals(t2)):
                    return CheckReport(False, "forth-modal", (t, t2, u))
        if not left_dead:
            l_children = [e.target for e in left.out_edges(t)]
            for u2 in (e.target for e in right.out_edges(t2)):
                if not any((u, u2) in cc for u in l_children):
                    return CheckReport(False, "back-modal", (t, t2, u2))
    for u, u2 in sorted(cc):
        near_r = right.near_modals(u2)
        for m in left.near_modals(u):
            if not any((m, m2) in mm for m2 in near_r):
                return CheckReport(False, "forth-choice", (u, u2, m))
    w = parity_violation(left, right, mm)
    if w is not None:
        return CheckReport(False, "parity", w)
    return CheckReport(True)


# -- consequence search ----------------------------------------------------------------


class ConsequenceSearchError(ValueError):
    pass


def find_consequence(left: RegularTableau, right: RegularTableau
                     ) -> NodeRelation | None:
    """Construct a consequence relation from `left` to a narrow `right`
    bottom-up, maintaining label superset and trace-factor coverage."""
    pairs: set = set()
    seen: set = set()
    queue: list = [("c", left.root, right.root)]
    pairs.add((left.root, right.root))
    while queue:
        kind, a, b = queue.pop()
        if (kind, a, b) in seen:
            continue
        seen.add((kind, a, b))
        if kind == "c":
            for m, path in sorted(left.segment_paths(a),
                                  key=lambda mp: (mp[0], len(mp[1]))):
                fl = factor_set(left, left.label(a), path)
                candidates = sorted(right.segment_paths(b),
                                    key=lambda mp: (mp[0], len(mp[1])))
                found = None
                for m2, path2 in candidates:
                    if left.label(m) >= right.label(m2) and \
                       factor_set(right, right.label(b), path2) <= fl:
                        found = m2
                        break
                if found is None:
                    # trace-factor coverage is the preferred (parity-aware)
                    # selection; fall back to the label superset alone and
                    # let the final parity check arbitrate
                    found = next((m2 for m2, _ in candidates
                                  if left.label(m) >= right.label(m2)), None)
                if found is None:
                    return None
                pairs.add((m, found))
                queue.append(("m", m, found))
        else:
            if not is_consistent(left.label(a)):
                continue
            r_edges = right.out_edges(b)
            l_edges = left.out_edges(a)
            if not r_edges or not l_edges:
                continue
            covers_r = [f for f in right.label(b) if isinstance(f, Cover)]
            for e2 in r_edges:
                found = False
                for e in l_edges:
                    if all(e2.image(c) <= e.image(c) for c in covers_r) and \
                       left.label(e.target) >= right.label(e2.target):
                        pairs.add((e.target, e2.target))
                        queue.append(("c", e.target, e2.target))
                        found = True
                        break
                if not found:
                    return None
            for m, path in sorted((mp for mp in left.modal_segments(a)),
                                  key=lambda mp: (mp[0], len(mp[1]))):
                fl = factor_set(left, left.label(a), path, inserted=True)
                candidates = sorted(right.modal_segments(b),
                                    key=lambda mp: (mp[0], len(mp[1])))
                found = None
                for m2, path2 in candidates:
                    if left.label(m) >= right.label(m2) and \
                       factor_set(right, right.label(b), path2,
                                  inserted=True) <= fl:
                        found = m2
                        break
                if found is None:
                    found = next((m2 for m2, _ in candidates
                                  if left.label(m) >= right.label(m2)), None)
                if found is None:
                    return None
                pairs.add((m, found))
                queue.append(("m", m, found))
    return NodeRelation(left, right, frozenset(pairs), "consequence")


# -- relabelings -------------------------------------------------------------------


class RelabelError(ValueError):
    pass


def _recognize_step(info: BindingInfo, parent: frozenset,
                    children: list) -> tuple:
    """Find a wide-tableau rule instance connecting an image label to its
    image premises; returns (rule, principal, [trace per child])."""
    if all(c == parent for c in children):
        if len(children) == 1:
            return ("eps1", None, [eps_premise(parent)[1]])
        if len(children) == 2:
            return ("eps2", None, [eps_premise(parent)[1]] * 2)
    reducibles = sorted(
        (g for g in parent
         if isinstance(g, (Or, And, Mu, Nu)) or
         (isinstance(g, Var) and g.name in info.bound)),
        key=lambda f: f.key)
    for g in reducibles:
        if isinstance(g, Or) and len(children) == 2:
            for wide in (False, True):
                prem = or_premises(parent, g, wide)
                for order in ((0, 1), (1, 0)):
                    if [prem[order[0]][0], prem[order[1]][0]] == children:
                        return ("or_w" if wide else "or", g,
                                [prem[order[0]][1], prem[order[1]][1]])
        if isinstance(g, And) and len(children) == 1:
            for wide in (False, True):
                lab, tr = and_premises(parent, g, wide)[0]
                if lab == children[0]:
                    return ("and_w" if wide else "and", g, [tr])
        if isinstance(g, (Mu, Nu)) and len(children) == 1:
            for wide in (False, True):
                lab, tr = sigma_premises(parent, g, wide)[0]
                if lab == children[0]:
                    return ("sigma_w" if wide else "sigma", g, [tr])
        if isinstance(g, Var) and g.name in info.bound and len(children) == 1:
            for wide in (False, True):
                lab, tr = reg_premises(info, parent, g, wide)[0]
                if lab == children[0]:
                    return ("reg_w" if wide else "reg", g, [tr])
    covers = [g for g in parent if isinstance(g, Cover)]
    if covers:
        traces = []
        wide_used = False
        for child in children:
            match = None
            for c in covers:
                for member in c.members:
                    for keep in (False, True):
                        lab, tr = nabla_child(parent, c, member, keep)
                        if lab == child:
                            match = tr
                            wide_used = wide_used or keep
                            break
                    if match:
                        break
                if match:
                    break
            if match is None:
                raise RelabelError(
                    f"image step is not a rule instance: {S.label_str(parent)} "
                    f"-> {S.label_str(child)}")
            traces.append(match)
        return ("nabla_w" if wide_used else "nabla", None, traces)
    raise RelabelError(f"no rule instance matches {S.label_str(parent)}")


def _relabel(t: RegularTableau, image_of, out_formula: Formula
             ) -> RegularTableau:
    """Copy the graph of t with labels mapped member-wise; every image edge is
    re-derived as a (wide) rule instance."""
    out = RegularTableau(out_formula)
    label_cache: dict = {}

    def img(label: frozenset) -> frozenset:
        if label not in label_cache:
            acc: set = set()
            for m in label:
                acc |= image_of(m)
            label_cache[label] = frozenset(acc)
        return label_cache[label]

    for nid in sorted(t.nodes):
        rid = out.new_node(img(t.nodes[nid].label))
        assert rid == nid
    out.root = t.root
    for nid in sorted(t.nodes):
        n = t.nodes[nid]
        if n.children:
            parent = out.nodes[nid].label
            kids = [out.nodes[c].label for c in n.children]
            rule, principal, traces = _recognize_step(out.info, parent, kids)
            out.set_children(nid, n.children, traces, rule, principal)
        if n.back is not None:
            if n.back.kind == "silent":
                out.set_back(nid, BackEdge(n.back.target, "silent"))
            else:
                parent = out.nodes[nid].label
                child = out.nodes[n.back.target].label
                rule, principal, traces = _recognize_step(out.info, parent, [child])
                out.set_back(nid, BackEdge(n.back.target, "step", rule,
                                           canon_trace(traces[0])))
    return out


def _class_identity_pairs(a: RegularTableau, b: RegularTableau,
                          skip_a: frozenset = frozenset()) -> set:
    am, ac = a.modal_nodes(), a.choice_nodes()
    bm, bc = b.modal_nodes(), b.choice_nodes()
    out = set()
    for nid in a.nodes:
        if nid in skip_a or nid not in b.nodes:
            continue
        if (nid in am and nid in bm) or (nid in ac and nid in bc):
            out.add((nid, nid))
    return out


def relabel_mu(t: RegularTableau, subst: SubstResult, mu_formula: Formula
               ) -> tuple[RegularTableau, NodeRelation]:
    """From a tableau of phi(mu x.phi(x)) to a bisimilar wide tableau of
    mu x.phi(x): map each copy of the fixpoint formula back to the bound
    variable and prepend the unfolding node."""
    bound = subst.result.bound_vars
    copy_subs = [frozenset(c.formula.subformulas()) for c in subst.copies]

    memo: dict = {}

    def fn(psi: Formula) -> Formula:
        if psi in memo:
            return memo[psi]
        out: Formula
        names = psi.free_vars | psi.bound_vars
        if not names & bound:
            out = psi
        else:
            for cs, c in zip(copy_subs, subst.copies):
                if psi == c.formula:
                    out = Var(subst.variable)
                    break
                if psi in cs:
                    out = c.to_original[psi]
                    break
            else:
                if isinstance(psi, (Or, And)):
                    out = type(psi)(fn(psi.left), fn(psi.right))
                elif isinstance(psi, Cover):
                    out = Cover(fn(m) for m in psi.members)
                elif isinstance(psi, (Mu, Nu)):
                    out = type(psi)(psi.var, fn(psi.body))
                elif isinstance(psi, S.Diamond):
                    out = S.Diamond(fn(psi.sub))
                elif isinstance(psi, S.Box):
                    out = S.Box(fn(psi.sub))
                else:
                    out = psi
        memo[psi] = out
        return out

    wt = _relabel(t, lambda m: frozenset((fn(m),)), mu_formula)
    r1 = wt.new_node([mu_formula])
    body = fn(subst.result)
    tr = {mu_formula: frozenset((body,))}
    wt.set_children(r1, [wt.root], [tr], "sigma", mu_formula)
    old_root = wt.root
    wt.root = r1
    pairs = _class_identity_pairs(t, wt, skip_a=frozenset((t.root,)))
    pairs.add((t.root, r1))
    # the old root may still be reachable as a modal node of both structures
    if old_root in t.modal_nodes() and old_root in wt.modal_nodes():
        pairs.add((old_root, old_root))
    return wt, NodeRelation(t, wt, frozenset(pairs), "bisimulation")


def relabel_anf(t: RegularTableau, subst_left: SubstResult,
                subst_image: SubstResult, anf_res: AnfResult
                ) -> tuple[RegularTableau, NodeRelation]:
    """From a tableau of phi(anf(alpha)) to a bisimilar wide tableau of
    phi(alpha): copy material maps through the correspondence function into
    the base tableau's labels (re-renamed per occurrence), the construction's
    indexed tops are erased, and everything else maps structurally."""
    if len(subst_left.copies) != len(subst_image.copies):
        raise RelabelError("mismatched substitution occurrences")
    bound = subst_left.result.bound_vars
    anf_subs = [frozenset(c.formula.subformulas()) for c in subst_left.copies]
    rho_inv = []
    for c in subst_image.copies:
        rho_inv.append({orig: renamed for renamed, orig in c.to_original.items()})

    memo: dict = {}

    def fplus(psi: Formula) -> frozenset:
        if psi in memo:
            return memo[psi]
        out: frozenset
        if isinstance(psi, TopI) and psi.index in anf_res.introduced_tops:
            out = frozenset()
        elif not (psi.free_vars | psi.bound_vars) & bound:
            from .anf import strip_tops
            stripped = strip_tops(psi, anf_res.introduced_tops)
            out = frozenset() if isinstance(stripped, TopI) and \
                stripped.index in anf_res.introduced_tops else frozenset((stripped,))
        else:
            for i, (cs, c) in enumerate(zip(anf_subs, subst_left.copies)):
                if psi in cs:
                    orig = c.to_original[psi]
                    if orig in anf_res.f_map:
                        value = anf_res.f_map[orig]
                    elif orig in anf_res.chi_tables:
                        value = anf_res.chi_tables[orig]
                    else:
                        raise RelabelError(
                            f"no correspondence value for {S.pretty(orig)}")
                    mapped = set()
                    for g in value:
                        mapped.add(_rename_through(g, rho_inv[i]))
                    out = frozenset(mapped) - {None}
                    break
            else:
                if isinstance(psi, (Or, And)):
                    lefts, rights = fplus(psi.left), fplus(psi.right)
                    if len(lefts) == 1 and len(rights) == 1:
                        out = frozenset((type(psi)(next(iter(lefts)),
                                                   next(iter(rights))),))
                    elif not lefts:
                        out = rights
                    elif not rights:
                        out = lefts
                    else:
                        raise RelabelError(
                            f"set-valued image inside {S.pretty(psi)}")
                elif isinstance(psi, Cover):
                    members = []
                    for m in psi.members:
                        im = fplus(m)
                        if len(im) != 1:
                            raise RelabelError(
                                f"set-valued image inside {S.pretty(psi)}")
                        members.append(next(iter(im)))
                    out = frozenset((Cover(members),))
                elif isinstance(psi, (Mu, Nu)):
                    im = fplus(psi.body)
                    if len(im) != 1:
                        raise RelabelError(
                            f"set-valued image inside {S.pretty(psi)}")
                    out = frozenset((type(psi)(psi.var, next(iter(im))),))
                else:
                    out = frozenset((psi,))
        memo[psi] = out
        return out

    wt = _relabel(t, fplus, subst_image.result)
    pairs = _class_identity_pairs(t, wt)
    return wt, NodeRelation(t, wt, frozenset(pairs), "bisimulation")


def _rename_through(g: Formula, rho_inv: dict) -> Formula:
    """Map a base-side formula into the renamed copy universe."""
    return rho_inv.get(g, g)


# -- exhaustive bisimulation search -------------------------------------------------


def find_bisimulation(left: RegularTableau, right: RegularTableau,
                      node_cap: int = 12) -> NodeRelation | None:
    """Largest-relation refinement on the local conditions, then subset search
    for the parity condition.  Exact on graphs within the node cap."""
    if len(left.nodes) > node_cap or len(right.nodes) > node_cap:
        raise ValueError(f"exhaustive search is capped at {node_cap} nodes per side")
    lm, lc = left.modal_nodes(), left.choice_nodes()
    rm, rc = right.modal_nodes(), right.choice_nodes()
    mm = {(a, b) for a in lm for b in rm
          if _label_lits(left.label(a)) == _label_lits(right.label(b))}
    cc = {(a, b) for a in lc for b in rc}
    changed = True
    while changed:
        changed = False
        for t, t2 in sorted(mm):
            lch = [e.target for e in left.out_edges(t)]
            rch = [e.target for e in right.out_edges(t2)]
            ok = all(any((u, u2) in cc for u2 in rch) for u in lch) and \
                 all(any((u, u2) in cc for u in lch) for u2 in rch)
            if not ok:
                mm.discard((t, t2))
                changed = True
        for u, u2 in sorted(cc):
            nl, nr = left.near_modals(u), right.near_modals(u2)
            ok = all(any((m, m2) in mm for m2 in nr) for m in nl) and \
                 all(any((m, m2) in mm for m in nl) for m2 in nr)
            if not ok:
                cc.discard((u, u2))
                changed = True
    if (left.root, right.root) not in (mm | cc):
        return None
    base = sorted(mm | cc)
    root_pair = (left.root, right.root)
    rest = [p for p in base if p != root_pair]
    for k in range(len(rest), -1, -1):
        for combo in itertools.combinations(rest, k):
            pairs = frozenset(combo) | {root_pair}
            rel = NodeRelation(left, right, pairs, "bisimulation")
            try:
                if check_bisimulation(left, right, rel):
                    return rel
            except ValueError:
                continue
    return None


# -- the certificate chain -------------------------------------------------------------


@dataclass
class ClaimGResult:
    alpha_hat: Formula
    variable: str
    mu_formula: Formula
    phi_hat: Formula
    anf_result: AnfResult
    left_tableau: RegularTableau
    right_tableau: RegularTableau
    relation: NodeRelation
    subst_phi: SubstResult | None = None
    links: list = field(default_factory=list)


def compose_pairs(first: frozenset, second: frozenset) -> frozenset:
    by_mid: dict = {}
    for b, c in second:
        by_mid.setdefault(b, []).append(c)
    return frozenset((a, c) for a, b in first for c in by_mid.get(b, ()))


def compose_relations(z1: NodeRelation, z2: NodeRelation) -> NodeRelation:
    """Classwise composition: modal pairs through modal pairs, choice pairs
    through choice pairs (a node may play both roles)."""
    mm1, cc1 = _classify(z1)
    mm2, cc2 = _classify(z2)
    pairs = compose_pairs(frozenset(mm1), frozenset(mm2)) | \
        compose_pairs(frozenset(cc1), frozenset(cc2))
    return NodeRelation(z1.left, z2.right, pairs, "consequence")


class ClaimGError(RuntimeError):
    def __init__(self, link: str, detail: str):
        super().__init__(f"claim-g chain failed at {link}: {detail}")
        self.link = link


def claim_g_certificate(alpha_hat: Formula, variable: str) -> ClaimGResult:
    """Build and validate the consequence certificate from the tableau of
    alpha_hat(phi_hat) to the tableau of phi_hat, where phi_hat is the ANF of
    the mu-closure of alpha_hat."""
    from .anf import is_anf

    if not is_anf(alpha_hat):
        raise ValueError("input must be an automaton normal form")
    if S.NegVar(variable) in alpha_hat.subformulas():
        raise ValueError(f"{variable!r} must occur only positively")
    links: list = []
    if variable not in alpha_hat.free_vars:
        # vacuous fixpoint: the chain collapses to the ANF theorem's witness
        anf_res = build_anf(alpha_hat)
        rel = NodeRelation(anf_res.base, anf_res.rebuilt, anf_res.relation,
                           "consequence")
        rep = check_consequence(anf_res.base, anf_res.rebuilt, rel)
        if not rep:
            raise ClaimGError("anf-theorem", rep.condition)
        return ClaimGResult(alpha_hat, variable, alpha_hat, anf_res.formula,
                            anf_res, anf_res.base, anf_res.rebuilt, rel,
                            links=[("anf-theorem", rel)])
    from .formula.normalize import occurs_unguarded
    if occurs_unguarded(alpha_hat, variable):
        raise ValueError(f"{variable!r} must be guarded in the input")
    mu_formula = Mu(variable, alpha_hat)
    anf_res = build_anf(mu_formula)
    phi_hat = anf_res.formula

    # fresh copies keep phi_hat's binders disjoint from its own occurrence in
    # the negated side of the downstream refutation
    subst_phi = substitute_tracked(alpha_hat, variable, phi_hat,
                                   always_fresh=True)
    subst_mu = substitute_tracked(alpha_hat, variable, mu_formula,
                                  always_fresh=True)

    t_left = build_tableau(subst_phi.result)

    wt1, z1 = relabel_anf(t_left, subst_phi, subst_mu, anf_res)
    rep = check_bisimulation(t_left, wt1, z1)
    if not rep:
        raise ClaimGError("substituted-relabel", f"{rep.condition} {rep.witness}")
    links.append(("substituted-relabel", z1))

    tn_sub = build_narrow_tableau(subst_mu.result)
    z2 = find_consequence(wt1, tn_sub)
    if z2 is None:
        raise ClaimGError("narrow-consequence-1", "no relation found")
    rep = check_consequence(wt1, tn_sub, z2)
    if not rep:
        raise ClaimGError("narrow-consequence-1", f"{rep.condition} {rep.witness}")
    links.append(("narrow-consequence-1", z2))

    wt2, z3 = relabel_mu(tn_sub, subst_mu, mu_formula)
    rep = check_bisimulation(tn_sub, wt2, z3)
    if not rep:
        raise ClaimGError("unfold-relabel", f"{rep.condition} {rep.witness}")
    links.append(("unfold-relabel", z3))

    z4 = find_consequence(wt2, anf_res.base)
    if z4 is None:
        raise ClaimGError("narrow-consequence-2", "no relation found")
    rep = check_consequence(wt2, anf_res.base, z4)
    if not rep:
        raise ClaimGError("narrow-consequence-2", f"{rep.condition} {rep.witness}")
    links.append(("narrow-consequence-2", z4))

    z5 = NodeRelation(anf_res.base, anf_res.rebuilt, anf_res.relation,
                      "bisimulation")
    rep = check_bisimulation(anf_res.base, anf_res.rebuilt, z5)
    if not rep:
        raise ClaimGError("anf-theorem", f"{rep.condition} {rep.witness}")
    links.append(("anf-theorem", z5))

    relation = z1
    for z in (z2, z3, z4, z5):
        relation = compose_relations(relation, z)
    rep = check_consequence(t_left, anf_res.rebuilt, relation)
    if not rep:
        raise ClaimGError("composition", f"{rep.condition} {rep.witness}")
    return ClaimGResult(alpha_hat, variable, mu_formula, phi_hat, anf_res,
                        t_left, anf_res.rebuilt, relation,
                        subst_phi=subst_phi, links=links)
