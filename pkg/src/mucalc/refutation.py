"""Refutations: validation, aconjunctiveness, thinness, and the constructive
translation of a tableau-consequence witness into a thin refutation of
alpha /\\ ~phi_hat.

The construction walks the two related tableaux in lockstep.  On the alpha
side it replays rule applications verbatim; on the phi_hat side it applies
dual rules to the single tracked negative conjunct, discarding the unused
conjunct immediately after every conjunction split so the result is thin.
Regularity comes from closing silent back edges when the correspondence
state (alpha node, phi_hat node, tracked conjunct, detector state) repeats
with the usual priority-minimality condition.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .formula import syntax as S
from .formula.binding import BindingInfo
from .formula.normalize import negate
from .formula.syntax import (And, Bot, Cover, Formula, Mu, Nu, Or, Top, TopI,
                             Var, and_parts, big_or, is_top_literal, or_parts)
from .omega.trace_automaton import step_letter, trace_detector
from .relations import NodeRelation, _classify
from .tableau.graph import (BackEdge, REFUTATION_RULES, RegularTableau,
                            is_consistent, is_modal_label)
from .tableau import rules as TR

import networkx as nx


@dataclass
class ValidationReport:
    ok: bool
    condition: str = ""
    witness: tuple = ()

    def __bool__(self) -> bool:
        return self.ok


# -- validation --------------------------------------------------------------------


def _step_matches(info: BindingInfo, label: frozenset, rule: str,
                  principal, children: list) -> bool:
    if rule == "or" and isinstance(principal, Or) and len(children) == 2:
        prem = [lab for lab, _ in TR.or_premises(label, principal)]
        return children == prem or children == prem[::-1]
    if rule == "and" and isinstance(principal, And) and len(children) == 1:
        return children[0] == TR.and_premises(label, principal)[0][0]
    if rule == "sigma" and isinstance(principal, (Mu, Nu)) and len(children) == 1:
        return children[0] == TR.sigma_premises(label, principal)[0][0]
    if rule == "reg" and isinstance(principal, Var) and len(children) == 1:
        return children[0] == TR.reg_premises(info, label, principal)[0][0]
    if rule == "weak" and len(children) == 1:
        if principal is not None and principal in label:
            return children[0] == label - {principal}
        return len(label - children[0]) == 1 and children[0] < label
    if rule == "nabla_r" and len(children) == 1:
        for c in (g for g in label if isinstance(g, Cover)):
            for member in c.members:
                if TR.nabla_child(label, c, member)[0] == children[0]:
                    return True
        return False
    return False


def validate_refutation(r: RegularTableau) -> ValidationReport:
    """The five refutation clauses: root label, inconsistent leaves, rule and
    label consistency with the single-premise modal rule, and oddness of every
    infinite branch (no reachable branch cycle that the evenness detector
    accepts)."""
    info = r.info
    if r.nodes[r.root].label != frozenset((r.formula,)):
        return ValidationReport(False, "root", (r.root,))
    for nid in sorted(r.nodes):
        n = r.nodes[nid]
        edges = r.out_edges(nid)
        if not edges:
            if is_consistent(n.label):
                return ValidationReport(False, "leaf-consistent", (nid,))
            continue
        eff = r.effective(nid)
        e = r.nodes[eff]
        rule = e.rule if e.children else e.back.rule
        if rule not in REFUTATION_RULES:
            return ValidationReport(False, "rule", (nid, rule))
        modal = is_modal_label(e.label, info.bound)
        if rule == "nabla_r" and not modal:
            return ValidationReport(False, "modal-rule-placement", (nid,))
        if modal and is_consistent(e.label) and rule not in ("nabla_r", "weak"):
            return ValidationReport(False, "rule", (nid, rule))
        children = [r.nodes[ed.target].label for ed in edges]
        if not _step_matches(info, e.label, rule, e.principal, children):
            return ValidationReport(False, "premises", (nid, rule))
    detector = trace_detector(r.formula, info)
    init = r.init_word_letter()
    q0 = detector.delta(detector.initial, init)
    g = nx.DiGraph()
    start = (r.root, q0)
    stack = [start]
    seen = {start}
    prio: dict = {start: detector.step_priority(detector.initial, init)}
    while stack:
        nid, q = stack.pop()
        g.add_node((nid, q))
        for e in r.out_edges(nid):
            letter = r.letter_of(e)
            q2 = detector.delta(q, letter)
            node2 = (e.target, q2)
            g.add_edge((nid, q), node2)
            p = detector.step_priority(q, letter)
            prio[node2] = max(prio.get(node2, 0), p)
            if node2 not in seen:
                seen.add(node2)
                stack.append(node2)
    # an even branch exists iff some reachable cycle has even maximal emitted
    # priority; priorities sit on edges, folded into targets conservatively
    for p in sorted({prio[v] for v in seen}, reverse=True):
        if p % 2:
            continue
        sub = g.subgraph(v for v in seen if prio[v] <= p)
        for comp in nx.strongly_connected_components(sub):
            if len(comp) == 1 and not sub.has_edge(*(tuple(comp) * 2)):
                continue
            if any(prio[v] == p for v in comp):
                return ValidationReport(False, "even-branch",
                                        (next(iter(comp))[0], p))
    return ValidationReport(True)


# -- aconjunctivity and thinness ------------------------------------------------------


def is_aconjunctive(f: Formula, info: BindingInfo | None = None) -> bool:
    """Every least-fixpoint variable is active in at most one conjunct of any
    conjunction inside its binder body."""
    info = info or BindingInfo(f)
    for x, kind in info.kinds.items():
        if kind != "mu":
            continue
        for g in info.bodies[x].subformulas():
            if isinstance(g, And) and g.left != g.right:
                if info.active_in(x, g.left) and info.active_in(x, g.right):
                    return False
    return True


@dataclass
class ConjunctionRecord:
    node: int
    left: Formula
    right: Formula
    overlap: bool
    discharged: bool

    def to_dict(self) -> dict:
        return {"node": self.node, "left": S.pretty(self.left),
                "right": S.pretty(self.right), "overlap": self.overlap,
                "discharged": self.discharged}


@dataclass
class ThinnessReport:
    thin: bool
    records: list = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.thin

    def to_dict(self) -> dict:
        return {"thin": self.thin,
                "records": [r.to_dict() for r in self.records]}


def check_thin(r: RegularTableau) -> ThinnessReport:
    """A refutation is thin if every conjunction split whose two conjuncts
    share an active least-fixpoint variable immediately discards one of the
    conjuncts with the weakening rule."""
    info = r.info
    mu_vars = [x for x, k in info.kinds.items() if k == "mu"]
    records: list = []
    for nid in sorted(r.nodes):
        n = r.nodes[nid]
        if n.rule != "and" or not isinstance(n.principal, And):
            continue
        a, b = n.principal.left, n.principal.right
        overlap = a != b and any(
            info.active_in(x, a) and info.active_in(x, b) for x in mu_vars)
        discharged = False
        if overlap:
            child = r.nodes[n.children[0]]
            discharged = child.rule == "weak" and child.principal in (a, b)
        records.append(ConjunctionRecord(nid, a, b, overlap, discharged))
    thin = all(not rec.overlap or rec.discharged for rec in records)
    return ThinnessReport(thin, records)


# -- the constructive procedure --------------------------------------------------------


class RefutationBuildError(RuntimeError):
    def __init__(self, condition: str, detail: str):
        super().__init__(f"correspondence breakdown at {condition}: {detail}")
        self.condition = condition


class _Builder:
    def __init__(self, rel: NodeRelation):
        self.rel = rel
        self.ta = rel.left
        self.tp = rel.right
        self.alpha = self.ta.formula
        self.phi_hat = self.tp.formula
        self.mm, self.cc = _classify(rel)
        self.goal = And(self.alpha, negate(self.phi_hat))
        self.info = BindingInfo(self.goal)
        self._tp_bound = frozenset(self.phi_hat.bound_vars)
        self.det = trace_detector(self.goal, self.info)
        self.out = RegularTableau(self.goal, self.info)
        self.path: list = []  # (key, node id, prio)
        self.done: dict = {}  # completed correspondence states -> node id
        self.budget = 200_000

    def dual_of(self, psi: Formula) -> Formula:
        """The subformula of ~phi_hat matching a phi_hat-side formula: bound
        variables under dualized binders stay positive."""
        return negate(psi, psi.free_vars & self._tp_bound)

    # -- node plumbing ---------------------------------------------------------

    def new_node(self, label, parent: int | None, trace, rule: str,
                 principal) -> int:
        if len(self.out.nodes) > self.budget:
            raise RefutationBuildError("budget", "construction too large")
        nid = self.out.new_node(label)
        if parent is None:
            init = self.out.init_word_letter()
            self.out.nodes[nid].stat = self.det.delta(self.det.initial, init)
            self.out.nodes[nid].prio = self.det.step_priority(self.det.initial, init)
        else:
            pn = self.out.nodes[parent]
            letter = step_letter(pn.label, trace)
            self.out.nodes[nid].stat = self.det.delta(pn.stat, letter)
            self.out.nodes[nid].prio = self.det.step_priority(pn.stat, letter)
        return nid

    def step(self, nid: int, rule: str, principal, premises) -> list:
        children = []
        traces = []
        for lab, tr in premises:
            cid = self.new_node(lab, nid, tr, rule, principal)
            children.append(cid)
            traces.append(tr)
        self.out.set_children(nid, children, traces, rule, principal)
        return children

    def weak_to_core(self, nid: int):
        """Discard members down to a minimal inconsistent modal core."""
        label = self.out.nodes[nid].label
        if is_consistent(label):
            raise RefutationBuildError("weak-core", "label is consistent")
        core: set = set()
        if S.BOT in label:
            core = {S.BOT}
        else:
            names = {f.name for f in label if isinstance(f, Var)}
            p = sorted(n.name for n in label
                       if isinstance(n, S.NegVar) and n.name in names)[0]
            core = {Var(p), S.NegVar(p)}
        cur = nid
        for g in S.sorted_formulas(label - core):
            cur = self.step(cur, "weak", g,
                            [TR.weak_premise(self.out.nodes[cur].label, g)])[0]

    # -- alpha-side replay -------------------------------------------------------

    def alpha_replay(self, nid: int, ca: int) -> list:
        """Replay the alpha tableau's choice section below ca on the current
        label; returns (refutation node, alpha modal node) leaves."""
        if self.ta.is_modal(ca):
            return [(nid, ca)]
        edges = self.ta.out_edges(ca)
        eff = self.ta.nodes[self.ta.effective(ca)]
        rule = edges[0].rule
        principal = eff.principal
        label = self.out.nodes[nid].label
        if rule == "or":
            prem = TR.or_premises(label, principal)
        elif rule == "and":
            prem = TR.and_premises(label, principal)
        elif rule == "sigma":
            prem = TR.sigma_premises(label, principal)
        elif rule == "reg":
            prem = TR.reg_premises(self.info, label, principal)
        else:
            raise RefutationBuildError("alpha-replay", f"unexpected rule {rule}")
        children = self.step(nid, rule, principal, prem)
        out: list = []
        if rule == "or":
            for cid, e in zip(children, edges):
                part = next(iter(e.image(principal)))
                match = next(c for c, (lab, _) in zip(children, prem)
                             if part in lab)
                out.extend(self.alpha_replay(match, e.target))
            # dedupe in case both premises matched the same child
            seen: set = set()
            uniq = []
            for item in out:
                if item not in seen:
                    seen.add(item)
                    uniq.append(item)
            return uniq
        return self.alpha_replay(children[0], edges[0].target)

    # -- phi-side dual replay -----------------------------------------------------

    def dual_replay(self, nid: int, tau: Formula, path) -> tuple[int, Formula]:
        """Apply dual rules for the phi_hat-side steps along `path`, keeping
        the construction thin by discarding unused conjuncts immediately."""
        cur = nid
        for e in path:
            rule = e.rule
            principal = self.tp.nodes[e.src].principal
            if rule == "or":
                if not isinstance(tau, And):
                    raise RefutationBuildError("dual-or", S.pretty(tau))
                part = next(iter(e.image(principal)))
                keep = tau.left if part == principal.left else tau.right
                label = self.out.nodes[cur].label
                cur = self.step(cur, "and", tau,
                                TR.and_premises(label, tau))[0]
                if tau.left != tau.right:
                    drop = tau.right if keep == tau.left else tau.left
                    cur = self.step(cur, "weak", drop,
                                    [TR.weak_premise(self.out.nodes[cur].label,
                                                     drop)])[0]
                tau = keep
            elif rule == "and":
                has_top = isinstance(principal.left, TopI) or \
                    isinstance(principal.right, TopI)
                if has_top:
                    if not isinstance(tau, Or):
                        raise RefutationBuildError("dual-and", S.pretty(tau))
                    label = self.out.nodes[cur].label
                    children = self.step(cur, "or", tau,
                                         TR.or_premises(label, tau))
                    # the negated indexed top is F: that branch dies
                    dead = tau.right if isinstance(tau.right, Bot) else tau.left
                    keep = tau.left if dead == tau.right else tau.right
                    for cid, (lab, _) in zip(children,
                                             TR.or_premises(label, tau)):
                        if dead in lab and keep not in lab:
                            self.weak_to_core(cid)
                        else:
                            cur = cid
                    tau = keep
                # a plain conjunction split on the phi side leaves the tracked
                # negative conjunct untouched
            elif rule == "sigma":
                if not isinstance(tau, (Mu, Nu)):
                    raise RefutationBuildError("dual-sigma", S.pretty(tau))
                label = self.out.nodes[cur].label
                cur = self.step(cur, "sigma", tau,
                                TR.sigma_premises(label, tau))[0]
                tau = tau.body
            elif rule == "reg":
                if not (isinstance(tau, Var) and tau.name in self.info.bound):
                    raise RefutationBuildError("dual-reg", S.pretty(tau))
                label = self.out.nodes[cur].label
                cur = self.step(cur, "reg", tau,
                                TR.reg_premises(self.info, label, tau))[0]
                tau = self.info.bodies[tau.name]
            else:
                raise RefutationBuildError("dual-replay", f"rule {rule}")
        return cur, tau

    # -- pair processing ------------------------------------------------------------

    def process_choice(self, nid: int, ca: int, cp: int, tau: Formula):
        for node, b in self.alpha_replay(nid, ca):
            partners = sorted(m2 for (m, m2) in self.mm
                              if m == b and m2 in set(self.tp.near_modals(cp)))
            if not partners:
                raise RefutationBuildError("forth-choice",
                                           f"alpha node {b} has no partner")
            tphi = partners[0]
            path = next(p for m, p in sorted(self.tp.segment_paths(cp),
                                             key=lambda mp: (mp[0], len(mp[1])))
                        if m == tphi)
            node2, tau2 = self.dual_replay(node, tau, path)
            self.process_modal(node2, b, tphi, tau2)

    def process_modal(self, nid: int, ca: int, cp: int, tau: Formula):
        node = self.out.nodes[nid]
        key = (ca, cp, tau, node.stat)
        prio = node.prio
        running = prio
        for anc_key, anc_id, anc_prio in reversed(self.path):
            running = max(running, anc_prio)
            if running > prio:
                break
            if anc_key == key and anc_prio == prio:
                self.out.set_back(nid, BackEdge(anc_id, "silent"))
                return
        ready = self.done.get((key, prio))
        if ready is not None:
            # identical correspondence state already expanded elsewhere
            self.out.set_back(nid, BackEdge(ready, "silent"))
            return
        self.path.append((key, nid, prio))
        try:
            if not is_consistent(node.label):
                self.weak_to_core(nid)
            else:
                self.case_split(nid, ca, cp, tau)
        finally:
            self.path.pop()
        self.done[(key, prio)] = nid

    def case_split(self, nid: int, ca: int, cp: int, active: Formula):
        label = self.out.nodes[nid].label
        if isinstance(active, Or):
            children = self.step(nid, "or", active,
                                 TR.or_premises(label, active))
            self.case_split(children[0], ca, cp, active.left)
            self.case_split(children[1], ca, cp, active.right)
            return
        if active.is_literal:
            # dual of a literal of the phi side: the prop condition makes the
            # label clash
            if is_consistent(self.out.nodes[nid].label):
                raise RefutationBuildError(
                    "case-literal", f"no clash on {S.pretty(active)} at {nid}")
            self.weak_to_core(nid)
            return
        if isinstance(active, Cover):
            tops = {m for m in active.members if is_top_literal(m)}
            real = set(active.members) - tops
            if not active.members:
                # dual box-side failure: any alpha premise meets the empty
                # disjunction F of this group
                alpha_edges = self.ta.out_edges(ca)
                if not alpha_edges:
                    raise RefutationBuildError("case-deadlock",
                                               f"alpha node {ca} has no move")
                c, member = self._alpha_premise_of(ca, alpha_edges[0])
                child = self.step(nid, "nabla_r", None,
                                  [TR.nabla_child(label, c, member)])[0]
                self.weak_to_core(child)
                return
            if not real:
                # dual of an empty cover: a successor is required; an empty
                # alpha cover group contributes the leftover F that kills it
                if any(isinstance(g, Cover) and not g.members
                       for g in self.ta.label(ca)):
                    child = self.step(nid, "nabla_r", None,
                                      [TR.nabla_child(label, active,
                                                      next(iter(tops)))])[0]
                    self.weak_to_core(child)
                    return
                raise RefutationBuildError("case-successor",
                                           f"no empty cover group at {ca}")
            if len(real) == 1 and not tops:
                # dual premise nabla{~psi}: follow the back condition
                m = next(iter(real))
                target = None
                for e2 in self.tp.out_edges(cp):
                    cover = next(g for g in self.tp.label(cp)
                                 if isinstance(g, Cover))
                    img = e2.image(cover)
                    if len(img) == 1 and self.dual_of(next(iter(img))) == m:
                        target = e2.target
                        break
                if target is None:
                    raise RefutationBuildError("case-back", S.pretty(active))
                witnesses = sorted(u for (u, u2) in self.cc
                                   if u2 == target and
                                   u in {e.target for e in self.ta.out_edges(ca)})
                if not witnesses:
                    raise RefutationBuildError("case-back",
                                               f"no witness for child {target}")
                va = witnesses[0]
                e = next(e for e in self.ta.out_edges(ca) if e.target == va)
                c, member = self._alpha_premise_of(ca, e)
                child = self.step(nid, "nabla_r", None,
                                  [TR.nabla_child(label, c, member)])[0]
                self.process_choice(child, va, target, m)
                return
            if len(real) == 1:
                chi = next(iter(real))
                child = self.step(nid, "nabla_r", None,
                                  [TR.nabla_child(label, active, chi)])[0]
                self._case_forth(child, ca, cp, chi)
                return
        raise RefutationBuildError("case-dispatch", S.pretty(active))

    def _alpha_premise_of(self, ca: int, e) -> tuple[Cover, Formula]:
        for c in (g for g in self.ta.label(ca) if isinstance(g, Cover)):
            img = e.image(c)
            picked = img & set(c.members)
            leftover = {big_or(c.members)}
            if img and img != leftover:
                member = next(iter(picked)) if picked else next(iter(img))
                return c, member
        # singleton cover whose leftover equals its member
        for c in (g for g in self.ta.label(ca) if isinstance(g, Cover)):
            img = e.image(c)
            if img:
                return c, next(iter(img))
        raise RefutationBuildError("alpha-premise", f"node {ca}")

    def _case_forth(self, nid: int, ca: int, cp: int, chi: Formula):
        """Case of the dual cover nabla{chi, T}: reduce one alpha cover group,
        replay the alpha sections, then descend chi to the dual of the chosen
        phi premise member."""
        label = self.out.nodes[nid].label
        alpha_covers = sorted((g for g in self.ta.label(ca)
                               if isinstance(g, Cover) and g.members),
                              key=lambda f: f.key)
        if not alpha_covers:
            raise RefutationBuildError("case-forth",
                                       f"alpha node {ca} has no cover group")
        first = alpha_covers[0]
        leftover = big_or(first.members)

        members = set(first.members)

        def or_walk(node_id: int, form: Formula):
            if isinstance(form, Or) and form not in members:
                lab = self.out.nodes[node_id].label
                children = self.step(node_id, "or", form,
                                     TR.or_premises(lab, form))
                or_walk(children[0], form.left)
                or_walk(children[1], form.right)
                return
            self._case_forth_leaf(node_id, ca, cp, chi, first, form)

        or_walk(nid, leftover)

    def _case_forth_leaf(self, nid: int, ca: int, cp: int, chi: Formula,
                         cover: Cover, member: Formula):
        wa = None
        for e in self.ta.out_edges(ca):
            img = e.image(cover)
            if member in img and self.ta.label(e.target) <= \
                    self.out.nodes[nid].label:
                wa = e.target
                break
        if wa is None:
            raise RefutationBuildError("case-forth",
                                       f"no alpha premise for {S.pretty(member)}")
        for node, ua in self.alpha_replay(nid, wa):
            partners = sorted(m2 for (m, m2) in self.mm
                              if m == ua and m2 in set(self.tp.next_modals(cp)))
            if not partners:
                raise RefutationBuildError("case-forth",
                                           f"no modal partner for {ua}")
            uphi = partners[0]
            seg = next((p for m, p in sorted(self.tp.modal_segments(cp),
                                             key=lambda mp: (mp[0], len(mp[1])))
                        if m == uphi), None)
            if seg is None:
                raise RefutationBuildError("case-forth",
                                           f"no segment {cp} -> {uphi}")
            first_edge, rest = seg[0], seg[1:]
            cover_p = next(g for g in self.tp.label(cp) if isinstance(g, Cover))
            img = first_edge.image(cover_p)
            psi_star = next(iter(img & set(cover_p.members)), None)
            if psi_star is None:
                psi_star = next(iter(img))
            target = self.dual_of(psi_star)
            node2 = self._descend_chi(node, chi, target)
            node3, tau3 = self.dual_replay(node2, target, rest)
            self.process_modal(node3, ua, uphi, tau3)

    def _descend_chi(self, nid: int, chi: Formula, target: Formula) -> int:
        cur = nid
        while chi != target:
            if not isinstance(chi, And):
                raise RefutationBuildError("chi-descent",
                                           f"{S.pretty(chi)} vs {S.pretty(target)}")
            keep = chi.left if target in set(and_parts(chi.left)) else chi.right
            drop = chi.right if keep is chi.left else chi.left
            label = self.out.nodes[cur].label
            cur = self.step(cur, "and", chi, TR.and_premises(label, chi))[0]
            if keep != drop:
                cur = self.step(cur, "weak", drop,
                                [TR.weak_premise(self.out.nodes[cur].label,
                                                 drop)])[0]
            chi = keep
        return cur

    def build(self) -> RegularTableau:
        root = self.new_node([self.goal], None, None, None, None)
        t0 = self.step(root, "and", self.goal,
                       TR.and_premises(frozenset((self.goal,)), self.goal))[0]
        self.process_choice(t0, self.ta.root, self.tp.root, negate(self.phi_hat))
        return self.out


def _within(form: Formula, whole: Formula) -> bool:
    return form in whole.subformulas()


def build_thin_refutation(rel: NodeRelation) -> RegularTableau:
    """A thin refutation of alpha /\\ ~phi_hat from a consequence relation
    between their tableaux; alpha must be aconjunctive and phi_hat an ANF."""
    return _Builder(rel).build()
