"""Kozen's axiomatization as checkable proof objects.

Tait-style sequents: a finite set Gamma stands for the provability of the
negated conjunction of its members.  Axioms: Bot, Tau, Prefix.  Rules: the
two junction rules, weakening, the modal rule stripping boxes, cut, and the
fixpoint induction rule.  Sequents compare up to renaming of bound variables.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .formula import syntax as S
from .formula.normalize import negate, substitute
from .formula.parse import parse
from .formula.syntax import (And, Box, Diamond, Formula, Mu, NegVar, Or, Var,
                             alpha_canonical, from_dict, to_dict, to_source)

RULES = ("bot", "tau", "prefix", "or", "and", "weak", "dia", "cut", "ind")


def seq_key(formulas) -> frozenset:
    return frozenset(alpha_canonical(f) for f in formulas)


def seq_str(formulas) -> str:
    return ", ".join(S.pretty(f) for f in S.sorted_formulas(formulas)) + " |-"


@dataclass
class ProofStep:
    rule: str
    params: list = field(default_factory=list)
    conclusion: frozenset = frozenset()
    children: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "rule": self.rule,
            "params": [to_dict(p) for p in self.params],
            "conclusion": [to_dict(f) for f in S.sorted_formulas(self.conclusion)],
            "children": [c.to_dict() for c in self.children],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ProofStep":
        return cls(rule=d["rule"],
                   params=[from_dict(p) for p in d.get("params", [])],
                   conclusion=frozenset(from_dict(f) for f in d["conclusion"]),
                   children=[cls.from_dict(c) for c in d.get("children", [])])

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ProofStep":
        return cls.from_dict(json.loads(text))


@dataclass
class CheckResult:
    ok: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def axiom_instance(kind: str, params: list) -> frozenset:
    """The sequent of an axiom instance."""
    if kind == "bot":
        return frozenset((S.BOT,))
    if kind == "tau":
        (phi,) = params
        return frozenset((phi, negate(phi)))
    if kind == "prefix":
        (mu_formula,) = params
        if not isinstance(mu_formula, Mu):
            raise ValueError("prefix expects a least-fixpoint formula")
        if NegVar(mu_formula.var) in mu_formula.body.subformulas():
            raise ValueError("prefix requires a positive bound variable")
        unfolded = substitute(mu_formula.body, mu_formula.var, mu_formula)
        return frozenset((unfolded, negate(mu_formula)))
    raise ValueError(f"unknown axiom {kind!r}")


def _expected_premises(step: ProofStep) -> list | CheckResult:
    """Premise sequents demanded by the rule schema, or a failure."""
    rule, params, conclusion = step.rule, step.params, step.conclusion
    if rule in ("bot", "tau", "prefix"):
        want = axiom_instance(rule, params)
        if seq_key(conclusion) != seq_key(want):
            return CheckResult(False, f"{rule}: conclusion is not the axiom "
                                      f"instance {seq_str(want)}")
        return []
    if rule == "or":
        (principal,) = params
        if not isinstance(principal, Or) or principal not in conclusion:
            return CheckResult(False, "or: principal disjunction not in conclusion")
        ctx = conclusion - {principal}
        return [ctx | {principal.left}, ctx | {principal.right}]
    if rule == "and":
        (principal,) = params
        if not isinstance(principal, And) or principal not in conclusion:
            return CheckResult(False, "and: principal conjunction not in conclusion")
        ctx = conclusion - {principal}
        return [ctx | {principal.left, principal.right}]
    if rule == "weak":
        (added,) = params
        if added not in conclusion:
            return CheckResult(False, "weak: weakened formula not in conclusion")
        return [conclusion - {added}]
    if rule == "dia":
        principal = params[0]  # extra params carry the context in fixtures
        if not isinstance(principal, Diamond) or principal not in conclusion:
            return CheckResult(False, "dia: principal diamond not in conclusion")
        ctx = conclusion - {principal}
        stripped = {g.sub for g in ctx if isinstance(g, Box)}
        return [frozenset({principal.sub} | stripped)]
    if rule == "cut":
        (cut_formula,) = params
        if len(step.children) != 2:
            return CheckResult(False, "cut: needs two premises")
        left, right = step.children[0].conclusion, step.children[1].conclusion
        ncut, key = negate(cut_formula), alpha_canonical(cut_formula)
        if not any(alpha_canonical(g) == alpha_canonical(ncut) for g in left):
            return CheckResult(False, "cut: negated cut formula missing on the left")
        if not any(alpha_canonical(g) == key for g in right):
            return CheckResult(False, "cut: cut formula missing on the right")
        gamma = {g for g in left if alpha_canonical(g) != alpha_canonical(ncut)}
        delta = {g for g in right if alpha_canonical(g) != key}
        if seq_key(gamma | delta) != seq_key(conclusion):
            return CheckResult(False, "cut: contexts do not recombine")
        return [left, right]
    if rule == "ind":
        mu_formula, psi = params
        if not isinstance(mu_formula, Mu):
            return CheckResult(False, "ind: target must be a least fixpoint")
        if NegVar(mu_formula.var) in mu_formula.body.subformulas():
            return CheckResult(False, "ind: bound variable must be positive")
        if seq_key(conclusion) != seq_key({mu_formula, negate(psi)}):
            return CheckResult(False, "ind: conclusion must be the fixpoint "
                                      "with the negated invariant")
        unfolded = substitute(mu_formula.body, mu_formula.var, psi)
        return [frozenset((unfolded, negate(psi)))]
    return CheckResult(False, f"unknown rule {step.rule!r}")


def check_proof(step: ProofStep) -> CheckResult:
    """Schema-exact validation of every step of the proof tree."""
    want = _expected_premises(step)
    if isinstance(want, CheckResult):
        return want
    if len(want) != len(step.children):
        return CheckResult(False, f"{step.rule}: expected {len(want)} premises, "
                                  f"found {len(step.children)}")
    if step.rule == "or":
        got = [seq_key(c.conclusion) for c in step.children]
        expect = [seq_key(w) for w in want]
        if got != expect and got != expect[::-1]:
            return CheckResult(False, "or: premises do not match")
    elif step.rule == "cut":
        pass  # verified against the children inside _expected_premises
    else:
        for child, w in zip(step.children, want):
            if seq_key(child.conclusion) != seq_key(w):
                return CheckResult(
                    False, f"{step.rule}: premise is {seq_str(child.conclusion)} "
                           f"but the schema demands {seq_str(w)}")
    for child in step.children:
        sub = check_proof(child)
        if not sub:
            return sub
    return CheckResult(True)


# -- compact text form ---------------------------------------------------------------

_TOKEN = re.compile(r'\s*(\(|\)|"[^"]*"|[a-z_]+)')


def _tokenize(text: str) -> list:
    out, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise ValueError(f"bad proof syntax at {text[pos:pos+20]!r}")
            break
        out.append(m.group(1))
        pos = m.end()
    return out


def _parse_sexp(tokens: list, pos: int):
    if tokens[pos] != "(":
        raise ValueError("expected '('")
    rule = tokens[pos + 1]
    pos += 2
    params: list = []
    children: list = []
    while tokens[pos] != ")":
        if tokens[pos] == "(":
            child, pos = _parse_sexp(tokens, pos)
            children.append(child)
        else:
            params.append(parse(tokens[pos][1:-1]))
            pos += 1
    return (rule, params, children), pos + 1


def _conclude(rule: str, params: list, children: list) -> frozenset:
    """Reconstruct the conclusion of a compact-form step from its parts."""
    if rule in ("bot", "tau", "prefix"):
        return axiom_instance(rule, params)
    if rule == "or":
        (principal,) = params
        return (children[0].conclusion - {principal.left}) | {principal}
    if rule == "and":
        (principal,) = params
        return (children[0].conclusion - {principal.left, principal.right}) \
            | {principal}
    if rule == "weak":
        return children[0].conclusion | {params[0]}
    if rule == "dia":
        principal, *ctx = params
        return frozenset({principal} | set(ctx))
    if rule == "cut":
        (cut_formula,) = params
        ncut = negate(cut_formula)
        gamma = {g for g in children[0].conclusion
                 if alpha_canonical(g) != alpha_canonical(ncut)}
        delta = {g for g in children[1].conclusion
                 if alpha_canonical(g) != alpha_canonical(cut_formula)}
        return frozenset(gamma | delta)
    if rule == "ind":
        mu_formula, psi = params
        return frozenset((mu_formula, negate(psi)))
    raise ValueError(f"unknown rule {rule!r}")


def parse_proof(text: str) -> ProofStep:
    """Compact fixture form: (rule "formula-param" ... (child) ...); the
    conclusion of every step is reconstructed from the rule schema."""
    tokens = _tokenize(text)
    (tree, pos) = _parse_sexp(tokens, 0)
    if pos != len(tokens):
        raise ValueError("trailing tokens after proof")

    def build(node) -> ProofStep:
        rule, params, children = node
        steps = [build(c) for c in children]
        return ProofStep(rule, params, _conclude(rule, params, steps), steps)

    return build(tree)


def proof_sequent(step: ProofStep) -> frozenset:
    return step.conclusion


def format_proof(step: ProofStep, indent: int = 0) -> str:
    pad = "  " * indent
    head = f"{pad}({step.rule}"
    for p in step.params:
        head += f' "{to_source(p)}"'
    if not step.children:
        return head + ")"
    lines = [head]
    lines.extend(format_proof(c, indent + 1) for c in step.children)
    lines.append(pad + ")")
    return "\n".join(lines)
