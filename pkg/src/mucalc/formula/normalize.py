"""Normalization: negation, well-named form, cover form, substitution."""

from __future__ import annotations

from dataclasses import dataclass, field

from . import syntax as S
from .syntax import (And, Bot, Box, Cover, Diamond, Formula, Mu, NegVar, Nu,
                     Or, Top, TopI, Var)


def negate(f: Formula, _flip: frozenset = frozenset()) -> Formula:
    """Negation extended to arbitrary formulas; result is in negation normal form.

    Variables in ``_flip`` are fixpoint variables currently being dualized and
    stay positive.  ~T_i is F; the cover dual follows
    nabla(Psi) = (/\\ <>Psi) /\\ ([] \\/ Psi).
    """
    if isinstance(f, Top):
        return S.BOT
    if isinstance(f, Bot):
        return S.TOP
    if isinstance(f, TopI):
        return S.BOT
    if isinstance(f, Var):
        return f if f.name in _flip else NegVar(f.name)
    if isinstance(f, NegVar):
        if f.name in _flip:
            raise ValueError(f"negative occurrence of fixpoint variable {f.name!r}")
        return Var(f.name)
    if isinstance(f, Or):
        return And(negate(f.left, _flip), negate(f.right, _flip))
    if isinstance(f, And):
        return Or(negate(f.left, _flip), negate(f.right, _flip))
    if isinstance(f, Diamond):
        return Box(negate(f.sub, _flip))
    if isinstance(f, Box):
        return Diamond(negate(f.sub, _flip))
    if isinstance(f, Cover):
        parts = [Or(Cover([negate(m, _flip)]), Cover([])) for m in f.members]
        parts.append(Cover([negate(S.big_or(f.members), _flip), S.TOP]))
        return S.big_or(parts)
    if isinstance(f, Mu):
        return Nu(f.var, negate(f.body, _flip | {f.var}))
    if isinstance(f, Nu):
        return Mu(f.var, negate(f.body, _flip | {f.var}))
    raise TypeError(f"unknown formula node {f!r}")


def implies(a: Formula, b: Formula) -> Formula:
    return Or(negate(a), b)


# -- well-named form ------------------------------------------------------------


def all_names(f: Formula) -> set:
    out: set = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, (Var, NegVar)):
            out.add(g.name)
        elif isinstance(g, (Mu, Nu)):
            out.add(g.var)
        stack.extend(g.children())
    return out


def fresh_name(base: str, used: set) -> str:
    stem = base.rstrip("0123456789") or base
    n = 1
    while f"{stem}{n}" in used:
        n += 1
    return f"{stem}{n}"


def occurs_unguarded(f: Formula, x: str) -> bool:
    """True if some free occurrence of x in f is not under a modality."""
    if isinstance(f, (Var, NegVar)):
        return f.name == x
    if isinstance(f, (Diamond, Box, Cover)):
        return False
    if isinstance(f, (Mu, Nu)):
        return f.var != x and occurs_unguarded(f.body, x)
    return any(occurs_unguarded(c, x) for c in f.children())


def _replace_unguarded(f: Formula, x: str, repl: Formula) -> Formula:
    if isinstance(f, Var) and f.name == x:
        return repl
    if isinstance(f, (Diamond, Box, Cover)) or f.is_literal:
        return f
    if isinstance(f, (Or, And)):
        cls = type(f)
        return cls(_replace_unguarded(f.left, x, repl), _replace_unguarded(f.right, x, repl))
    if isinstance(f, (Mu, Nu)):
        if f.var == x:
            return f
        cls = type(f)
        return cls(f.var, _replace_unguarded(f.body, x, repl))
    raise TypeError(f"unknown formula node {f!r}")


def _unit_simplify(f: Formula) -> Formula:
    if f.is_literal:
        return f
    if isinstance(f, Or):
        a, b = _unit_simplify(f.left), _unit_simplify(f.right)
        if isinstance(a, Bot):
            return b
        if isinstance(b, Bot):
            return a
        if isinstance(a, Top) or isinstance(b, Top):
            return S.TOP
        return Or(a, b)
    if isinstance(f, And):
        a, b = _unit_simplify(f.left), _unit_simplify(f.right)
        if isinstance(a, Top):
            return b
        if isinstance(b, Top):
            return a
        if isinstance(a, Bot) or isinstance(b, Bot):
            return S.BOT
        return And(a, b)
    if isinstance(f, Diamond):
        return Diamond(_unit_simplify(f.sub))
    if isinstance(f, Box):
        return Box(_unit_simplify(f.sub))
    if isinstance(f, Cover):
        return Cover(_unit_simplify(m) for m in f.members)
    if isinstance(f, (Mu, Nu)):
        body = _unit_simplify(f.body)
        if f.var not in body.free_vars:
            return body  # simplification erased the bound occurrences
        return type(f)(f.var, body)
    raise TypeError(f"unknown formula node {f!r}")


def _wnf(f: Formula, env: dict, used: set) -> Formula:
    if isinstance(f, Var):
        return Var(env.get(f.name, f.name))
    if isinstance(f, NegVar):
        return NegVar(env.get(f.name, f.name))
    if f.is_literal:
        return f
    if isinstance(f, (Or, And)):
        cls = type(f)
        return cls(_wnf(f.left, env, used), _wnf(f.right, env, used))
    if isinstance(f, Diamond):
        return Diamond(_wnf(f.sub, env, used))
    if isinstance(f, Box):
        return Box(_wnf(f.sub, env, used))
    if isinstance(f, Cover):
        return Cover(_wnf(m, env, used) for m in f.members)
    if isinstance(f, (Mu, Nu)):
        name = f.var if f.var not in used else fresh_name(f.var, used)
        used.add(name)
        env2 = dict(env)
        env2[f.var] = name
        body = _wnf(f.body, env2, used)
        if name not in body.free_vars:
            return body
        if occurs_unguarded(body, name):
            repl = S.BOT if isinstance(f, Mu) else S.TOP
            body = _unit_simplify(_replace_unguarded(body, name, repl))
            if name not in body.free_vars:
                return body
        return Mu(name, body) if isinstance(f, Mu) else Nu(name, body)
    raise TypeError(f"unknown formula node {f!r}")


def to_well_named(f: Formula) -> Formula:
    """Equivalent well-named formula: unique fresh binders, guarded bound
    variables (unguarded fixpoints are collapsed), vacuous binders dropped."""
    used = set(f.free_vars)
    return _wnf(f, {}, used)


def well_named_violations(f: Formula) -> list[str]:
    """Machine check of the well-named clauses; empty list means well-named.

    Bound-variable uniqueness is per binder *subformula*: several occurrences
    of one identical binder are fine (negating a cover modality duplicates
    the member negations), but two different binders for one name are not.
    """
    problems: list[str] = []
    binders: dict[str, set] = {}

    def walk(g: Formula):
        if isinstance(g, (Mu, Nu)):
            binders.setdefault(g.var, set()).add(g)
        for c in g.children():
            walk(c)

    walk(f)
    for x, forms in binders.items():
        if len(forms) > 1:
            problems.append(f"variable {x!r} has more than one binder")
            continue
        b = next(iter(forms))
        if NegVar(x) in b.body.subformulas():
            problems.append(f"bound variable {x!r} occurs negatively")
        if x not in b.body.free_vars:
            problems.append(f"binder for {x!r} is vacuous")
        if x in f.free_vars:
            problems.append(f"variable {x!r} occurs outside its binder")
        if occurs_unguarded(b.body, x):
            problems.append(f"bound variable {x!r} has an unguarded occurrence")

    def disjoint(g: Formula):
        if isinstance(g, (Or, And)):
            if g.left.bound_vars & g.right.free_vars or g.left.free_vars & g.right.bound_vars:
                problems.append(f"bound/free overlap across the parts of {S.pretty(g)}")
            disjoint(g.left)
            disjoint(g.right)
        else:
            for c in g.children():
                disjoint(c)

    disjoint(f)
    return problems


def is_well_named(f: Formula) -> bool:
    return not well_named_violations(f)


# -- cover form ------------------------------------------------------------------


def to_cover_form(f: Formula) -> Formula:
    """Replace <> and [] by the cover modality: <>a = nabla{a,T} and
    []a = nabla{} \\/ nabla{a}."""
    if f.is_literal:
        return f
    if isinstance(f, Diamond):
        return Cover([to_cover_form(f.sub), S.TOP])
    if isinstance(f, Box):
        return Or(Cover([]), Cover([to_cover_form(f.sub)]))
    if isinstance(f, (Or, And)):
        return type(f)(to_cover_form(f.left), to_cover_form(f.right))
    if isinstance(f, Cover):
        return Cover(to_cover_form(m) for m in f.members)
    if isinstance(f, (Mu, Nu)):
        return type(f)(f.var, to_cover_form(f.body))
    raise TypeError(f"unknown formula node {f!r}")


def expand_covers(f: Formula) -> Formula:
    """Expand every nabla(Phi) into (/\\ <>Phi) /\\ ([] \\/ Phi)."""
    if f.is_literal:
        return f
    if isinstance(f, Cover):
        ms = [expand_covers(m) for m in f.members]
        return And(S.big_and(Diamond(m) for m in ms), Box(S.big_or(ms)))
    if isinstance(f, (Or, And)):
        return type(f)(expand_covers(f.left), expand_covers(f.right))
    if isinstance(f, Diamond):
        return Diamond(expand_covers(f.sub))
    if isinstance(f, Box):
        return Box(expand_covers(f.sub))
    if isinstance(f, (Mu, Nu)):
        return type(f)(f.var, expand_covers(f.body))
    raise TypeError(f"unknown formula node {f!r}")


def normalize(f: Formula) -> Formula:
    """Standard pipeline: well-named then cover form."""
    return to_cover_form(to_well_named(f))


# -- substitution -----------------------------------------------------------------


@dataclass
class CopyInfo:
    """One renamed copy of the substituted argument.

    ``to_original`` maps every subformula of the copy to the matching
    subformula of the original argument.
    """

    formula: Formula
    to_original: dict = field(default_factory=dict)


@dataclass
class SubstResult:
    result: Formula
    variable: str
    argument: Formula
    copies: list = field(default_factory=list)


def _freshen_bound(f: Formula, used: set, env: dict, mapping: dict,
                   always: bool = False,
                   reserve: frozenset = frozenset()) -> Formula:
    if isinstance(f, Var):
        out: Formula = Var(env.get(f.name, f.name))
    elif isinstance(f, NegVar):
        out = NegVar(env.get(f.name, f.name))
    elif f.is_literal:
        out = f
    elif isinstance(f, (Or, And)):
        out = type(f)(_freshen_bound(f.left, used, env, mapping, always, reserve),
                      _freshen_bound(f.right, used, env, mapping, always, reserve))
    elif isinstance(f, Diamond):
        out = Diamond(_freshen_bound(f.sub, used, env, mapping, always, reserve))
    elif isinstance(f, Box):
        out = Box(_freshen_bound(f.sub, used, env, mapping, always, reserve))
    elif isinstance(f, Cover):
        out = Cover(_freshen_bound(m, used, env, mapping, always, reserve)
                    for m in f.members)
    elif isinstance(f, (Mu, Nu)):
        if always or f.var in used:
            name = fresh_name(f.var, used | reserve | {f.var})
        else:
            name = f.var
        used.add(name)
        env2 = dict(env)
        env2[f.var] = name
        out = type(f)(name, _freshen_bound(f.body, used, env2, mapping,
                                           always, reserve))
    else:
        raise TypeError(f"unknown formula node {f!r}")
    mapping[out] = f
    return out


def _rename_binders(f: Formula, avoid: set, used: set, env: dict) -> Formula:
    if isinstance(f, Var):
        return Var(env.get(f.name, f.name))
    if isinstance(f, NegVar):
        return NegVar(env.get(f.name, f.name))
    if f.is_literal:
        return f
    if isinstance(f, (Or, And)):
        return type(f)(_rename_binders(f.left, avoid, used, env),
                       _rename_binders(f.right, avoid, used, env))
    if isinstance(f, Diamond):
        return Diamond(_rename_binders(f.sub, avoid, used, env))
    if isinstance(f, Box):
        return Box(_rename_binders(f.sub, avoid, used, env))
    if isinstance(f, Cover):
        return Cover(_rename_binders(m, avoid, used, env) for m in f.members)
    if isinstance(f, (Mu, Nu)):
        name = f.var
        if name in avoid:
            name = fresh_name(name, used)
            used.add(name)
        env2 = dict(env)
        env2[f.var] = name
        return type(f)(name, _rename_binders(f.body, avoid, used, env2))
    raise TypeError(f"unknown formula node {f!r}")


def substitute_tracked(f: Formula, x: str, arg: Formula,
                       always_fresh: bool = False) -> SubstResult:
    """Capture-avoiding substitution of arg for the free variable x in f.

    Every occurrence receives its own copy of arg with freshly renamed bound
    variables, so the result of substituting into a well-named formula with a
    well-named argument is again well-named.  The per-copy renaming maps are
    returned for callers that track correspondences across the substitution.
    """
    if NegVar(x) in f.subformulas():
        raise ValueError(f"cannot substitute for negative occurrences of {x!r}")
    used = all_names(f) | set(arg.free_vars)
    host = _rename_binders(f, set(arg.free_vars), used, {})
    res = SubstResult(result=host, variable=x, argument=arg)

    reserve = frozenset(all_names(arg))

    def go(g: Formula) -> Formula:
        if isinstance(g, Var) and g.name == x:
            mapping: dict = {}
            copy = _freshen_bound(arg, used, {}, mapping, always_fresh, reserve)
            res.copies.append(CopyInfo(copy, mapping))
            return copy
        if g.is_literal:
            return g
        if isinstance(g, (Or, And)):
            return type(g)(go(g.left), go(g.right))
        if isinstance(g, Diamond):
            return Diamond(go(g.sub))
        if isinstance(g, Box):
            return Box(go(g.sub))
        if isinstance(g, Cover):
            return Cover(go(m) for m in g.members)
        if isinstance(g, (Mu, Nu)):
            if g.var == x:
                return g
            return type(g)(g.var, go(g.body))
        raise TypeError(f"unknown formula node {g!r}")

    res.result = go(host)
    return res


def substitute(f: Formula, x: str, arg: Formula) -> Formula:
    return substitute_tracked(f, x, arg).result
