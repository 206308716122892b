"""Tableau, wide and refutation rule instantiation.

Each premise builder returns (child label, trace map); trace maps send every
member of the source label to its successor set at this step.
"""

from __future__ import annotations

from typing import Iterable

from ..formula.binding import BindingInfo
from ..formula.syntax import (And, Cover, Formula, Mu, Nu, Or, Var, big_or)


def _ctx_trace(context: Iterable[Formula]) -> dict:
    return {g: frozenset((g,)) for g in context}


def or_premises(label: frozenset, principal: Or, wide: bool = False) -> list:
    ctx = label - {principal}
    out = []
    for part in (principal.left, principal.right):
        tr = _ctx_trace(ctx)
        if wide:
            tr[principal] = frozenset((part, principal))
            out.append((ctx | {part, principal}, tr))
        else:
            tr[principal] = frozenset((part,))
            out.append((ctx | {part}, tr))
    return out


def and_premises(label: frozenset, principal: And, wide: bool = False) -> list:
    ctx = label - {principal}
    tr = _ctx_trace(ctx)
    parts = {principal.left, principal.right}
    if wide:
        tr[principal] = frozenset(parts | {principal})
        return [(ctx | parts | {principal}, tr)]
    tr[principal] = frozenset(parts)
    return [(ctx | parts, tr)]


def sigma_premises(label: frozenset, principal: Mu | Nu, wide: bool = False) -> list:
    ctx = label - {principal}
    tr = _ctx_trace(ctx)
    if wide:
        tr[principal] = frozenset((principal.body, principal))
        return [(ctx | {principal.body, principal}, tr)]
    tr[principal] = frozenset((principal.body,))
    return [(ctx | {principal.body}, tr)]


def reg_premises(info: BindingInfo, label: frozenset, principal: Var,
                 wide: bool = False) -> list:
    body = info.bodies[principal.name]
    ctx = label - {principal}
    tr = _ctx_trace(ctx)
    if wide:
        tr[principal] = frozenset((body, principal))
        return [(ctx | {body, principal}, tr)]
    tr[principal] = frozenset((body,))
    return [(ctx | {body}, tr)]


def nabla_groups(label: frozenset) -> tuple[list, list]:
    """(sorted cover formulas, sorted literal members) of a modal label."""
    covers = sorted((f for f in label if isinstance(f, Cover)), key=lambda f: f.key)
    lits = sorted((f for f in label if not isinstance(f, Cover)), key=lambda f: f.key)
    return covers, lits


def nabla_child(label: frozenset, who: Cover, member: Formula,
                keep_self: bool = False) -> tuple[frozenset, dict]:
    """One premise of the (modal) rule: reduce `who` to `member`, keep the
    big disjunction of every other cover group; `keep_self` gives the wide
    variant that also keeps this group's disjunction."""
    covers, lits = nabla_groups(label)
    child: set = {member}
    tr: dict = {}
    for c in covers:
        if c == who:
            img = {member}
            if keep_self:
                img.add(big_or(c.members))
            tr[c] = frozenset(img)
            child.update(img)
        else:
            leftover = big_or(c.members)
            tr[c] = frozenset((leftover,))
            child.add(leftover)
    for l in lits:
        tr[l] = frozenset()
    return frozenset(child), tr


def nabla_premises(label: frozenset) -> list:
    """All premises of the modal rule, ordered by (cover group, member)."""
    covers, _ = nabla_groups(label)
    out = []
    for c in covers:
        for member in c.members:
            out.append(nabla_child(label, c, member))
    return out


def weak_premise(label: frozenset, discard: Formula) -> tuple[frozenset, dict]:
    if discard not in label:
        raise ValueError("weakened formula must be in the label")
    ctx = label - {discard}
    tr = _ctx_trace(ctx)
    tr[discard] = frozenset()
    return (frozenset(ctx), tr)


def eps_premise(label: frozenset) -> tuple[frozenset, dict]:
    return (label, _ctx_trace(label))


def premise_trace(info: BindingInfo, label: frozenset, child: frozenset,
                  rule: str | None, principal: Formula | None) -> dict:
    """Reconstruct the trace map of a serialized edge from its rule tag."""
    if rule in ("eps1", "eps2") or rule is None:
        return _ctx_trace(label)
    if rule == "weak":
        missing = label - child
        discard = principal if principal is not None else next(iter(missing))
        return weak_premise(label, discard)[1]
    if rule in ("or", "or_w") and isinstance(principal, Or):
        for lab, tr in or_premises(label, principal, wide=rule == "or_w"):
            if lab == child:
                return tr
    if rule in ("and", "and_w") and isinstance(principal, And):
        return and_premises(label, principal, wide=rule == "and_w")[0][1]
    if rule in ("sigma", "sigma_w") and isinstance(principal, (Mu, Nu)):
        return sigma_premises(label, principal, wide=rule == "sigma_w")[0][1]
    if rule in ("reg", "reg_w") and isinstance(principal, Var):
        return reg_premises(info, label, principal, wide=rule == "reg_w")[0][1]
    if rule in ("nabla", "nabla_r", "nabla_w"):
        covers, _ = nabla_groups(label)
        for c in covers:
            for member in c.members:
                for keep in (False, True) if rule == "nabla_w" else (False,):
                    lab, tr = nabla_child(label, c, member, keep_self=keep)
                    if lab == child:
                        return tr
    raise ValueError(f"cannot reconstruct trace for rule {rule!r}")
