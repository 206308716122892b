"""Immutable AST for modal mu-calculus formulas in negation normal form.

Formulas are compared and hashed structurally (alpha-sensitive: bound names
matter).  Every node carries a canonical key tuple that doubles as a total
order, so sets of formulas can be laid out deterministically everywhere
(cover children, disjunction folds, label printouts).
"""

from __future__ import annotations

import json
from typing import Iterable, Iterator

_TOP, _BOT, _TOPI, _VAR, _NVAR, _OR, _AND, _DIA, _BOX, _COVER, _MU, _NU = range(12)

_KIND_NAMES = {
    _TOP: "top", _BOT: "bot", _TOPI: "topi", _VAR: "var", _NVAR: "negvar",
    _OR: "or", _AND: "and", _DIA: "diamond", _BOX: "box", _COVER: "nabla",
    _MU: "mu", _NU: "nu",
}


class Formula:
    """Base class; instances are immutable after construction."""

    __slots__ = ("kind", "key", "_hash", "_free", "_bound", "_subs", "_size")

    def __init__(self, kind: int, key: tuple):
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "key", key)
        object.__setattr__(self, "_hash", hash(key))
        object.__setattr__(self, "_free", None)
        object.__setattr__(self, "_bound", None)
        object.__setattr__(self, "_subs", None)
        object.__setattr__(self, "_size", None)

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("Formula instances are immutable")

    def _cache(self, slot: str, value):
        object.__setattr__(self, slot, value)
        return value

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        return isinstance(other, Formula) and self._hash == other._hash and self.key == other.key

    def __lt__(self, other: "Formula") -> bool:
        return self.key < other.key

    def __repr__(self) -> str:
        return f"Formula({self})"

    def __str__(self) -> str:
        return pretty(self)

    # -- structural accessors -------------------------------------------------

    def children(self) -> tuple["Formula", ...]:
        return ()

    @property
    def free_vars(self) -> frozenset:
        if self._free is None:
            return self._cache("_free", self._compute_free())
        return self._free

    def _compute_free(self) -> frozenset:
        out: set = set()
        for c in self.children():
            out |= c.free_vars
        return frozenset(out)

    @property
    def bound_vars(self) -> frozenset:
        if self._bound is None:
            out: set = set()
            for c in self.children():
                out |= c.bound_vars
            if isinstance(self, (Mu, Nu)):
                out.add(self.var)
            return self._cache("_bound", frozenset(out))
        return self._bound

    @property
    def size(self) -> int:
        if self._size is None:
            return self._cache("_size", 1 + sum(c.size for c in self.children()))
        return self._size

    def subformulas(self) -> frozenset:
        """The set Sub(f) of all subformulas, including f itself."""
        if self._subs is None:
            out = {self}
            for c in self.children():
                out |= c.subformulas()
            return self._cache("_subs", frozenset(out))
        return self._subs

    @property
    def is_literal(self) -> bool:
        return self.kind in (_TOP, _BOT, _TOPI, _VAR, _NVAR)


class Top(Formula):
    __slots__ = ()

    def __init__(self):
        super().__init__(_TOP, (_TOP,))


class Bot(Formula):
    __slots__ = ()

    def __init__(self):
        super().__init__(_BOT, (_BOT,))


class TopI(Formula):
    """Indexed top: a decorated tautology literal with ~T_i := F."""

    __slots__ = ("index",)

    def __init__(self, index: int):
        super().__init__(_TOPI, (_TOPI, int(index)))
        object.__setattr__(self, "index", int(index))


class Var(Formula):
    __slots__ = ("name",)

    def __init__(self, name: str):
        super().__init__(_VAR, (_VAR, name))
        object.__setattr__(self, "name", name)

    def _compute_free(self) -> frozenset:
        return frozenset((self.name,))


class NegVar(Formula):
    __slots__ = ("name",)

    def __init__(self, name: str):
        super().__init__(_NVAR, (_NVAR, name))
        object.__setattr__(self, "name", name)

    def _compute_free(self) -> frozenset:
        return frozenset((self.name,))


class Or(Formula):
    __slots__ = ("left", "right")

    def __init__(self, left: Formula, right: Formula):
        super().__init__(_OR, (_OR, left.key, right.key))
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)

    def children(self):
        return (self.left, self.right)


class And(Formula):
    __slots__ = ("left", "right")

    def __init__(self, left: Formula, right: Formula):
        super().__init__(_AND, (_AND, left.key, right.key))
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)

    def children(self):
        return (self.left, self.right)


class Diamond(Formula):
    __slots__ = ("sub",)

    def __init__(self, sub: Formula):
        super().__init__(_DIA, (_DIA, sub.key))
        object.__setattr__(self, "sub", sub)

    def children(self):
        return (self.sub,)


class Box(Formula):
    __slots__ = ("sub",)

    def __init__(self, sub: Formula):
        super().__init__(_BOX, (_BOX, sub.key))
        object.__setattr__(self, "sub", sub)

    def children(self):
        return (self.sub,)


class Cover(Formula):
    """Cover modality nabla(Phi); children stored as a sorted duplicate-free tuple."""

    __slots__ = ("members",)

    def __init__(self, members: Iterable[Formula]):
        ms = tuple(sorted(set(members), key=lambda f: f.key))
        super().__init__(_COVER, (_COVER, tuple(m.key for m in ms)))
        object.__setattr__(self, "members", ms)

    def children(self):
        return self.members


class Mu(Formula):
    __slots__ = ("var", "body")

    def __init__(self, var: str, body: Formula):
        super().__init__(_MU, (_MU, var, body.key))
        object.__setattr__(self, "var", var)
        object.__setattr__(self, "body", body)

    def children(self):
        return (self.body,)

    def _compute_free(self) -> frozenset:
        return self.body.free_vars - {self.var}


class Nu(Formula):
    __slots__ = ("var", "body")

    def __init__(self, var: str, body: Formula):
        super().__init__(_NU, (_NU, var, body.key))
        object.__setattr__(self, "var", var)
        object.__setattr__(self, "body", body)

    def children(self):
        return (self.body,)

    def _compute_free(self) -> frozenset:
        return self.body.free_vars - {self.var}


TOP = Top()
BOT = Bot()


def var(name: str) -> Var:
    return Var(name)


def nvar(name: str) -> NegVar:
    return NegVar(name)


def topi(index: int) -> TopI:
    return TopI(index)


def or_(a: Formula, b: Formula) -> Or:
    return Or(a, b)


def and_(a: Formula, b: Formula) -> And:
    return And(a, b)


def dia(a: Formula) -> Diamond:
    return Diamond(a)


def box(a: Formula) -> Box:
    return Box(a)


def cover(members: Iterable[Formula]) -> Cover:
    return Cover(members)


def mu(x: str, body: Formula) -> Mu:
    return Mu(x, body)


def nu(x: str, body: Formula) -> Nu:
    return Nu(x, body)


def sigma(kind: str, x: str, body: Formula) -> Formula:
    return Mu(x, body) if kind == "mu" else Nu(x, body)


def sorted_formulas(forms: Iterable[Formula]) -> list:
    return sorted(set(forms), key=lambda f: f.key)


def big_or(forms: Iterable[Formula]) -> Formula:
    """Canonical disjunction of a set: sorted left fold; empty set gives F."""
    ms = sorted_formulas(forms)
    if not ms:
        return BOT
    acc = ms[0]
    for m in ms[1:]:
        acc = Or(acc, m)
    return acc


def big_and(forms: Iterable[Formula]) -> Formula:
    """Canonical conjunction of a set: sorted left fold; empty set gives T."""
    ms = sorted_formulas(forms)
    if not ms:
        return TOP
    acc = ms[0]
    for m in ms[1:]:
        acc = And(acc, m)
    return acc


def or_parts(f: Formula) -> Iterator[Formula]:
    """Leaves of the maximal Or-tree rooted at f."""
    if isinstance(f, Or):
        yield from or_parts(f.left)
        yield from or_parts(f.right)
    else:
        yield f


def and_parts(f: Formula) -> Iterator[Formula]:
    if isinstance(f, And):
        yield from and_parts(f.left)
        yield from and_parts(f.right)
    else:
        yield f


def is_top_literal(f: Formula) -> bool:
    """Plain or indexed top."""
    return isinstance(f, (Top, TopI))


# -- printing -----------------------------------------------------------------

_ATOM, _UNARY, _ORL, _ANDL = range(4)


def _ascii(f: Formula, level: int) -> str:
    if isinstance(f, Top):
        return "T"
    if isinstance(f, Bot):
        return "F"
    if isinstance(f, TopI):
        return f"T_{f.index}"
    if isinstance(f, Var):
        return f.name
    if isinstance(f, NegVar):
        return "~" + f.name
    if isinstance(f, Cover):
        return "nabla{" + ", ".join(_ascii(m, _ANDL) for m in f.members) + "}"
    if isinstance(f, Diamond):
        s = "<>" + _ascii(f.sub, _UNARY)
        return s if level >= _UNARY else "(" + s + ")"
    if isinstance(f, Box):
        s = "[]" + _ascii(f.sub, _UNARY)
        return s if level >= _UNARY else "(" + s + ")"
    if isinstance(f, (Mu, Nu)):
        op = "mu" if isinstance(f, Mu) else "nu"
        s = f"{op} {f.var}. " + _ascii(f.body, _UNARY)
        return s if level >= _UNARY else "(" + s + ")"
    if isinstance(f, Or):
        s = _ascii(f.left, _ORL) + " \\/ " + _ascii(f.right, _UNARY)
        return s if level >= _ORL else "(" + s + ")"
    if isinstance(f, And):
        s = _ascii(f.left, _ANDL) + " /\\ " + _ascii(f.right, _ORL)
        return s if level >= _ANDL else "(" + s + ")"
    raise TypeError(f"unknown formula node {f!r}")


def to_source(f: Formula) -> str:
    """ASCII rendering that re-parses to a structurally equal AST."""
    return _ascii(f, _ANDL)


def pretty(f: Formula) -> str:
    """Unicode rendering for display."""
    s = to_source(f)
    return (s.replace("\\/", "∨").replace("/\\", "∧")
             .replace("<>", "◇").replace("[]", "◻")
             .replace("nabla", "∇").replace("mu ", "μ")
             .replace("nu ", "ν").replace("~", "¬")
             .replace("T_", "⊤_").replace(". ", "."))


def label_str(label: Iterable[Formula]) -> str:
    return "{" + ", ".join(pretty(f) for f in sorted_formulas(label)) + "}"


# -- JSON serialization --------------------------------------------------------


def to_dict(f: Formula) -> dict:
    k = _KIND_NAMES[f.kind]
    if isinstance(f, (Top, Bot)):
        return {"kind": k}
    if isinstance(f, TopI):
        return {"kind": k, "index": f.index}
    if isinstance(f, (Var, NegVar)):
        return {"kind": k, "name": f.name}
    if isinstance(f, (Or, And)):
        return {"kind": k, "left": to_dict(f.left), "right": to_dict(f.right)}
    if isinstance(f, (Diamond, Box)):
        return {"kind": k, "sub": to_dict(f.sub)}
    if isinstance(f, Cover):
        return {"kind": k, "members": [to_dict(m) for m in f.members]}
    if isinstance(f, (Mu, Nu)):
        return {"kind": k, "var": f.var, "body": to_dict(f.body)}
    raise TypeError(f"unknown formula node {f!r}")


def from_dict(d: dict) -> Formula:
    k = d["kind"]
    if k == "top":
        return TOP
    if k == "bot":
        return BOT
    if k == "topi":
        return TopI(d["index"])
    if k == "var":
        return Var(d["name"])
    if k == "negvar":
        return NegVar(d["name"])
    if k == "or":
        return Or(from_dict(d["left"]), from_dict(d["right"]))
    if k == "and":
        return And(from_dict(d["left"]), from_dict(d["right"]))
    if k == "diamond":
        return Diamond(from_dict(d["sub"]))
    if k == "box":
        return Box(from_dict(d["sub"]))
    if k == "nabla":
        return Cover(from_dict(m) for m in d["members"])
    if k == "mu":
        return Mu(d["var"], from_dict(d["body"]))
    if k == "nu":
        return Nu(d["var"], from_dict(d["body"]))
    raise ValueError(f"unknown formula kind {k!r}")


def to_json(f: Formula) -> str:
    return json.dumps(to_dict(f), sort_keys=True)


def from_json(s: str) -> Formula:
    return from_dict(json.loads(s))


# -- alpha equivalence ---------------------------------------------------------


def _canon(f: Formula, env: dict, counter: list) -> Formula:
    if isinstance(f, Var):
        return Var(env.get(f.name, f.name))
    if isinstance(f, NegVar):
        return NegVar(env.get(f.name, f.name))
    if f.is_literal:
        return f
    if isinstance(f, Or):
        return Or(_canon(f.left, env, counter), _canon(f.right, env, counter))
    if isinstance(f, And):
        return And(_canon(f.left, env, counter), _canon(f.right, env, counter))
    if isinstance(f, Diamond):
        return Diamond(_canon(f.sub, env, counter))
    if isinstance(f, Box):
        return Box(_canon(f.sub, env, counter))
    if isinstance(f, Cover):
        return Cover(_canon(m, env, counter) for m in f.members)
    if isinstance(f, (Mu, Nu)):
        counter[0] += 1
        fresh = f"#{counter[0]}"
        env2 = dict(env)
        env2[f.var] = fresh
        body = _canon(f.body, env2, counter)
        return Mu(fresh, body) if isinstance(f, Mu) else Nu(fresh, body)
    raise TypeError(f"unknown formula node {f!r}")


def alpha_canonical(f: Formula) -> Formula:
    """Rename bound variables to canonical #1, #2, ... in traversal order."""
    return _canon(f, {}, [0])


def alpha_equal(a: Formula, b: Formula) -> bool:
    return alpha_canonical(a) == alpha_canonical(b)
