"""Parser for the ASCII formula grammar.

Operator precedence, tightest first: ~ (on variables), <> and [], mu/nu
binders, \\/ , /\\ , -> , <->.  Note the disjunction binds tighter than the
conjunction and a binder extends only over the next unary term, so
``mu x. <>x \\/ p`` reads ``(mu x. <>x) \\/ p``.
"""

from __future__ import annotations

import re

from . import syntax as S
from .normalize import negate

_TOKEN = re.compile(
    r"\s*(?:(?P<lparen>\()|(?P<rparen>\))|(?P<lbrace>\{)|(?P<rbrace>\})"
    r"|(?P<and>/\\)|(?P<or>\\/)|(?P<iff><->)|(?P<impl>->)|(?P<dia><>)|(?P<box>\[\])"
    r"|(?P<neg>~)|(?P<dot>\.)|(?P<comma>,)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<bad>\S))"
)

_KEYWORDS = {"mu", "nu", "nabla"}
_TOPI_RE = re.compile(r"^T_([0-9]+)$")


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.items: list[tuple[str, str, int]] = []
        for m in _TOKEN.finditer(text):
            kind = m.lastgroup
            if kind == "bad":
                raise ParseError(f"unexpected character {m.group('bad')!r}", m.start("bad"))
            self.items.append((kind, m.group(kind), m.start(kind)))
        self.pos = 0

    def peek(self):
        return self.items[self.pos] if self.pos < len(self.items) else ("eof", "", len(self.text))

    def take(self, kind: str | None = None):
        tok = self.peek()
        if kind is not None and tok[0] != kind:
            raise ParseError(f"expected {kind}, found {tok[1] or 'end of input'!r}", tok[2])
        self.pos += 1
        return tok


def parse(text: str) -> S.Formula:
    """Parse formula source into an AST; raises ParseError on bad syntax."""
    toks = _Tokens(text)
    f = _parse_iff(toks)
    kind, value, pos = toks.peek()
    if kind != "eof":
        raise ParseError(f"unexpected trailing input {value!r}", pos)
    return f


def _parse_iff(toks: _Tokens) -> S.Formula:
    left = _parse_impl(toks)
    while toks.peek()[0] == "iff":
        toks.take()
        right = _parse_impl(toks)
        left = S.And(S.Or(negate(left), right), S.Or(negate(right), left))
    return left


def _parse_impl(toks: _Tokens) -> S.Formula:
    left = _parse_and(toks)
    if toks.peek()[0] == "impl":
        toks.take()
        right = _parse_impl(toks)
        return S.Or(negate(left), right)
    return left


def _parse_and(toks: _Tokens) -> S.Formula:
    left = _parse_or(toks)
    while toks.peek()[0] == "and":
        toks.take()
        left = S.And(left, _parse_or(toks))
    return left


def _parse_or(toks: _Tokens) -> S.Formula:
    left = _parse_unary(toks)
    while toks.peek()[0] == "or":
        toks.take()
        left = S.Or(left, _parse_unary(toks))
    return left


def _parse_unary(toks: _Tokens) -> S.Formula:
    kind, value, pos = toks.peek()
    if kind == "dia":
        toks.take()
        return S.Diamond(_parse_unary(toks))
    if kind == "box":
        toks.take()
        return S.Box(_parse_unary(toks))
    if kind == "ident" and value in ("mu", "nu"):
        toks.take()
        vkind, vname, vpos = toks.take("ident")
        if vname in _KEYWORDS or vname in ("T", "F") or _TOPI_RE.match(vname):
            raise ParseError(f"{vname!r} cannot be used as a bound variable", vpos)
        toks.take("dot")
        body = _parse_unary(toks)
        if S.NegVar(vname) in body.subformulas():
            raise ParseError(f"bound variable {vname!r} has a negative occurrence", pos)
        return S.Mu(vname, body) if value == "mu" else S.Nu(vname, body)
    return _parse_atom(toks)


def _parse_atom(toks: _Tokens) -> S.Formula:
    kind, value, pos = toks.take()
    if kind == "lparen":
        f = _parse_iff(toks)
        toks.take("rparen")
        return f
    if kind == "neg":
        ikind, name, ipos = toks.take()
        if ikind != "ident" or name in _KEYWORDS or name in ("T", "F") or _TOPI_RE.match(name):
            raise ParseError("negation may only be applied to a propositional variable", ipos)
        return S.NegVar(name)
    if kind == "ident":
        if value == "nabla":
            toks.take("lbrace")
            members = []
            if toks.peek()[0] != "rbrace":
                members.append(_parse_iff(toks))
                while toks.peek()[0] == "comma":
                    toks.take()
                    members.append(_parse_iff(toks))
            toks.take("rbrace")
            return S.Cover(members)
        if value == "T":
            return S.TOP
        if value == "F":
            return S.BOT
        m = _TOPI_RE.match(value)
        if m:
            return S.TopI(int(m.group(1)))
        if value in _KEYWORDS:
            raise ParseError(f"misplaced keyword {value!r}", pos)
        return S.Var(value)
    raise ParseError(f"expected a formula, found {value or 'end of input'!r}", pos)
