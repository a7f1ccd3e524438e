"""Parser for the concrete term and type syntax.

Terms:   `x`, `\\x:U. t`, `/\\X. t`, `t u`, `t @ U`, `zero`, `a . t`, `t + t`
Types:   `X`, `U -> T`, `forall X. U`, `T + T`, `Zero`

Application binds tightest, then scaling `a . t`, then `+`; binder bodies
extend as far right as possible.  Scalar literals are decimals (`0.9`) or
ratios (`9/10`).  Parsed terms and types come out in canonical form.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .syntax import (
    Abs,
    App,
    Arrow,
    Context,
    Forall,
    Scaled,
    Term,
    TyAbs,
    TyApp,
    TySum,
    TyVar,
    Type,
    UnitType,
    Var,
    ZERO,
    ZERO_TYPE,
    as_scalar,
    canonical,
    tsum,
    ty_join,
    ty_sum,
)


class ParseError(Exception):
    """Raised on malformed input, with the offending position."""

    def __init__(self, message: str, pos: int) -> None:
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    pos: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>\d+/\d+|\d+\.\d+|\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<tylam>/\\)
  | (?P<lam>\\)
  | (?P<arrow>->)
  | (?P<sym>[().:+@,])
    """,
    re.VERBOSE,
)

_KEYWORDS = {"zero", "forall", "Zero"}


def _lex(src: str) -> list[_Tok]:
    toks: list[_Tok] = []
    i = 0
    while i < len(src):
        m = _TOKEN_RE.match(src, i)
        if m is None:
            raise ParseError(f"unexpected character {src[i]!r}", i)
        kind = m.lastgroup or ""
        text = m.group()
        if kind == "ident" and text in _KEYWORDS:
            kind = text
        if kind != "ws":
            toks.append(_Tok(kind, text, i))
        i = m.end()
    toks.append(_Tok("eof", "", len(src)))
    return toks


class _Parser:
    def __init__(self, src: str) -> None:
        self.toks = _lex(src)
        self.i = 0

    # -- token helpers ----------------------------------------------------

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def next(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str, text: str | None = None) -> _Tok:
        tok = self.next()
        if tok.kind != kind or (text is not None and tok.text != text):
            want = text or kind
            raise ParseError(f"expected {want!r}, found {tok.text or 'end of input'!r}", tok.pos)
        return tok

    def at_sym(self, text: str) -> bool:
        tok = self.peek()
        return tok.kind == "sym" and tok.text == text

    # -- terms -------------------------------------------------------------

    def term(self) -> Term:
        parts = [self.scale()]
        while self.at_sym("+"):
            self.next()
            parts.append(self.scale())
        if len(parts) == 1:
            return parts[0]
        return tsum(parts)

    def scale(self) -> Term:
        tok = self.peek()
        if tok.kind == "number":
            self.next()
            self.expect("sym", ".")
            return Scaled(as_scalar(Fraction(tok.text)), self.scale())
        if tok.kind == "lam":
            self.next()
            var = self.expect("ident").text
            self.expect("sym", ":")
            ann = self.unit_type()
            self.expect("sym", ".")
            return Abs(var, ann, self.term())
        if tok.kind == "tylam":
            self.next()
            var = self.expect("ident").text
            self.expect("sym", ".")
            return TyAbs(var, self.term())
        return self.app()

    def app(self) -> Term:
        t = self.atom()
        while True:
            tok = self.peek()
            if tok.kind in ("ident", "zero") or self.at_sym("("):
                t = App(t, self.atom())
            elif self.at_sym("@"):
                self.next()
                t = TyApp(t, self.ty_atom_unit())
            else:
                return t

    def atom(self) -> Term:
        tok = self.next()
        if tok.kind == "ident":
            return Var(tok.text)
        if tok.kind == "zero":
            return ZERO
        if tok.kind == "sym" and tok.text == "(":
            t = self.term()
            self.expect("sym", ")")
            return t
        raise ParseError(f"expected a term, found {tok.text or 'end of input'!r}", tok.pos)

    # -- types -------------------------------------------------------------

    def type_(self) -> Type:
        parts = [self.ty_arrow()]
        while self.at_sym("+"):
            self.next()
            parts.append(self.ty_arrow())
        return ty_join(parts)

    def ty_arrow(self) -> Type:
        tok = self.peek()
        left = self.ty_prefix()
        if self.peek().kind == "arrow":
            self.next()
            dom = self._require_unit(left, tok.pos)
            cod = self.ty_arrow()
            return ty_sum([Arrow(dom, cod)])
        return left

    def ty_prefix(self) -> Type:
        tok = self.peek()
        if tok.kind == "forall":
            self.next()
            var = self.expect("ident").text
            self.expect("sym", ".")
            body = self.ty_arrow()
            return ty_sum([Forall(var, self._require_unit(body, tok.pos))])
        return self.ty_atom()

    def ty_atom(self) -> Type:
        tok = self.next()
        if tok.kind == "ident":
            return ty_sum([TyVar(tok.text)])
        if tok.kind == "Zero":
            return ZERO_TYPE
        if tok.kind == "sym" and tok.text == "(":
            t = self.type_()
            self.expect("sym", ")")
            return t
        raise ParseError(f"expected a type, found {tok.text or 'end of input'!r}", tok.pos)

    def ty_atom_unit(self) -> UnitType:
        tok = self.peek()
        return self._require_unit(self.ty_atom(), tok.pos)

    def unit_type(self) -> UnitType:
        tok = self.peek()
        return self._require_unit(self.ty_arrow(), tok.pos)

    def _require_unit(self, t: Type, pos: int) -> UnitType:
        if isinstance(t, TySum) and len(t.units) == 1:
            return t.units[0]
        raise ParseError(f"expected a unit type, found {t}", pos)


def _finish(p: _Parser, pos_hint: str):
    tok = p.peek()
    if tok.kind != "eof":
        raise ParseError(f"trailing input after {pos_hint}: {tok.text!r}", tok.pos)


def parse_term(src: str) -> Term:
    """Parse a term; the result is canonical."""
    p = _Parser(src)
    t = p.term()
    _finish(p, "term")
    return canonical(t)


def parse_type(src: str) -> Type:
    """Parse a type; the result is canonical."""
    p = _Parser(src)
    t = p.type_()
    _finish(p, "type")
    return t


def parse_unit(src: str) -> UnitType:
    """Parse a type and require it to be a single unit summand."""
    p = _Parser(src)
    u = p.unit_type()
    _finish(p, "type")
    return u


def parse_context(src: str) -> Context:
    """Parse a context like ``x:U, y:V`` (unit-type bindings)."""
    src = src.strip()
    ctx: Context = {}
    if not src:
        return ctx
    p = _Parser(src)
    while True:
        name = p.expect("ident").text
        p.expect("sym", ":")
        ctx[name] = p.unit_type()
        if p.peek().kind == "eof":
            return ctx
        p.expect("sym", ",")
