"""Recursive-descent parser for the concrete syntax described in ``printer``.

``parse_src`` reads the typed language (``\\x:T. t``, ``fix [T] t``),
``parse_tgt`` the untyped one (``\\x. t``, ``wrong``).  A text with one
``HOLE`` denotes a context; two or more holes are rejected.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ParseError
from .syntax import (
    BOOL_T, FALSE, HOLE, TRUE, UNIT, UNIT_T, WRONG, App, Arrow, Case, Fix, If,
    Inl, Inr, Lam, Pair, Prod, Proj1, Proj2, Seq, SrcType, Sum, Term, ULam, Var,
)

KEYWORDS = {
    "unit", "true", "false", "wrong", "HOLE", "fst", "snd", "inl", "inr", "case",
    "of", "if", "then", "else", "fix", "Unit", "Bool",
}

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+|\#[^\n]*)
  | (?P<nl>\n)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<sym>=>|->|[\\.:()<>,;|\[\]*+])
""", re.VERBOSE)

# what may start a term, for error messages
_TERM_START = ("unit", "true", "false", "HOLE", "identifier", "(", "<", "\\", "fst", "snd",
               "inl", "inr", "case", "if")


@dataclass(frozen=True)
class Tok:
    kind: str  # "ident", "kw", "sym", "eof"
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Tok]:
    toks: list[Tok] = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        s = m.group()
        if kind == "nl":
            line, col = line + 1, 1
        elif kind != "ws":
            if kind == "ident" and s in KEYWORDS:
                kind = "kw"
            toks.append(Tok(kind, s, line, col))
            col += len(s)
        else:
            col += len(s)
        pos = m.end()
    toks.append(Tok("eof", "<end of input>", line, col))
    return toks


class _Parser:
    def __init__(self, text: str, lang: str):
        self.toks = tokenize(text)
        self.i = 0
        self.lang = lang

    # -- helpers ----------------------------------------------------------
    @property
    def tok(self) -> Tok:
        return self.toks[self.i]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("kw", "sym") and t.text == text

    def error(self, msg: str, expected=()) -> ParseError:
        t = self.tok
        return ParseError(f"{msg}, found {t.text!r}", t.line, t.col, expected)

    def expect(self, text: str) -> Tok:
        if not self.at(text):
            raise self.error(f"expected {text!r}", (text,))
        t = self.tok
        self.i += 1
        return t

    def ident(self) -> str:
        t = self.tok
        if t.kind != "ident":
            raise self.error("expected an identifier", ("identifier",))
        self.i += 1
        return t.text

    # -- types -------------------------------------------------------------
    def ty(self) -> SrcType:
        left = self.ty_sum()
        if self.at("->"):
            self.i += 1
            return Arrow(left, self.ty())
        return left

    def ty_sum(self) -> SrcType:
        left = self.ty_prod()
        if self.at("+"):
            self.i += 1
            return Sum(left, self.ty_sum())
        return left

    def ty_prod(self) -> SrcType:
        left = self.ty_atom()
        if self.at("*"):
            self.i += 1
            return Prod(left, self.ty_prod())
        return left

    def ty_atom(self) -> SrcType:
        if self.at("Unit"):
            self.i += 1
            return UNIT_T
        if self.at("Bool"):
            self.i += 1
            return BOOL_T
        if self.at("("):
            self.i += 1
            t = self.ty()
            self.expect(")")
            return t
        raise self.error("expected a type", ("Unit", "Bool", "("))

    # -- terms -------------------------------------------------------------
    def seq(self) -> Term:
        if self.starts_open():
            return self.open_()
        left = self.prefix()
        if self.at(";"):
            self.i += 1
            return Seq(left, self.seq())
        return left

    def starts_open(self) -> bool:
        return self.at("\\") or self.at("if") or self.at("case")

    def open_(self) -> Term:
        if self.at("\\"):
            self.i += 1
            x = self.ident()
            if self.lang == "src":
                self.expect(":")
                ty = self.ty()
                self.expect(".")
                return Lam(x, ty, self.seq())
            if self.at(":"):
                raise self.error("type annotations are not part of the untyped language", ("."))
            self.expect(".")
            return ULam(x, self.seq())
        if self.at("if"):
            self.i += 1
            c = self.seq()
            self.expect("then")
            a = self.seq()
            self.expect("else")
            return If(c, a, self.seq())
        self.expect("case")
        s = self.seq()
        self.expect("of")
        self.expect("inl")
        x = self.ident()
        self.expect("=>")
        left = self.seq()
        self.expect("|")
        self.expect("inr")
        y = self.ident()
        self.expect("=>")
        return Case(s, x, left, y, self.seq())

    def prefix(self) -> Term:
        t = self.tok
        if t.kind == "kw" and t.text in ("fst", "snd", "inl", "inr"):
            self.i += 1
            arg = self.prefix_operand()
            return {"fst": Proj1, "snd": Proj2, "inl": Inl, "inr": Inr}[t.text](arg)
        if self.at("fix"):
            if self.lang != "src":
                raise self.error("fix is not part of the untyped language")
            self.i += 1
            self.expect("[")
            ty = self.ty()
            self.expect("]")
            if not isinstance(ty, Arrow):
                raise ParseError("fix needs a function type", t.line, t.col)
            return Fix(ty.dom, ty.cod, self.prefix_operand())
        return self.app()

    def prefix_operand(self) -> Term:
        if self.starts_open():
            raise self.error("parenthesise a lambda, if or case used as an operand", ("(",))
        return self.prefix()

    def app(self) -> Term:
        t = self.atom()
        while self.starts_atom():
            t = App(t, self.atom())
        return t

    def starts_atom(self) -> bool:
        t = self.tok
        if t.kind == "ident":
            return True
        if t.kind == "kw":
            return t.text in ("unit", "true", "false", "wrong", "HOLE")
        return t.kind == "sym" and t.text in ("(", "<")

    def atom(self) -> Term:
        t = self.tok
        if t.kind == "ident":
            self.i += 1
            return Var(t.text)
        if t.kind == "kw":
            if t.text in ("unit", "true", "false", "HOLE"):
                self.i += 1
                return {"unit": UNIT, "true": TRUE, "false": FALSE, "HOLE": HOLE}[t.text]
            if t.text == "wrong":
                if self.lang != "tgt":
                    raise self.error("wrong is not part of the typed language")
                self.i += 1
                return WRONG
        if self.at("("):
            self.i += 1
            inner = self.seq()
            self.expect(")")
            return inner
        if self.at("<"):
            self.i += 1
            a = self.seq()
            self.expect(",")
            b = self.seq()
            self.expect(">")
            return Pair(a, b)
        expected = _TERM_START + (("fix",) if self.lang == "src" else ("wrong",))
        raise self.error("expected a term", expected)

    def top(self) -> Term:
        t = self.seq()
        if self.tok.kind != "eof":
            raise self.error("unexpected trailing input", (";", "end of input"))
        return t


def _parse(text: str, lang: str) -> Term:
    p = _Parser(text, lang)
    t = p.top()
    if t.holes > 1:
        holes = [k for k in p.toks if k.text == "HOLE"]
        raise ParseError(f"a context may contain only one HOLE, found {t.holes}",
                         holes[1].line, holes[1].col)
    return t


def parse_src(text: str) -> Term:
    return _parse(text, "src")


def parse_tgt(text: str) -> Term:
    return _parse(text, "tgt")


def parse_type(text: str) -> SrcType:
    p = _Parser(text, "src")
    ty = p.ty()
    if p.tok.kind != "eof":
        raise p.error("unexpected trailing input", ("end of input",))
    return ty
