"""Pretty printer for types, terms and contexts of both calculi.

Precedence, loosest first:

    0  t ; t            right-associative
    1  \\x. t, if, case  bodies extend as far right as possible
    2  fst/snd/inl/inr/fix [T] t
    3  application      left-associative
    4  atoms            unit true false wrong HOLE x <t, t> (t)

Types: ``->`` (right, loosest), then ``+`` (right), then ``*`` (right).
Parentheses are only added where the table requires them, and
``parse(show(t))`` is alpha-equal to ``t``.
"""
from __future__ import annotations

from .syntax import (
    App, Arrow, BoolTy, Case, FalseV, Fix, Hole, If, Inl, Inr, Lam, Pair, Prod,
    Proj1, Proj2, Seq, SrcType, Sum, TMeta, Term, TrueV, ULam, UnitTy, UnitV, Var,
    Wrong,
)


def show_type(ty: SrcType, level: int = 0) -> str:
    match ty:
        case UnitTy():
            return "Unit"
        case BoolTy():
            return "Bool"
        case TMeta(i):
            return f"?{i}"
        case Arrow(a, b):
            s, own = f"{show_type(a, 1)} -> {show_type(b, 0)}", 0
        case Sum(a, b):
            s, own = f"{show_type(a, 2)} + {show_type(b, 1)}", 1
        case Prod(a, b):
            s, own = f"{show_type(a, 3)} * {show_type(b, 2)}", 2
        case _:
            raise TypeError(f"not a type: {ty!r}")
    return f"({s})" if own < level else s


def _level(t: Term) -> int:
    match t:
        case Seq():
            return 0
        case Lam() | ULam() | If() | Case():
            return 1
        case Proj1() | Proj2() | Inl() | Inr() | Fix():
            return 2
        case App():
            return 3
    return 4


def show(t: Term) -> str:
    """Concrete syntax for a term or context of either language."""
    out: list[str] = []
    _emit(t, 0, out)
    return "".join(out)


def _emit(t: Term, level: int, out: list[str]) -> None:
    paren = _level(t) < level
    if paren:
        out.append("(")
    match t:
        case UnitV():
            out.append("unit")
        case TrueV():
            out.append("true")
        case FalseV():
            out.append("false")
        case Wrong():
            out.append("wrong")
        case Hole():
            out.append("HOLE")
        case Var(x):
            out.append(x)
        case Pair(a, b):
            out.append("<")
            _emit(a, 0, out)
            out.append(", ")
            _emit(b, 0, out)
            out.append(">")
        case App(f, a):
            _emit(f, 3, out)
            out.append(" ")
            _emit(a, 4, out)
        case Proj1(e) | Proj2(e) | Inl(e) | Inr(e):
            kw = {Proj1: "fst", Proj2: "snd", Inl: "inl", Inr: "inr"}[type(t)]
            out.append(kw + " ")
            _emit(e, 2, out)
        case Fix(dom, cod, e):
            out.append(f"fix [{show_type(Arrow(dom, cod))}] ")
            _emit(e, 2, out)
        case Lam(x, ty, body):
            out.append(f"\\{x}:{show_type(ty)}. ")
            _emit(body, 0, out)
        case ULam(x, body):
            out.append(f"\\{x}. ")
            _emit(body, 0, out)
        case If(c, a, b):
            out.append("if ")
            _emit(c, 0, out)
            out.append(" then ")
            _emit(a, 0, out)
            out.append(" else ")
            _emit(b, 0, out)
        case Case(s, x, l, y, r):
            out.append("case ")
            _emit(s, 0, out)
            out.append(f" of inl {x} => ")
            _emit(l, 0, out)
            out.append(f" | inr {y} => ")
            _emit(r, 0, out)
        case Seq(a, b):
            _emit(a, 2, out)
            out.append("; ")
            _emit(b, 0, out)
        case _:
            raise TypeError(f"not a term: {t!r}")
    if paren:
        out.append(")")


show_src = show
show_tgt = show
