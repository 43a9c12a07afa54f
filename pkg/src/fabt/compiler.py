"""The two compiler passes: type erasure and the protect/confine wrappers."""
from __future__ import annotations

from functools import lru_cache

from .errors import TypeCheckError
from .source import typecheck
from .syntax import (
    FALSE, TRUE, UNIT, App, Arrow, BoolTy, Case, Fix, Hole, If, Inl, Inr, Lam,
    Pair, Prod, Proj1, Proj2, Seq, SrcType, Sum, Term, TrueV, ULam, UnitTy, UnitV,
    FalseV, Var, Wrong, children, fresh, subst, type_depth, with_children,
)


def _z() -> Term:
    inner = ULam("x", App(Var("f"), ULam("y", App(App(Var("x"), Var("x")), Var("y")))))
    return ULam("f", App(inner, inner))


Z = _z()


def z_combinator() -> Term:
    """The call-by-value fixpoint combinator used to encode ``fix``."""
    return Z


def erase(t: Term) -> Term:
    """Drop every type annotation; ``fix`` becomes an application of Z."""
    memo: dict[int, Term] = {}

    def go(u: Term) -> Term:
        key = id(u)
        hit = memo.get(key)
        if hit is not None:
            return hit
        match u:
            case Lam(x, _, body):
                out = ULam(x, go(body))
            case Fix(_, _, e):
                out = App(Z, go(e))
            case UnitV() | TrueV() | FalseV() | Var() | Hole():
                out = u
            case ULam() | Wrong():
                raise TypeCheckError(f"{type(u).__name__} is not a source construct")
            case _:
                out = with_children(u, tuple(go(c) for c in children(u)))
        memo[key] = out
        return out

    return go(t)


def _names(ty: SrcType) -> tuple[str, str]:
    d = type_depth(ty)
    return ("y", "x") if d == 0 else (f"y{d}", f"x{d}")


@lru_cache(maxsize=None)
def protect(ty: SrcType) -> Term:
    """Wrapper that lets a compiled value only be used as ``ty`` allows."""
    y, x = _names(ty)
    match ty:
        case UnitTy() | BoolTy():
            return ULam("x", Var("x"))
        case Prod(a, b):
            return ULam(y, Pair(App(protect(a), Proj1(Var(y))), App(protect(b), Proj2(Var(y)))))
        case Sum(a, b):
            return ULam(y, Case(Var(y), x, Inl(App(protect(a), Var(x))),
                                x, Inr(App(protect(b), Var(x)))))
        case Arrow(a, b):
            return ULam(y, ULam(x, App(protect(b), App(Var(y), App(confine(a), Var(x))))))
    raise TypeError(f"not a source type: {ty!r}")


@lru_cache(maxsize=None)
def confine(ty: SrcType) -> Term:
    """Wrapper that makes an incoming value behave as a ``ty`` (or go wrong)."""
    y, x = _names(ty)
    match ty:
        case UnitTy():
            return ULam("y", Seq(Var("y"), UNIT))
        case BoolTy():
            return ULam("y", If(Var("y"), TRUE, FALSE))
        case Prod(a, b):
            return ULam(y, Pair(App(confine(a), Proj1(Var(y))), App(confine(b), Proj2(Var(y)))))
        case Sum(a, b):
            return ULam(y, Case(Var(y), x, Inl(App(confine(a), Var(x))),
                                x, Inr(App(confine(b), Var(x)))))
        case Arrow(a, b):
            return ULam(y, ULam(x, App(confine(b), App(Var(y), App(protect(a), Var(x))))))
    raise TypeError(f"not a source type: {ty!r}")


def compile_term(t: Term, ty: SrcType) -> Term:
    """Whole-program compilation of a closed term of type ``ty``."""
    typecheck({}, t, ty)
    return App(protect(ty), erase(t))


def compile_modular(t1: Term, dom1: SrcType, cod1: SrcType, free: str,
                    dom2: SrcType, cod2: SrcType) -> Term:
    """Compile a component ``t1 : dom1 -> cod1`` that imports ``free : dom2 -> cod2``.

    The import stays free in the output and is confined before use.
    """
    if not isinstance(t1, Lam):
        raise TypeCheckError("modular compilation expects a lambda", ())
    typecheck({free: Arrow(dom2, cod2)}, t1, Arrow(dom1, cod1))
    x, body = t1.name, t1.body
    if x == free:
        x2 = fresh(x + "'", body.fv | {free})
        body = subst(body, x, Var(x2))
        x = x2
    inner = App(ULam(free, erase(body)), App(confine(Arrow(dom2, cod2)), Var(free)))
    return App(protect(Arrow(dom1, cod1)), ULam(x, inner))
