"""Program contexts and term-level linking for both calculi."""
from __future__ import annotations

from .compiler import Z
from .errors import ScopeError, TypeCheckError
from .source import ctx_typecheck, typecheck
from .syntax import (
    HOLE, UNIT, UNIT_T, App, Arrow, Fix, Lam, Pair, Prod, Proj1, Proj2,
    SrcType, Term, ULam, Var, fresh, hole_binders, plug,
)
from .target import ctx_well_scoped, well_scoped

__all__ = [
    "plug", "plug_src", "plug_tgt", "hole_count", "ctx_typecheck", "ctx_well_scoped",
    "hole_binders", "link_src", "link_tgt", "linking_ctx",
]


def hole_count(c: Term) -> int:
    return c.holes


def _one_hole(c: Term) -> None:
    if c.holes != 1:
        raise ValueError(f"a context needs exactly one hole, found {c.holes}")


def plug_src(c: Term, t: Term) -> Term:
    _one_hole(c)
    return plug(c, t)


def plug_tgt(c: Term, t: Term) -> Term:
    _one_hole(c)
    return plug(c, t)


def _linker_names(t1: Term, t2: Term, x1: str, x2: str) -> tuple[str, str, str, str]:
    avoid = set(t1.fv | t2.fv | {x1, x2})
    names = []
    for base in ("p", "_", x1 + "'", x2 + "'"):
        n = fresh(base, avoid)
        avoid.add(n)
        names.append(n)
    return tuple(names)


def link_src(t1: Term, dom1: SrcType, cod1: SrcType, dom2: SrcType, cod2: SrcType,
             t2: Term, x1: str = "x1", x2: str = "x2") -> Term:
    """Link two mutually dependent components into a closed pair of functions.

    ``t1 : dom1 -> cod1`` may call ``x2``; ``t2 : dom2 -> cod2`` may call ``x1``.
    The knot is tied with a fixpoint over ``Unit -> pair``, and each component
    is eta-expanded so the recursive reference is only forced under a lambda.
    """
    f1, f2 = Arrow(dom1, cod1), Arrow(dom2, cod2)
    if not isinstance(t1, Lam) or not isinstance(t2, Lam):
        raise TypeCheckError("linked components must be lambdas", ())
    typecheck({x2: f2}, t1, f1)
    typecheck({x1: f1}, t2, f2)
    p, u, y1, y2 = _linker_names(t1, t2, x1, x2)
    pair_ty = Prod(f1, f2)
    knot = App(Var(p), UNIT)
    body = Pair(
        Lam(y1, dom1, App(App(Lam(x2, f2, t1), Proj2(knot)), Var(y1))),
        Lam(y2, dom2, App(App(Lam(x1, f1, t2), Proj1(knot)), Var(y2))),
    )
    gen = Lam(p, Arrow(UNIT_T, pair_ty), Lam(u, UNIT_T, body))
    return App(Fix(UNIT_T, pair_ty, gen), UNIT)


def link_tgt(t1: Term, t2: Term, x1: str = "x1", x2: str = "x2") -> Term:
    """Untyped counterpart of ``link_src`` built on the Z combinator.

    Only scoping is required of the components (``x2`` may be free in ``t1``,
    ``x1`` in ``t2``); modular compilation outputs are applications, not
    lambdas, and still link fine.
    """
    if not t1.fv <= {x2}:
        raise ScopeError(f"first component may only refer to {x2}", t1.fv - {x2})
    if not t2.fv <= {x1}:
        raise ScopeError(f"second component may only refer to {x1}", t2.fv - {x1})
    p, u, y1, y2 = _linker_names(t1, t2, x1, x2)
    knot = App(Var(p), UNIT)
    body = Pair(
        ULam(y1, App(App(ULam(x2, t1), Proj2(knot)), Var(y1))),
        ULam(y2, App(App(ULam(x1, t2), Proj1(knot)), Var(y2))),
    )
    return App(App(Z, ULam(p, ULam(u, body))), UNIT)


def linking_ctx(t2: Term, x1: str = "x1", x2: str = "x2") -> Term:
    """The target context that links whatever is plugged in against ``t2``."""
    return link_tgt(HOLE, t2, x1, x2)


def is_closed_tgt(t: Term) -> bool:
    return well_scoped((), t)
