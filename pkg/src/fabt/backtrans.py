"""Approximate back-translation of target contexts into the source language.

``UVal n`` approximates the unitype of target values up to depth ``n``:

    UVal 0     = Unit
    UVal (n+1) = Unit + (Unit + (Bool + (U*U + ((U+U) + (U -> U)))))   with U = UVal n

The six slots are, in order, unk, Unit, Bool, product, sum and function.  Every
generator here is memoised and builds its result bottom-up, so terms for large
``n`` share their subterms instead of being copied and no generator recurses
on ``n``.
"""
from __future__ import annotations

from enum import IntEnum
from functools import lru_cache

from .syntax import (
    BOOL_T, HOLE, UNIT, UNIT_T, App, Arrow, BoolTy, Case, FalseV, Fix, Hole, If,
    Inl, Inr, Lam, Pair, Prod, Proj1, Proj2, Seq, SrcType, Sum, Term, TrueV,
    ULam, UnitTy, UnitV, Var, Wrong, no_gc, plug,
)


class Tag(IntEnum):
    UNK = 0
    UNIT = 1
    BOOL = 2
    PROD = 3
    SUM = 4
    ARROW = 5


_uval: list[SrcType] = [UNIT_T]


def uval_type(n: int) -> SrcType:
    if n < 0:
        raise ValueError("UVal index must be non-negative")
    while len(_uval) <= n:
        u = _uval[-1]
        _uval.append(Sum(UNIT_T, Sum(UNIT_T, Sum(BOOL_T, Sum(Prod(u, u), Sum(Sum(u, u), Arrow(u, u)))))))
    return _uval[n]


def slot_type(tag: Tag, n: int) -> SrcType:
    """Payload type of ``tag`` inside ``UVal (n+1)``."""
    u = uval_type(n)
    return (UNIT_T, UNIT_T, BOOL_T, Prod(u, u), Sum(u, u), Arrow(u, u))[tag]


def in_uval(tag: Tag, n: int, payload: Term | None = None) -> Term:
    """Inject ``payload`` into slot ``tag`` of ``UVal (n+1)``."""
    tag = Tag(tag)
    if (payload is None) != (tag is Tag.UNK):
        raise ValueError("payload must be given exactly when the tag is not unk")
    t = UNIT if payload is None else payload
    if tag < Tag.ARROW:
        t = Inl(t)
    for _ in range(int(tag)):
        t = Inr(t)
    return t


def unk_uval(n: int) -> Term:
    return UNIT if n == 0 else in_uval(Tag.UNK, n - 1)


@lru_cache(maxsize=None)
def omega(ty: SrcType) -> Term:
    """A closed divergent term of type ``ty``."""
    f = Arrow(UNIT_T, ty)
    return App(Fix(UNIT_T, ty, Lam("x", f, Var("x"))), UNIT)


def _dispatch(scrut: Term, branches: list[tuple[str, Term]], rest: str = "x") -> Term:
    """Six-way case over a UVal (n+1) scrutinee; ``branches[k]`` handles slot k."""
    name, body = branches[5]
    out = Case(Var(rest), branches[4][0], branches[4][1], name, body)
    for k in range(3, 0, -1):
        out = Case(Var(rest), branches[k][0], branches[k][1], rest, out)
    return Case(scrut, branches[0][0], branches[0][1], rest, out)


def _result_type(tag: Tag, n: int) -> SrcType:
    if tag is Tag.ARROW:
        return uval_type(n)
    return slot_type(tag, n)


@lru_cache(maxsize=None)
def case_uval(tag: Tag, n: int) -> Term:
    """Destructor for slot ``tag`` of ``UVal (n+1)``; any other slot diverges.

    The function slot takes the argument too: ``\\x. \\y. case x of fun z -> z y``.
    """
    tag = Tag(tag)
    if tag is Tag.UNK:
        raise ValueError("unk has no destructor")
    miss = omega(_result_type(tag, n))
    if tag is Tag.ARROW:
        hit = ("z", App(Var("z"), Var("y")))
    else:
        hit = ("v", Var("v"))
    branches = [("w", miss)] * 6
    branches[tag] = hit
    body = _dispatch(Var("x"), branches)
    if tag is Tag.ARROW:
        body = Lam("y", uval_type(n), body)
    return Lam("x", uval_type(n + 1), body)


class _Coercions:
    """downgrade(m, d) and upgrade(m, d) for a fixed gap ``d``, grown level by level."""

    def __init__(self, d: int):
        self.d = d
        self.down = [Lam("v", uval_type(d), unk_uval(0))]
        self.up = [Lam("x", uval_type(0), unk_uval(d))]

    def extend(self, n: int) -> None:
        d = self.d
        if len(self.down) > n:
            return
        with no_gc():
            self._grow(n, d)

    def _grow(self, n: int, d: int) -> None:
        while len(self.down) <= n:
            m = len(self.down) - 1
            self.down.append(self._level(m, m + d + 1, self.down[m], self.up[m]))
            self.up.append(self._level(m + d, m + 1, self.up[m], self.down[m]))

    @staticmethod
    def _level(out_n: int, in_level: int, same: Term, other: Term) -> Term:
        # \x:UVal in_level. case x of each slot -> rebuilt slot of UVal (out_n+1),
        # recursing with `same` on payloads and `other` contravariantly on arguments
        y = Var("y")
        branches = [
            ("w", in_uval(Tag.UNK, out_n)),
            ("y", in_uval(Tag.UNIT, out_n, y)),
            ("y", in_uval(Tag.BOOL, out_n, y)),
            ("y", in_uval(Tag.PROD, out_n, Pair(App(same, Proj1(y)), App(same, Proj2(y))))),
            ("y", in_uval(Tag.SUM, out_n, Case(y, "x", Inl(App(same, Var("x"))),
                                                "x", Inr(App(same, Var("x")))))),
            ("y", in_uval(Tag.ARROW, out_n,
                          Lam("z", uval_type(out_n),
                              App(same, App(y, App(other, Var("z"))))))),
        ]
        return Lam("x", uval_type(in_level), _dispatch(Var("x"), branches))


_coercions: dict[int, _Coercions] = {}


def _co(n: int, d: int) -> _Coercions:
    if n < 0 or d < 0:
        raise ValueError("indices must be non-negative")
    c = _coercions.get(d)
    if c is None:
        c = _coercions[d] = _Coercions(d)
    c.extend(n)
    return c


def downgrade(n: int, d: int) -> Term:
    """``UVal (n+d) -> UVal n``: forget the top ``d`` levels of precision."""
    return _co(n, d).down[n]


def upgrade(n: int, d: int) -> Term:
    """``UVal n -> UVal (n+d)``; precision lost at level 0 becomes unk."""
    return _co(n, d).up[n]


def emulate(n: int, t: Term) -> Term:
    """Translate a target term (or context) into a source term of type ``UVal n``.

    Free variables keep their names and are expected to have type ``UVal n``.
    """
    if n < 0:
        raise ValueError("emulation depth must be non-negative")
    down = downgrade(n, 1)
    up = upgrade(n, 1)
    memo: dict[int, Term] = {}

    def build(tag: Tag, payload: Term | None) -> Term:
        return App(down, in_uval(tag, n, payload))

    def elim(tag: Tag, e: Term) -> Term:
        return App(case_uval(tag, n), App(up, go(e)))

    def go(u: Term) -> Term:
        key = id(u)
        hit = memo.get(key)
        if hit is not None:
            return hit
        match u:
            case UnitV():
                out = build(Tag.UNIT, UNIT)
            case TrueV() | FalseV():
                out = build(Tag.BOOL, u)
            case Var():
                out = u
            case ULam(x, body):
                out = build(Tag.ARROW, Lam(x, uval_type(n), go(body)))
            case App(f, a):
                out = App(elim(Tag.ARROW, f), go(a))
            case Pair(a, b):
                out = build(Tag.PROD, Pair(go(a), go(b)))
            case Inl(e):
                out = build(Tag.SUM, Inl(go(e)))
            case Inr(e):
                out = build(Tag.SUM, Inr(go(e)))
            case Proj1(e):
                out = Proj1(elim(Tag.PROD, e))
            case Proj2(e):
                out = Proj2(elim(Tag.PROD, e))
            case Seq(a, b):
                out = Seq(elim(Tag.UNIT, a), go(b))
            case Case(s, x, l, y, r):
                out = Case(elim(Tag.SUM, s), x, go(l), y, go(r))
            case If(c, a, b):
                out = If(elim(Tag.BOOL, c), go(a), go(b))
            case Wrong():
                out = omega(uval_type(n))
            case Hole():
                out = u
            case _:
                raise ValueError(f"{type(u).__name__} is not a target construct")
        memo[key] = out
        return out

    return go(t)


def emulate_ctx(n: int, c: Term) -> Term:
    if c.holes != 1:
        raise ValueError(f"a context needs exactly one hole, found {c.holes}")
    return emulate(n, c)


@lru_cache(maxsize=None)
def inject(ty: SrcType, n: int) -> Term:
    """``ty -> UVal n``."""
    if n == 0:
        return Lam("x", ty, omega(uval_type(0)))
    m = n - 1
    x = Var("x")
    match ty:
        case UnitTy():
            body = in_uval(Tag.UNIT, m, x)
        case BoolTy():
            body = in_uval(Tag.BOOL, m, x)
        case Arrow(a, b):
            body = in_uval(Tag.ARROW, m, Lam("z", uval_type(m),
                                              App(inject(b, m), App(x, App(extract(a, m), Var("z"))))))
        case Prod(a, b):
            body = in_uval(Tag.PROD, m, Pair(App(inject(a, m), Proj1(x)), App(inject(b, m), Proj2(x))))
        case Sum(a, b):
            body = in_uval(Tag.SUM, m, Case(x, "y", Inl(App(inject(a, m), Var("y"))),
                                            "y", Inr(App(inject(b, m), Var("y")))))
        case _:
            raise ValueError(f"not a source type: {ty!r}")
    return Lam("x", ty, body)


@lru_cache(maxsize=None)
def extract(ty: SrcType, n: int) -> Term:
    """``UVal n -> ty``."""
    if n == 0:
        return Lam("x", uval_type(0), omega(ty))
    m = n - 1
    x = Var("x")
    match ty:
        case UnitTy():
            body = App(case_uval(Tag.UNIT, m), x)
        case BoolTy():
            body = App(case_uval(Tag.BOOL, m), x)
        case Arrow(a, b):
            body = Lam("y", a, App(extract(b, m),
                                   App(App(case_uval(Tag.ARROW, m), x), App(inject(a, m), Var("y")))))
        case Prod(a, b):
            pr = App(case_uval(Tag.PROD, m), x)
            body = Pair(App(extract(a, m), Proj1(pr)), App(extract(b, m), Proj2(pr)))
        case Sum(a, b):
            body = Case(App(case_uval(Tag.SUM, m), x), "y", Inl(App(extract(a, m), Var("y"))),
                        "y", Inr(App(extract(b, m), Var("y"))))
        case _:
            raise ValueError(f"not a source type: {ty!r}")
    return Lam("x", uval_type(n), body)


def backtranslate(c: Term, ty: SrcType, n: int) -> Term:
    """The depth-``n`` source approximation of target context ``c`` at hole type ``ty``.

    The result is a source context whose hole expects a ``ty`` and whose
    outside has type ``UVal n``.
    """
    if n < 1:
        raise ValueError("back-translation depth must be at least 1")
    return plug(emulate_ctx(n, c), App(inject(ty, n), HOLE))
