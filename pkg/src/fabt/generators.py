"""Deterministic generators: types, well-typed source terms and contexts,
first-order values, and well-scoped target terms and contexts.

Target contexts are handled combinatorially.  ``ContextSpace`` counts the
terms of each size and maps integers to terms ("unranking"), so the same code
enumerates all contexts of a size in canonical order and draws uniformly random
ones.  Bound variables are named canonically by their binding depth, which
makes the enumeration free of alpha-duplicates.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator

from .syntax import (
    BOOL_T, FALSE, HOLE, TRUE, UNIT, UNIT_T, WRONG, App, Arrow, BoolTy, Case,
    Fix, If, Inl, Inr, Lam, Pair, Prod, Proj1, Proj2, Seq, SrcType, Sum, Term,
    ULam, UnitTy, Var, children, with_children,
)

# --------------------------------------------------------------------------
# Types and values
# --------------------------------------------------------------------------


def random_type(rng: random.Random, max_depth: int, first_order: bool = False) -> SrcType:
    if max_depth == 0 or rng.random() < 0.3:
        return UNIT_T if rng.random() < 0.4 else BOOL_T
    kinds = ["prod", "sum"] if first_order else ["arrow", "prod", "sum"]
    k = rng.choice(kinds)
    a = random_type(rng, max_depth - 1, first_order)
    b = random_type(rng, max_depth - 1, first_order)
    return {"arrow": Arrow, "prod": Prod, "sum": Sum}[k](a, b)


def random_value(rng: random.Random, ty: SrcType) -> Term:
    """A random closed value of first-order type ``ty``."""
    match ty:
        case UnitTy():
            return UNIT
        case BoolTy():
            return rng.choice((TRUE, FALSE))
        case Prod(a, b):
            return Pair(random_value(rng, a), random_value(rng, b))
        case Sum(a, b):
            return Inl(random_value(rng, a)) if rng.random() < 0.5 else Inr(random_value(rng, b))
    raise ValueError(f"no random values for {ty!r}")


def all_values(ty: SrcType) -> list[Term]:
    """Every value of a first-order type, in a fixed order."""
    match ty:
        case UnitTy():
            return [UNIT]
        case BoolTy():
            return [TRUE, FALSE]
        case Prod(a, b):
            return [Pair(x, y) for x in all_values(a) for y in all_values(b)]
        case Sum(a, b):
            return [Inl(x) for x in all_values(a)] + [Inr(y) for y in all_values(b)]
    raise ValueError(f"{ty!r} is not first-order")


# --------------------------------------------------------------------------
# Well-typed source terms
# --------------------------------------------------------------------------

_NAMES = ("a", "b", "c", "f", "g", "x", "y", "z")


@dataclass
class SrcGen:
    """Type-directed random generator for closed (or open) well-typed source terms.

    ``sites`` collects, for the last generated term, the path, type and
    environment of every generated subterm, which ``random_src_context`` uses
    to cut out a hole.
    """

    rng: random.Random
    fix_rate: float = 0.1
    max_aux_depth: int = 1
    sites: list = field(default_factory=list)

    def term(self, ty: SrcType, size: int, env: dict | None = None) -> Term:
        self.sites = []
        return self._gen(ty, dict(env or {}), size, ())

    def _aux_type(self) -> SrcType:
        return random_type(self.rng, self.max_aux_depth)

    def _gen(self, ty: SrcType, env: dict, size: int, path: tuple) -> Term:
        self.sites.append((path, ty, env))
        rng = self.rng
        if size <= 1 or rng.random() < 0.15:
            return self._leaf(ty, env, path)
        base = isinstance(ty, (UnitTy, BoolTy))
        if rng.random() < (0.1 if base else 0.5):
            return self._intro(ty, env, size, path)
        return self._elim(ty, env, size, path)

    def _leaf(self, ty: SrcType, env: dict, path: tuple) -> Term:
        vars_ = sorted(x for x, t in env.items() if t == ty)
        if vars_ and self.rng.random() < 0.6:
            return Var(self.rng.choice(vars_))
        return self._small(ty, env)

    def _small(self, ty: SrcType, env: dict) -> Term:
        rng = self.rng
        match ty:
            case UnitTy():
                return UNIT
            case BoolTy():
                return rng.choice((TRUE, FALSE))
            case Arrow(a, b):
                x = rng.choice(_NAMES)
                return Lam(x, a, self._leaf(b, {**env, x: a}, ()))
            case Prod(a, b):
                return Pair(self._leaf(a, env, ()), self._leaf(b, env, ()))
            case Sum(a, b):
                if rng.random() < 0.5:
                    return Inl(self._leaf(a, env, ()))
                return Inr(self._leaf(b, env, ()))
        raise ValueError(ty)

    def _split(self, size: int, parts: int) -> list[int]:
        total = max(size - 1, parts)
        cuts = sorted(self.rng.randint(1, total - 1) for _ in range(parts - 1)) if parts > 1 else []
        bounds = [0] + cuts + [total]
        return [max(1, bounds[i + 1] - bounds[i]) for i in range(parts)]

    def _intro(self, ty: SrcType, env: dict, size: int, path: tuple) -> Term:
        rng = self.rng
        match ty:
            case UnitTy():
                return UNIT
            case BoolTy():
                return rng.choice((TRUE, FALSE))
            case Arrow(a, b):
                if rng.random() < self.fix_rate:
                    f, x = rng.sample(_NAMES, 2)
                    inner = {**env, f: ty, x: a}
                    body = self._gen(b, inner, size - 3, path + (0, 0, 0))
                    return Fix(a, b, Lam(f, ty, Lam(x, a, body)))
                x = rng.choice(_NAMES)
                return Lam(x, a, self._gen(b, {**env, x: a}, size - 1, path + (0,)))
            case Prod(a, b):
                s1, s2 = self._split(size, 2)
                return Pair(self._gen(a, env, s1, path + (0,)), self._gen(b, env, s2, path + (1,)))
            case Sum(a, b):
                if rng.random() < 0.5:
                    return Inl(self._gen(a, env, size - 1, path + (0,)))
                return Inr(self._gen(b, env, size - 1, path + (0,)))
        raise ValueError(ty)

    def _elim(self, ty: SrcType, env: dict, size: int, path: tuple) -> Term:
        rng = self.rng
        k = rng.choice(("app", "app", "if", "seq", "case", "proj"))
        if k == "app":
            a = self._aux_type()
            s1, s2 = self._split(size, 2)
            return App(self._gen(Arrow(a, ty), env, s1, path + (0,)),
                       self._gen(a, env, s2, path + (1,)))
        if k == "if":
            s1, s2, s3 = self._split(size, 3)
            return If(self._gen(BOOL_T, env, s1, path + (0,)), self._gen(ty, env, s2, path + (1,)),
                      self._gen(ty, env, s3, path + (2,)))
        if k == "seq":
            s1, s2 = self._split(size, 2)
            return Seq(self._gen(UNIT_T, env, s1, path + (0,)), self._gen(ty, env, s2, path + (1,)))
        if k == "case":
            a, b = self._aux_type(), self._aux_type()
            x, y = rng.choice(_NAMES), rng.choice(_NAMES)
            s1, s2, s3 = self._split(size, 3)
            return Case(self._gen(Sum(a, b), env, s1, path + (0,)),
                        x, self._gen(ty, {**env, x: a}, s2, path + (1,)),
                        y, self._gen(ty, {**env, y: b}, s3, path + (2,)))
        other = self._aux_type()
        if rng.random() < 0.5:
            return Proj1(self._gen(Prod(ty, other), env, size - 1, path + (0,)))
        return Proj2(self._gen(Prod(other, ty), env, size - 1, path + (0,)))


def replace_at(t: Term, path: tuple, new: Term) -> Term:
    if not path:
        return new
    kids = list(children(t))
    kids[path[0]] = replace_at(kids[path[0]], path[1:], new)
    return with_children(t, kids)


def random_src_context(rng: random.Random, outer_ty: SrcType, size: int):
    """A random well-typed source context.

    Returns ``(ctx, inner_env, inner_ty)``: the hole sits where a generated
    subterm of type ``inner_ty`` under ``inner_env`` used to be.
    """
    g = SrcGen(rng)
    t = g.term(outer_ty, size)
    path, ty, env = rng.choice(g.sites)
    return replace_at(t, path, HOLE), env, ty


# --------------------------------------------------------------------------
# Target terms and contexts, by counting and unranking
# --------------------------------------------------------------------------


def canonical_name(depth: int) -> str:
    return f"v{depth}"


_LEAVES = (UNIT, TRUE, FALSE, WRONG)
_UNARY = (Proj1, Proj2, Inl, Inr)
_BINARY = (App, Pair, Seq)


class ContextSpace:
    """All well-scoped target terms with a given size and number of holes.

    ``count(s, k, h)`` is the number of terms of ``s`` nodes, with ``k``
    variables in scope and ``h`` holes (0 or 1); ``unrank`` maps an index in
    ``range(count)`` to the term, in a fixed canonical order.
    """

    def __init__(self, with_wrong: bool = True):
        self.leaves = _LEAVES if with_wrong else _LEAVES[:3]
        self.count = lru_cache(maxsize=None)(self._count)

    def _splits2(self, s, h):
        for a in range(1, s - 1):
            b = s - 1 - a
            for ha in ((0,) if h == 0 else (1, 0)):
                yield a, b, ha, h - ha

    def _splits3(self, s, h):
        for a in range(1, s - 2):
            for b in range(1, s - 1 - a):
                c = s - 1 - a - b
                opts = ((0, 0, 0),) if h == 0 else ((1, 0, 0), (0, 1, 0), (0, 0, 1))
                for ha, hb, hc in opts:
                    yield a, b, c, ha, hb, hc

    def _count(self, s: int, k: int, h: int) -> int:
        if s < 1:
            return 0
        if s == 1:
            return 1 if h == 1 else len(self.leaves) + k
        c = self.count
        tot = c(s - 1, k + 1, h) + len(_UNARY) * c(s - 1, k, h)
        for a, b, ha, hb in self._splits2(s, h):
            tot += len(_BINARY) * c(a, k, ha) * c(b, k, hb)
        for a, b, cc, ha, hb, hc in self._splits3(s, h):
            tot += c(a, k, ha) * c(b, k, hb) * c(cc, k, hc)
            tot += c(a, k, ha) * c(b, k + 1, hb) * c(cc, k + 1, hc)
        return tot

    def unrank(self, s: int, k: int, h: int, r: int) -> Term:
        c = self.count
        if not 0 <= r < c(s, k, h):
            raise IndexError(r)
        if s == 1:
            if h == 1:
                return HOLE
            if r < len(self.leaves):
                return self.leaves[r]
            return Var(canonical_name(r - len(self.leaves)))
        n = c(s - 1, k + 1, h)
        if r < n:
            return ULam(canonical_name(k), self.unrank(s - 1, k + 1, h, r))
        r -= n
        n = c(s - 1, k, h)
        for ctor in _UNARY:
            if r < n:
                return ctor(self.unrank(s - 1, k, h, r))
            r -= n
        for ctor in _BINARY:
            for a, b, ha, hb in self._splits2(s, h):
                na, nb = c(a, k, ha), c(b, k, hb)
                if r < na * nb:
                    ra, rb = divmod(r, nb)
                    return ctor(self.unrank(a, k, ha, ra), self.unrank(b, k, hb, rb))
                r -= na * nb
        for a, b, cc, ha, hb, hc in self._splits3(s, h):
            na, nb, nc = c(a, k, ha), c(b, k, hb), c(cc, k, hc)
            if r < na * nb * nc:
                ra, rest = divmod(r, nb * nc)
                rb, rc = divmod(rest, nc)
                return If(self.unrank(a, k, ha, ra), self.unrank(b, k, hb, rb),
                          self.unrank(cc, k, hc, rc))
            r -= na * nb * nc
            nb, nc = c(b, k + 1, hb), c(cc, k + 1, hc)
            if r < na * nb * nc:
                ra, rest = divmod(r, nb * nc)
                rb, rc = divmod(rest, nc)
                x = canonical_name(k)
                return Case(self.unrank(a, k, ha, ra), x, self.unrank(b, k + 1, hb, rb),
                            x, self.unrank(cc, k + 1, hc, rc))
            r -= na * nb * nc
        raise AssertionError("unrank out of range")

    def enumerate(self, s: int, k: int = 0, h: int = 1) -> Iterator[Term]:
        for r in range(self.count(s, k, h)):
            yield self.unrank(s, k, h, r)

    def sample(self, rng: random.Random, s: int, k: int = 0, h: int = 1) -> Term:
        return self.unrank(s, k, h, rng.randrange(self.count(s, k, h)))


SPACE = ContextSpace()


def random_tgt_term(rng: random.Random, size: int, scope: int = 0) -> Term:
    """Uniformly random target term of exactly ``size`` nodes over ``scope`` free names."""
    return SPACE.sample(rng, size, scope, 0)


def random_tgt_context(rng: random.Random, size: int) -> Term:
    return SPACE.sample(rng, size, 0, 1)
