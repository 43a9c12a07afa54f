"""Abstract syntax shared by the typed source and untyped target calculi.

Both languages use the same node classes for everything except binders and
their special forms: the typed language has ``Lam`` (annotated) and ``Fix``,
the untyped one has ``ULam`` and ``Wrong``.  ``Hole`` turns any term into a
single-hole program context.

Nodes are immutable and are freely shared between terms.  Generated
back-translation terms are exponentially large when viewed as trees, so each
node caches its free variables, hole count, value-ness and hash when it is
built; every traversal that can stop early (substitution, plugging) uses those
caches to avoid walking closed or hole-free subterms.
"""
from __future__ import annotations

import gc
import itertools
from contextlib import contextmanager
from dataclasses import dataclass, fields
from typing import Callable, Iterable, Mapping

EMPTY: frozenset[str] = frozenset()


def _node(cls):
    """Frozen dataclass whose hash is computed once, at construction."""
    cls = dataclass(frozen=True, repr=False)(cls)
    names = tuple(f.name for f in fields(cls))
    cls._field_names = names

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if other.__class__ is not self.__class__ or self._hash != other._hash:
            return False
        return all(getattr(self, n) == getattr(other, n) for n in names)

    def __repr__(self):
        args = ", ".join(repr(getattr(self, n)) for n in names)
        return f"{cls.__name__}({args})"

    cls.__hash__ = __hash__
    cls.__eq__ = __eq__
    cls.__repr__ = __repr__
    return cls


@contextmanager
def no_gc():
    """Pause the cyclic collector while building or running big acyclic structures."""
    was = gc.isenabled()
    gc.disable()
    try:
        yield
    finally:
        if was:
            gc.enable()


def _set(obj, **attrs):
    obj.__dict__.update(attrs)


def _union(a: frozenset, b: frozenset) -> frozenset:
    if not b or a is b:
        return a
    if not a:
        return b
    return a | b


def _minus(a: frozenset, x: str) -> frozenset:
    return a - {x} if x in a else a


# --------------------------------------------------------------------------
# Types of the source language
# --------------------------------------------------------------------------


class SrcType:
    """Base class of source types.

    Types are hash-consed: structurally equal types are the same object, so
    comparison is by identity and hashing is free.  ``ground`` is False while
    unification metavariables remain inside.
    """

    __slots__ = ("_hash", "ground", "__weakref__")
    __match_args__: tuple[str, ...] = ()
    _table: dict

    def __setattr__(self, name, value):
        raise AttributeError("types are immutable")

    def __eq__(self, other):
        return self is other

    def __hash__(self):
        return self._hash

    def __reduce__(self):
        return (self.__class__, tuple(getattr(self, n) for n in self.__match_args__))

    def __repr__(self):
        args = ", ".join(repr(getattr(self, n)) for n in self.__match_args__)
        return f"{type(self).__name__}({args})"


def _intern(cls, key, **attrs):
    hit = cls._table.get(key)
    if hit is None:
        hit = object.__new__(cls)
        for k, v in attrs.items():
            object.__setattr__(hit, k, v)
        object.__setattr__(hit, "_hash", hash((cls.__name__,) + key))
        cls._table[key] = hit
    return hit


class UnitTy(SrcType):
    __slots__ = ()
    _table = {}

    def __new__(cls):
        return _intern(cls, (), ground=True)


class BoolTy(SrcType):
    __slots__ = ()
    _table = {}

    def __new__(cls):
        return _intern(cls, (), ground=True)


class _Binary(SrcType):
    __slots__ = ()

    def __new__(cls, a: SrcType, b: SrcType):
        if not isinstance(a, SrcType) or not isinstance(b, SrcType):
            raise TypeError(f"{cls.__name__} expects types, got {a!r}, {b!r}")
        n1, n2 = cls.__match_args__
        return _intern(cls, (a, b), ground=a.ground and b.ground, **{n1: a, n2: b})


class Arrow(_Binary):
    __slots__ = ("dom", "cod")
    __match_args__ = ("dom", "cod")
    _table = {}


class Prod(_Binary):
    __slots__ = ("left", "right")
    __match_args__ = ("left", "right")
    _table = {}


class Sum(_Binary):
    __slots__ = ("left", "right")
    __match_args__ = ("left", "right")
    _table = {}


class TMeta(SrcType):
    """Unification variable; only ever seen inside the typechecker."""

    __slots__ = ("ident",)
    __match_args__ = ("ident",)
    _table = {}

    def __new__(cls, ident: int):
        return _intern(cls, (ident,), ground=False, ident=ident)


UNIT_T = UnitTy()
BOOL_T = BoolTy()


def type_depth(ty: SrcType) -> int:
    if isinstance(ty, (UnitTy, BoolTy)):
        return 0
    if isinstance(ty, Arrow):
        return 1 + max(type_depth(ty.dom), type_depth(ty.cod))
    return 1 + max(type_depth(ty.left), type_depth(ty.right))


def is_first_order(ty: SrcType) -> bool:
    if isinstance(ty, (UnitTy, BoolTy)):
        return True
    if isinstance(ty, Arrow):
        return False
    return is_first_order(ty.left) and is_first_order(ty.right)


# --------------------------------------------------------------------------
# Terms
# --------------------------------------------------------------------------


class Term:
    """Base class of term nodes.

    Cached attributes:
      fv      frozenset of free variable names (the hole binds nothing)
      holes   number of ``Hole`` leaves
      is_val  whether the node is a value of either calculus
    """

    __slots__ = ()
    fv: frozenset[str]
    holes: int
    is_val: bool


def _leaf(obj, tag):
    _set(obj, _hash=hash(tag), fv=EMPTY, holes=0, is_val=True)


@_node
class UnitV(Term):
    def __post_init__(self):
        _leaf(self, "unit")


@_node
class TrueV(Term):
    def __post_init__(self):
        _leaf(self, "true")


@_node
class FalseV(Term):
    def __post_init__(self):
        _leaf(self, "false")


@_node
class Wrong(Term):
    """The target language's unrecoverable type error. Never a value."""

    def __post_init__(self):
        _set(self, _hash=hash("wrong"), fv=EMPTY, holes=0, is_val=False)


@_node
class Hole(Term):
    def __post_init__(self):
        _set(self, _hash=hash("HOLE"), fv=EMPTY, holes=1, is_val=False)


@_node
class Var(Term):
    name: str

    def __post_init__(self):
        _set(self, _hash=hash(("var", self.name)), fv=frozenset((self.name,)),
             holes=0, is_val=False)


@_node
class Lam(Term):
    """Annotated abstraction of the typed language."""

    name: str
    ty: SrcType
    body: Term

    def __post_init__(self):
        _set(self, _hash=hash(("lam", self.name, self.ty, self.body)),
             fv=_minus(self.body.fv, self.name), holes=self.body.holes, is_val=True)


@_node
class ULam(Term):
    """Abstraction of the untyped language."""

    name: str
    body: Term

    def __post_init__(self):
        _set(self, _hash=hash(("ulam", self.name, self.body)),
             fv=_minus(self.body.fv, self.name), holes=self.body.holes, is_val=True)


@_node
class App(Term):
    fn: Term
    arg: Term

    def __post_init__(self):
        _set(self, _hash=hash(("app", self.fn, self.arg)), fv=_union(self.fn.fv, self.arg.fv),
             holes=self.fn.holes + self.arg.holes, is_val=False)


@_node
class Pair(Term):
    fst: Term
    snd: Term

    def __post_init__(self):
        _set(self, _hash=hash(("pair", self.fst, self.snd)), fv=_union(self.fst.fv, self.snd.fv),
             holes=self.fst.holes + self.snd.holes,
             is_val=self.fst.is_val and self.snd.is_val)


@_node
class Proj1(Term):
    t: Term

    def __post_init__(self):
        _set(self, _hash=hash(("fst", self.t)), fv=self.t.fv, holes=self.t.holes, is_val=False)


@_node
class Proj2(Term):
    t: Term

    def __post_init__(self):
        _set(self, _hash=hash(("snd", self.t)), fv=self.t.fv, holes=self.t.holes, is_val=False)


@_node
class Inl(Term):
    t: Term

    def __post_init__(self):
        _set(self, _hash=hash(("inl", self.t)), fv=self.t.fv, holes=self.t.holes,
             is_val=self.t.is_val)


@_node
class Inr(Term):
    t: Term

    def __post_init__(self):
        _set(self, _hash=hash(("inr", self.t)), fv=self.t.fv, holes=self.t.holes,
             is_val=self.t.is_val)


@_node
class Case(Term):
    scrut: Term
    name_l: str
    branch_l: Term
    name_r: str
    branch_r: Term

    def __post_init__(self):
        fv = _union(self.scrut.fv, _union(_minus(self.branch_l.fv, self.name_l),
                                          _minus(self.branch_r.fv, self.name_r)))
        _set(self, _hash=hash(("case", self.scrut, self.name_l, self.branch_l,
                               self.name_r, self.branch_r)),
             fv=fv, holes=self.scrut.holes + self.branch_l.holes + self.branch_r.holes,
             is_val=False)


@_node
class Seq(Term):
    first: Term
    second: Term

    def __post_init__(self):
        _set(self, _hash=hash(("seq", self.first, self.second)),
             fv=_union(self.first.fv, self.second.fv), holes=self.first.holes + self.second.holes,
             is_val=False)


@_node
class If(Term):
    cond: Term
    then: Term
    else_: Term

    def __post_init__(self):
        _set(self, _hash=hash(("if", self.cond, self.then, self.else_)),
             fv=_union(self.cond.fv, _union(self.then.fv, self.else_.fv)),
             holes=self.cond.holes + self.then.holes + self.else_.holes, is_val=False)


@_node
class Fix(Term):
    """``fix_{dom->cod} t`` of the typed language."""

    dom: SrcType
    cod: SrcType
    t: Term

    def __post_init__(self):
        _set(self, _hash=hash(("fix", self.dom, self.cod, self.t)), fv=self.t.fv,
             holes=self.t.holes, is_val=False)


UNIT = UnitV()
TRUE = TrueV()
FALSE = FalseV()
WRONG = Wrong()
HOLE = Hole()

BASE_VALUES = (UnitV, TrueV, FalseV)


def is_value(t: Term) -> bool:
    return t.is_val


# --------------------------------------------------------------------------
# Generic traversal
# --------------------------------------------------------------------------


def binders(t: Term) -> tuple[tuple[str, ...], ...]:
    """Names bound around each child, aligned with ``children(t)``."""
    match t:
        case Lam(name, _, _) | ULam(name, _):
            return ((name,),)
        case Case(_, x, _, y, _):
            return ((), (x,), (y,))
    return ((),) * len(children(t))


def children(t: Term) -> tuple[Term, ...]:
    match t:
        case Lam(_, _, body) | ULam(_, body):
            return (body,)
        case App(f, a):
            return (f, a)
        case Pair(a, b):
            return (a, b)
        case Proj1(x) | Proj2(x) | Inl(x) | Inr(x) | Fix(_, _, x):
            return (x,)
        case Case(s, _, l, _, r):
            return (s, l, r)
        case Seq(a, b):
            return (a, b)
        case If(c, a, b):
            return (c, a, b)
    return ()


def with_children(t: Term, kids: tuple[Term, ...] | list[Term]) -> Term:
    match t:
        case Lam(name, ty, _):
            return Lam(name, ty, kids[0])
        case ULam(name, _):
            return ULam(name, kids[0])
        case App():
            return App(kids[0], kids[1])
        case Pair():
            return Pair(kids[0], kids[1])
        case Proj1():
            return Proj1(kids[0])
        case Proj2():
            return Proj2(kids[0])
        case Inl():
            return Inl(kids[0])
        case Inr():
            return Inr(kids[0])
        case Fix(dom, cod, _):
            return Fix(dom, cod, kids[0])
        case Case(_, x, _, y, _):
            return Case(kids[0], x, kids[1], y, kids[2])
        case Seq():
            return Seq(kids[0], kids[1])
        case If():
            return If(kids[0], kids[1], kids[2])
    return t


def size(t: Term) -> int:
    """Number of AST nodes (a hole counts as one node)."""
    return 1 + sum(size(c) for c in children(t))


def hole_count(t: Term) -> int:
    return t.holes


def all_names(t: Term) -> set[str]:
    """Every variable name occurring in ``t``, bound or free."""
    out: set[str] = set()
    seen: set[int] = set()
    stack = [t]
    while stack:
        u = stack.pop()
        if id(u) in seen:
            continue
        seen.add(id(u))
        if isinstance(u, Var):
            out.add(u.name)
        for names in binders(u):
            out.update(names)
        stack.extend(children(u))
    return out


def fresh(base: str, avoid: Iterable[str]) -> str:
    avoid = set(avoid)
    if base not in avoid:
        return base
    for i in itertools.count(1):
        cand = f"{base}{i}"
        if cand not in avoid:
            return cand
    raise AssertionError("unreachable")


# --------------------------------------------------------------------------
# Substitution
# --------------------------------------------------------------------------


def subst(t: Term, name: str, v: Term) -> Term:
    """Capture-avoiding substitution ``t[v/name]``.

    Binders that would capture a free variable of ``v`` are renamed.
    Subterms in which ``name`` is not free are returned unchanged (and so stay
    shared with the input).
    """
    if name not in t.fv:
        return t
    match t:
        case Var():
            return v
        case Lam(x, ty, body):
            x2, body = _rename_if_captures(x, body, v, name)
            return Lam(x2, ty, subst(body, name, v))
        case ULam(x, body):
            x2, body = _rename_if_captures(x, body, v, name)
            return ULam(x2, subst(body, name, v))
        case Case(s, x, l, y, r):
            s = subst(s, name, v)
            if x != name:
                x, l = _rename_if_captures(x, l, v, name)
                l = subst(l, name, v)
            if y != name:
                y, r = _rename_if_captures(y, r, v, name)
                r = subst(r, name, v)
            return Case(s, x, l, y, r)
    return with_children(t, tuple(subst(c, name, v) for c in children(t)))


def _rename_if_captures(x: str, body: Term, v: Term, name: str) -> tuple[str, Term]:
    if x in v.fv and name in body.fv:
        x2 = fresh(x, v.fv | body.fv | {name})
        return x2, subst(body, x, Var(x2))
    return x, body


def subst_closed(t: Term, env: Mapping[str, Term]) -> Term:
    """Simultaneous substitution of closed terms; no renaming is ever needed."""
    if not env or t.fv.isdisjoint(env):
        return t
    match t:
        case Var(x):
            return env[x]
        case Lam(x, ty, body):
            return Lam(x, ty, subst_closed(body, _drop(env, x)))
        case ULam(x, body):
            return ULam(x, subst_closed(body, _drop(env, x)))
        case Case(s, x, l, y, r):
            return Case(subst_closed(s, env), x, subst_closed(l, _drop(env, x)),
                        y, subst_closed(r, _drop(env, y)))
    return with_children(t, tuple(subst_closed(c, env) for c in children(t)))


def _drop(env: Mapping[str, Term], x: str) -> Mapping[str, Term]:
    if x in env:
        env = dict(env)
        del env[x]
    return env


# --------------------------------------------------------------------------
# Contexts
# --------------------------------------------------------------------------


def plug(ctx: Term, t: Term) -> Term:
    """Replace the hole of ``ctx`` by ``t``; binders in ``ctx`` may capture."""
    if ctx.holes == 0:
        return ctx
    if isinstance(ctx, Hole):
        return t
    return with_children(ctx, tuple(plug(c, t) for c in children(ctx)))


def hole_binders(ctx: Term) -> list[str]:
    """Names bound on the path from the root of ``ctx`` to its hole, outermost first."""
    path: list[str] = []
    u = ctx
    while not isinstance(u, Hole):
        for c, names in zip(children(u), binders(u)):
            if c.holes:
                path.extend(names)
                u = c
                break
        else:
            raise ValueError("term has no hole")
    return path


def map_terms(t: Term, fn: Callable[[Term], Term | None]) -> Term:
    """Bottom-up rewrite; ``fn`` returns a replacement or None to rebuild."""
    memo: dict[int, Term] = {}

    def go(u: Term) -> Term:
        key = id(u)
        if key in memo:
            return memo[key]
        out = fn(u)
        if out is None:
            kids = children(u)
            new = tuple(go(c) for c in kids)
            out = u if all(a is b for a, b in zip(kids, new)) else with_children(u, new)
        memo[key] = out
        return out

    return go(t)


# --------------------------------------------------------------------------
# Alpha-equivalence
# --------------------------------------------------------------------------


def alpha_eq(a: Term, b: Term) -> bool:
    """Equality up to renaming of bound variables (type annotations must match)."""
    return _alpha(a, b, {}, {}, 0)


def _alpha(a: Term, b: Term, ea: dict, eb: dict, depth: int) -> bool:
    if a is b and not ea and not eb:
        return True
    if a.__class__ is not b.__class__:
        return False
    match a:
        case Var(x):
            la, lb = ea.get(x), eb.get(b.name)
            if la is None and lb is None:
                return x == b.name
            return la == lb
        case Lam(x, ty, body):
            if ty != b.ty:
                return False
            return _alpha(body, b.body, {**ea, x: depth}, {**eb, b.name: depth}, depth + 1)
        case ULam(x, body):
            return _alpha(body, b.body, {**ea, x: depth}, {**eb, b.name: depth}, depth + 1)
        case Case(s, x, l, y, r):
            return (_alpha(s, b.scrut, ea, eb, depth)
                    and _alpha(l, b.branch_l, {**ea, x: depth}, {**eb, b.name_l: depth}, depth + 1)
                    and _alpha(r, b.branch_r, {**ea, y: depth}, {**eb, b.name_r: depth}, depth + 1))
        case Fix(dom, cod, t):
            return dom == b.dom and cod == b.cod and _alpha(t, b.t, ea, eb, depth)
    ka, kb = children(a), children(b)
    return len(ka) == len(kb) and all(_alpha(x, y, ea, eb, depth) for x, y in zip(ka, kb))
