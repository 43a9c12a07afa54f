"""The typed source calculus: typechecking and the reference small-step semantics."""
from __future__ import annotations

import itertools
from typing import Iterable, Mapping, Sequence

from .errors import StuckError, TypeCheckError
from .syntax import (
    BOOL_T, UNIT_T, App, Arrow, Case, FalseV, Fix, Hole, If, Inl, Inr,
    Lam, Pair, Prod, Proj1, Proj2, Seq, SrcType, Sum, TMeta, Term, TrueV,
    ULam, UnitV, Var, Wrong, fresh, subst, with_children,
)

TypingEnv = Mapping[str, SrcType]


def as_env(env: TypingEnv | Iterable[tuple[str, SrcType]] | None) -> dict[str, SrcType]:
    """Normalise an environment; with a sequence of pairs the rightmost binding wins."""
    if env is None:
        return {}
    if isinstance(env, Mapping):
        return dict(env)
    out: dict[str, SrcType] = {}
    for name, ty in env:
        out[name] = ty
    return out


def is_value(t: Term) -> bool:
    return t.is_val


# --------------------------------------------------------------------------
# Unification
# --------------------------------------------------------------------------


class _Unifier:
    def __init__(self):
        self.sol: dict[int, SrcType] = {}
        self.counter = itertools.count()

    def meta(self) -> TMeta:
        return TMeta(next(self.counter))

    def shallow(self, ty: SrcType) -> SrcType:
        while isinstance(ty, TMeta) and ty.ident in self.sol:
            ty = self.sol[ty.ident]
        return ty

    def zonk(self, ty: SrcType, default: SrcType | None = None) -> SrcType:
        if ty.ground:
            return ty
        ty = self.shallow(ty)
        match ty:
            case TMeta():
                return default if default is not None else ty
            case Arrow(a, b):
                return Arrow(self.zonk(a, default), self.zonk(b, default))
            case Prod(a, b):
                return Prod(self.zonk(a, default), self.zonk(b, default))
            case Sum(a, b):
                return Sum(self.zonk(a, default), self.zonk(b, default))
        return ty

    def occurs(self, ident: int, ty: SrcType) -> bool:
        if ty.ground:
            return False
        ty = self.shallow(ty)
        match ty:
            case TMeta(i):
                return i == ident
            case Arrow(a, b) | Prod(a, b) | Sum(a, b):
                return self.occurs(ident, a) or self.occurs(ident, b)
        return False

    def unify(self, expected: SrcType, actual: SrcType, path, what: str) -> None:
        if expected is actual or (expected.ground and actual.ground and expected == actual):
            return
        a, b = self.shallow(expected), self.shallow(actual)
        if a is b:
            return
        if isinstance(a, TMeta):
            if self.occurs(a.ident, b):
                self._fail(what, path, expected, actual)
            self.sol[a.ident] = b
            return
        if isinstance(b, TMeta):
            if self.occurs(b.ident, a):
                self._fail(what, path, expected, actual)
            self.sol[b.ident] = a
            return
        if a.__class__ is not b.__class__:
            self._fail(what, path, expected, actual)
        match a:
            case Arrow(d, c):
                self.unify(d, b.dom, path, what)
                self.unify(c, b.cod, path, what)
            case Prod(l, r) | Sum(l, r):
                self.unify(l, b.left, path, what)
                self.unify(r, b.right, path, what)

    def _fail(self, what, path, expected, actual):
        from .printer import show_type
        exp = self.zonk(expected)
        act = self.zonk(actual)
        raise TypeCheckError(f"{what}: expected {show_type(exp)}, got {show_type(act)}",
                             path, exp, act)


# --------------------------------------------------------------------------
# Inference
# --------------------------------------------------------------------------


class _Checker:
    """Unification-based checking with expected types pushed inwards.

    Injections carry no annotation, so when no expected type is known their
    other half becomes a metavariable.  Closed, hole-free subterms are checked
    once and the result is cached on the node (per expected type, or as a
    principal scheme), which keeps checking heavily shared generated terms
    linear in the number of distinct nodes.
    """

    def __init__(self, hole: tuple[dict[str, SrcType], SrcType] | None = None):
        self.u = _Unifier()
        self.hole = hole

    def infer(self, env, t: Term, path: list[str], exp: SrcType | None = None) -> SrcType:
        if not t.fv and not t.holes and not isinstance(t, (Var, UnitV, TrueV, FalseV)):
            return self._closed(t, path, exp)
        return self._infer(env, t, path, exp)

    def _closed(self, t: Term, path: list[str], exp: SrcType | None) -> SrcType:
        d = t.__dict__
        scheme = d.get("_scheme")
        if scheme is not None and not scheme[1]:
            return scheme[0]
        if exp is not None:
            exp = self.u.zonk(exp)
            if exp.ground:
                ok = d.get("_checked")
                if ok is None:
                    ok = d["_checked"] = set()
                if exp not in ok:
                    sub = _Checker()
                    sub.u.unify(exp, sub._infer({}, t, path, exp), path, "term type")
                    ok.add(exp)
                return exp
        if scheme is None:
            sub = _Checker()
            ty = sub.u.zonk(sub._infer({}, t, path, None))
            scheme = d["_scheme"] = (ty, _metas(ty))
        ty, metas = scheme
        if not metas:
            return ty
        return _rename(ty, {m: self.u.meta() for m in metas})

    def _infer(self, env, t: Term, path: list[str], exp: SrcType | None) -> SrcType:
        u = self.u
        e = u.shallow(exp) if exp is not None else None
        match t:
            case UnitV():
                return UNIT_T
            case TrueV() | FalseV():
                return BOOL_T
            case Var(x):
                if x not in env:
                    raise TypeCheckError(f"unbound variable {x}", path)
                return env[x]
            case Lam(x, ty, body):
                if not ty.ground:
                    raise TypeCheckError("annotation contains a metavariable", path)
                cod = e.cod if isinstance(e, Arrow) else None
                return Arrow(ty, self.infer({**env, x: ty}, body, path + ["body"], cod))
            case App(f, a):
                ta = None
                if exp is not None and not f.fv and not f.holes:
                    # a closed function checks faster against a known ground type
                    ta = self.infer(env, a, path + ["arg"])
                    want = u.zonk(Arrow(ta, exp))
                    if want.ground:
                        self.infer(env, f, path + ["fn"], want)
                        return want.cod
                tf = u.shallow(self.infer(env, f, path + ["fn"]))
                if isinstance(tf, Arrow):
                    if ta is None:
                        ta = self.infer(env, a, path + ["arg"], tf.dom)
                    u.unify(tf.dom, ta, path + ["arg"], "argument type mismatch")
                    return tf.cod
                if ta is None:
                    ta = self.infer(env, a, path + ["arg"])
                if isinstance(tf, TMeta):
                    res = u.meta()
                    u.unify(tf, Arrow(ta, res), path + ["fn"], "not a function")
                    return res
                raise TypeCheckError("applying a non-function", path + ["fn"],
                                     Arrow(u.zonk(ta), TMeta(-1)), u.zonk(tf))
            case Pair(a, b):
                el, er = (e.left, e.right) if isinstance(e, Prod) else (None, None)
                return Prod(self.infer(env, a, path + ["fst"], el),
                            self.infer(env, b, path + ["snd"], er))
            case Proj1(x) | Proj2(x):
                te = u.shallow(self.infer(env, x, path + ["t"]))
                if not isinstance(te, Prod):
                    l, r = u.meta(), u.meta()
                    u.unify(Prod(l, r), te, path + ["t"], "projection from a non-pair")
                    te = Prod(l, r)
                return te.left if isinstance(t, Proj1) else te.right
            case Inl(x):
                if isinstance(e, Sum):
                    return Sum(self.infer(env, x, path + ["t"], e.left), e.right)
                return Sum(self.infer(env, x, path + ["t"]), u.meta())
            case Inr(x):
                if isinstance(e, Sum):
                    return Sum(e.left, self.infer(env, x, path + ["t"], e.right))
                return Sum(u.meta(), self.infer(env, x, path + ["t"]))
            case Case(s, x, l, y, r):
                ts = u.shallow(self.infer(env, s, path + ["scrut"]))
                if not isinstance(ts, Sum):
                    a, b = u.meta(), u.meta()
                    u.unify(Sum(a, b), ts, path + ["scrut"], "case on a non-sum")
                    ts = Sum(a, b)
                tl = self.infer({**env, x: ts.left}, l, path + ["inl"], exp)
                tr = self.infer({**env, y: ts.right}, r, path + ["inr"], exp if exp is not None else tl)
                u.unify(tl, tr, path + ["inr"], "case branches disagree")
                return tl
            case Seq(a, b):
                u.unify(UNIT_T, self.infer(env, a, path + ["first"], UNIT_T), path + ["first"],
                        "sequenced term must be Unit")
                return self.infer(env, b, path + ["second"], exp)
            case If(c, a, b):
                u.unify(BOOL_T, self.infer(env, c, path + ["cond"], BOOL_T), path + ["cond"],
                        "condition must be Bool")
                ta = self.infer(env, a, path + ["then"], exp)
                tb = self.infer(env, b, path + ["else"], exp if exp is not None else ta)
                u.unify(ta, tb, path + ["else"], "if branches disagree")
                return ta
            case Fix(dom, cod, x):
                fn = Arrow(dom, cod)
                u.unify(Arrow(fn, fn), self.infer(env, x, path + ["t"], Arrow(fn, fn)),
                        path + ["t"], "fix argument")
                return fn
            case Hole():
                if self.hole is None:
                    raise TypeCheckError("unexpected hole", path)
                inner_env, inner_ty = self.hole
                for name, ty in inner_env.items():
                    if name not in env:
                        raise TypeCheckError(f"hole environment binds {name}, context does not",
                                             path)
                    u.unify(ty, env[name], path, f"hole environment type of {name}")
                return inner_ty
            case ULam() | Wrong():
                raise TypeCheckError(f"{type(t).__name__} is not a source construct", path)
        raise TypeCheckError(f"unknown term {t!r}", path)


def _metas(ty: SrcType) -> frozenset[int]:
    if ty.ground:
        return frozenset()
    match ty:
        case TMeta(i):
            return frozenset((i,))
        case Arrow(a, b) | Prod(a, b) | Sum(a, b):
            return _metas(a) | _metas(b)
    return frozenset()


def _rename(ty: SrcType, m: dict[int, SrcType]) -> SrcType:
    if ty.ground:
        return ty
    match ty:
        case TMeta(i):
            return m.get(i, ty)
        case Arrow(a, b):
            return Arrow(_rename(a, m), _rename(b, m))
        case Prod(a, b):
            return Prod(_rename(a, m), _rename(b, m))
        case Sum(a, b):
            return Sum(_rename(a, m), _rename(b, m))
    return ty


def typecheck(env: TypingEnv | Sequence[tuple[str, SrcType]] | None, t: Term,
              expected: SrcType | None = None) -> SrcType:
    """Return the type of ``t`` under ``env``.

    Without ``expected`` any injection whose other half is unconstrained gets
    ``Unit`` there. Pass ``expected`` to check against a known type instead.
    """
    if t.holes:
        raise TypeCheckError("term contains a hole; use ctx_typecheck", ())
    c = _Checker()
    ty = c.infer(as_env(env), t, [], expected)
    if expected is not None:
        c.u.unify(expected, ty, [], "term type")
    return c.u.zonk(ty, UNIT_T)


def check(env, t: Term, ty: SrcType) -> bool:
    try:
        typecheck(env, t, ty)
    except TypeCheckError:
        return False
    return True


def ctx_typecheck(ctx: Term, inner_env, inner_ty: SrcType,
                  expected: SrcType | None = None) -> tuple[dict[str, SrcType], SrcType]:
    """Type a one-hole context ``C : (inner_env, inner_ty) -> (outer_env, outer_ty)``.

    The outer environment is the inner one minus the names bound on the path
    to the hole.
    """
    from .syntax import hole_binders

    if ctx.holes != 1:
        raise TypeCheckError(f"context must have exactly one hole, found {ctx.holes}", ())
    inner = as_env(inner_env)
    crossed = set(hole_binders(ctx))
    outer = {k: v for k, v in inner.items() if k not in crossed}
    c = _Checker(hole=(inner, inner_ty))
    ty = c._infer(outer, ctx, [], expected)
    if expected is not None:
        c.u.unify(expected, ty, [], "context type")
    return outer, c.u.zonk(ty, UNIT_T)


# --------------------------------------------------------------------------
# Reference small-step semantics
# --------------------------------------------------------------------------


def step(t: Term) -> Term | None:
    """One reduction step; None when ``t`` is already a value.

    Raises StuckError on a non-value with no applicable rule, which cannot
    happen for closed well-typed terms.
    """
    if t.is_val:
        return None
    return _step(t)


def _step(t: Term) -> Term:
    match t:
        case App(f, a):
            if not f.is_val:
                return App(_step(f), a)
            if not a.is_val:
                return App(f, _step(a))
            if isinstance(f, Lam):
                return subst(f.body, f.name, a)
            raise StuckError(f"applying a non-function: {f!r}")
        case Pair(a, b):
            if not a.is_val:
                return Pair(_step(a), b)
            return Pair(a, _step(b))
        case Inl(e):
            return Inl(_step(e))
        case Inr(e):
            return Inr(_step(e))
        case Proj1(e) | Proj2(e):
            if not e.is_val:
                return with_children(t, (_step(e),))
            if isinstance(e, Pair):
                return e.fst if isinstance(t, Proj1) else e.snd
            raise StuckError("projection from a non-pair")
        case Case(s, x, l, y, r):
            if not s.is_val:
                return Case(_step(s), x, l, y, r)
            if isinstance(s, Inl):
                return subst(l, x, s.t)
            if isinstance(s, Inr):
                return subst(r, y, s.t)
            raise StuckError("case on a non-sum")
        case Seq(a, b):
            if not a.is_val:
                return Seq(_step(a), b)
            if isinstance(a, UnitV):
                return b
            raise StuckError("sequencing a non-unit")
        case If(c, a, b):
            if not c.is_val:
                return If(_step(c), a, b)
            if isinstance(c, TrueV):
                return a
            if isinstance(c, FalseV):
                return b
            raise StuckError("if on a non-boolean")
        case Fix(dom, cod, e):
            if not e.is_val:
                return Fix(dom, cod, _step(e))
            if isinstance(e, Lam):
                y = fresh("y", e.fv)
                eta = Lam(y, dom, App(t, Var(y)))
                return subst(e.body, e.name, eta)
            raise StuckError("fix of a non-function")
        case Var(x):
            raise StuckError(f"free variable {x}")
    raise StuckError(f"no rule for {type(t).__name__}")


def evaluate_reference(t: Term, fuel: int):
    """Iterate ``step``; slow but literally the small-step relation."""
    from .machine import FuelExhausted, Value

    steps = 0
    while not t.is_val:
        if steps >= fuel:
            return FuelExhausted(fuel)
        t = _step(t)
        steps += 1
    return Value(t, steps)


def evaluate(t: Term, fuel: int):
    """Fuel-bounded evaluation of a closed source term via the environment machine."""
    from .machine import run

    return run(t, fuel, lang="src")
