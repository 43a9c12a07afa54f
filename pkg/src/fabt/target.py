"""The untyped target calculus: scoping and the reference small-step semantics.

Type errors do not get stuck here; they reduce to ``wrong``, and ``wrong`` in
any non-empty evaluation context collapses the whole program to ``wrong`` in
one step.
"""
from __future__ import annotations

from typing import Iterable

from .errors import ScopeError, StuckError
from .syntax import (
    WRONG, App, Case, FalseV, Fix, Hole, If, Inl, Inr, Lam, Pair, Proj1,
    Proj2, Seq, Term, TrueV, ULam, UnitV, Var, Wrong, children, hole_binders, subst,
    with_children,
)


def well_scoped(env: Iterable[str], t: Term) -> bool:
    if t.holes:
        raise ScopeError("term contains a hole; use ctx_well_scoped")
    if _has_typed_nodes(t):
        return False
    return t.fv <= set(env)


def _has_typed_nodes(t: Term) -> bool:
    seen: set[int] = set()
    stack = [t]
    while stack:
        u = stack.pop()
        if id(u) in seen:
            continue
        seen.add(id(u))
        if isinstance(u, (Lam, Fix)):
            return True
        stack.extend(children(u))
    return False


def ctx_well_scoped(ctx: Term, inner_env: Iterable[str]) -> list[str]:
    """Outer scope of a one-hole context given the names its hole may use."""
    if ctx.holes != 1:
        raise ScopeError(f"context must have exactly one hole, found {ctx.holes}")
    if _has_typed_nodes(ctx):
        raise ScopeError("context contains source-only constructs")
    inner = list(dict.fromkeys(inner_env))
    crossed = set(hole_binders(ctx))
    outer = [x for x in inner if x not in crossed]
    missing = ctx.fv - set(outer)
    if missing:
        raise ScopeError(f"unbound variables in context: {', '.join(sorted(missing))}", missing)
    return outer


class _Collapse(Exception):
    """Raised when ``wrong`` sits in evaluation position under a non-empty context."""


def step(t: Term) -> Term | None:
    """One reduction step; None for values and for ``wrong`` itself."""
    if t.is_val or isinstance(t, Wrong):
        return None
    try:
        return _step(t)
    except _Collapse:
        return WRONG


def _sub(t: Term) -> Term:
    if isinstance(t, Wrong):
        raise _Collapse()
    return _step(t)


def _step(t: Term) -> Term:
    match t:
        case App(f, a):
            if not f.is_val:
                return App(_sub(f), a)
            if not a.is_val:
                return App(f, _sub(a))
            if isinstance(f, ULam):
                return subst(f.body, f.name, a)
            return WRONG
        case Pair(a, b):
            if not a.is_val:
                return Pair(_sub(a), b)
            return Pair(a, _sub(b))
        case Inl(e):
            return Inl(_sub(e))
        case Inr(e):
            return Inr(_sub(e))
        case Proj1(e) | Proj2(e):
            if not e.is_val:
                return with_children(t, (_sub(e),))
            if isinstance(e, Pair):
                return e.fst if isinstance(t, Proj1) else e.snd
            return WRONG
        case Case(s, x, l, y, r):
            if not s.is_val:
                return Case(_sub(s), x, l, y, r)
            if isinstance(s, Inl):
                return subst(l, x, s.t)
            if isinstance(s, Inr):
                return subst(r, y, s.t)
            return WRONG
        case Seq(a, b):
            if not a.is_val:
                return Seq(_sub(a), b)
            return b if isinstance(a, UnitV) else WRONG
        case If(c, a, b):
            if not c.is_val:
                return If(_sub(c), a, b)
            if isinstance(c, TrueV):
                return a
            if isinstance(c, FalseV):
                return b
            return WRONG
        case Var(x):
            raise StuckError(f"free variable {x}")
        case Hole():
            raise StuckError("cannot evaluate a context")
    raise StuckError(f"{type(t).__name__} is not a target construct")


def evaluate_reference(t: Term, fuel: int):
    from .machine import FuelExhausted, Value, WrongOutcome

    steps = 0
    while True:
        if isinstance(t, Wrong):
            return WrongOutcome(steps)
        if t.is_val:
            return Value(t, steps)
        if steps >= fuel:
            return FuelExhausted(fuel)
        t = step(t)
        steps += 1


def evaluate(t: Term, fuel: int):
    """Fuel-bounded evaluation of a closed target term via the environment machine."""
    from .machine import run

    return run(t, fuel, lang="tgt")
