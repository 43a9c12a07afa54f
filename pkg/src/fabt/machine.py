"""Environment machine shared by both calculi, plus evaluation outcomes.

The machine is step-for-step faithful to the substitution semantics in
``source.step`` / ``target.step``: every rule application costs one unit of
fuel, descending into evaluation contexts is free, and a ``wrong`` under a
non-empty context costs one extra step to collapse.  The test-suite checks the
step counts against the reference steppers.

Closures replace substitution, so big generated programs run without ever
being copied; a value is only turned back into a term if someone asks for it.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import StuckError
from .syntax import (
    App, Case, FalseV, Fix, If, Inl, Inr, Lam, Pair,
    Proj1, Proj2, Seq, SrcType, Term, TrueV, ULam, UnitV, Var, Wrong,
    no_gc, subst_closed,
)


# --------------------------------------------------------------------------
# Outcomes
# --------------------------------------------------------------------------


class Value:
    """Termination with a value after ``steps`` rule applications."""

    kind = "value"
    __slots__ = ("steps", "_raw", "_term")

    def __init__(self, term: Term | None, steps: int, raw=None):
        self.steps = steps
        self._term = term
        self._raw = raw

    @property
    def term(self) -> Term:
        if self._term is None:
            self._term = readback(self._raw)
        return self._term

    @property
    def base(self) -> Term | None:
        """The result if it is unit/true/false, else None (no readback needed)."""
        v = self._raw if self._term is None else self._term
        return v if isinstance(v, (UnitV, TrueV, FalseV)) else None

    def __eq__(self, other):
        return isinstance(other, Value) and self.steps == other.steps and self.term == other.term

    def __hash__(self):
        return hash(("value", self.steps, self.term))

    def __repr__(self):
        return f"Value({self.term!r}, {self.steps})"


@dataclass(frozen=True)
class WrongOutcome:
    steps: int
    kind = "wrong"


@dataclass(frozen=True)
class FuelExhausted:
    fuel: int
    kind = "timeout"

    @property
    def steps(self) -> int:
        return self.fuel


Outcome = Value | WrongOutcome | FuelExhausted


# --------------------------------------------------------------------------
# Machine values
# --------------------------------------------------------------------------


class Clo:
    __slots__ = ("lam", "env")

    def __init__(self, lam, env):
        self.lam = lam
        self.env = env


class VPair:
    __slots__ = ("fst", "snd")

    def __init__(self, a, b):
        self.fst = a
        self.snd = b


class VInl:
    __slots__ = ("v",)

    def __init__(self, v):
        self.v = v


class VInr:
    __slots__ = ("v",)

    def __init__(self, v):
        self.v = v


_FIX_SELF = "%f"


@lru_cache(maxsize=None)
def _eta(dom: SrcType, cod: SrcType) -> Lam:
    # fix v  ~>  body[(\y:dom. fix v y)/x]; %f holds v in the closure env
    return Lam("y", dom, App(Fix(dom, cod, Var(_FIX_SELF)), Var("y")))


def _lookup(env, name):
    while env is not None:
        if env[0] == name:
            return env[1]
        env = env[2]
    raise StuckError(f"free variable {name}")


def readback(v) -> Term:
    """Convert a machine value back to a closed term."""
    memo: dict[int, Term] = {}

    def go(v):
        if isinstance(v, Term):
            return v
        key = id(v)
        if key in memo:
            return memo[key]
        if isinstance(v, Clo):
            mapping = {}
            for name in v.lam.fv:
                mapping[name] = go(_lookup(v.env, name))
            out = subst_closed(v.lam, mapping)
        elif isinstance(v, VPair):
            out = Pair(go(v.fst), go(v.snd))
        elif isinstance(v, VInl):
            out = Inl(go(v.v))
        else:
            out = Inr(go(v.v))
        memo[key] = out
        return out

    return go(v)


# --------------------------------------------------------------------------
# The machine
# --------------------------------------------------------------------------

(K_ARG, K_CALL, K_PSND, K_PMK, K_INL, K_INR, K_P1, K_P2, K_CASE, K_SEQ, K_IF,
 K_FIX) = range(12)


def run(t: Term, fuel: int, lang: str = "tgt") -> Outcome:
    """Evaluate closed ``t`` with at most ``fuel`` rule applications.

    ``lang`` selects what a type-error redex does: ``"tgt"`` reduces it to
    wrong, ``"src"`` raises StuckError (closed well-typed terms never do).
    """
    if lang not in ("src", "tgt"):
        raise ValueError(f"unknown language {lang!r}")
    with no_gc():
        return _run(t, fuel, lang == "tgt")


def _run(t: Term, fuel: int, target: bool) -> Outcome:
    steps = 0
    stack: list = []
    push = stack.append
    pop = stack.pop
    env = None
    v = None
    evaluating = True

    def bad(msg):
        # type-error redex: one step to wrong, one more to collapse the context
        nonlocal steps
        if not target:
            raise StuckError(msg)
        if steps >= fuel:
            return FuelExhausted(fuel)
        steps += 1
        if stack:
            if steps >= fuel:
                return FuelExhausted(fuel)
            steps += 1
        return WrongOutcome(steps)

    while True:
        if evaluating:
            cls = t.__class__
            if cls is Var:
                e = env
                name = t.name
                while e is not None:
                    if e[0] == name:
                        v = e[1]
                        break
                    e = e[2]
                else:
                    raise StuckError(f"free variable {name}")
            elif cls is App:
                push((K_ARG, t.arg, env))
                t = t.fn
                continue
            elif cls is Lam or cls is ULam:
                v = Clo(t, env)
            elif cls is UnitV or cls is TrueV or cls is FalseV:
                v = t
            elif cls is Pair:
                push((K_PSND, t.snd, env))
                t = t.fst
                continue
            elif cls is Proj1:
                push((K_P1,))
                t = t.t
                continue
            elif cls is Proj2:
                push((K_P2,))
                t = t.t
                continue
            elif cls is Case:
                push((K_CASE, t, env))
                t = t.scrut
                continue
            elif cls is Seq:
                push((K_SEQ, t.second, env))
                t = t.first
                continue
            elif cls is If:
                push((K_IF, t, env))
                t = t.cond
                continue
            elif cls is Inl:
                push((K_INL,))
                t = t.t
                continue
            elif cls is Inr:
                push((K_INR,))
                t = t.t
                continue
            elif cls is Fix:
                if target:
                    raise StuckError("fix is not a target construct")
                push((K_FIX, t.dom, t.cod))
                t = t.t
                continue
            elif cls is Wrong:
                if not target:
                    raise StuckError("wrong is not a source construct")
                if stack:
                    if steps >= fuel:
                        return FuelExhausted(fuel)
                    steps += 1
                return WrongOutcome(steps)
            else:
                raise StuckError(f"cannot evaluate {cls.__name__}")
            evaluating = False

        # return v to the top frame
        if not stack:
            if isinstance(v, Term):
                return Value(v, steps)
            return Value(None, steps, raw=v)
        k = pop()
        tag = k[0]
        if tag == K_ARG:
            push((K_CALL, v))
            t = k[1]
            env = k[2]
            evaluating = True
        elif tag == K_CALL:
            f = k[1]
            if f.__class__ is not Clo:
                return bad("applying a non-function")
            if steps >= fuel:
                return FuelExhausted(fuel)
            steps += 1
            lam = f.lam
            env = (lam.name, v, f.env)
            t = lam.body
            evaluating = True
        elif tag == K_PSND:
            push((K_PMK, v))
            t = k[1]
            env = k[2]
            evaluating = True
        elif tag == K_PMK:
            v = VPair(k[1], v)
        elif tag == K_P1 or tag == K_P2:
            if v.__class__ is not VPair:
                return bad("projection from a non-pair")
            if steps >= fuel:
                return FuelExhausted(fuel)
            steps += 1
            v = v.fst if tag == K_P1 else v.snd
        elif tag == K_CASE:
            c = k[1]
            vc = v.__class__
            if vc is VInl:
                name, body = c.name_l, c.branch_l
            elif vc is VInr:
                name, body = c.name_r, c.branch_r
            else:
                return bad("case on a non-sum")
            if steps >= fuel:
                return FuelExhausted(fuel)
            steps += 1
            env = (name, v.v, k[2])
            t = body
            evaluating = True
        elif tag == K_SEQ:
            if v.__class__ is not UnitV:
                return bad("sequencing a non-unit")
            if steps >= fuel:
                return FuelExhausted(fuel)
            steps += 1
            t = k[1]
            env = k[2]
            evaluating = True
        elif tag == K_IF:
            c = k[1]
            vc = v.__class__
            if vc is TrueV:
                t = c.then
            elif vc is FalseV:
                t = c.else_
            else:
                return bad("if on a non-boolean")
            if steps >= fuel:
                return FuelExhausted(fuel)
            steps += 1
            env = k[2]
            evaluating = True
        elif tag == K_INL:
            v = VInl(v)
        elif tag == K_INR:
            v = VInr(v)
        elif tag == K_FIX:
            if v.__class__ is not Clo:
                raise StuckError("fix of a non-function")
            if steps >= fuel:
                return FuelExhausted(fuel)
            steps += 1
            lam = v.lam
            eta = Clo(_eta(k[1], k[2]), (_FIX_SELF, v, None))
            env = (lam.name, eta, v.env)
            t = lam.body
            evaluating = True

