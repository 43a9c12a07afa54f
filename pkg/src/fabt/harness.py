"""Fuel-bounded differential testing of contextual equivalence.

Observations are equi-termination outcomes: a term terminates with a value,
goes wrong, or runs out of fuel.  Running out of fuel is never taken as
evidence of divergence, so any case touching a timeout is inconclusive.
When both sides terminate with a base value (unit/true/false) the values are
compared as well; such cases are flagged ``cmp=value`` in reports.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from . import machine
from .backtrans import backtranslate
from .compiler import compile_modular, compile_term, erase
from .contexts import link_src, link_tgt, linking_ctx
from .generators import SPACE, SrcGen, all_values, random_tgt_context, random_tgt_term, random_type
from .source import check
from .syntax import (
    BOOL_T, FALSE, HOLE, TRUE, UNIT, UNIT_T, App, Arrow, BoolTy, Case,
    If, Inl, Inr, Lam, Pair, Prod, Proj1, Proj2, Seq, SrcType, Sum, Term,
    ULam, UnitTy, Var, fresh, is_first_order, plug,
)

TERMINATES, WRONG_TAG, TIMEOUT = "terminates", "wrong", "timeout"
AGREE, DISAGREE, INCONCLUSIVE = "agree", "disagree", "inconclusive"


# --------------------------------------------------------------------------
# Observations
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Observation:
    tag: str          # terminates | wrong | timeout
    steps: int        # rule applications, or the fuel for a timeout
    value: Term | None = None  # the result when it is unit/true/false

    def __str__(self) -> str:
        return f"{self.tag}:{self.steps}"


def observe(outcome) -> Observation:
    match outcome:
        case machine.Value():
            return Observation(TERMINATES, outcome.steps, outcome.base)
        case machine.WrongOutcome(steps):
            return Observation(WRONG_TAG, steps)
        case machine.FuelExhausted(fuel):
            return Observation(TIMEOUT, fuel)
    raise TypeError(outcome)


def observe_tgt(t: Term, fuel: int) -> Observation:
    return observe(machine.run(t, fuel, "tgt"))


def observe_src(t: Term, fuel: int) -> Observation:
    return observe(machine.run(t, fuel, "src"))


def compare(o1: Observation, o2: Observation, values: bool = True) -> tuple[str, bool]:
    """Verdict for one context, and whether base values decided it."""
    if o1.tag == TIMEOUT or o2.tag == TIMEOUT:
        return INCONCLUSIVE, False
    if o1.tag != o2.tag:
        return DISAGREE, False
    if values and o1.value is not None and o2.value is not None:
        return (AGREE if o1.value == o2.value else DISAGREE), True
    return AGREE, False


# --------------------------------------------------------------------------
# Context corpus
# --------------------------------------------------------------------------


@dataclass
class GenConfig:
    """Corpus and budget settings.

    Every context up to ``exhaustive_size`` nodes is enumerated; each size
    above that up to ``max_ctx_size`` contributes ``samples_per_size`` uniform
    samples; then ``count`` uniform random contexts of size up to
    ``random_max_size`` follow.  The fixed probe corpus comes first.
    """

    max_ctx_size: int = 9
    exhaustive_size: int = 6
    samples_per_size: int = 1000
    count: int = 500
    random_max_size: int = 25
    fuel: int = 10**5
    src_fuel: int = 10**6
    seed: int = 0
    values: bool = True
    search_budget: int = 4000
    probes: tuple = ()

    def describe(self) -> str:
        return (f"max_ctx_size={self.max_ctx_size} exhaustive_size={self.exhaustive_size} "
                f"samples_per_size={self.samples_per_size} count={self.count} "
                f"random_max_size={self.random_max_size} fuel={self.fuel} "
                f"src_fuel={self.src_fuel} seed={self.seed} values={int(self.values)}")


_PROBE_ARGS = (UNIT, TRUE, FALSE, ULam("v0", Var("v0")), Pair(UNIT, UNIT), Inl(UNIT), Inr(TRUE))


def probe_contexts() -> list[Term]:
    """Hand-written probes: application to each kind of value, eta-style
    double applications, and projection/case/if/seq eliminations."""
    out = [HOLE]
    out += [App(HOLE, v) for v in _PROBE_ARGS]
    out += [Proj1(HOLE), Proj2(HOLE), Seq(HOLE, UNIT), If(HOLE, UNIT, FALSE),
            Case(HOLE, "v0", UNIT, "v0", TRUE)]
    for v in _PROBE_ARGS[:3]:
        out += [App(App(HOLE, v), v), App(Proj1(HOLE), v), App(Proj2(HOLE), v),
                Proj1(App(HOLE, v)), Proj2(App(HOLE, v)), If(App(HOLE, v), TRUE, FALSE),
                Seq(App(HOLE, v), TRUE), ULam("v0", App(HOLE, v))]
    # results of functions fed back into themselves, and functions as arguments
    out += [App(HOLE, App(HOLE, UNIT)), App(HOLE, ULam("v0", UNIT)),
            App(HOLE, ULam("v0", Var("v0"))), App(App(HOLE, ULam("v0", TRUE)), UNIT)]
    # linking-shaped probes: the hole is linked against a small partner
    for partner in (ULam("b", TRUE), ULam("b", Var("b")), ULam("b", App(Var("x1"), Var("b"))),
                    ULam("b", UNIT)):
        lk = linking_ctx(partner)
        out += [lk, Proj1(lk)]
        for v in (UNIT, TRUE):
            out += [App(Proj1(lk), v), App(Proj2(lk), v)]
    return out


def canonicalize(c: Term) -> Term:
    """Rename binders to the depth-indexed names used by the enumerator."""
    from .generators import canonical_name
    from .syntax import children, with_children

    def go(t: Term, ren: dict, depth: int) -> Term:
        match t:
            case Var(x):
                return Var(ren[x]) if x in ren else t
            case ULam(x, body):
                n = canonical_name(depth)
                return ULam(n, go(body, {**ren, x: n}, depth + 1))
            case Case(s, x, l, y, r):
                n = canonical_name(depth)
                return Case(go(s, ren, depth), n, go(l, {**ren, x: n}, depth + 1),
                            n, go(r, {**ren, y: n}, depth + 1))
        kids = children(t)
        if not kids:
            return t
        return with_children(t, [go(k, ren, depth) for k in kids])

    return go(c, {}, 0)


def gen_tgt_contexts(cfg: GenConfig) -> Iterator[Term]:
    """The deterministic context stream for ``cfg`` (closed, single-hole, no duplicates)."""
    seen: set = set()

    def fresh_ctx(c: Term) -> bool:
        k = canonicalize(c)
        if k in seen:
            return False
        seen.add(k)
        return True

    ex = max(1, min(cfg.exhaustive_size, cfg.max_ctx_size))
    # size-1 first so that the stream starts with HOLE
    yield HOLE
    seen.add(HOLE)
    for c in list(cfg.probes) + probe_contexts():
        if c.fv or c.holes != 1:
            continue
        if fresh_ctx(c):
            yield c
    for s in range(2, ex + 1):
        for c in SPACE.enumerate(s):
            if c not in seen:
                yield c
    rng = random.Random(cfg.seed)
    for s in range(ex + 1, cfg.max_ctx_size + 1):
        total = SPACE.count(s, 0, 1)
        if total <= cfg.samples_per_size:
            picks = range(total)
        else:
            picks = sorted(rng.sample(range(total), cfg.samples_per_size))
        for r in picks:
            c = SPACE.unrank(s, 0, 1, r)
            if c not in seen:
                seen.add(c)
                yield c
    made = 0
    while made < cfg.count and cfg.random_max_size > ex:
        s = rng.randint(1, cfg.random_max_size)
        c = SPACE.sample(rng, s)
        if s <= ex or c in seen:
            continue
        seen.add(c)
        made += 1
        yield c


# --------------------------------------------------------------------------
# Reports and verdicts
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CaseRecord:
    case_id: int
    ctx: Term
    obs1: Observation
    obs2: Observation
    verdict: str
    by_value: bool = False


@dataclass
class TestReport:
    __test__ = False  # not a pytest class
    title: str
    config: str
    records: list = field(default_factory=list)

    @property
    def counts(self) -> dict[str, int]:
        out = {AGREE: 0, DISAGREE: 0, INCONCLUSIVE: 0}
        for r in self.records:
            out[r.verdict] = out.get(r.verdict, 0) + 1
        return out

    @property
    def total(self) -> int:
        return len(self.records)


@dataclass(frozen=True)
class EquivVerdict:
    tag: str
    witness: Term | None = None
    obs1: Observation | None = None
    obs2: Observation | None = None
    timeouts: int = 0

    def __str__(self) -> str:
        from .printer import show
        if self.tag == DISAGREE:
            return f"disagree witness={show(self.witness)} obs1={self.obs1} obs2={self.obs2}"
        if self.tag == INCONCLUSIVE:
            return f"inconclusive timeouts={self.timeouts}"
        return f"agree timeouts={self.timeouts}"


def _verdict(report: TestReport) -> EquivVerdict:
    timeouts = report.counts[INCONCLUSIVE]
    for r in report.records:
        if r.verdict == DISAGREE:
            return EquivVerdict(DISAGREE, r.ctx, r.obs1, r.obs2, timeouts)
    if report.records and timeouts == len(report.records):
        return EquivVerdict(INCONCLUSIVE, timeouts=timeouts)
    return EquivVerdict(AGREE, timeouts=timeouts)


def run_contexts(t1: Term, t2: Term, contexts: Iterable[Term], fuel: int,
                 values: bool = True, title: str = "equiv", config: str = "") -> TestReport:
    report = TestReport(title, config)
    add = report.records.append
    for i, c in enumerate(contexts):
        o1 = observe_tgt(plug(c, t1), fuel)
        o2 = observe_tgt(plug(c, t2), fuel)
        verdict, by_value = compare(o1, o2, values)
        add(CaseRecord(i, c, o1, o2, verdict, by_value))
    return report


def equiv_check_tgt(t1: Term, t2: Term, cfg: GenConfig | None = None,
                    contexts: Iterable[Term] | None = None) -> tuple[EquivVerdict, TestReport]:
    """Compare two closed target terms under the corpus of ``cfg``."""
    cfg = cfg or GenConfig()
    for t in (t1, t2):
        if t.fv or t.holes:
            raise ValueError("equivalence checking needs closed terms")
    ctxs = gen_tgt_contexts(cfg) if contexts is None else contexts
    report = run_contexts(t1, t2, ctxs, cfg.fuel, cfg.values, "equiv", cfg.describe())
    return _verdict(report), report


def replay(witness: Term, t1: Term, t2: Term, fuel: int, values: bool = True):
    o1 = observe_tgt(plug(witness, t1), fuel)
    o2 = observe_tgt(plug(witness, t2), fuel)
    return o1, o2, compare(o1, o2, values)[0]


# --------------------------------------------------------------------------
# Distinguishing contexts
# --------------------------------------------------------------------------


def sample_args(ty: SrcType, limit: int = 6) -> list[Term]:
    """A few closed source values of type ``ty``, small ones first."""
    match ty:
        case _ if is_first_order(ty):
            return all_values(ty)[:limit]
        case Arrow(a, b):
            x = "a"
            outs = [Lam(x, a, v) for v in sample_args(b, limit)]
            if a == b:
                outs.insert(0, Lam(x, a, Var(x)))
            if a == BOOL_T and b == BOOL_T:
                outs.insert(1, Lam(x, a, If(Var(x), FALSE, TRUE)))
            return outs[:limit]
        case Prod(a, b):
            return [Pair(x, y) for x in sample_args(a, 2) for y in sample_args(b, 2)][:limit]
        case Sum(a, b):
            return ([Inl(x) for x in sample_args(a, limit // 2 or 1)]
                    + [Inr(y) for y in sample_args(b, limit // 2 or 1)])[:limit]
    raise ValueError(ty)


def observers(ty: SrcType, depth: int = 3) -> Iterator[Term]:
    """Source contexts with a hole of type ``ty`` and a Bool or Unit result.

    They take the value apart along its type: apply functions to sample
    arguments, project pairs, case on sums.
    """
    match ty:
        case UnitTy() | BoolTy():
            yield HOLE
        case Prod(a, b):
            for e in observers(a, depth):
                yield plug(e, Proj1(HOLE))
            for e in observers(b, depth):
                yield plug(e, Proj2(HOLE))
        case Sum(a, b):
            for e in observers(a, depth):
                x = fresh("s", e.fv)
                yield Case(HOLE, x, plug(e, Var(x)), x, _default(e, a))
            for e in observers(b, depth):
                x = fresh("s", e.fv)
                yield Case(HOLE, x, _default(e, b), x, plug(e, Var(x)))
        case Arrow(a, b):
            if depth == 0:
                return
            for arg in sample_args(a):
                for e in observers(b, depth - 1):
                    yield plug(e, App(HOLE, arg))


def _default(e: Term, ty: SrcType) -> Term:
    # a value of the observer's result type, for the branch that does not observe
    from .source import typecheck
    out = typecheck({"%h": ty}, plug(e, Var("%h")))
    return UNIT if out == UNIT_T else FALSE


@dataclass(frozen=True)
class SearchResult:
    ctx: Term
    src1: Observation
    src2: Observation
    tgt1: Observation
    tgt2: Observation


def distinguish_search(t1: Term, t2: Term, ty: SrcType, cfg: GenConfig | None = None) -> SearchResult | None:
    """Look for a source context that tells ``t1`` and ``t2`` apart.

    A candidate counts only if the same (erased) context also separates the
    compiled terms in the target, conclusively.  Returns None when the budget
    runs out.
    """
    cfg = cfg or GenConfig()
    for t in (t1, t2):
        if not check({}, t, ty):
            raise ValueError("both terms must have the given type")
    c1, c2 = compile_term(t1, ty), compile_term(t2, ty)
    for i, ctx in enumerate(_search_space(ty, cfg)):
        if i >= cfg.search_budget:
            break
        s1 = observe_src(plug(ctx, t1), cfg.src_fuel)
        s2 = observe_src(plug(ctx, t2), cfg.src_fuel)
        if compare(s1, s2, True)[0] != DISAGREE:
            continue
        tctx = erase(ctx)
        o1, o2, verdict = replay(tctx, c1, c2, cfg.fuel)
        if verdict == DISAGREE:
            return SearchResult(ctx, s1, s2, o1, o2)
    return None


def _search_space(ty: SrcType, cfg: GenConfig) -> Iterator[Term]:
    yield from observers(ty)
    # then random programs that use the hole through a variable
    rng = random.Random(cfg.seed)
    gen = SrcGen(rng)
    while True:
        res = rng.choice((UNIT_T, BOOL_T))
        body = gen.term(res, rng.randint(2, 14), {"h": ty})
        if "h" in body.fv:
            yield App(Lam("h", ty, body), HOLE)


# --------------------------------------------------------------------------
# Back-translation, modularity and erasure checks
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class BacktransRecord:
    case_id: int
    ctx: Term
    term: Term
    ty: SrcType
    target: Observation
    precise: str                 # pass | fail | inconclusive | vacuous
    precise_obs: Observation | None
    imprecise: str               # pass | fail | inconclusive
    depths: tuple                # (n, observation) pairs checked for the imprecise direction


def backtrans_case_stream(seed: int = 0, max_ctx: int = 8, max_term: int = 10,
                          max_reps: int = 200) -> Iterator[tuple[Term, Term, SrcType]]:
    """Endless seeded stream of (target context, source term, type) triples.

    Contexts rotate between five shapes: uniform random target contexts,
    erased type-directed observers, erased random programs over a variable
    bound to the hole, random contexts around an arbitrary application of
    the hole (which the wrappers have to reject), and an observer repeated
    up to ``max_reps`` times by a Church numeral, for long runs.
    """
    rng = random.Random(seed)
    gen = SrcGen(rng)
    i = 0
    while True:
        ty = random_type(rng, 2)
        t = gen.term(ty, rng.randint(1, max_term))
        match i % 5:
            case 0:
                ctx = random_tgt_context(rng, rng.randint(1, max_ctx))
            case 1:
                ctx = erase(rng.choice(list(itertools.islice(observers(ty), 200))))
            case 2:
                body = gen.term(rng.choice((BOOL_T, UNIT_T)), rng.randint(2, 12), {"h": ty})
                ctx = App(ULam("h", erase(body)), HOLE)
            case 3:
                arg = random_tgt_term(rng, rng.randint(1, 3))
                ctx = plug(random_tgt_context(rng, rng.randint(1, max_ctx)), App(HOLE, arg))
            case _:
                obs = erase(rng.choice(list(itertools.islice(observers(ty), 200))))
                ctx = App(App(church(rng.randint(1, max_reps)), ULam("v0", obs)), UNIT)
        i += 1
        yield ctx, t, ty


def church(n: int) -> Term:
    body: Term = Var("z")
    for _ in range(n):
        body = App(Var("s"), body)
    return ULam("s", ULam("z", body))


def fuzz_backtrans_cases(n: int, seed: int = 0) -> list[tuple[Term, Term, SrcType]]:
    return list(itertools.islice(backtrans_case_stream(seed), n))


def backtrans_direction_check(cases: Sequence[tuple[Term, Term, SrcType]], fuel_tgt: int = 10**5,
                              fuel_src: int = 10**7, depths: Sequence[int] = (),
                              max_precise: int = 5000,
                              fuel_imprecise: int = 10**5) -> list[BacktransRecord]:
    """Check both directions of back-translation correctness on each case.

    Precise: if the target plug terminates in k steps, the back-translation
    at depth k+1 terminates (within ``fuel_src``).  Imprecise: at every
    checked depth, if the back-translation terminates then so does the target
    plug.  A back-translation that runs out of fuel puts no obligation on the
    target, so the extra depths run with the smaller ``fuel_imprecise``.
    """
    out = []
    for i, (ctx, t, ty) in enumerate(cases):
        tgt = observe_tgt(plug(ctx, compile_term(t, ty)), fuel_tgt)
        checked = []
        precise, pobs = "vacuous", None
        if tgt.tag == TERMINATES and tgt.steps <= max_precise:
            n = tgt.steps + 1
            pobs = observe_src(plug(backtranslate(ctx, ty, n), t), fuel_src)
            precise = {TERMINATES: "pass", TIMEOUT: "inconclusive"}.get(pobs.tag, "fail")
            checked.append((n, pobs))
        for n in depths:
            checked.append((n, observe_src(plug(backtranslate(ctx, ty, n), t), fuel_imprecise)))
        imprecise = "pass"
        for _, o in checked:
            if o.tag == TERMINATES and tgt.tag != TERMINATES:
                imprecise = "inconclusive" if tgt.tag == TIMEOUT else "fail"
                if imprecise == "fail":
                    break
        out.append(BacktransRecord(i, ctx, t, ty, tgt, precise, pobs, imprecise, tuple(checked)))
    return out


@dataclass(frozen=True)
class Component:
    term: Term
    dom: SrcType
    cod: SrcType


def modular_pair(c1: Component, c2: Component, x1: str = "x1", x2: str = "x2") -> tuple[Term, Term]:
    """Whole-program compilation of the linked source, and the linked separate compilations."""
    linked = link_src(c1.term, c1.dom, c1.cod, c2.dom, c2.cod, c2.term, x1, x2)
    whole = compile_term(linked, Prod(Arrow(c1.dom, c1.cod), Arrow(c2.dom, c2.cod)))
    m1 = compile_modular(c1.term, c1.dom, c1.cod, x2, c2.dom, c2.cod)
    m2 = compile_modular(c2.term, c2.dom, c2.cod, x1, c1.dom, c1.cod)
    return whole, link_tgt(m1, m2, x1, x2)


def modularity_check(c1: Component, c2: Component, cfg: GenConfig | None = None,
                     x1: str = "x1", x2: str = "x2") -> tuple[EquivVerdict, TestReport]:
    whole, parts = modular_pair(c1, c2, x1, x2)
    verdict, report = equiv_check_tgt(whole, parts, cfg)
    report.title = "modularity"
    return verdict, report


@dataclass(frozen=True)
class EraseRecord:
    case_id: int
    term: Term
    src: Observation
    tgt: Observation
    verdict: str


def erase_check(terms: Sequence[Term], src_fuel: int = 10**5, tgt_fuel: int = 10**6,
                escalate: int = 10) -> list[EraseRecord]:
    """Source and erased target must equi-terminate and agree on base values.

    A one-sided timeout is retried once with ``escalate`` times the fuel of
    the side that ran out; whatever is still a timeout is inconclusive.
    """
    out = []
    for i, t in enumerate(terms):
        e = erase(t)
        s = observe_src(t, src_fuel)
        g = observe_tgt(e, tgt_fuel)
        if s.tag == TIMEOUT and g.tag != TIMEOUT:
            s = observe_src(t, src_fuel * escalate)
        elif g.tag == TIMEOUT and s.tag != TIMEOUT:
            g = observe_tgt(e, tgt_fuel * escalate)
        out.append(EraseRecord(i, t, s, g, compare(s, g, True)[0]))
    return out
