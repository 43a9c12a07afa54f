import itertools

import pytest

from fabt.backtrans import omega
from fabt.compiler import compile_term, erase
from fabt.contexts import linking_ctx
from fabt.parser import parse_src, parse_tgt, parse_type
from fabt.syntax import BOOL_T, HOLE, TRUE, UNIT, App, Proj1, ULam, Var
from fabt.harness import (
    AGREE, DISAGREE, INCONCLUSIVE, Component, GenConfig, Observation, backtrans_direction_check,
    canonicalize, compare, distinguish_search, equiv_check_tgt, erase_check, gen_tgt_contexts,
    modularity_check, observe_src, observe_tgt, probe_contexts, replay,
)

SMALL = GenConfig(exhaustive_size=4, samples_per_size=50, count=50)
UU = parse_type("Unit -> Unit")
ID_U = parse_src(r"\x:Unit. x")
CONST_U = parse_src(r"\x:Unit. unit")


def test_observations():
    assert observe_tgt(App(ULam("x", Var("x")), TRUE), 10) == Observation("terminates", 1, TRUE)
    assert observe_tgt(Proj1(TRUE), 10) == Observation("wrong", 1)
    assert observe_src(omega(BOOL_T), 100) == Observation("timeout", 100)
    assert str(Observation("wrong", 3)) == "wrong:3"


def test_compare_policy():
    t, w, o = Observation("terminates", 1), Observation("wrong", 2), Observation("timeout", 9)
    assert compare(t, w) == (DISAGREE, False)
    assert compare(t, o) == (INCONCLUSIVE, False)
    assert compare(w, w) == (AGREE, False)
    tv, fv = Observation("terminates", 1, TRUE), Observation("terminates", 4, parse_tgt("false"))
    assert compare(tv, fv) == (DISAGREE, True)
    assert compare(tv, fv, values=False) == (AGREE, False)


def test_context_stream():
    ctxs = list(gen_tgt_contexts(SMALL))
    assert ctxs[0] == HOLE
    assert App(HOLE, TRUE) in ctxs[:20]
    assert all(c.holes == 1 and not c.fv for c in ctxs)
    assert len({canonicalize(c) for c in ctxs}) == len(ctxs)
    assert ctxs == list(gen_tgt_contexts(SMALL))
    other = list(gen_tgt_contexts(GenConfig(exhaustive_size=4, samples_per_size=50, count=50, seed=1)))
    assert other[:700] == ctxs[:700] and other != ctxs


def test_probe_corpus_has_linking_shapes():
    probes = probe_contexts()
    assert App(HOLE, TRUE) in probes
    assert linking_ctx(ULam("b", TRUE)) in probes
    assert App(Proj1(linking_ctx(ULam("b", TRUE))), UNIT) in probes


def test_equiv_erased_pair_disagrees():
    verdict, report = equiv_check_tgt(erase(ID_U), erase(CONST_U), SMALL)
    assert verdict.tag == DISAGREE
    assert verdict.witness == App(HOLE, TRUE)
    assert verdict.obs1.value == TRUE and verdict.obs2.value == UNIT
    rec = next(r for r in report.records if r.ctx == App(HOLE, TRUE))
    assert rec.by_value


def test_equiv_compiled_pair_agrees():
    verdict, report = equiv_check_tgt(compile_term(ID_U, UU), compile_term(CONST_U, UU), SMALL)
    assert verdict.tag == AGREE
    assert sum(report.counts.values()) == report.total


def test_reflexivity():
    t = erase(parse_src(r"\f:Unit -> Bool. <f unit, f unit>"))
    verdict, _ = equiv_check_tgt(t, t, SMALL)
    assert verdict.tag == AGREE


def test_all_timeouts_inconclusive():
    loop = parse_tgt("(\\x. x x) (\\x. x x)")
    verdict, report = equiv_check_tgt(loop, loop, GenConfig(fuel=50), contexts=[HOLE, App(HOLE, UNIT)])
    assert verdict.tag == INCONCLUSIVE and verdict.timeouts == 2


def test_witness_replays():
    a, b = erase(ID_U), erase(CONST_U)
    verdict, _ = equiv_check_tgt(a, b, SMALL)
    for _ in range(2):
        o1, o2, tag = replay(verdict.witness, a, b, SMALL.fuel)
        assert (o1, o2, tag) == (verdict.obs1, verdict.obs2, DISAGREE)


def test_more_fuel_keeps_agreement():
    a = compile_term(ID_U, UU)
    b = compile_term(CONST_U, UU)
    ctxs = list(itertools.islice(gen_tgt_contexts(SMALL), 400))
    low, _ = equiv_check_tgt(a, b, GenConfig(fuel=10**3), contexts=ctxs)
    high, _ = equiv_check_tgt(a, b, GenConfig(fuel=10**5), contexts=ctxs)
    assert low.tag == AGREE and low.timeouts == 0
    assert high.tag == AGREE


def test_search_examples():
    found = distinguish_search(TRUE, parse_src("false"), BOOL_T)
    assert found is not None and found.tgt1.value == TRUE
    assert distinguish_search(parse_src(r"\x:Bool. x"), parse_src(r"\x:Bool. x"),
                              parse_type("Bool -> Bool"), GenConfig(search_budget=300)) is None
    assert distinguish_search(ID_U, CONST_U, UU, GenConfig(search_budget=300)) is None


def test_search_witness_is_conclusive_in_target():
    a, b = parse_src(r"\x:Bool. x"), parse_src(r"\x:Bool. true")
    ty = parse_type("Bool -> Bool")
    found = distinguish_search(a, b, ty)
    tgt_ctx = erase(found.ctx)
    o1, o2, tag = replay(tgt_ctx, compile_term(a, ty), compile_term(b, ty), 10**5)
    assert tag == DISAGREE


def test_search_rejects_ill_typed():
    with pytest.raises(ValueError):
        distinguish_search(TRUE, UNIT, BOOL_T)


def test_backtrans_check_examples():
    recs = backtrans_direction_check([
        (HOLE, TRUE, BOOL_T),
        (App(HOLE, TRUE), ID_U, UU),
    ], depths=(1, 2))
    assert recs[0].target.tag == "terminates" and recs[0].precise == "pass"
    assert recs[1].target.tag == "wrong" and recs[1].precise == "vacuous"
    assert recs[1].imprecise == "pass"
    assert all(o.tag == "timeout" for _, o in recs[1].depths)
    assert backtrans_direction_check([]) == []


def test_modularity_examples():
    unit, boolean = parse_type("Unit"), parse_type("Bool")
    one_way = (Component(parse_src(r"\a:Unit. x2 a"), unit, boolean),
               Component(parse_src(r"\b:Unit. true"), unit, boolean))
    verdict, _ = modularity_check(*one_way, SMALL)
    assert verdict.tag == AGREE
    looping = (Component(parse_src(r"\a:Unit. x2 a"), unit, unit),
               Component(parse_src(r"\b:Unit. x1 b"), unit, unit))
    verdict, report = modularity_check(*looping, GenConfig(exhaustive_size=3, samples_per_size=10, count=10, fuel=2000))
    assert verdict.tag != DISAGREE
    assert report.counts[INCONCLUSIVE] > 0


def test_erase_check():
    terms = [parse_src(r"(\x:Bool. x) true"), parse_src("unit"),
             parse_src(r"(fix [Bool -> Bool] (\f:Bool -> Bool. \b:Bool. f b)) true")]
    recs = erase_check(terms, src_fuel=1000, tgt_fuel=1000, escalate=2)
    assert [r.verdict for r in recs] == [AGREE, AGREE, INCONCLUSIVE]


def test_source_context_observers_type():
    from fabt.harness import observers
    from fabt.source import ctx_typecheck
    ty = parse_type("(Bool -> Unit + Bool) * (Unit -> Bool)")
    obs = list(observers(ty))
    assert obs
    for c in obs:
        _, out = ctx_typecheck(c, {}, ty)
        assert out in (BOOL_T, parse_type("Unit"))
