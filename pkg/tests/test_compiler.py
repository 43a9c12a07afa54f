import pytest

from fabt.compiler import Z, compile_modular, compile_term, confine, erase, protect, z_combinator
from fabt.contexts import link_tgt
from fabt.errors import TypeCheckError
from fabt.generators import random_type
from fabt.machine import FuelExhausted, Value, WrongOutcome
from fabt.parser import parse_src, parse_tgt, parse_type
from fabt.printer import show
from fabt.syntax import (
    BOOL_T, TRUE, UNIT, UNIT_T, App, Arrow, Fix, Lam, Pair, ULam, Var, alpha_eq,
)
from fabt.target import evaluate, well_scoped

UU = Arrow(UNIT_T, UNIT_T)


def test_z_combinator():
    assert z_combinator() is Z
    assert well_scoped([], Z)
    assert show(Z) == "\\f. (\\x. f (\\y. x x y)) (\\x. f (\\y. x x y))"
    out = evaluate(App(App(Z, ULam("f", ULam("b", Var("b")))), TRUE), 100)
    assert isinstance(out, Value) and out.term == TRUE
    loop = App(App(Z, ULam("f", ULam("b", App(Var("f"), Var("b"))))), TRUE)
    assert isinstance(evaluate(loop, 10**4), FuelExhausted)


def test_erase_examples():
    assert erase(Lam("x", UNIT_T, Var("x"))) == ULam("x", Var("x"))
    body = Lam("f", Arrow(BOOL_T, BOOL_T), Lam("b", BOOL_T, Var("b")))
    assert erase(Fix(BOOL_T, BOOL_T, body)) == App(Z, erase(body))
    assert erase(Pair(UNIT, TRUE)) == Pair(UNIT, TRUE)


def test_erase_rejects_target_constructs():
    with pytest.raises(TypeCheckError):
        erase(ULam("x", Var("x")))


def test_wrapper_shapes():
    assert show(protect(UNIT_T)) == "\\x. x"
    assert show(protect(BOOL_T)) == "\\x. x"
    assert show(confine(UNIT_T)) == "\\y. y; unit"
    assert show(confine(BOOL_T)) == "\\y. if y then true else false"
    assert alpha_eq(protect(UU), parse_tgt("\\y. \\x. (\\x. x) (y ((\\y. y; unit) x))"))
    assert alpha_eq(confine(UU), parse_tgt("\\y. \\x. (\\y. y; unit) (y ((\\x. x) x))"))


def test_wrapper_examples():
    assert isinstance(evaluate(App(App(protect(UU), ULam("x", Var("x"))), TRUE), 100), WrongOutcome)
    out = evaluate(App(confine(BOOL_T), TRUE), 100)
    assert isinstance(out, Value) and out.term == TRUE
    assert isinstance(evaluate(App(confine(UNIT_T), TRUE), 100), WrongOutcome)


def test_wrappers_closed_for_random_types():
    import random
    rng = random.Random(3)
    for _ in range(200):
        ty = random_type(rng, 4)
        assert not protect(ty).fv and not confine(ty).fv


def test_compile_examples():
    c = compile_term(Lam("x", UNIT_T, Var("x")), UU)
    assert c == App(protect(UU), ULam("x", Var("x")))
    assert isinstance(evaluate(App(c, TRUE), 100), WrongOutcome)
    out = evaluate(App(c, UNIT), 100)
    assert isinstance(out, Value) and out.term == UNIT
    out = evaluate(compile_term(TRUE, BOOL_T), 10)
    assert isinstance(out, Value) and out.term == TRUE


def test_compile_rejects_ill_typed_and_open():
    with pytest.raises(TypeCheckError):
        compile_term(TRUE, UNIT_T)
    with pytest.raises(TypeCheckError):
        compile_term(Var("x"), UNIT_T)


def test_compile_modular_shape():
    t1 = parse_src(r"\a:Unit. x2 a")
    m = compile_modular(t1, UNIT_T, BOOL_T, "x2", UNIT_T, BOOL_T)
    assert m.fv == {"x2"}
    ub = Arrow(UNIT_T, BOOL_T)
    expected = App(protect(ub), ULam("a", App(ULam("x2", erase(t1.body)), App(confine(ub), Var("x2")))))
    assert m == expected


def test_compile_modular_requires_lambda_and_typing():
    with pytest.raises(TypeCheckError):
        compile_modular(TRUE, UNIT_T, BOOL_T, "x2", UNIT_T, BOOL_T)
    with pytest.raises(TypeCheckError):
        compile_modular(parse_src(r"\a:Unit. x2 a"), UNIT_T, UNIT_T, "x2", UNIT_T, BOOL_T)


def test_compile_modular_parameter_named_like_import():
    t1 = parse_src(r"\x2:Unit. unit")
    m = compile_modular(t1, UNIT_T, UNIT_T, "x2", UNIT_T, UNIT_T)
    linked = link_tgt(m, erase(parse_src(r"\b:Unit. b")))
    out = evaluate(App(App(parse_tgt("\\p. fst p"), linked), UNIT), 10**4)
    assert isinstance(out, Value) and out.term == UNIT


def test_linked_modular_pair_computes():
    t1 = parse_src(r"\a:Unit. x2 a")
    t2 = parse_src(r"\b:Unit. true")
    m1 = compile_modular(t1, UNIT_T, BOOL_T, "x2", UNIT_T, BOOL_T)
    m2 = compile_modular(t2, UNIT_T, BOOL_T, "x1", UNIT_T, BOOL_T)
    out = evaluate(App(App(parse_tgt("\\p. fst p"), link_tgt(m1, m2)), UNIT), 10**5)
    assert isinstance(out, Value) and out.term == TRUE


def test_confine_catches_misbehaving_partner():
    # t1 expects a Unit -> Unit partner; the partner returns true instead
    t1 = parse_src(r"\a:Unit. x2 a")
    m1 = compile_modular(t1, UNIT_T, UNIT_T, "x2", UNIT_T, UNIT_T)
    linked = link_tgt(m1, parse_tgt("\\b. true"))
    out = evaluate(App(App(parse_tgt("\\p. fst p"), linked), UNIT), 10**5)
    assert isinstance(out, WrongOutcome)


def test_wrapper_binders_named_by_depth():
    ty = parse_type("(Unit -> Unit) -> Unit")
    s = show(protect(ty))
    assert s.startswith("\\y2. \\x2.")
