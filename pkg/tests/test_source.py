import pytest

from fabt.backtrans import omega
from fabt.errors import StuckError, TypeCheckError
from fabt.machine import FuelExhausted, Value
from fabt.parser import parse_src
from fabt.source import as_env, check, evaluate, evaluate_reference, is_value, step, typecheck
from fabt.syntax import (
    BOOL_T, FALSE, TRUE, UNIT, UNIT_T, App, Arrow, Case, Fix, If, Inl, Inr, Lam,
    Pair, Prod, Proj1, Seq, Sum, Var, alpha_eq, subst,
)

ID_BOOL = Lam("b", BOOL_T, Var("b"))
FIX_ID = Fix(BOOL_T, BOOL_T, Lam("f", Arrow(BOOL_T, BOOL_T), ID_BOOL))


def test_values():
    assert is_value(UNIT)
    assert not is_value(App(Lam("x", UNIT_T, Var("x")), UNIT))
    assert not is_value(Pair(TRUE, App(Lam("x", UNIT_T, Var("x")), UNIT)))
    assert is_value(Inr(Pair(TRUE, Lam("x", UNIT_T, App(Var("x"), Var("x"))))))


def test_typecheck_examples():
    assert typecheck({}, Lam("x", UNIT_T, Var("x"))) == Arrow(UNIT_T, UNIT_T)
    assert typecheck({}, FIX_ID) == Arrow(BOOL_T, BOOL_T)
    with pytest.raises(TypeCheckError):
        typecheck({}, App(Lam("x", UNIT_T, Var("x")), TRUE))


def test_typecheck_errors_carry_location_and_types():
    with pytest.raises(TypeCheckError) as e:
        typecheck({}, Pair(UNIT, App(Lam("x", UNIT_T, Var("x")), TRUE)))
    assert e.value.path[0] == "snd"
    assert {e.value.expected, e.value.actual} == {UNIT_T, BOOL_T}
    with pytest.raises(TypeCheckError, match="unbound"):
        typecheck({}, Var("nope"))


def test_fix_needs_function_body():
    with pytest.raises(TypeCheckError):
        typecheck({}, Fix(BOOL_T, BOOL_T, ID_BOOL))


def test_env_shadowing_rightmost_wins():
    env = as_env([("x", UNIT_T), ("x", BOOL_T)])
    assert typecheck(env, Var("x")) == BOOL_T


def test_sums_and_check_mode():
    # the other half of an injection defaults to Unit unless a type is given
    assert typecheck({}, Inl(TRUE)) == Sum(BOOL_T, UNIT_T)
    assert check({}, Inl(TRUE), Sum(BOOL_T, Arrow(BOOL_T, BOOL_T)))
    t = parse_src(r"\s:Bool + Unit. case s of inl b => b | inr u => false")
    assert typecheck({}, t) == Arrow(Sum(BOOL_T, UNIT_T), BOOL_T)


def test_subst_examples():
    assert subst(Var("x"), "x", TRUE) == TRUE
    assert subst(Lam("x", BOOL_T, Var("x")), "x", TRUE) == Lam("x", BOOL_T, Var("x"))
    assert subst(Pair(Var("x"), Var("y")), "x", UNIT) == Pair(UNIT, Var("y"))


def test_subst_avoids_capture():
    out = subst(Lam("y", BOOL_T, Pair(Var("x"), Var("y"))), "x", Var("y"))
    assert isinstance(out, Lam) and out.name != "y"
    assert alpha_eq(out, Lam("z", BOOL_T, Pair(Var("y"), Var("z"))))


def test_step_examples():
    assert step(App(ID_BOOL, TRUE)) == TRUE
    assert alpha_eq(step(FIX_ID), ID_BOOL)
    assert step(Seq(UNIT, TRUE)) == TRUE
    assert step(TRUE) is None


def test_step_order_function_then_argument():
    t = App(App(Lam("f", Arrow(BOOL_T, BOOL_T), Var("f")), ID_BOOL), App(ID_BOOL, TRUE))
    assert step(t) == App(ID_BOOL, App(ID_BOOL, TRUE))


def test_stuck_only_on_ill_typed():
    with pytest.raises(StuckError):
        step(App(TRUE, UNIT))
    with pytest.raises(StuckError):
        step(If(UNIT, TRUE, FALSE))


def test_eval_examples():
    assert evaluate(TRUE, 0) == Value(TRUE, 0)
    assert evaluate(App(FIX_ID, TRUE), 10) == Value(TRUE, 2)
    assert evaluate_reference(App(FIX_ID, TRUE), 10) == Value(TRUE, 2)
    assert evaluate(omega(BOOL_T), 10**4) == FuelExhausted(10**4)


def test_case_and_projection_eval():
    t = parse_src(r"case inr <true, unit> of inl x => false | inr p => fst p")
    assert evaluate(t, 100) == Value(TRUE, 2)
    assert evaluate_reference(t, 100) == Value(TRUE, 2)


def test_recursive_function_terminates():
    # a function that calls itself once on false then stops
    t = parse_src(r"(fix [Bool -> Bool] (\f:Bool -> Bool. \b:Bool. if b then f false else true)) true")
    out = evaluate(t, 1000)
    assert isinstance(out, Value) and out.term == TRUE
    assert out == evaluate_reference(t, 1000)


def test_zero_fuel_non_value_times_out():
    assert evaluate(App(ID_BOOL, TRUE), 0) == FuelExhausted(0)
    assert evaluate(App(ID_BOOL, TRUE), 1) == Value(TRUE, 1)


def test_pair_evaluation_left_to_right():
    t = Pair(App(ID_BOOL, TRUE), omega(UNIT_T))
    assert step(t) == Pair(TRUE, omega(UNIT_T))
    assert isinstance(evaluate(Proj1(t), 1000), FuelExhausted)


def test_case_binders_typed():
    t = Case(Inl(TRUE), "a", Var("a"), "b", FALSE)
    assert typecheck({}, t) == BOOL_T
    assert typecheck({}, Lam("p", Prod(BOOL_T, UNIT_T), Proj1(Var("p")))) == Arrow(Prod(BOOL_T, UNIT_T), BOOL_T)
