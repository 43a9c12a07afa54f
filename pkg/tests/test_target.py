import pytest

from fabt.compiler import Z
from fabt.errors import ScopeError
from fabt.machine import FuelExhausted, Value, WrongOutcome
from fabt.parser import parse_tgt
from fabt.syntax import (
    FALSE, HOLE, TRUE, UNIT, WRONG, App, If, Pair, Proj1, Seq, ULam, Var,
)
from fabt.target import evaluate, evaluate_reference, step, well_scoped

ID = ULam("x", Var("x"))


def test_well_scoped_examples():
    assert well_scoped([], ULam("x", Var("x")))
    assert not well_scoped([], Var("x"))
    assert well_scoped(["x2"], ULam("a", App(Var("x2"), Var("a"))))


def test_well_scoped_rejects_holes():
    with pytest.raises(ScopeError):
        well_scoped([], App(HOLE, TRUE))


def test_step_examples():
    assert step(App(ID, TRUE)) == TRUE
    assert step(Proj1(TRUE)) == WRONG
    assert step(Seq(TRUE, UNIT)) == WRONG
    assert step(WRONG) is None
    assert step(UNIT) is None


@pytest.mark.parametrize("src", [
    "true unit", "fst true", "snd unit", "case true of inl x => x | inr y => y",
    "if unit then true else false", "(\\x. x); unit", "false; true",
])
def test_type_error_redexes_go_wrong(src):
    assert isinstance(evaluate(parse_tgt(src), 10), WrongOutcome)


def test_eval_examples():
    assert evaluate(App(ID, TRUE), 10) == Value(TRUE, 1)
    out = evaluate(App(Proj1(TRUE), UNIT), 10)
    assert out == WrongOutcome(2)
    assert evaluate_reference(App(Proj1(TRUE), UNIT), 10) == out
    z = App(App(Z, ULam("f", ULam("b", Var("b")))), TRUE)
    res = evaluate(z, 100)
    assert isinstance(res, Value) and res.term == TRUE


def test_wrong_at_top_costs_nothing_and_collapse_costs_one():
    assert evaluate(WRONG, 5) == WrongOutcome(0)
    assert evaluate(Pair(WRONG, TRUE), 5) == WrongOutcome(1)
    assert evaluate_reference(Pair(WRONG, TRUE), 5) == WrongOutcome(1)


def test_wrong_absorbent_in_fuel():
    t = parse_tgt("(\\x. x) ((\\y. y) (fst unit))")
    first = evaluate(t, 100)
    assert isinstance(first, WrongOutcome)
    for fuel in range(first.steps, first.steps + 5):
        assert evaluate(t, fuel) == first


def test_argument_evaluated_before_bad_application():
    # a non-function in function position goes wrong only once the argument is a value
    t = App(TRUE, If(TRUE, FALSE, TRUE))
    assert step(t) == App(TRUE, FALSE)
    assert evaluate(t, 10) == evaluate_reference(t, 10)


def test_self_application_diverges():
    omega = App(ULam("x", App(Var("x"), Var("x"))), ULam("x", App(Var("x"), Var("x"))))
    assert evaluate(omega, 1000) == FuelExhausted(1000)


def test_closed_terms_stay_closed():
    t = parse_tgt("(\\f. \\x. f x) (\\y. <y, y>) true")
    while t is not None and not t.is_val:
        assert not t.fv
        t = step(t)
