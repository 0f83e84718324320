from fractions import Fraction

import pytest

from lazymdp.errors import ModelError, OutOfRangeError
from lazymdp.expr import FALSE, TRUE, And, Arith, Cmp, Const, Var
from lazymdp.model import (
    IDENTITY, Assignment, Branch, Command, ReachabilityQuery, VarDecl, command,
    enabled_commands, eval_assignment, eval_distribution, make_model,
    weakest_precondition, with_target_command,
)

X, Y = Var("x"), Var("y")


def test_assignment_examples(running):
    v00 = running.valuation({"x": 0, "y": 0})
    step = Assignment((("x", Arith("+", X, Const(1))), ("y", Y)))
    assert eval_assignment(running, step, v00) == running.valuation({"x": 1, "y": 0})
    assert eval_assignment(running, IDENTITY, v00) == v00
    jump = Assignment((("x", Const(1)), ("y", Const(2))))
    assert eval_assignment(running, jump, v00) == running.valuation({"x": 1, "y": 2})


def test_assignment_out_of_range(running):
    bad = Assignment((("x", Const(5)),))
    with pytest.raises(OutOfRangeError) as info:
        eval_assignment(running, bad, running.initial)
    assert info.value.variable == "x"


def test_distribution_of_first_command(running):
    dist = eval_distribution(running, running.commands[0], running.initial)
    assert dist == {
        running.valuation({"x": 1, "y": 0}): Fraction(4, 5),
        running.valuation({"x": 0, "y": 0}): Fraction(1, 5),
    }


def test_distribution_merges_equal_results():
    m = make_model([VarDecl("x", "int", 0, 3, 0)], [])
    c = command(TRUE, (0.5, {"x": 1}), (0.5, {"x": Arith("+", Const(0), Const(1))}))
    dist = eval_distribution(m, c, m.initial)
    assert dist == {m.valuation({"x": 1}): Fraction(1)}
    assert sum(dist.values()) == 1


def test_weakest_precondition_examples(running):
    step = Assignment((("x", Arith("+", X, Const(1))),))
    assert weakest_precondition(step, Cmp("==", X, Const(2))) == Cmp("==", Arith("+", X, Const(1)), Const(2))
    b = Cmp("<", X, Y)
    assert weakest_precondition(IDENTITY, b) == b
    jump = Assignment((("x", Const(1)), ("y", Const(2))))
    assert weakest_precondition(jump, And((Cmp("==", X, Const(1)), Cmp("==", Y, Const(2))))) == TRUE


def test_weakest_precondition_on_all_valuations(running):
    for c in running.commands:
        for br in c.branches:
            for target in [c2.guard for c2 in running.commands]:
                wp = weakest_precondition(br.assignment, target)
                for v in running.all_valuations():
                    try:
                        after = eval_assignment(running, br.assignment, v)
                    except OutOfRangeError:
                        continue
                    assert wp.eval(v) == target.eval(after)


def test_enabled_commands(running):
    assert enabled_commands(running, running.valuation({"x": 0, "y": 0})) == [0, 1]
    assert enabled_commands(running, running.valuation({"x": 2, "y": 2})) == [0, 2]
    m = make_model([VarDecl("x", "int", 0, 1, 0)], [command(FALSE, (1, {}))])
    assert enabled_commands(m, m.initial) == []


def test_target_command_is_appended():
    from tests.conftest import bundled_path
    from lazymdp.parser import load_model

    m, q = load_model(bundled_path("running_example_bounded"))
    mt, idx = with_target_command(m, q)
    assert len(mt.commands) == 4 and idx == 3
    assert mt.commands[3].guard == Cmp("==", Y, Const(3))
    assert mt.commands[3].branches == (Branch(Fraction(1), IDENTITY),)
    assert mt.commands[:3] == m.commands
    empty = make_model([VarDecl("x", "int", 0, 1, 0)], [])
    assert len(with_target_command(empty, ReachabilityQuery(TRUE))[0].commands) == 1
    twice = with_target_command(mt, q)[0]
    assert len(twice.commands) == 5


def test_command_validation():
    with pytest.raises(ModelError, match="probabilities sum to 11/10"):
        command(TRUE, (0.5, {}), (0.6, {}))
    with pytest.raises(ModelError):
        Command(TRUE, (Branch(Fraction(0), IDENTITY), Branch(Fraction(1), IDENTITY)))


def test_variable_declarations_are_validated():
    with pytest.raises(ModelError):
        VarDecl("x", "int", 3, 1, 2)
    with pytest.raises(ModelError):
        VarDecl("x", "int", 0, 3, 4)
    with pytest.raises(ModelError):
        make_model([VarDecl("x", "int", 0, 1, 0), VarDecl("x", "bool", initial=False)], [])


def test_all_valuations_match_array_order(running):
    arrays = running.valuation_arrays()
    vals = list(running.all_valuations())
    assert len(vals) == running.valuation_count() == 16
    for i, v in enumerate(vals):
        assert (arrays["x"][i], arrays["y"][i]) == (v["x"], v["y"])
