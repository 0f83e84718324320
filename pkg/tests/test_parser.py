from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from lazymdp.errors import ModelError, OutOfRangeError, ParseError
from lazymdp.expr import Cmp, Const, Var
from lazymdp.model import eval_assignment, with_target_command
from lazymdp.parser import format_model, load_model, parse_model
from lazymdp.random_models import random_model
from tests.conftest import BUNDLED, bundled_path


def test_running_example_parses():
    m, q = load_model(bundled_path("running_example_bounded"))
    assert m.names == ("x", "y")
    assert len(m.commands) == 3
    assert [b.probability for b in m.commands[0].branches] == [Fraction(4, 5), Fraction(1, 5)]
    assert q.target == Cmp("==", Var("y"), Const(3))


def test_probability_sum_error():
    text = "var x : [0..1] init 0;\n[true] 0.5: (x'=0) + 0.6: (x'=1);\ntarget x == 1;\n"
    with pytest.raises(ModelError, match="probabilities sum to 11/10"):
        parse_model(text)


def test_out_of_range_assignment_is_a_runtime_error():
    m, q = parse_model("var x : [0..3] init 0;\n[true] 1: (x'=5);\ntarget x == 1;\n")
    with pytest.raises(OutOfRangeError):
        eval_assignment(m, m.commands[0].branches[0].assignment, m.initial)


def test_errors_report_line_and_column():
    with pytest.raises(ParseError) as info:
        parse_model("var x : [0..3] init 0;\n[x <] 1: (x'=1);\ntarget x == 1;\n")
    assert (info.value.line, info.value.column) == (2, 5)
    assert str(info.value).startswith("2:5:")


def test_type_errors():
    with pytest.raises(ModelError):
        parse_model("var x : [0..3] init 0;\n[x + 1] 1: (x'=1);\ntarget x == 1;\n")
    with pytest.raises(ModelError):
        parse_model("var b : bool init false;\n[true] 1: (b'=1);\ntarget b;\n")
    with pytest.raises(ModelError):
        parse_model("var x : [0..3] init 0;\n[true] 1: (z'=1);\ntarget x == 1;\n")


def test_missing_target():
    with pytest.raises(ParseError):
        parse_model("var x : [0..3] init 0;\n")


def test_probability_forms_and_comments():
    m, _ = parse_model(
        "// header\nvar x : [0..3] init 0; // trailing\n"
        "[true] 1/4: (x'=1) + 0.25: (x'=2) + 0.5: ();\ntarget x == 2;\n"
    )
    probs = [b.probability for b in m.commands[0].branches]
    assert probs == [Fraction(1, 4), Fraction(1, 4), Fraction(1, 2)]
    assert m.commands[0].branches[2].assignment.updates == ()


def test_conjunction_inside_update_expression():
    m, _ = parse_model(
        "var a : bool init false;\nvar b : bool init true;\n"
        "[true] 1: (a'=(a & b) & b'=!b);\ntarget a;\n"
    )
    upd = dict(m.commands[0].branches[0].assignment.updates)
    assert set(upd) == {"a", "b"}


@pytest.mark.parametrize("name", BUNDLED)
def test_bundled_round_trip(name):
    m, q = load_model(bundled_path(name))
    assert parse_model(format_model(m, q)) == (m, q)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6))
def test_round_trip_random_models(seed):
    m, q = random_model(seed)
    text = format_model(m, q)
    assert parse_model(text) == (m, q)
    assert format_model(*parse_model(text)) == text


def test_format_omits_target_command():
    m, q = load_model(bundled_path("coin"))
    mt, _ = with_target_command(m, q)
    assert format_model(mt, q).count("[") == format_model(m, q).count("[")
