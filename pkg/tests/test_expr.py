import itertools

import pytest
from hypothesis import given, settings, strategies as st

from lazymdp.errors import EvaluationError, ModelError
from lazymdp.expr import (
    FALSE, TRUE, And, Arith, Cmp, Const, Implies, Neg, Not, Or, Var,
    free_vars, negate, simplify, substitute, to_smtlib, type_of,
)

X, Y, B = Var("x"), Var("y"), Var("b")
TYPES = {"x": "int", "y": "int", "b": "bool"}


def test_eval_basics():
    env = {"x": 0, "y": 0}
    assert Cmp("==", X, Const(0)).eval(env) is True
    assert Arith("+", X, Const(1)).eval(env) == 1
    assert And((Cmp("==", X, Const(2)), Cmp("==", Y, Const(2)))).eval({"x": 2, "y": 0}) is False


def test_overflow_is_an_evaluation_error():
    big = Const(2**62)
    with pytest.raises(EvaluationError):
        Arith("*", big, Const(4)).eval({})


def test_simplify_examples():
    assert simplify(And((Cmp("==", Const(1), Const(1)), B))) == B
    assert simplify(Arith("+", X, Const(0))) == X
    assert simplify(Not(Not(Cmp("<", X, Const(2))))) == Cmp("<", X, Const(2))
    assert simplify(And((B, Not(B)))) == FALSE
    assert simplify(Or((B, Not(B)))) == TRUE


def test_const_identity_distinguishes_bool_and_int():
    assert Const(1) != Const(True)


def test_substitute_is_simultaneous():
    e = Cmp("<", X, Y)
    out = substitute(e, {"x": Y, "y": X})
    assert out == Cmp("<", Y, X)


def test_free_vars_in_first_occurrence_order():
    assert free_vars(And((Cmp("==", Y, X), B, Cmp("<", X, Const(1))))) == ("y", "x", "b")


def test_type_checking():
    assert type_of(Cmp("==", B, TRUE), TYPES) == "bool"
    with pytest.raises(ModelError):
        type_of(Arith("+", X, B), TYPES)
    with pytest.raises(ModelError):
        type_of(Cmp("<", B, B), TYPES)


def test_smtlib_rendering():
    assert to_smtlib(And((Cmp("<=", X, Const(-1)), Not(B)))) == "(and (<= |x| (- 1)) (not |b|))"


# random expressions over x, y in [-2..2] and a boolean b

ints = st.deferred(
    lambda: st.one_of(
        st.integers(-3, 3).map(Const),
        st.sampled_from([X, Y]),
        st.builds(Neg, ints),
        st.builds(Arith, st.sampled_from("+-*"), ints, ints),
    )
)
bools = st.deferred(
    lambda: st.one_of(
        st.booleans().map(Const),
        st.just(B),
        st.builds(Cmp, st.sampled_from(["==", "!=", "<", "<=", ">", ">="]), ints, ints),
        st.builds(Not, bools),
        st.lists(bools, min_size=0, max_size=3).map(And),
        st.lists(bools, min_size=0, max_size=3).map(Or),
        st.builds(Implies, bools, bools),
    )
)

ENVS = [
    {"x": x, "y": y, "b": b}
    for x, y, b in itertools.product(range(-2, 3), range(-2, 3), (False, True))
]


@settings(max_examples=300, deadline=None)
@given(bools)
def test_simplify_preserves_semantics(e):
    s = simplify(e)
    for env in ENVS:
        assert s.eval(env) == e.eval(env)


@settings(max_examples=200, deadline=None)
@given(bools)
def test_negate_is_complement(e):
    n = negate(e)
    for env in ENVS:
        assert n.eval(env) == (not e.eval(env))


@settings(max_examples=200, deadline=None)
@given(bools, ints, ints)
def test_substitution_commutes_with_evaluation(e, ex, ey):
    sub = substitute(e, {"x": ex, "y": ey})
    for env in ENVS:
        shifted = dict(env, x=ex.eval(env), y=ey.eval(env))
        assert sub.eval(env) == e.eval(shifted)


@settings(max_examples=200, deadline=None)
@given(bools)
def test_vectorised_evaluation_matches_scalar(e):
    import numpy as np

    arrays = {k: np.array([env[k] for env in ENVS]) for k in ("x", "y", "b")}
    vec = np.broadcast_to(np.asarray(e.eval_vec(arrays)), (len(ENVS),))
    assert [bool(v) for v in vec] == [e.eval(env) for env in ENVS]
