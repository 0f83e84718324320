"""Expression language: integer/boolean ASTs, evaluation, substitution, simplification.

Expressions are immutable and hashable (the hash is computed once at
construction), so they can be used as dictionary keys and as abstract labels
of the predicate domain.
"""

from __future__ import annotations

import operator
from typing import Callable, Iterator, Mapping, Union

import numpy as np

from .errors import EvaluationError, ModelError

Value = Union[int, bool]

INT_MIN = -(2**63)
INT_MAX = 2**63 - 1

ARITH_OPS: dict[str, Callable] = {"+": operator.add, "-": operator.sub, "*": operator.mul}
CMP_OPS: dict[str, Callable] = {
    "==": operator.eq,
    "!=": operator.ne,
    "<": operator.lt,
    "<=": operator.le,
    ">": operator.gt,
    ">=": operator.ge,
}
NEGATED_CMP = {"==": "!=", "!=": "==", "<": ">=", "<=": ">", ">": "<=", ">=": "<"}


def _check_int(value: int) -> int:
    if value < INT_MIN or value > INT_MAX:
        raise EvaluationError(f"integer overflow: {value} exceeds 64-bit range")
    return value


class Expr:
    __slots__ = ("_hash",)

    def _key(self) -> tuple:
        raise NotImplementedError

    def __eq__(self, other):
        if self is other:
            return True
        if type(self) is not type(other) or self._hash != other._hash:
            return False
        return self._key() == other._key()

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Expr({self})"

    def children(self) -> tuple[Expr, ...]:
        return ()

    def rebuild(self, children: tuple[Expr, ...]) -> Expr:
        return self

    def eval(self, env: Mapping[str, Value]) -> Value:
        raise NotImplementedError

    def eval_vec(self, env: Mapping[str, np.ndarray]):
        """Evaluate over a batch of valuations given as per-variable arrays."""
        raise NotImplementedError


class Const(Expr):
    __slots__ = ("value",)

    def __init__(self, value: Value):
        if not isinstance(value, (bool, int)):
            raise TypeError(f"constant must be int or bool, got {value!r}")
        self.value = value
        self._hash = hash(("const", type(value), value))

    def _key(self):
        return (type(self.value), self.value)

    def eval(self, env):
        return self.value

    def eval_vec(self, env):
        return self.value

    def __str__(self):
        if isinstance(self.value, bool):
            return "true" if self.value else "false"
        return str(self.value)


TRUE = Const(True)
FALSE = Const(False)


class Var(Expr):
    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name
        self._hash = hash(("var", name))

    def _key(self):
        return (self.name,)

    def eval(self, env):
        return env[self.name]

    def eval_vec(self, env):
        return env[self.name]

    def __str__(self):
        return self.name


class Neg(Expr):
    __slots__ = ("arg",)

    def __init__(self, arg: Expr):
        self.arg = arg
        self._hash = hash(("neg", arg))

    def _key(self):
        return (self.arg,)

    def children(self):
        return (self.arg,)

    def rebuild(self, children):
        return Neg(children[0])

    def eval(self, env):
        return _check_int(-self.arg.eval(env))

    def eval_vec(self, env):
        return _checked_vec(operator.sub, 0, self.arg.eval_vec(env))

    def __str__(self):
        return f"-({self.arg})"


class Arith(Expr):
    __slots__ = ("op", "left", "right")

    def __init__(self, op: str, left: Expr, right: Expr):
        if op not in ARITH_OPS:
            raise ValueError(f"unknown arithmetic operator {op!r}")
        self.op = op
        self.left = left
        self.right = right
        self._hash = hash(("arith", op, left, right))

    def _key(self):
        return (self.op, self.left, self.right)

    def children(self):
        return (self.left, self.right)

    def rebuild(self, children):
        return Arith(self.op, children[0], children[1])

    def eval(self, env):
        return _check_int(ARITH_OPS[self.op](self.left.eval(env), self.right.eval(env)))

    def eval_vec(self, env):
        return _checked_vec(ARITH_OPS[self.op], self.left.eval_vec(env), self.right.eval_vec(env))

    def __str__(self):
        return f"({self.left} {self.op} {self.right})"


class Cmp(Expr):
    __slots__ = ("op", "left", "right")

    def __init__(self, op: str, left: Expr, right: Expr):
        if op not in CMP_OPS:
            raise ValueError(f"unknown comparison {op!r}")
        self.op = op
        self.left = left
        self.right = right
        self._hash = hash(("cmp", op, left, right))

    def _key(self):
        return (self.op, self.left, self.right)

    def children(self):
        return (self.left, self.right)

    def rebuild(self, children):
        return Cmp(self.op, children[0], children[1])

    def eval(self, env):
        return CMP_OPS[self.op](self.left.eval(env), self.right.eval(env))

    def eval_vec(self, env):
        return CMP_OPS[self.op](self.left.eval_vec(env), self.right.eval_vec(env))

    def __str__(self):
        return f"({self.left} {self.op} {self.right})"


class Not(Expr):
    __slots__ = ("arg",)

    def __init__(self, arg: Expr):
        self.arg = arg
        self._hash = hash(("not", arg))

    def _key(self):
        return (self.arg,)

    def children(self):
        return (self.arg,)

    def rebuild(self, children):
        return Not(children[0])

    def eval(self, env):
        return not self.arg.eval(env)

    def eval_vec(self, env):
        return np.logical_not(self.arg.eval_vec(env))

    def __str__(self):
        return f"!{self.arg}"


class _NAry(Expr):
    __slots__ = ("args",)
    symbol = ""

    def __init__(self, args):
        self.args = tuple(args)
        self._hash = hash((self.symbol, self.args))

    def _key(self):
        return self.args

    def children(self):
        return self.args

    def rebuild(self, children):
        return type(self)(children)

    def __str__(self):
        if not self.args:
            return str(self.unit)
        if len(self.args) == 1:
            return str(self.args[0])
        return "(" + f" {self.symbol} ".join(str(a) for a in self.args) + ")"


class And(_NAry):
    __slots__ = ()
    symbol = "&"
    unit = TRUE

    def eval(self, env):
        return all(a.eval(env) for a in self.args)

    def eval_vec(self, env):
        out = True
        for a in self.args:
            out = np.logical_and(out, a.eval_vec(env))
        return out


class Or(_NAry):
    __slots__ = ()
    symbol = "|"
    unit = FALSE

    def eval(self, env):
        return any(a.eval(env) for a in self.args)

    def eval_vec(self, env):
        out = False
        for a in self.args:
            out = np.logical_or(out, a.eval_vec(env))
        return out


class Implies(Expr):
    __slots__ = ("left", "right")

    def __init__(self, left: Expr, right: Expr):
        self.left = left
        self.right = right
        self._hash = hash(("implies", left, right))

    def _key(self):
        return (self.left, self.right)

    def children(self):
        return (self.left, self.right)

    def rebuild(self, children):
        return Implies(children[0], children[1])

    def eval(self, env):
        return (not self.left.eval(env)) or self.right.eval(env)

    def eval_vec(self, env):
        return np.logical_or(np.logical_not(self.left.eval_vec(env)), self.right.eval_vec(env))

    def __str__(self):
        return f"({self.left} => {self.right})"


def _checked_vec(op, a, b):
    fa = np.asarray(a, dtype=np.float64)
    fb = np.asarray(b, dtype=np.float64)
    approx = op(fa, fb)
    if np.any(np.abs(approx) >= 2.0**63):
        raise EvaluationError("integer overflow in batched evaluation")
    return op(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))


# --- constructors that keep trees flat -------------------------------------

def conj(*args: Expr) -> Expr:
    return simplify(And(args))


def disj(*args: Expr) -> Expr:
    return simplify(Or(args))


def negate(e: Expr) -> Expr:
    return simplify(Not(e))


# --- traversals --------------------------------------------------------------

def iter_vars(e: Expr) -> Iterator[str]:
    stack = [e]
    while stack:
        node = stack.pop()
        if isinstance(node, Var):
            yield node.name
        else:
            stack.extend(reversed(node.children()))


def free_vars(e: Expr) -> tuple[str, ...]:
    """Variables of ``e`` in order of first occurrence (left to right)."""
    return tuple(dict.fromkeys(iter_vars(e)))


def size(e: Expr) -> int:
    return 1 + sum(size(c) for c in e.children())


def substitute(e: Expr, mapping: Mapping[str, Expr]) -> Expr:
    """Simultaneous substitution of ``mapping[v]`` for every free ``v``."""
    if not mapping:
        return e
    memo: dict[Expr, Expr] = {}

    def go(node: Expr) -> Expr:
        if isinstance(node, Var):
            return mapping.get(node.name, node)
        if isinstance(node, Const):
            return node
        hit = memo.get(node)
        if hit is not None:
            return hit
        kids = node.children()
        new = tuple(go(k) for k in kids)
        out = node if all(a is b for a, b in zip(kids, new)) else node.rebuild(new)
        memo[node] = out
        return out

    return go(e)


def type_of(e: Expr, var_types: Mapping[str, str]) -> str:
    """Return ``"int"`` or ``"bool"``; raise ModelError on ill-typed input."""
    if isinstance(e, Const):
        return "bool" if isinstance(e.value, bool) else "int"
    if isinstance(e, Var):
        try:
            return var_types[e.name]
        except KeyError:
            raise ModelError(f"undeclared variable {e.name!r}") from None
    if isinstance(e, (Neg, Arith)):
        for c in e.children():
            if type_of(c, var_types) != "int":
                raise ModelError(f"arithmetic over non-integer operand in {e}")
        return "int"
    if isinstance(e, Cmp):
        lt, rt = type_of(e.left, var_types), type_of(e.right, var_types)
        if lt != rt:
            raise ModelError(f"comparison of {lt} with {rt} in {e}")
        if lt == "bool" and e.op not in ("==", "!="):
            raise ModelError(f"ordering comparison over booleans in {e}")
        return "bool"
    for c in e.children():
        if type_of(c, var_types) != "bool":
            raise ModelError(f"boolean connective over non-boolean operand in {e}")
    return "bool"


# --- simplification ------------------------------------------------------------

def simplify(e: Expr) -> Expr:
    """Constant folding and flattening; the result is semantically equivalent.

    Folding never searches for satisfiability, so the result is only
    constant when that follows syntactically.
    """
    memo: dict[Expr, Expr] = {}

    def go(node: Expr) -> Expr:
        if isinstance(node, (Const, Var)):
            return node
        hit = memo.get(node)
        if hit is None:
            hit = _simplify_node(node.rebuild(tuple(go(c) for c in node.children())))
            memo[node] = hit
        return hit

    return go(e)


def _simplify_node(e: Expr) -> Expr:
    if isinstance(e, Neg):
        a = e.arg
        if isinstance(a, Const):
            return Const(_check_int(-a.value))
        if isinstance(a, Neg):
            return a.arg
        return e
    if isinstance(e, Arith):
        return _simplify_arith(e)
    if isinstance(e, Cmp):
        l, r = e.left, e.right
        if isinstance(l, Const) and isinstance(r, Const):
            return Const(bool(CMP_OPS[e.op](l.value, r.value)))
        if l == r:
            return Const(e.op in ("==", "<=", ">="))
        return e
    if isinstance(e, Not):
        a = e.arg
        if isinstance(a, Const):
            return Const(not a.value)
        if isinstance(a, Not):
            return a.arg
        if isinstance(a, Cmp):
            return Cmp(NEGATED_CMP[a.op], a.left, a.right)
        return e
    if isinstance(e, (And, Or)):
        return _simplify_nary(e)
    if isinstance(e, Implies):
        l, r = e.left, e.right
        if isinstance(l, Const):
            return r if l.value else TRUE
        if isinstance(r, Const):
            return TRUE if r.value else _simplify_node(Not(l))
        if l == r:
            return TRUE
        return e
    return e


def _simplify_arith(e: Arith) -> Expr:
    l, r, op = e.left, e.right, e.op
    if isinstance(l, Const) and isinstance(r, Const):
        return Const(_check_int(ARITH_OPS[op](l.value, r.value)))
    if op == "+":
        if isinstance(r, Const) and r.value == 0:
            return l
        if isinstance(l, Const) and l.value == 0:
            return r
    elif op == "-":
        if isinstance(r, Const) and r.value == 0:
            return l
        if isinstance(l, Const) and l.value == 0:
            return _simplify_node(Neg(r))
    else:
        for a, b in ((l, r), (r, l)):
            if isinstance(a, Const):
                if a.value == 0:
                    return Const(0)
                if a.value == 1:
                    return b
    return e


def _simplify_nary(e: _NAry) -> Expr:
    is_and = isinstance(e, And)
    absorbing = not is_and
    flat: list[Expr] = []
    seen: set[Expr] = set()
    for a in e.args:
        parts = a.args if type(a) is type(e) else (a,)
        for p in parts:
            if isinstance(p, Const):
                if p.value == absorbing:
                    return Const(absorbing)
                continue
            if p not in seen:
                seen.add(p)
                flat.append(p)
    for p in flat:
        if _complement(p) in seen:
            return Const(absorbing)
    if not flat:
        return Const(is_and)
    if len(flat) == 1:
        return flat[0]
    return type(e)(flat)


def _complement(e: Expr) -> Expr:
    if isinstance(e, Not):
        return e.arg
    if isinstance(e, Cmp):
        return Cmp(NEGATED_CMP[e.op], e.left, e.right)
    return Not(e)


# --- SMT-LIB rendering ---------------------------------------------------------

_SMT_CMP = {"==": "=", "<": "<", "<=": "<=", ">": ">", ">=": ">="}


def to_smtlib(e: Expr) -> str:
    if isinstance(e, Const):
        if isinstance(e.value, bool):
            return "true" if e.value else "false"
        return str(e.value) if e.value >= 0 else f"(- {-e.value})"
    if isinstance(e, Var):
        return f"|{e.name}|"
    if isinstance(e, Neg):
        return f"(- {to_smtlib(e.arg)})"
    if isinstance(e, Arith):
        return f"({e.op} {to_smtlib(e.left)} {to_smtlib(e.right)})"
    if isinstance(e, Cmp):
        if e.op == "!=":
            return f"(not (= {to_smtlib(e.left)} {to_smtlib(e.right)}))"
        return f"({_SMT_CMP[e.op]} {to_smtlib(e.left)} {to_smtlib(e.right)})"
    if isinstance(e, Not):
        return f"(not {to_smtlib(e.arg)})"
    if isinstance(e, And):
        return "(and " + " ".join(map(to_smtlib, e.args)) + ")" if e.args else "true"
    if isinstance(e, Or):
        return "(or " + " ".join(map(to_smtlib, e.args)) + ")" if e.args else "false"
    if isinstance(e, Implies):
        return f"(=> {to_smtlib(e.left)} {to_smtlib(e.right)})"
    raise TypeError(f"cannot render {e!r}")
