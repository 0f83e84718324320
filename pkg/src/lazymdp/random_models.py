"""Seeded generator of small random symbolic MDPs, used as a test corpus.

Every model has at most 3 variables with at most 4 values each, at most 5
commands with at most 3 branches, and a random boolean target.  Integer
updates that could leave their range are guarded: the command's guard is
conjoined with the condition that every assigned value is in range, so
evaluation never fails.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .expr import TRUE, And, Arith, Cmp, Const, Expr, Not, Or, Var, conj, simplify
from .model import Assignment, Branch, Command, ReachabilityQuery, SymbolicMdp, VarDecl

MAX_VARIABLES = 3
MAX_VALUES = 4
MAX_COMMANDS = 5
MAX_BRANCHES = 3


def _variables(rng: random.Random) -> list[VarDecl]:
    out = []
    for i in range(rng.randint(1, MAX_VARIABLES)):
        name = "xyz"[i]
        if rng.random() < 0.2:
            out.append(VarDecl(name, "bool", initial=rng.random() < 0.5))
        else:
            lo = rng.choice([0, 0, 1, -1])
            hi = lo + rng.randint(1, MAX_VALUES - 1)
            out.append(VarDecl(name, "int", lo, hi, lo if rng.random() < 0.5 else rng.randint(lo, hi)))
    return out


def _atom(rng: random.Random, decls: list[VarDecl]) -> Expr:
    d = rng.choice(decls)
    if d.kind == "bool":
        return Var(d.name) if rng.random() < 0.5 else Not(Var(d.name))
    ints = [e for e in decls if e.kind == "int" and e.name != d.name]
    op = rng.choice(["==", "!=", "<", "<=", ">", ">="])
    if ints and rng.random() < 0.25:
        return Cmp(op, Var(d.name), Var(rng.choice(ints).name))
    return Cmp(op, Var(d.name), Const(rng.randint(d.lo, d.hi)))


def _formula(rng: random.Random, decls: list[VarDecl], allow_true: bool) -> Expr:
    if allow_true and rng.random() < 0.35:
        return TRUE
    if rng.random() < 0.6:
        return _atom(rng, decls)
    atoms = [_atom(rng, decls) for _ in range(2)]
    return And(atoms) if rng.random() < 0.6 else Or(atoms)


def _update(rng: random.Random, d: VarDecl, decls: list[VarDecl], step: str) -> Expr:
    if d.kind == "bool":
        bools = [e.name for e in decls if e.kind == "bool"]
        r = rng.random()
        if r < 0.4:
            return Const(rng.random() < 0.5)
        if r < 0.7:
            return Not(Var(d.name))
        return Var(rng.choice(bools))
    ints = [e.name for e in decls if e.kind == "int"]
    r = rng.random()
    if r < 0.35:
        return Const(rng.randint(d.lo, d.hi))
    if r < 0.85:
        return Arith(step, Var(d.name), Const(1))
    return Var(rng.choice(ints))


def _in_range(e: Expr, d: VarDecl, decls: list[VarDecl]) -> Expr:
    """Condition under which assigning ``e`` to ``d`` stays in range."""
    if isinstance(e, Const):
        return TRUE
    if isinstance(e, Var):
        src = next(v for v in decls if v.name == e.name)
        if d.lo <= src.lo and src.hi <= d.hi:
            return TRUE
        return And((Cmp(">=", e, Const(d.lo)), Cmp("<=", e, Const(d.hi))))
    if isinstance(e, Arith) and e.left == Var(d.name) and e.right == Const(1):
        if e.op == "+":
            return Cmp("<", e.left, Const(d.hi))
        return Cmp(">", e.left, Const(d.lo))
    return And((Cmp(">=", e, Const(d.lo)), Cmp("<=", e, Const(d.hi))))


def _command(rng: random.Random, decls: list[VarDecl], unguarded: bool = False) -> Command:
    guard = TRUE if unguarded else _formula(rng, decls, allow_true=True)
    safety: list[Expr] = []
    weights = [rng.randint(1, 4) for _ in range(rng.choice([1, 2, 2, 3, 3]))]
    total = sum(weights)
    branches = []
    # one direction per variable and command keeps the range conditions satisfiable
    steps = {d.name: "+" if rng.random() < 0.7 else "-" for d in decls}
    for w in weights:
        updates = []
        for d in decls:
            if rng.random() < 0.6:
                e = _update(rng, d, decls, steps[d.name])
                updates.append((d.name, e))
                if d.kind == "int":
                    safety.append(_in_range(e, d, decls))
        branches.append(Branch(Fraction(w, total), Assignment(tuple(updates))))
    return Command(simplify(conj(guard, *safety)), tuple(branches))


def random_model(seed: int) -> tuple[SymbolicMdp, ReachabilityQuery]:
    rng = random.Random(seed)
    decls = _variables(rng)
    # the first command is only guarded by its range conditions, so most models move
    commands = tuple(_command(rng, decls, i == 0) for i in range(rng.randint(1, MAX_COMMANDS)))
    space = SymbolicMdp(tuple(decls), ())
    initial = space.initial
    # targets that hold initially or nowhere make trivial instances; resample a few times
    for _ in range(20):
        target = simplify(_formula(rng, decls, allow_true=False))
        if not target.eval(initial) and any(target.eval(v) for v in space.all_valuations()):
            break
    return SymbolicMdp(tuple(decls), commands), ReachabilityQuery(target)


def random_corpus(count: int, first_seed: int = 0) -> list[tuple[str, SymbolicMdp, ReachabilityQuery]]:
    return [(f"random_{s:03d}", *random_model(s)) for s in range(first_seed, first_seed + count)]


def random_formula(rng: random.Random, decls) -> Expr:
    """A random guard-like formula over ``decls`` (never the constant true)."""
    return _formula(rng, list(decls), allow_true=False)
