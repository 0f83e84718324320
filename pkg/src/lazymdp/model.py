"""Symbolic MDPs: variables with finite ranges and probabilistic guarded commands."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Mapping, Optional, Sequence

import numpy as np

from .errors import ModelError, OutOfRangeError
from .expr import TRUE, Const, Expr, Value, simplify, substitute, type_of


@dataclass(frozen=True)
class VarDecl:
    name: str
    kind: str  # "bool" or "int"
    lo: int = 0
    hi: int = 1
    initial: Value = 0

    def __post_init__(self):
        if self.kind not in ("bool", "int"):
            raise ModelError(f"unknown variable kind {self.kind!r}")
        if self.kind == "bool":
            if not isinstance(self.initial, bool):
                raise ModelError(f"boolean variable {self.name!r} needs a boolean initial value")
            return
        if isinstance(self.initial, bool):
            raise ModelError(f"integer variable {self.name!r} needs an integer initial value")
        if self.lo > self.hi:
            raise ModelError(f"empty range [{self.lo}..{self.hi}] for {self.name!r}")
        if not self.lo <= self.initial <= self.hi:
            raise ModelError(f"initial value {self.initial} of {self.name!r} outside [{self.lo}..{self.hi}]")

    @property
    def values(self) -> tuple[Value, ...]:
        if self.kind == "bool":
            return (False, True)
        return tuple(range(self.lo, self.hi + 1))

    def in_range(self, value: Value) -> bool:
        if self.kind == "bool":
            return isinstance(value, bool)
        return not isinstance(value, bool) and self.lo <= value <= self.hi

    def describe_range(self) -> str:
        return "bool" if self.kind == "bool" else f"[{self.lo}..{self.hi}]"


class Valuation(Mapping[str, Value]):
    """Total, immutable map from the model's variables to values."""

    __slots__ = ("_index", "_values", "_hash")

    def __init__(self, index: Mapping[str, int], values: tuple):
        self._index = index
        self._values = values
        self._hash = hash(values)

    @property
    def values_tuple(self) -> tuple:
        return self._values

    def __getitem__(self, name):
        return self._values[self._index[name]]

    def __iter__(self):
        return iter(self._index)

    def __len__(self):
        return len(self._values)

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if isinstance(other, Valuation):
            return self._values == other._values and self._index.keys() == other._index.keys()
        return NotImplemented

    def replace(self, updates: Mapping[str, Value]) -> Valuation:
        vals = list(self._values)
        for name, v in updates.items():
            vals[self._index[name]] = v
        return Valuation(self._index, tuple(vals))

    def __repr__(self):
        return "{" + ", ".join(f"{k}={_fmt(v)}" for k, v in zip(self._index, self._values)) + "}"


def _fmt(v: Value) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


@dataclass(frozen=True)
class Assignment:
    """Simultaneous update; variables not listed keep their value."""

    updates: tuple[tuple[str, Expr], ...] = ()

    @property
    def mapping(self) -> dict[str, Expr]:
        return dict(self.updates)

    def is_identity(self) -> bool:
        return not self.updates

    def __str__(self):
        return "(" + " & ".join(f"{v}'={e}" for v, e in self.updates) + ")"


IDENTITY = Assignment()


@dataclass(frozen=True)
class Branch:
    probability: Fraction
    assignment: Assignment


@dataclass(frozen=True)
class Command:
    guard: Expr
    branches: tuple[Branch, ...]

    def __post_init__(self):
        if not self.branches:
            raise ModelError("command without branches")
        for b in self.branches:
            if b.probability <= 0:
                raise ModelError(f"non-positive branch probability {b.probability}")
        total = sum((b.probability for b in self.branches), Fraction(0))
        if total != 1:
            raise ModelError(f"probabilities sum to {total}")


@dataclass(frozen=True)
class ReachabilityQuery:
    target: Expr
    objective: str = "max"


@dataclass(frozen=True)
class SymbolicMdp:
    variables: tuple[VarDecl, ...]
    commands: tuple[Command, ...]
    target_command: Optional[int] = None
    index: Mapping[str, int] = field(init=False, repr=False, compare=False)
    var_types: Mapping[str, str] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        index = {}
        for i, d in enumerate(self.variables):
            if d.name in index:
                raise ModelError(f"duplicate variable {d.name!r}")
            index[d.name] = i
        object.__setattr__(self, "index", index)
        object.__setattr__(self, "var_types", {d.name: d.kind for d in self.variables})
        for c in self.commands:
            self._check_command(c)
        if self.target_command is not None and not 0 <= self.target_command < len(self.commands):
            raise ModelError("target command index out of bounds")

    def _check_command(self, c: Command):
        if type_of(c.guard, self.var_types) != "bool":
            raise ModelError(f"guard {c.guard} is not boolean")
        for b in c.branches:
            for name, e in b.assignment.updates:
                if name not in self.var_types:
                    raise ModelError(f"assignment to undeclared variable {name!r}")
                if type_of(e, self.var_types) != self.var_types[name]:
                    raise ModelError(f"type mismatch in assignment {name}'={e}")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(d.name for d in self.variables)

    def decl(self, name: str) -> VarDecl:
        return self.variables[self.index[name]]

    def valuation(self, values: Mapping[str, Value] | Sequence[Value]) -> Valuation:
        if isinstance(values, Mapping):
            missing = set(self.index) - set(values)
            if missing:
                raise ModelError(f"valuation misses {sorted(missing)}")
            vals = tuple(values[d.name] for d in self.variables)
        else:
            vals = tuple(values)
        for d, v in zip(self.variables, vals):
            if not d.in_range(v):
                raise OutOfRangeError(d.name, v, d.lo, d.hi)
        return Valuation(self.index, vals)

    @property
    def initial(self) -> Valuation:
        return Valuation(self.index, tuple(d.initial for d in self.variables))

    def all_valuations(self) -> Iterator[Valuation]:
        for vals in itertools.product(*(d.values for d in self.variables)):
            yield Valuation(self.index, vals)

    def valuation_count(self) -> int:
        n = 1
        for d in self.variables:
            n *= len(d.values)
        return n

    def valuation_arrays(self) -> dict[str, np.ndarray]:
        """All valuations as per-variable arrays (row-major product order)."""
        grids = np.meshgrid(*(np.array(d.values) for d in self.variables), indexing="ij")
        return {d.name: g.ravel() for d, g in zip(self.variables, grids)}


def eval_expr(e: Expr, val: Mapping[str, Value]) -> Value:
    return e.eval(val)


def eval_assignment(model: SymbolicMdp, a: Assignment, val: Valuation) -> Valuation:
    if not a.updates:
        return val
    new = {}
    for name, e in a.updates:
        v = e.eval(val)
        d = model.decl(name)
        if not d.in_range(v):
            raise OutOfRangeError(name, v, d.lo, d.hi, f"assignment {a} at {val!r}")
        new[name] = v
    return val.replace(new)


def eval_distribution(model: SymbolicMdp, c: Command, val: Valuation) -> dict[Valuation, Fraction]:
    """Successor distribution of ``c`` at ``val``; equal results are merged."""
    dist: dict[Valuation, Fraction] = {}
    for b in c.branches:
        succ = eval_assignment(model, b.assignment, val)
        dist[succ] = dist.get(succ, Fraction(0)) + b.probability
    return dist


def weakest_precondition(a: Assignment, b: Expr) -> Expr:
    return simplify(substitute(b, a.mapping))


def enabled_commands(model: SymbolicMdp, val: Valuation) -> list[int]:
    return [i for i, c in enumerate(model.commands) if c.guard.eval(val)]


def with_target_command(model: SymbolicMdp, query: ReachabilityQuery) -> tuple[SymbolicMdp, int]:
    """Append the target command ``[target] 1: identity``. Call once per model."""
    if query.objective != "max":
        raise ModelError("only maximal reachability is supported")
    if type_of(query.target, model.var_types) != "bool":
        raise ModelError("target formula is not boolean")
    cmd = Command(query.target, (Branch(Fraction(1), IDENTITY),))
    commands = model.commands + (cmd,)
    idx = len(commands) - 1
    return SymbolicMdp(model.variables, commands, idx), idx


def make_model(variables: Sequence[VarDecl], commands: Sequence[Command]) -> SymbolicMdp:
    return SymbolicMdp(tuple(variables), tuple(commands))


def command(guard: Expr, *branches: tuple) -> Command:
    """Convenience constructor: ``command(g, (Fraction(1,2), {"x": e}), ...)``."""
    out = []
    for prob, updates in branches:
        upd = tuple((k, v if isinstance(v, Expr) else Const(v)) for k, v in dict(updates).items())
        prob = Fraction(str(prob)) if isinstance(prob, float) else Fraction(prob)
        out.append(Branch(prob, Assignment(upd)))
    return Command(guard if guard is not None else TRUE, tuple(out))
