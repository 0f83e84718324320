"""Explicit-value domain: abstract states are partial valuations."""

from __future__ import annotations

from ..errors import ContractError
from ..expr import TRUE, And, Cmp, Const, Expr, Not, Var, free_vars, simplify, substitute
from ..model import SymbolicMdp, Valuation
from .base import AbstractDomain, TriBool


class PartialValuation:
    """Values for a subset of the variables, kept in model declaration order."""

    __slots__ = ("items", "_dict", "_hash")

    def __init__(self, items: tuple = ()):
        self.items = items
        self._dict = dict(items)
        self._hash = hash(items)

    def __contains__(self, name):
        return name in self._dict

    def __getitem__(self, name):
        return self._dict[name]

    def __len__(self):
        return len(self.items)

    def as_dict(self) -> dict:
        return dict(self._dict)

    def __eq__(self, other):
        return isinstance(other, PartialValuation) and self.items == other.items

    def __hash__(self):
        return self._hash

    def __repr__(self):
        inner = ", ".join(f"{k}={_lit(v)}" for k, v in self.items)
        return "{" + inner + "}"


class _Bottom:
    __slots__ = ()

    def __repr__(self):
        return "⊥"


BOTTOM = _Bottom()


def _lit(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


class ExplDomain(AbstractDomain):
    name = "expl"

    def __init__(self, model: SymbolicMdp):
        super().__init__(model)
        self._eval_cache: dict = {}

    def top(self) -> PartialValuation:
        return PartialValuation(())

    def bottom(self):
        return BOTTOM

    def make(self, values: dict) -> PartialValuation:
        idx = self.model.index
        for k, v in values.items():
            if not self.model.decl(k).in_range(v):
                raise ContractError(f"value {v} out of range for {k}")
        return PartialValuation(tuple(sorted(values.items(), key=lambda kv: idx[kv[0]])))

    def contains(self, state, val: Valuation) -> bool:
        if state is BOTTOM:
            return False
        return all(val[k] == v for k, v in state.items)

    def leq(self, a, b) -> bool:
        if a is BOTTOM:
            return True
        if b is BOTTOM:
            return False
        return all(k in a and a[k] == v for k, v in b.items)

    def eval_bool(self, b: Expr, state) -> TriBool:
        if state is BOTTOM:
            return TriBool.FALSE
        key = (b, state)
        hit = self._eval_cache.get(key)
        if hit is None:
            residual = simplify(substitute(b, {k: Const(v) for k, v in state.items}))
            hit = TriBool.of(residual.value) if isinstance(residual, Const) else TriBool.UNKNOWN
            if len(self._eval_cache) > 500_000:
                self._eval_cache.clear()
            self._eval_cache[key] = hit
        return hit

    def block(self, state, b: Expr, val: Valuation):
        if not self.contains(state, val):
            raise ContractError(f"block: {val!r} not contained in {state!r}")
        if b.eval(val):
            raise ContractError(f"block: {b} holds in {val!r}")
        if self.eval_bool(b, state) is TriBool.FALSE:
            return state
        tracked = state.as_dict()
        for name in free_vars(b):
            if name in tracked:
                continue
            tracked[name] = val[name]
            candidate = self.make(tracked)
            if self.eval_bool(b, candidate) is TriBool.FALSE:
                return candidate
        raise ContractError(f"block: {b} not decided after tracking all of its variables")

    def to_expr(self, state) -> Expr:
        if state is BOTTOM:
            return Const(False)
        parts = []
        for k, v in state.items:
            if isinstance(v, bool):
                parts.append(Var(k) if v else Not(Var(k)))
            else:
                parts.append(Cmp("==", Var(k), Const(v)))
        if not parts:
            return TRUE
        return parts[0] if len(parts) == 1 else And(parts)

    def format(self, state) -> str:
        return repr(state)
