"""Predicate domain: abstract states are boolean expressions."""

from __future__ import annotations

from ..errors import ContractError
from ..expr import FALSE, TRUE, And, Expr, negate, simplify
from ..model import SymbolicMdp, Valuation
from .base import AbstractDomain, TriBool
from .entailment import EnumerationEntailment


def _conjuncts(e: Expr) -> list[Expr]:
    if isinstance(e, And):
        return list(e.args)
    if e == TRUE:
        return []
    return [e]


class PredDomain(AbstractDomain):
    """Block conjoins the negated formula, then drops conjuncts made redundant."""

    name = "pred"

    def __init__(self, model: SymbolicMdp, entailment=None):
        super().__init__(model)
        self.entailment = entailment if entailment is not None else EnumerationEntailment(model)
        self._eval_cache: dict = {}

    def top(self) -> Expr:
        return TRUE

    def bottom(self) -> Expr:
        return FALSE

    def entails(self, a: Expr, b: Expr) -> bool:
        return self.entailment.entails(a, b)

    def contains(self, state: Expr, val: Valuation) -> bool:
        return bool(state.eval(val))

    def leq(self, a: Expr, b: Expr) -> bool:
        return self.entails(a, b)

    def eval_bool(self, b: Expr, state: Expr) -> TriBool:
        key = (b, state)
        hit = self._eval_cache.get(key)
        if hit is None:
            # FALSE is checked first so that an empty state evaluates to FALSE
            if self.entails(state, negate(b)):
                hit = TriBool.FALSE
            elif self.entails(state, b):
                hit = TriBool.TRUE
            else:
                hit = TriBool.UNKNOWN
            if len(self._eval_cache) > 500_000:
                self._eval_cache.clear()
            self._eval_cache[key] = hit
        return hit

    def block(self, state: Expr, b: Expr, val: Valuation) -> Expr:
        if not state.eval(val):
            raise ContractError(f"block: {val!r} not contained in {state}")
        if b.eval(val):
            raise ContractError(f"block: {b} holds in {val!r}")
        if self.eval_bool(b, state) is TriBool.FALSE:
            return state
        parts = _conjuncts(state) + _conjuncts(negate(b))
        parts = list(dict.fromkeys(parts))
        # drop older conjuncts that the rest already implies
        i = 0
        while i < len(parts) and len(parts) > 1:
            rest = parts[:i] + parts[i + 1:]
            if self.entails(simplify(And(rest)), parts[i]):
                parts = rest
            else:
                i += 1
        return simplify(And(parts))

    def to_expr(self, state: Expr) -> Expr:
        return state
