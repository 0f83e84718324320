"""Interface every abstract domain implements."""

from __future__ import annotations

import enum
from abc import ABC, abstractmethod
from typing import Any

from ..expr import Expr
from ..model import SymbolicMdp, Valuation


class TriBool(enum.Enum):
    TRUE = "True"
    FALSE = "False"
    UNKNOWN = "Unknown"

    @classmethod
    def of(cls, value: bool) -> TriBool:
        return cls.TRUE if value else cls.FALSE


class AbstractDomain(ABC):
    """Operations the lazy abstraction needs from a domain.

    Abstract states are immutable and hashable. ``block(s, b, val)`` must
    return a state that is below ``s``, still contains ``val`` and on which
    ``b`` evaluates to FALSE.
    """

    name = "abstract"

    def __init__(self, model: SymbolicMdp):
        self.model = model

    @abstractmethod
    def top(self) -> Any: ...

    @abstractmethod
    def bottom(self) -> Any: ...

    @abstractmethod
    def contains(self, state, val: Valuation) -> bool: ...

    @abstractmethod
    def leq(self, a, b) -> bool: ...

    @abstractmethod
    def eval_bool(self, b: Expr, state) -> TriBool: ...

    @abstractmethod
    def block(self, state, b: Expr, val: Valuation): ...

    @abstractmethod
    def to_expr(self, state) -> Expr: ...

    def format(self, state) -> str:
        return str(self.to_expr(state))
