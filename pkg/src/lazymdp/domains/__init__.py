from ..errors import DomainError
from .base import AbstractDomain, TriBool
from .entailment import EnumerationEntailment, FallbackEntailment, SmtEntailment
from .expl import BOTTOM, ExplDomain, PartialValuation
from .pred import PredDomain

DOMAINS = {"expl": ExplDomain, "pred": PredDomain}


def make_domain(name: str, model, smt_cmd: str | None = None) -> AbstractDomain:
    if name == "expl":
        return ExplDomain(model)
    if name == "pred":
        entailment = None
        if smt_cmd:
            entailment = FallbackEntailment(SmtEntailment(model, smt_cmd), EnumerationEntailment(model))
        return PredDomain(model, entailment)
    raise DomainError(f"unknown domain {name!r}")


__all__ = [
    "AbstractDomain",
    "TriBool",
    "EnumerationEntailment",
    "SmtEntailment",
    "FallbackEntailment",
    "ExplDomain",
    "PartialValuation",
    "BOTTOM",
    "PredDomain",
    "DOMAINS",
    "make_domain",
]
