from __future__ import annotations

from dataclasses import dataclass


@dataclass
class SolveResult:
    lower: float
    upper: float
    iterations: int  # value-iteration sweeps or simulated traces
    states: int  # states (or nodes) the solver touched
    time_ms: float = 0.0

    def contains(self, value: float, slack: float = 0.0) -> bool:
        return self.lower - slack <= value <= self.upper + slack
