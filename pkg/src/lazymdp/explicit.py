"""Breadth-first enumeration of the reachable concrete state space."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .errors import BudgetExceeded
from .model import SymbolicMdp, Valuation, eval_distribution

DEFAULT_STATE_CAP = 2_000_000


@dataclass
class ExplicitMdp:
    states: list[Valuation]
    # per state: (command index, {successor index: probability}) in command order
    actions: list[list[tuple[int, dict[int, float]]]]
    targets: list[bool]
    initial: int = 0

    @property
    def num_states(self) -> int:
        return len(self.states)

    def index_of(self, val: Valuation) -> int:
        return self.states.index(val)


def enumerate_states(model: SymbolicMdp, cap: int = DEFAULT_STATE_CAP) -> ExplicitMdp:
    """Explore from the initial valuation in BFS order.

    Target states (where the target command is enabled) are absorbing: they get
    the target command's self-loop as their only action and are not explored
    further.  States without enabled commands keep an empty action list.
    """
    target_guard = None if model.target_command is None else model.commands[model.target_command].guard
    index: dict[Valuation, int] = {model.initial: 0}
    states = [model.initial]
    actions: list[list[tuple[int, dict[int, float]]]] = []
    targets: list[bool] = []
    queue = deque([model.initial])

    def lookup(v: Valuation) -> int:
        i = index.get(v)
        if i is None:
            if len(states) >= cap:
                raise BudgetExceeded(f"state budget of {cap} exceeded")
            i = index[v] = len(states)
            states.append(v)
            queue.append(v)
        return i

    while queue:
        s = queue.popleft()
        i = index[s]
        if target_guard is not None and target_guard.eval(s):
            targets.append(True)
            actions.append([(model.target_command, {i: 1.0})])
            continue
        targets.append(False)
        acts = []
        for ci, cmd in enumerate(model.commands):
            if cmd.guard.eval(s):
                dist = eval_distribution(model, cmd, s)
                acts.append((ci, {lookup(v): float(p) for v, p in dist.items()}))
        actions.append(acts)
    return ExplicitMdp(states, actions, targets, 0)


def count_reachable(model: SymbolicMdp, cap: int = DEFAULT_STATE_CAP) -> int:
    return enumerate_states(model, cap).num_states
