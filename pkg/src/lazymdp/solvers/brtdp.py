"""Bounded real-time dynamic programming, over explicit views and over graphs
built on demand.

Bounds start at L=0 and U=1.  Each trace follows an action of maximal upper
bound and samples successors, and the bounds are then updated backwards
along the trace.  End components among the explored states are detected
periodically.  Inside one that contains no target, the value equals the best
exit.  Its states are therefore treated as one collapsed state: action choice
ranges over the component's exits and its bounds are the best exit bounds.
"""

from __future__ import annotations

import enum
import random
import time
from dataclasses import dataclass
from typing import Callable, Optional, Protocol

from ..errors import BudgetExceeded
from ..pasg import Pasg, Status
from .graph import mec_decomposition
from .result import SolveResult
from .view import Distribution, MdpView

DEFAULT_MAX_TRACES = 10_000_000
EC_INTERVAL = 64
MIN_TRACE_LENGTH = 16


class TraceHeuristic(enum.Enum):
    RANDOM = "random"
    DIFF_BASED = "diff-based"


class ExplorationModel(Protocol):
    initial: int

    def is_explored(self, s: int) -> bool: ...
    def explore(self, s: int) -> None: ...
    def actions(self, s: int) -> Optional[list[Distribution]]: ...
    def is_target(self, s: int) -> bool: ...
    def explored_count(self) -> int: ...
    def explored(self) -> list[int]: ...
    def changed(self) -> list[int]: ...


class ViewExploration:
    """Explores a fully materialized view one state at a time."""

    def __init__(self, view: MdpView):
        self.view = view
        self.initial = view.initial
        self._explored: dict[int, None] = {}

    def is_explored(self, s):
        return s in self._explored

    def explore(self, s):
        self._explored[s] = None

    def actions(self, s):
        if s not in self._explored:
            return None
        if self.view.deadlocks and self.view.deadlocks[s]:
            return []
        return self.view.actions[s]

    def is_target(self, s):
        return self.view.targets[s]

    def explored_count(self):
        return len(self._explored)

    def explored(self):
        return list(self._explored)

    def changed(self):
        return []


class PasgExploration:
    """Builds the graph while traces walk it: exploring a waiting node covers
    or expands it."""

    def __init__(self, pasg: Pasg):
        self.pasg = pasg
        self.initial = pasg.root

    def is_explored(self, n):
        return self.pasg.nodes[n].status is not Status.WAITING

    def explore(self, n):
        self.pasg.process(n)

    def actions(self, n):
        node = self.pasg.nodes[n]
        if node.status is Status.WAITING:
            return None
        if node.status is Status.COVERED:
            return [[(node.coverer, 1.0)]]
        if node.is_target:
            return [[(n, 1.0)]]
        out = []
        for eid in node.edges:
            dist: dict[int, float] = {}
            for p, _, child in self.pasg.edges[eid].branches:
                dist[child] = dist.get(child, 0.0) + float(p)
            out.append(list(dist.items()))
        return out

    def is_target(self, n):
        node = self.pasg.nodes[n]
        return node.status is Status.EXPANDED and node.is_target

    def explored_count(self):
        return sum(1 for node in self.pasg.nodes if node.status is not Status.WAITING)

    def explored(self):
        return [node.id for node in self.pasg.nodes if node.status is not Status.WAITING]

    def changed(self):
        # nodes whose cover edge was removed: their actions are gone
        out = self.pasg.uncovered_log
        self.pasg.uncovered_log = []
        return out


@dataclass
class _Exit:
    state: int
    dist: Distribution


class Brtdp:
    def __init__(
        self,
        space: ExplorationModel,
        heuristic: TraceHeuristic = TraceHeuristic.DIFF_BASED,
        eps: float = 1e-6,
        seed: int = 0,
        max_traces: int = DEFAULT_MAX_TRACES,
        ec_interval: int = EC_INTERVAL,
        on_trace: Optional[Callable[[int, float, float], None]] = None,
    ):
        self.space = space
        self.heuristic = TraceHeuristic(heuristic)
        self.eps = eps
        self.rng = random.Random(seed)
        self.max_traces = max_traces
        self.ec_interval = ec_interval
        self.on_trace = on_trace
        self.lower: dict[int, float] = {}
        self.upper: dict[int, float] = {}
        self.traces = 0
        self.component: dict[int, int] = {}  # state -> index into self.components
        self.components: dict[int, tuple[int, ...]] = {}
        self._next_component = 0

    # -- bounds -------------------------------------------------------------------

    def lo(self, s: int) -> float:
        return self.lower.get(s, 0.0)

    def hi(self, s: int) -> float:
        return self.upper.get(s, 1.0)

    def gap(self, s: int) -> float:
        return self.hi(s) - self.lo(s)

    def _set(self, s: int, lo: float, hi: float):
        lo = max(self.lo(s), lo)
        hi = min(self.hi(s), hi)
        if hi < lo:  # rounding only
            hi = lo
        self.lower[s] = lo
        self.upper[s] = hi

    def _settle(self, s: int):
        """Fix the bounds of a freshly explored state when they are known."""
        if self.space.is_target(s):
            self._set(s, 1.0, 1.0)
        elif self.space.actions(s) == []:
            self._set(s, 0.0, 0.0)

    def _q(self, dist: Distribution, bound) -> float:
        return sum(p * bound(t) for t, p in dist)

    # -- end components -------------------------------------------------------

    def _invalidate(self):
        for s in self.space.changed():
            k = self.component.get(s)
            if k is not None:
                for m in self.components.pop(k):
                    del self.component[m]

    def detect_components(self):
        self._invalidate()
        space = self.space
        choices = {}
        for s in space.explored():
            if space.is_target(s):
                continue
            acts = space.actions(s)
            if acts:
                choices[s] = [[t for t, _ in a] for a in acts]
        self.component.clear()
        self.components.clear()
        for members, _ in mec_decomposition(choices):
            k = self._next_component
            self._next_component += 1
            self.components[k] = members
            for s in members:
                self.component[s] = k
            self._update_component(k)

    def _exits(self, k: int) -> list[_Exit]:
        members = self.components[k]
        inside = set(members)
        out = []
        for s in members:
            for dist in self.space.actions(s) or ():
                if not all(t in inside for t, _ in dist):
                    out.append(_Exit(s, dist))
        return out

    def _update_component(self, k: int) -> list[_Exit]:
        exits = self._exits(k)
        lo = max((self._q(e.dist, self.lo) for e in exits), default=0.0)
        hi = max((self._q(e.dist, self.hi) for e in exits), default=0.0)
        for s in self.components[k]:
            self._set(s, lo, hi)
        return exits

    # -- traces -----------------------------------------------------------------

    def _update(self, s: int):
        space = self.space
        if not space.is_explored(s) or space.is_target(s):
            return
        k = self.component.get(s)
        if k is not None:
            self._update_component(k)
            return
        acts = space.actions(s)
        if not acts:
            self._set(s, 0.0, 0.0)
            return
        self._set(s, max(self._q(a, self.lo) for a in acts), max(self._q(a, self.hi) for a in acts))

    def _choose(self, s: int) -> Optional[Distribution]:
        k = self.component.get(s)
        if k is not None:
            options = [e.dist for e in self._exits(k)]
        else:
            options = self.space.actions(s) or []
        if not options:
            return None
        best, best_u = None, -1.0
        for dist in options:
            u = self._q(dist, self.hi)
            if u > best_u:
                best, best_u = dist, u
        return best

    def _sample(self, dist: Distribution) -> int:
        weights = [p for _, p in dist]
        if self.heuristic is TraceHeuristic.DIFF_BASED:
            gaps = [p * self.gap(t) for t, p in dist]
            if sum(gaps) > 0:
                weights = gaps
        return self.rng.choices([t for t, _ in dist], weights=weights)[0]

    def trace(self) -> bool:
        """Simulate one trace and update along it; True if it hit the length cap."""
        space = self.space
        path: list[int] = []
        s = space.initial
        capped = False
        while True:
            if not space.is_explored(s):
                space.explore(s)
                self._invalidate()
                self._settle(s)
            path.append(s)
            if space.is_target(s) or self.gap(s) == 0.0:
                break
            if len(path) >= max(3 * space.explored_count(), MIN_TRACE_LENGTH):
                capped = True
                break
            dist = self._choose(s)
            if dist is None:
                self._update(s)
                break
            s = self._sample(dist)
        for s in reversed(path):
            self._update(s)
        return capped

    def run(self) -> SolveResult:
        start = time.perf_counter()
        s0 = self.space.initial
        while self.gap(s0) > self.eps:
            if self.traces >= self.max_traces:
                raise BudgetExceeded(
                    f"trace budget of {self.max_traces} exceeded", partial=self.result(start)
                )
            self.traces += 1
            capped = self.trace()
            if capped or self.traces % self.ec_interval == 0:
                self.detect_components()
            if self.on_trace is not None:
                self.on_trace(self.traces, self.lo(s0), self.hi(s0))
        return self.result(start)

    def result(self, start: float) -> SolveResult:
        s0 = self.space.initial
        return SolveResult(
            self.lo(s0), self.hi(s0), self.traces, self.space.explored_count(),
            (time.perf_counter() - start) * 1000.0,
        )


def brtdp(
    view: MdpView,
    heuristic: TraceHeuristic = TraceHeuristic.DIFF_BASED,
    eps: float = 1e-6,
    seed: int = 0,
    max_traces: int = DEFAULT_MAX_TRACES,
    on_trace=None,
) -> SolveResult:
    return Brtdp(ViewExploration(view), heuristic, eps, seed, max_traces, on_trace=on_trace).run()


def lazy_brtdp(
    pasg: Pasg,
    heuristic: TraceHeuristic = TraceHeuristic.DIFF_BASED,
    eps: float = 1e-6,
    seed: int = 0,
    max_traces: int = DEFAULT_MAX_TRACES,
    on_trace=None,
) -> SolveResult:
    """Run BRTDP while building ``pasg`` on demand; the graph stays partial."""
    solver = Brtdp(PasgExploration(pasg), heuristic, eps, seed, max_traces, on_trace=on_trace)
    start = time.perf_counter()
    try:
        return solver.run()
    except BudgetExceeded as exc:
        if isinstance(exc.partial, SolveResult):
            raise
        raise BudgetExceeded(str(exc), partial=solver.result(start)) from exc
