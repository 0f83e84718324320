"""Probabilistic adaptive simulation graphs and their lazy construction.

Every node carries a concrete valuation and an abstract state containing it.
Transition edges mirror the commands enabled in the concrete label, one child
per branch and in branch order.  Cover edges redirect a waiting node to an
expanded node whose abstract label subsumes it.  Whenever an abstract label is
strengthened, the change is pushed to the nodes it covers and to its parent
until every labeling constraint holds again.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterator, Optional

from .domains.base import AbstractDomain, TriBool
from .errors import BudgetExceeded, ContractError, OutOfRangeError
from .expr import Expr, negate
from .model import SymbolicMdp, Valuation, eval_assignment, weakest_precondition

DEFAULT_MAX_NODES = 5_000_000


class Status(enum.Enum):
    WAITING = "waiting"
    EXPANDED = "expanded"
    COVERED = "covered"


@dataclass
class Node:
    id: int
    concrete: Valuation
    abstract: Any
    status: Status = Status.WAITING
    is_target: bool = False
    parent: Optional[tuple[int, int]] = None  # (edge id, branch index)
    edges: list[int] = field(default_factory=list)
    coverer: Optional[int] = None


@dataclass(frozen=True)
class TransitionEdge:
    id: int
    source: int
    command: int
    # (probability, branch index, child node), in the command's branch order
    branches: tuple[tuple[Fraction, int, int], ...]


class Pasg:
    def __init__(
        self,
        model: SymbolicMdp,
        domain: AbstractDomain,
        policy: str = "lifo",
        max_nodes: int = DEFAULT_MAX_NODES,
    ):
        if model.target_command is None:
            raise ContractError("the model needs a target command (see with_target_command)")
        if policy not in ("lifo", "fifo"):
            raise ValueError(f"unknown waitlist policy {policy!r}")
        self.model = model
        self.domain = domain
        self.policy = policy
        self.max_nodes = max_nodes
        self.nodes: list[Node] = []
        self.edges: list[TransitionEdge] = []
        self.covering: dict[int, dict[int, None]] = {}  # coverer -> covered nodes (ordered)
        self.waitlist: deque[int] = deque()
        self._expanded_by_concrete: dict[Valuation, int] = {}
        self._expanded: list[int] = []
        self.uncovered_log: list[int] = []
        self.frozen = False
        self.block_count = 0
        self.covers_removed = 0
        self.root = self.new_node(model.initial, domain.top())
        self.waitlist.append(self.root)

    # -- bookkeeping ------------------------------------------------------------

    def new_node(self, concrete: Valuation, abstract, parent: Optional[tuple[int, int]] = None) -> int:
        if len(self.nodes) >= self.max_nodes:
            raise BudgetExceeded(f"node budget of {self.max_nodes} exceeded", partial=self)
        n = len(self.nodes)
        self.nodes.append(Node(n, concrete, abstract, parent=parent))
        return n

    def add_edge(self, source: int, command: int, branches) -> TransitionEdge:
        edge = TransitionEdge(len(self.edges), source, command, tuple(branches))
        self.edges.append(edge)
        self.nodes[source].edges.append(edge.id)
        return edge

    def set_cover(self, n: int, coverer: int):
        """Record the cover edge n -> coverer without any refinement."""
        node = self.nodes[n]
        node.status = Status.COVERED
        node.coverer = coverer
        self.covering.setdefault(coverer, {})[n] = None

    def _remove_cover(self, n: int):
        node = self.nodes[n]
        del self.covering[node.coverer][n]
        node.coverer = None
        node.status = Status.WAITING
        self.waitlist.append(n)
        self.uncovered_log.append(n)
        self.covers_removed += 1

    def mark_expanded(self, n: int):
        node = self.nodes[n]
        node.status = Status.EXPANDED
        self._expanded_by_concrete[node.concrete] = n
        self._expanded.append(n)

    def cover_edges(self) -> Iterator[tuple[int, int]]:
        for node in self.nodes:
            if node.coverer is not None:
                yield node.id, node.coverer

    def _check_mutable(self):
        if self.frozen:
            raise ContractError("the graph is finished and frozen")

    @property
    def finished(self) -> bool:
        return all(node.status is not Status.WAITING for node in self.nodes)

    def counts(self) -> tuple[int, int, int]:
        """(total, covered, non-covered) node counts."""
        total = len(self.nodes)
        covered = sum(1 for node in self.nodes if node.status is Status.COVERED)
        return total, covered, total - covered

    def pop_waiting(self) -> Optional[int]:
        while self.waitlist:
            n = self.waitlist.pop() if self.policy == "lifo" else self.waitlist.popleft()
            if self.nodes[n].status is Status.WAITING:
                return n
        return None

    # -- construction steps -------------------------------------------------------

    def process(self, n: int):
        """Cover ``n`` if possible, expand it otherwise."""
        if self.try_cover(n) is None:
            self.expand(n)

    def find_coverer(self, n: int) -> Optional[int]:
        concrete = self.nodes[n].concrete
        exact = self._expanded_by_concrete.get(concrete)
        if exact is not None and exact != n:
            return exact
        contains = self.domain.contains
        for c in self._expanded:
            if c != n and contains(self.nodes[c].abstract, concrete):
                return c
        return None

    def try_cover(self, n: int) -> Optional[tuple[int, int]]:
        self._check_mutable()
        node = self.nodes[n]
        if node.status is not Status.WAITING:
            raise ContractError(f"try_cover on node {n} with status {node.status.value}")
        c = self.find_coverer(n)
        if c is None:
            return None
        self.set_cover(n, c)
        self.block(n, negate(self.domain.to_expr(self.nodes[c].abstract)))
        return n, c

    def expand(self, n: int):
        self._check_mutable()
        node = self.nodes[n]
        if node.status is not Status.WAITING:
            raise ContractError(f"expand on node {n} with status {node.status.value}")
        model, domain = self.model, self.domain
        top = domain.top()
        children: list[int] = []
        for ci, cmd in enumerate(model.commands):
            if cmd.guard.eval(node.concrete):
                if ci == model.target_command:
                    node.is_target = True
                if domain.eval_bool(cmd.guard, node.abstract) is TriBool.UNKNOWN:
                    # the command may be disabled somewhere in the abstract label
                    self.block(n, negate(cmd.guard))
                edge_id = len(self.edges)
                branches = []
                for bi, br in enumerate(cmd.branches):
                    try:
                        succ = eval_assignment(model, br.assignment, node.concrete)
                    except OutOfRangeError as exc:
                        raise OutOfRangeError(
                            exc.variable, exc.value, *_range(model, exc.variable),
                            f"command {ci}, branch {bi} at {node.concrete!r}",
                        ) from exc
                    child = self.new_node(succ, top, parent=(edge_id, bi))
                    branches.append((br.probability, bi, child))
                    children.append(child)
                self.add_edge(n, ci, branches)
            elif domain.eval_bool(cmd.guard, node.abstract) is TriBool.UNKNOWN:
                # the command may be enabled somewhere in the abstract label
                self.block(n, cmd.guard)
        self.mark_expanded(n)
        self.waitlist.extend(children)

    def block(self, n: int, phi: Expr):
        """Strengthen the abstract label of n to exclude ``phi`` and restore the constraints it affects."""
        self._check_mutable()
        domain, model, nodes = self.domain, self.model, self.nodes
        work: list[tuple[int, Optional[Expr]]] = [(n, phi)]
        while work:
            m, formula = work.pop()
            node = nodes[m]
            if formula is not None:
                if formula.eval(node.concrete):
                    raise ContractError(f"block: {formula} holds in the concrete label of node {m}")
                new = domain.block(node.abstract, formula, node.concrete)
                if new == node.abstract:
                    continue
                node.abstract = new
                self.block_count += 1
                work.append((m, None))
                continue
            # the label of m changed: propagate to the parent and to the nodes m covers
            label = domain.to_expr(node.abstract)
            if node.parent is not None:
                edge = self.edges[node.parent[0]]
                assignment = model.commands[edge.command].branches[node.parent[1]].assignment
                work.append((edge.source, negate(weakest_precondition(assignment, label))))
            covered = self.covering.get(m)
            if covered:
                for c in list(covered):
                    if domain.contains(node.abstract, nodes[c].concrete):
                        work.append((c, negate(label)))
                    else:
                        self._remove_cover(c)

    # -- export -------------------------------------------------------------------

    def dump(self) -> str:
        """Line-oriented text description of the graph, for inspection."""
        fmt = self.domain.format
        lines = []
        for node in self.nodes:
            lines.append(
                f"node {node.id} status={node.status.value} target={int(node.is_target)} "
                f"lc={node.concrete!r} la={fmt(node.abstract)}"
            )
        for e in self.edges:
            parts = " ".join(f"{p}:{bi}->{child}" for p, bi, child in e.branches)
            lines.append(f"edge {e.id} {e.source} cmd={e.command} {parts}")
        for n, c in self.cover_edges():
            lines.append(f"cover {n} {c}")
        return "\n".join(lines) + "\n"


def _range(model: SymbolicMdp, name: str):
    d = model.decl(name)
    return d.lo, d.hi


def construct(
    model: SymbolicMdp,
    domain: AbstractDomain,
    policy: str = "lifo",
    max_nodes: int = DEFAULT_MAX_NODES,
    on_iteration: Optional[Callable[[Pasg], None]] = None,
) -> Pasg:
    """Build a finished graph; ``on_iteration`` runs after every processed node."""
    pasg = Pasg(model, domain, policy, max_nodes)
    while (n := pasg.pop_waiting()) is not None:
        pasg.process(n)
        if on_iteration is not None:
            on_iteration(pasg)
    pasg.frozen = True
    return pasg
