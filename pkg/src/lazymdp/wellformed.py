"""Independent checks of the labeling constraints of a graph.

Abstract labels are interpreted through ``to_expr`` and evaluated on every
valuation of the model, so the checks do not trust the domain's own
(possibly conservative) operations.  Constraint names:

A1  the abstract label contains the concrete label
A2  every guard has one definite value on the abstract label, equal to its
    value on the concrete label
B1  the command of a transition edge is enabled at the source
B2  the ith child matches the ith branch: same probability, concrete label
    equal to the assignment's result, abstract label containing the images
    of all states of the source's abstract label
C1  a covered node's concrete label lies in the coverer's abstract label
C2  a covered node's abstract label is included in the coverer's
C3  coverers are not covered
D1  at most one non-covered node per concrete label
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domains.base import TriBool
from .domains.entailment import EnumerationEntailment
from .errors import EvaluationError, OutOfRangeError
from .model import eval_assignment
from .pasg import Pasg, Status


@dataclass(frozen=True)
class Violation:
    constraint: str
    detail: str
    nodes: tuple[int, ...] = ()

    def __str__(self):
        return f"{self.constraint} {list(self.nodes)}: {self.detail}"


class _Exact:
    """Label semantics as boolean masks over all valuations."""

    def __init__(self, pasg: Pasg):
        self.model = pasg.model
        self.domain = pasg.domain
        self.enum = EnumerationEntailment(pasg.model)
        self._images: dict = {}

    def mask(self, label) -> np.ndarray:
        return self.enum.mask(self.domain.to_expr(label))

    def guard_values(self, guard, label):
        """Set of values the guard takes on the label's states."""
        m = self.mask(label)
        g = self.enum.mask(guard)[m]
        return set(bool(v) for v in np.unique(g))

    def image_inside(self, assignment, src_label, dst_label) -> bool:
        key = (assignment, src_label, dst_label)
        hit = self._images.get(key)
        if hit is not None:
            return hit
        src = self.mask(src_label)
        count = int(src.sum())
        arrays = {name: a[src] for name, a in self.enum.arrays.items()}
        ok = True
        try:
            image = dict(arrays)
            for name, e in assignment.updates:
                vals = np.broadcast_to(np.asarray(e.eval_vec(arrays)), (count,))
                d = self.model.decl(name)
                if d.kind == "int" and count and (vals.min() < d.lo or vals.max() > d.hi):
                    ok = False
                image[name] = vals
            if ok and count:
                inside = self.domain.to_expr(dst_label).eval_vec(image)
                ok = bool(np.broadcast_to(np.asarray(inside, dtype=bool), (count,)).all())
        except EvaluationError:
            ok = False
        self._images[key] = ok
        return ok


def check_well_labeled(pasg: Pasg, partial: bool = False) -> list[Violation]:
    """All constraint violations of ``pasg``; empty iff it is well labeled.

    With ``partial`` the graph may still have waiting nodes: A2 is checked with
    the domain's own tri-valued evaluation and only on non-waiting nodes, and
    D1 only among non-waiting nodes.  Otherwise A2 uses exact semantics on
    every node.
    """
    model, domain, nodes = pasg.model, pasg.domain, pasg.nodes
    exact = _Exact(pasg)
    out: list[Violation] = []

    # structure
    for node in nodes:
        if (node.status is Status.COVERED) != (node.coverer is not None):
            out.append(Violation("STRUCT", "covered status without a cover edge or vice versa", (node.id,)))
        if node.status is Status.COVERED and node.edges:
            out.append(Violation("STRUCT", "covered node with transition edges", (node.id,)))
        if (node.parent is None) != (node.id == pasg.root):
            out.append(Violation("STRUCT", "parent edge missing or on the root", (node.id,)))
        elif node.parent is not None:
            e = pasg.edges[node.parent[0]]
            if not any(bi == node.parent[1] and child == node.id for _, bi, child in e.branches):
                out.append(Violation("STRUCT", "parent edge does not lead to the node", (node.id,)))

    for node in nodes:
        label = node.abstract
        # A1
        if not domain.to_expr(label).eval(node.concrete):
            out.append(Violation("A1", f"{node.concrete!r} not in {domain.format(label)}", (node.id,)))
            continue
        # A2
        if node.status is Status.WAITING and partial:
            continue
        for ci, cmd in enumerate(model.commands):
            concrete = bool(cmd.guard.eval(node.concrete))
            if partial:
                ok = domain.eval_bool(cmd.guard, label) is TriBool.of(concrete)
            else:
                ok = exact.guard_values(cmd.guard, label) == {concrete}
            if not ok:
                out.append(Violation("A2", f"guard of command {ci} ({cmd.guard}) is not definite", (node.id,)))

    for e in pasg.edges:
        src = nodes[e.source]
        cmd = model.commands[e.command]
        # B1
        if not cmd.guard.eval(src.concrete):
            out.append(Violation("B1", f"command {e.command} disabled at source", (e.source,)))
        if len(e.branches) != len(cmd.branches):
            out.append(Violation("B2", f"edge {e.id} has {len(e.branches)} branches", (e.source,)))
            continue
        # B2
        for (prob, bi, child), br in zip(e.branches, cmd.branches):
            pair = (e.source, child)
            if prob != br.probability:
                out.append(Violation("B2", f"edge {e.id} branch {bi} probability {prob}", pair))
            try:
                expected = eval_assignment(model, br.assignment, src.concrete)
            except (OutOfRangeError, EvaluationError) as exc:
                out.append(Violation("B2", f"edge {e.id} branch {bi}: {exc}", pair))
                continue
            if expected != nodes[child].concrete:
                out.append(Violation("B2", f"edge {e.id} branch {bi} concrete label mismatch", pair))
            if not exact.image_inside(br.assignment, src.abstract, nodes[child].abstract):
                out.append(Violation("B2", f"edge {e.id} branch {bi} abstract image escapes the child label", pair))

    for n, c in pasg.cover_edges():
        pair = (n, c)
        cov, tgt = nodes[n], nodes[c]
        # C1
        if not domain.to_expr(tgt.abstract).eval(cov.concrete):
            out.append(Violation("C1", "concrete label outside the coverer's abstract label", pair))
        # C2
        if np.any(exact.mask(cov.abstract) & ~exact.mask(tgt.abstract)):
            out.append(Violation("C2", "abstract label not included in the coverer's", pair))
        # C3
        if tgt.status is Status.COVERED:
            out.append(Violation("C3", "coverer is itself covered", pair))

    # D1
    seen: dict = {}
    for node in nodes:
        if node.status is Status.COVERED or (partial and node.status is Status.WAITING):
            continue
        first = seen.setdefault(node.concrete, node.id)
        if first != node.id:
            out.append(Violation("D1", f"two non-covered nodes labeled {node.concrete!r}", (first, node.id)))
    return out


def trace_correspondence(pasg: Pasg, k: int) -> bool:
    """Check that every concrete trace of length <= k is matched by the graph.

    A concrete trace is a sequence of (command, branch) choices from the
    initial valuation.  It is matched if, following transition edges for the
    same commands and branches and resolving cover edges in between, every
    visited state lies in the abstract label of the node reached.
    """
    model, domain, nodes = pasg.model, pasg.domain, pasg.nodes
    labels: dict = {}

    def inside(s, n) -> bool:
        lab = nodes[n].abstract
        e = labels.get(n)
        if e is None or e[0] is not lab:
            e = labels[n] = (lab, domain.to_expr(lab))
        return bool(e[1].eval(s))

    def resolve(n):
        hops = 0
        while nodes[n].status is Status.COVERED:
            n = nodes[n].coverer
            hops += 1
            if hops > len(nodes):
                return None
        return n

    seen = set()
    stack = [(model.initial, pasg.root, 0)]
    while stack:
        s, n, depth = stack.pop()
        if (s, n, depth) in seen:
            continue
        seen.add((s, n, depth))
        if not inside(s, n):
            return False
        if depth >= k:
            continue
        m = resolve(n)
        if m is None or not inside(s, m) or nodes[m].status is not Status.EXPANDED:
            return False
        by_command = {pasg.edges[eid].command: pasg.edges[eid] for eid in nodes[m].edges}
        for ci, cmd in enumerate(model.commands):
            if not cmd.guard.eval(s):
                continue
            edge = by_command.get(ci)
            if edge is None:
                return False
            for (_, bi, child), br in zip(edge.branches, cmd.branches):
                try:
                    succ = eval_assignment(model, br.assignment, s)
                except (OutOfRangeError, EvaluationError):
                    return False
                stack.append((succ, child, depth + 1))
    return True
