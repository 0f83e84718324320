"""Qualitative graph analyses: probability-0 and probability-1 states, end components."""

from __future__ import annotations

from typing import Iterable, Mapping, Sequence

import networkx as nx

from .view import MdpView


def prob0(view: MdpView) -> set[int]:
    """States from which no strategy reaches a target."""
    preds: list[set[int]] = [set() for _ in range(view.num_states)]
    for s, acts in enumerate(view.actions):
        for a in acts:
            for t, p in a:
                if p > 0:
                    preds[t].add(s)
    reach = {s for s in range(view.num_states) if view.targets[s]}
    todo = list(reach)
    while todo:
        t = todo.pop()
        for s in preds[t]:
            if s not in reach:
                reach.add(s)
                todo.append(s)
    return set(range(view.num_states)) - reach


def prob1max(view: MdpView) -> set[int]:
    """States from which some strategy reaches a target with probability 1."""
    u = set(range(view.num_states))
    while True:
        r = {s for s in u if view.targets[s]}
        while True:
            new = {
                s for s in u - r
                if any(all(t in u for t, _ in a) and any(t in r for t, _ in a) for a in view.actions[s])
            }
            if not new:
                break
            r |= new
        if r == u:
            return u
        u = r


def mec_decomposition(
    choices: Mapping[int, Sequence[Iterable[int]]],
) -> list[tuple[tuple[int, ...], dict[int, list[int]]]]:
    """Maximal end components of the sub-MDP given by ``choices``.

    ``choices`` maps each state to its actions, each a collection of successor
    states.  Successors missing from ``choices`` count as leaving.  Returns
    (sorted member states, {state: indices of actions staying inside}),
    sorted by smallest member.
    """
    succ = {s: [frozenset(a) for a in acts] for s, acts in choices.items()}
    alive = {s: list(range(len(acts))) for s, acts in succ.items()}
    while True:
        changed = True
        while changed:
            changed = False
            for s in list(alive):
                keep = [i for i in alive[s] if succ[s][i] <= alive.keys()]
                if len(keep) != len(alive[s]):
                    changed = True
                if keep:
                    alive[s] = keep
                else:
                    del alive[s]
                    changed = True
        g = nx.DiGraph()
        g.add_nodes_from(alive)
        for s, acts in alive.items():
            for i in acts:
                g.add_edges_from((s, t) for t in succ[s][i])
        comp = {}
        for k, scc in enumerate(nx.strongly_connected_components(g)):
            for s in scc:
                comp[s] = k
        stable = True
        for s in list(alive):
            keep = [i for i in alive[s] if all(comp[t] == comp[s] for t in succ[s][i])]
            if len(keep) != len(alive[s]):
                stable = False
            if keep:
                alive[s] = keep
            else:
                del alive[s]
        if stable:
            break
    groups: dict[int, list[int]] = {}
    for s in alive:
        groups.setdefault(comp[s], []).append(s)
    out = [(tuple(sorted(m)), {s: alive[s] for s in sorted(m)}) for m in groups.values()]
    out.sort(key=lambda x: x[0][0])
    return out


def view_mecs(view: MdpView):
    return mec_decomposition({s: [[t for t, _ in a] for a in acts] for s, acts in enumerate(view.actions)})
