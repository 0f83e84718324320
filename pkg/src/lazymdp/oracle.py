"""Reference maximal reachability probabilities on explicit MDPs.

Deliberately self-contained: the qualitative precomputations, end component
search and value iteration below share no code with the solvers package, so
the two can be tested against each other.
"""

from __future__ import annotations

from .errors import BudgetExceeded
from .explicit import ExplicitMdp


def _never_reach(mdp: ExplicitMdp) -> set[int]:
    can = {s for s in range(mdp.num_states) if mdp.targets[s]}
    changed = True
    while changed:
        changed = False
        for s in range(mdp.num_states):
            if s not in can and any(t in can for _, d in mdp.actions[s] for t in d):
                can.add(s)
                changed = True
    return set(range(mdp.num_states)) - can


def _almost_sure(mdp: ExplicitMdp) -> set[int]:
    keep = set(range(mdp.num_states))
    while True:
        good = {s for s in keep if mdp.targets[s]}
        grown = True
        while grown:
            grown = False
            for s in keep - good:
                for _, d in mdp.actions[s]:
                    if all(t in keep for t in d) and any(t in good for t in d):
                        good.add(s)
                        grown = True
                        break
        if good == keep:
            return keep
        keep = good


def _reach(start: int, allowed: dict[int, list[dict[int, float]]]) -> set[int]:
    seen = {start}
    todo = [start]
    while todo:
        s = todo.pop()
        for d in allowed[s]:
            for t in d:
                if t not in seen:
                    seen.add(t)
                    todo.append(t)
    return seen


def end_components(mdp: ExplicitMdp) -> list[set[int]]:
    """Maximal end components, found by repeatedly pruning escaping actions."""
    allowed = {s: [d for _, d in mdp.actions[s]] for s in range(mdp.num_states)}
    while True:
        live = {s for s in allowed if allowed[s]}
        pruned = {s: [d for d in allowed[s] if all(t in live for t in d)] for s in live}
        reach = {s: _reach(s, pruned) for s in pruned}
        comp = {s: frozenset(t for t in reach[s] if s in reach[t]) for s in pruned}
        nxt = {s: [d for d in pruned[s] if all(t in comp[s] for t in d)] for s in pruned}
        nxt = {s: acts for s, acts in nxt.items() if acts}
        if nxt.keys() == allowed.keys() and all(len(nxt[s]) == len(allowed[s]) for s in nxt):
            out, done = [], set()
            for s in sorted(nxt):
                if s not in done:
                    done |= comp[s]
                    out.append(set(comp[s]))
            return out
        allowed = nxt


def value_iteration_oracle(mdp: ExplicitMdp, eps: float = 1e-6, max_sweeps: int = 10_000_000) -> float:
    """Maximal probability of reaching a target from the initial state."""
    zero = _never_reach(mdp)
    one = _almost_sure(mdp)
    rep = list(range(mdp.num_states))
    for ec in end_components(mdp):
        r = min(ec)
        for s in ec:
            rep[s] = r
    # collapsed actions per representative; actions staying inside their component are dropped
    acts: dict[int, list[list[tuple[int, float]]]] = {}
    for s in range(mdp.num_states):
        r = rep[s]
        bucket = acts.setdefault(r, [])
        for _, d in mdp.actions[s]:
            if all(rep[t] == r for t in d):
                continue
            merged: dict[int, float] = {}
            for t, p in d.items():
                merged[rep[t]] = merged.get(rep[t], 0.0) + p
            bucket.append(list(merged.items()))
    lo = {r: 0.0 for r in acts}
    hi = {r: 1.0 for r in acts}
    free = []
    for r in acts:
        members = [s for s in range(mdp.num_states) if rep[s] == r]
        if any(s in one for s in members):
            lo[r] = 1.0
        elif any(s in zero for s in members) or not acts[r]:
            hi[r] = 0.0
        else:
            free.append(r)
    init = rep[mdp.initial]
    for _ in range(max_sweeps):
        if hi[init] - lo[init] <= eps and all(hi[r] - lo[r] <= eps for r in free):
            return (lo[init] + hi[init]) / 2
        for r in free:
            lo[r] = max(sum(p * lo[t] for t, p in a) for a in acts[r])
            hi[r] = max(sum(p * hi[t] for t, p in a) for a in acts[r])
    raise BudgetExceeded("oracle value iteration did not converge")
