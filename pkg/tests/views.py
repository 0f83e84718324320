"""Random small MDP views for property tests."""

import itertools

from hypothesis import strategies as st

from lazymdp.explicit import ExplicitMdp
from lazymdp.solvers import MdpView


@st.composite
def small_views(draw, max_states=6, max_actions=2):
    n = draw(st.integers(2, max_states))
    targets = [draw(st.booleans()) if s else False for s in range(n)]
    actions = []
    for s in range(n):
        if targets[s]:
            actions.append([[(s, 1.0)]])
            continue
        acts = []
        for _ in range(draw(st.integers(1, max_actions))):
            succ = draw(st.lists(st.integers(0, n - 1), min_size=1, max_size=3, unique=True))
            w = [draw(st.integers(1, 4)) for _ in succ]
            acts.append([(t, x / sum(w)) for t, x in zip(succ, w)])
        actions.append(acts)
    return MdpView(0, targets, actions, [False] * n)


def as_explicit(view):
    return ExplicitMdp(
        list(range(view.num_states)),
        [[(i, dict(a)) for i, a in enumerate(acts)] for acts in view.actions],
        list(view.targets),
        view.initial,
    )


def strategies(view):
    """All memoryless deterministic strategies, as one action index per state."""
    return itertools.product(*(range(len(a)) for a in view.actions))


def chain_reach(view, choice, s):
    seen, todo = {s}, [s]
    while todo:
        u = todo.pop()
        if view.targets[u]:
            continue
        for t, p in view.actions[u][choice[u]]:
            if p > 0 and t not in seen:
                seen.add(t)
                todo.append(t)
    return seen
