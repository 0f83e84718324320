"""Flat MDP views over finished graphs and explicit state spaces."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import ContractError
from ..explicit import ExplicitMdp
from ..pasg import Pasg, Status

Distribution = list[tuple[int, float]]


@dataclass
class MdpView:
    initial: int
    targets: list[bool]
    actions: list[list[Distribution]]
    deadlocks: list[bool] = field(default_factory=list)

    @property
    def num_states(self) -> int:
        return len(self.targets)

    def validate(self, tol: float = 1e-12):
        for s, acts in enumerate(self.actions):
            if not acts:
                raise ContractError(f"state {s} has no actions")
            for a in acts:
                total = sum(p for _, p in a)
                if abs(total - 1.0) > tol:
                    raise ContractError(f"state {s}: successor probabilities sum to {total}")
            if self.targets[s] and acts != [[(s, 1.0)]]:
                raise ContractError(f"target state {s} is not absorbing")


def pasg_as_mdp(pasg: Pasg) -> MdpView:
    """One state per node: covered nodes step to their coverer, targets and
    deadlocks loop, and expanded nodes get one action per transition edge."""
    targets, actions, deadlocks = [], [], []
    for node in pasg.nodes:
        n = node.id
        if node.status is Status.WAITING:
            raise ContractError(f"node {n} is still waiting; the graph is not finished")
        dead = False
        if node.status is Status.COVERED:
            acts = [[(node.coverer, 1.0)]]
        elif node.is_target:
            acts = [[(n, 1.0)]]
        elif not node.edges:
            acts = [[(n, 1.0)]]
            dead = True
        else:
            acts = []
            for eid in node.edges:
                dist: dict[int, float] = {}
                for p, _, child in pasg.edges[eid].branches:
                    dist[child] = dist.get(child, 0.0) + float(p)
                acts.append(list(dist.items()))
        targets.append(node.status is Status.EXPANDED and node.is_target)
        actions.append(acts)
        deadlocks.append(dead)
    return MdpView(pasg.root, targets, actions, deadlocks)


def explicit_as_mdp(mdp: ExplicitMdp) -> MdpView:
    actions, deadlocks = [], []
    for s in range(mdp.num_states):
        if mdp.targets[s]:
            actions.append([[(s, 1.0)]])
            deadlocks.append(False)
        elif not mdp.actions[s]:
            actions.append([[(s, 1.0)]])
            deadlocks.append(True)
        else:
            actions.append([list(d.items()) for _, d in mdp.actions[s]])
            deadlocks.append(False)
    return MdpView(mdp.initial, list(mdp.targets), actions, deadlocks)
