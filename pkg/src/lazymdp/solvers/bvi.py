"""Bounded (interval) value iteration for maximal reachability."""

from __future__ import annotations

import time

import numpy as np
import scipy.sparse as sp

from ..errors import BudgetExceeded
from .graph import prob0, prob1max, view_mecs
from .result import SolveResult
from .view import MdpView

DEFAULT_MAX_ITERATIONS = 1_000_000


def bounded_value_iteration(
    view: MdpView, eps: float = 1e-6, max_iterations: int = DEFAULT_MAX_ITERATIONS
) -> SolveResult:
    """Lower and upper bounds on the maximal reachability probability.

    States that cannot reach a target are fixed to 0 and states that reach one
    almost surely under some strategy to 1.  Maximal end components are then
    collapsed, dropping the actions that stay inside them, so the upper bounds
    converge from 1 as well as the lower bounds from 0.
    """
    start = time.perf_counter()
    zero, one = prob0(view), prob1max(view)
    n = view.num_states
    quotient = list(range(n))
    for members, _ in view_mecs(view):
        for s in members:
            quotient[s] = members[0]
    ids = {q: i for i, q in enumerate(sorted(set(quotient)))}
    q_of = [ids[quotient[s]] for s in range(n)]
    nq = len(ids)

    pinned = np.zeros(nq, dtype=np.int8)  # 0 free, 1 fixed at 0, 2 fixed at 1
    for s in range(n):
        if s in one:
            pinned[q_of[s]] = 2
    for s in range(n):
        if s in zero and pinned[q_of[s]] == 0:
            pinned[q_of[s]] = 1

    rows, cols, vals, owner = [], [], [], []
    per_q: list[list[dict[int, float]]] = [[] for _ in range(nq)]
    for s in range(n):
        q = q_of[s]
        if pinned[q]:
            continue
        for a in view.actions[s]:
            dist: dict[int, float] = {}
            for t, p in a:
                dist[q_of[t]] = dist.get(q_of[t], 0.0) + p
            if set(dist) == {q}:
                continue
            per_q[q].append(dist)
    for q in range(nq):
        if not pinned[q] and not per_q[q]:
            pinned[q] = 1
    for q in range(nq):
        if pinned[q]:
            continue
        for dist in per_q[q]:
            k = len(owner)
            owner.append(q)
            for t, p in dist.items():
                rows.append(k)
                cols.append(t)
                vals.append(p)

    lo = np.where(pinned == 2, 1.0, 0.0)
    hi = np.where(pinned == 1, 0.0, 1.0)
    free = np.flatnonzero(pinned == 0)
    init = q_of[view.initial]
    iterations = 0
    if len(owner):
        matrix = sp.csr_matrix((vals, (rows, cols)), shape=(len(owner), nq))
        owner_arr = np.asarray(owner)
        starts = np.flatnonzero(np.r_[True, owner_arr[1:] != owner_arr[:-1]])
        groups = owner_arr[starts]
        while np.max(hi[free] - lo[free]) > eps:
            if iterations >= max_iterations:
                raise BudgetExceeded(
                    f"no convergence after {iterations} iterations",
                    partial=SolveResult(lo[init], hi[init], iterations, n, _ms(start)),
                )
            iterations += 1
            lo[groups] = np.maximum(lo[groups], np.maximum.reduceat(matrix @ lo, starts))
            hi[groups] = np.minimum(hi[groups], np.maximum.reduceat(matrix @ hi, starts))
    return SolveResult(float(lo[init]), float(hi[init]), iterations, n, _ms(start))


def _ms(start: float) -> float:
    return (time.perf_counter() - start) * 1000.0
