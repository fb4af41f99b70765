"""Exact solver for ad-ad instances whose contextual graph is acyclic.

When every externality edge points "forward" under some ordering of the
ads, the welfare optimum is attained by an allocation that respects that
ordering, so a quadratic dynamic program over (ad, slot) suffices:

    D[i][m] = Lam_m * q_i * v_i + max_{j > i} gamma_{i,j} * D[j][m+1]

Applies to no-reset instances with a full externality window.
"""

from __future__ import annotations

import heapq

import numpy as np

from .core import BOT, Allocation, Instance, ModelError


class NotADagError(ValueError):
    """The contextual graph contains a directed cycle."""


def topological_rename(inst: Instance) -> tuple[int, ...]:
    """Topological order of the ads (Kahn's algorithm, smallest index first).

    Returns a permutation ``pi`` with ``pi[pos]`` the original ad index;
    every externality edge goes from an earlier position to a later one.
    """
    if inst.model.kind != "aa":
        raise ModelError("the contextual graph is defined for aa instances")
    n = inst.n
    edges = inst.gamma > 0  # diagonal entries are skipped below (unused by the model)
    indeg = [0] * n
    for j in range(n):
        indeg[j] = int(sum(1 for i in range(n) if i != j and edges[i, j]))
    ready = [i for i in range(n) if indeg[i] == 0]
    heapq.heapify(ready)
    order: list[int] = []
    while ready:
        i = heapq.heappop(ready)
        order.append(i)
        for j in range(n):
            if j != i and edges[i, j]:
                indeg[j] -= 1
                if indeg[j] == 0:
                    heapq.heappush(ready, j)
    if len(order) != n:
        raise NotADagError("not a DAG")
    return tuple(order)


def dp_optimal_dag(inst: Instance) -> Allocation:
    """Welfare-optimal allocation for a DAG instance (aa, no-reset, window K).

    Ties in the running maximum break toward the smallest renamed ad
    index; suffixes that would be reached over a zero-weight edge are
    blanked out, since their click probability is zero anyway.
    """
    if inst.model.kind != "aa" or inst.reset:
        raise ModelError("DP applies to aa no-reset instances")
    if inst.window != inst.k:
        raise ModelError("DP requires a full externality window (window == K)")
    order = topological_rename(inst)

    n, k = inst.n, inst.k
    qv = np.array([inst.q[a] * inst.v[a] for a in order])
    lam = np.asarray(inst.lam_cum)
    g = inst.gamma[np.ix_(order, order)]

    d = np.zeros((n, k))
    nxt = np.full((n, k), -1, dtype=np.int64)
    for i in range(n - 1, -1, -1):
        for m in range(k - 1, -1, -1):
            base = lam[m] * qv[i]
            best, arg = 0.0, -1
            if m + 1 < k:
                for j in range(i + 1, n):
                    val = g[i, j] * d[j, m + 1]
                    if val > best:
                        best, arg = val, j
            d[i, m] = base + best
            nxt[i, m] = arg

    start = int(np.argmax(d[:, 0]))  # first maximum = smallest index on ties
    chain = [start]
    m = 0
    while nxt[chain[-1], m] >= 0:
        chain.append(int(nxt[chain[-1], m]))
        m += 1
    slots: list[int] = []
    for pos, i in enumerate(chain):
        if pos > 0 and g[chain[pos - 1], i] == 0.0:
            break  # unreachable suffix contributes nothing; leave it empty
        slots.append(order[i])
    return Allocation(tuple(slots) + (BOT,) * (k - len(slots)))
