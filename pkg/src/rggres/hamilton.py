"""Exact Hamiltonicity: bitset dynamic programming up to 24 vertices,
budgeted depth-first search up to 64."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .connectivity import is_k_connected
from .graph import CycleCertificate, Graph, base_graph

DP_BOUND = 24
HARD_CAP = 64


class OracleScopeError(ValueError):
    pass


@dataclass(frozen=True)
class HamiltonResult:
    status: bool | None  # None means the search budget ran out
    cycle: CycleCertificate | None = None

    def __bool__(self):
        return bool(self.status)


@njit(cache=True)
def _held_karp(adj: np.ndarray, n: int) -> np.ndarray:
    # vertex 0 is the start; vertices 1..n-1 map to bits 0..n-2
    k = n - 1
    size = 1 << k
    reach = np.zeros(size, np.uint32)
    nb = np.zeros(k, np.uint32)
    for w in range(k):
        nb[w] = np.uint32(adj[w + 1] >> 1)
    start = np.uint32(adj[0] >> 1)
    for w in range(k):
        if (start >> w) & 1:
            reach[1 << w] = np.uint32(1 << w)
    for mask in range(1, size):
        cur = reach[mask]
        if cur == 0:
            continue
        for w in range(k):
            if (mask >> w) & 1:
                continue
            if cur & nb[w]:
                reach[mask | (1 << w)] |= np.uint32(1 << w)
    return reach


def _dp_cycle(g: Graph) -> list | None:
    n = g.n
    bits = np.array(g.adjacency_bits(), dtype=np.uint64)
    reach = _held_karp(bits.astype(np.uint32), n)
    full = (1 << (n - 1)) - 1
    ends = int(reach[full]) & (int(bits[0]) >> 1)
    if ends == 0:
        return None
    nbits = [int(b) >> 1 for b in bits]
    v = (ends & -ends).bit_length() - 1
    mask = full
    path = [v + 1]
    while mask != (1 << v):
        prev_mask = mask & ~(1 << v)
        cand = int(reach[prev_mask]) & nbits[v + 1]
        u = (cand & -cand).bit_length() - 1
        path.append(u + 1)
        mask, v = prev_mask, u
    path.append(0)
    return path[::-1]


def _dfs_cycle(g: Graph, budget: int):
    n = g.n
    adj = g.adjacency_sets()
    path = [0]
    on = [False] * n
    on[0] = True
    nodes = 0

    def feasible():
        # every unvisited vertex needs two usable neighbours
        tail = path[-1]
        for x in range(n):
            if on[x]:
                continue
            free = 0
            for y in adj[x]:
                if not on[y] or y == tail or y == 0:
                    free += 1
                    if free >= 2:
                        break
            if free < 2:
                return False
        # the rest of the cycle runs tail -> unvisited -> 0, so these must be connected
        seen = {tail}
        stack = [tail]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen and (not on[y] or y == 0):
                    seen.add(y)
                    if y != 0:
                        stack.append(y)
        return len(seen) == n - len(path) + (2 if tail != 0 else 1)

    def rec():
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise TimeoutError
        if len(path) == n:
            return 0 in adj[path[-1]]
        if not feasible():
            return False
        tail = path[-1]
        options = [w for w in adj[tail] if not on[w]]
        options.sort(key=lambda w: sum(1 for y in adj[w] if not on[y]))
        for w in options:
            path.append(w)
            on[w] = True
            if rec():
                return True
            path.pop()
            on[w] = False
        return False

    try:
        return list(path) if rec() else False
    except TimeoutError:
        return None


def is_hamiltonian_exact(g, node_budget: int = 2_000_000, dp_bound: int = DP_BOUND) -> HamiltonResult:
    g = base_graph(g)
    n = g.n
    if n > HARD_CAP:
        raise OracleScopeError(f"n={n} exceeds the exact-oracle cap {HARD_CAP}")
    if n < 3 or g.degree.min() < 2 or not g.is_connected():
        return HamiltonResult(False)
    if n <= dp_bound:
        cyc = _dp_cycle(g)
        return HamiltonResult(cyc is not None, CycleCertificate(tuple(cyc)) if cyc else None)
    if not is_k_connected(g, 2):
        return HamiltonResult(False)
    out = _dfs_cycle(g, node_budget)
    if out is None:
        return HamiltonResult(None)
    if out is False:
        return HamiltonResult(False)
    return HamiltonResult(True, CycleCertificate(tuple(out)))
