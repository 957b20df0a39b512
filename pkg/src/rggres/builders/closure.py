"""Degree-sum closure and constructive Hamilton cycles by rotation exchange."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numba import njit

from ..graph import CycleCertificate, Graph, base_graph, verify_cycle
from ..rgg import as_rng
from .common import BuildFailure


@njit(cache=True)
def _closure_kernel(adj, pu, pv):
    """Scan candidate pairs in the given order until a full pass adds nothing.

    Returns the addition-time matrix (-1 non-edge, 0 original, j for the
    j-th added edge) and the added pairs in order.
    """
    n = adj.shape[0]
    deg = np.zeros(n, np.int64)
    T = np.full((n, n), -1, np.int32)
    for u in range(n):
        for v in range(n):
            if adj[u, v]:
                deg[u] += 1
                T[u, v] = 0
    cap = len(pu)
    ou = np.empty(cap, np.int64)
    ov = np.empty(cap, np.int64)
    cnt = 0
    changed = True
    while changed:
        changed = False
        for i in range(cap):
            u = pu[i]
            v = pv[i]
            if T[u, v] < 0 and deg[u] + deg[v] >= n:
                cnt += 1
                T[u, v] = cnt
                T[v, u] = cnt
                deg[u] += 1
                deg[v] += 1
                ou[cnt - 1] = u
                ov[cnt - 1] = v
                changed = True
    return T, ou[:cnt], ov[:cnt]


@njit(cache=True)
def _unwind(cycle, T, ou, ov):
    """Replace added edges, latest first, by crossing pairs of earlier edges."""
    n = len(cycle)
    cyc = cycle.copy()
    pos = np.empty(n, np.int64)
    for i in range(n):
        pos[cyc[i]] = i
    c = np.empty(n, np.int64)
    for j in range(len(ou), 0, -1):
        x = ou[j - 1]
        y = ov[j - 1]
        px = pos[x]
        py = pos[y]
        if (px - py) % n == 1:
            for i in range(n):
                c[i] = cyc[(px + i) % n]
        elif (py - px) % n == 1:
            for i in range(n):
                c[i] = cyc[(px - i) % n]
        else:
            continue
        # c[0] = x, c[n-1] = y; want x ~ c[i+1], y ~ c[i] using edges older than j
        found = -1
        for i in range(1, n - 2):
            a = T[x, c[i + 1]]
            b = T[y, c[i]]
            if 0 <= a < j and 0 <= b < j:
                found = i
                break
        if found < 0:
            return cyc, False
        k = 0
        cyc[k] = c[0]
        k += 1
        for t in range(found + 1, n):
            cyc[k] = c[t]
            k += 1
        for t in range(found, 0, -1):
            cyc[k] = c[t]
            k += 1
        for i in range(n):
            pos[cyc[i]] = i
    return cyc, True


@dataclass
class Closure:
    T: np.ndarray
    added: np.ndarray  # (k, 2) in addition order

    @property
    def n(self) -> int:
        return self.T.shape[0]

    def adjacency(self) -> np.ndarray:
        return self.T >= 0

    def is_complete(self, vertices=None) -> bool:
        A = self.adjacency()
        if vertices is not None:
            idx = np.asarray(vertices)
            A = A[np.ix_(idx, idx)]
        k = A.shape[0]
        return int(A.sum()) == k * (k - 1)


@lru_cache(maxsize=64)
def _lex_pairs(n: int):
    iu, iv = np.triu_indices(n, 1)
    return iu.astype(np.int64), iv.astype(np.int64)


def _pair_order(n: int, rng=None):
    iu, iv = _lex_pairs(n)
    if rng is not None:
        perm = as_rng(rng).permutation(len(iu))
        iu, iv = iu[perm], iv[perm]
    return iu, iv


def bondy_chvatal_closure(g, order=None) -> Closure:
    """Closure under adding uv whenever d(u) + d(v) >= n.

    ``order`` is None for lexicographic scanning or a seed for a random pair
    order; the resulting edge set does not depend on it.
    """
    g = base_graph(g)
    adj = g.dense().astype(np.uint8)
    pu, pv = _pair_order(g.n, order)
    T, ou, ov = _closure_kernel(adj, pu, pv)
    return Closure(T, np.stack([ou, ov], axis=1))


def unwind_cycle(cl: Closure, seed_cycle) -> list | None:
    """Turn a Hamilton cycle of the closure into one of the original graph."""
    seed = np.asarray(seed_cycle, np.int64)
    T = cl.T
    if len(seed) != cl.n or np.any(T[seed, np.roll(seed, -1)] < 0):
        raise ValueError("seed is not a Hamilton cycle of the closure")
    cyc, ok = _unwind(seed, T, cl.added[:, 0].copy(), cl.added[:, 1].copy())
    return cyc.tolist() if ok else None


def closure_hamilton(g) -> CycleCertificate | BuildFailure:
    G = base_graph(g)
    n = G.n
    if n < 3:
        return BuildFailure("closure", f"{n} vertices is too few for a cycle")
    cl = bondy_chvatal_closure(G)
    if not cl.is_complete():
        return BuildFailure("closure", "closure is not complete",
                            audits={"closure_edges": int(cl.adjacency().sum()) // 2})
    cyc = unwind_cycle(cl, np.arange(n))
    if cyc is None:
        return BuildFailure("unwind", "no crossing pair found")
    cert = CycleCertificate(tuple(cyc), kind="closure", params={"added": len(cl.added)})
    if not verify_cycle(G, cert):
        return BuildFailure("verify", "unwound cycle failed verification")
    return cert
