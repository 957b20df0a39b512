"""Two vertex-disjoint spanning paths between prescribed endpoint pairs."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..graph import Graph, base_graph
from ..hamilton import DP_BOUND, is_hamiltonian_exact
from .closure import _closure_kernel, _pair_order, _unwind
from .common import BuildFailure


@dataclass
class TwoPathsCertificate:
    P: tuple
    Q: tuple
    A: tuple
    B: tuple
    hypothesis: dict = field(default_factory=dict)
    method: str = "closure"


def min_degree_hypothesis(g: Graph) -> dict:
    n = g.n
    dmin = int(g.degree.min()) if n else 0
    return {"mode": "min-degree", "holds": dmin >= n / 2 + 1, "min_degree": dmin, "needed": n / 2 + 1}


def degree_sequence_hypothesis(g: Graph) -> dict:
    """d_i >= i + 3 for every 1-based i < n/2 - 1; reports the first violation."""
    n = g.n
    ds = np.sort(g.degree)
    first = None
    i = 1
    while i < n / 2 - 1:
        if ds[i - 1] < i + 3:
            first = i
            break
        i += 1
    return {"mode": "degree-sequence", "holds": first is None, "first_violation": first,
            "degree_sequence": ds.tolist()}


def verify_two_paths(g, cert: TwoPathsCertificate) -> bool:
    g = base_graph(g)
    P, Q = list(cert.P), list(cert.Q)
    if not P or not Q or set(P) & set(Q):
        return False
    if len(set(P)) != len(P) or len(set(Q)) != len(Q):
        return False
    if set(P) | set(Q) != set(range(g.n)):
        return False
    A, B = set(cert.A), set(cert.B)
    adj = g.dense() if g.n <= 2000 else None
    for path in (P, Q):
        ends = {path[0], path[-1]}
        if not (len(ends & A) == 1 and len(ends & B) == 1):
            return False
        if len(path) > 1:
            if adj is not None:
                if not adj[path[:-1], path[1:]].all():
                    return False
            elif np.any(g.edge_ids(np.array(list(zip(path[:-1], path[1:])), np.int64)) < 0):
                return False
    return True


def _split(cycle, y, z):
    """Cut a Hamilton cycle of the augmented graph at the two auxiliary vertices."""
    i = cycle.index(y)
    rot = cycle[i:] + cycle[:i]
    j = rot.index(z)
    first, second = rot[1:j], rot[j + 1:]
    if not first or not second:
        return None
    return tuple(first), tuple(second)


def _augmented(g: Graph, A, B):
    n = g.n
    u, v = A
    w, x = B
    y, z = n, n + 1
    adj = np.zeros((n + 2, n + 2), np.uint8)
    adj[:n, :n] = g.dense()
    for a, b in ((u, y), (y, v), (w, z), (z, x)):
        adj[a, b] = adj[b, a] = 1
    return adj, y, z


def two_disjoint_paths(g, A, B, mode: str = "min-degree") -> TwoPathsCertificate | BuildFailure:
    """Route two disjoint A-B paths covering every vertex.

    Adds y adjacent to both ends of A and z adjacent to both ends of B, takes
    the degree-sum closure, and if the closure holds the complete graph on the
    original vertices unwinds the explicit cycle y v ... w z x ... u. Small
    instances whose closure is incomplete fall back to exact search.
    """
    G = base_graph(g)
    n = G.n
    A, B = tuple(int(a) for a in A), tuple(int(b) for b in B)
    if mode not in ("min-degree", "degree-sequence"):
        raise ValueError(f"unknown mode {mode!r}")
    need = 4 if mode == "min-degree" else 5
    if n < need:
        raise ValueError(f"{mode} mode needs at least {need} vertices, got {n}")
    if len(set(A)) != 2 or len(set(B)) != 2 or set(A) & set(B):
        raise ValueError("A and B must be disjoint pairs of distinct vertices")
    hyp = min_degree_hypothesis(G) if mode == "min-degree" else degree_sequence_hypothesis(G)
    adj, y, z = _augmented(G, A, B)
    pu, pv = _pair_order(n + 2)
    T, ou, ov = _closure_kernel(adj, pu, pv)
    u, v = A
    w, x = B
    method = "closure"
    if np.all((T[:n, :n] >= 0) | np.eye(n, dtype=bool)):
        rest = [t for t in range(n) if t not in (u, v, w, x)]
        seed = np.array([y, v, *rest, w, z, x, u], np.int64)
        cyc, ok = _unwind(seed, T, ou, ov)
        cycle = cyc.tolist() if ok else None
    elif n + 2 <= DP_BOUND:
        aug = Graph.from_adjacency(adj.astype(bool))
        res = is_hamiltonian_exact(aug)
        cycle = list(res.cycle.vertices) if res.status else None
        method = "exact"
    else:
        return BuildFailure("closure", "closure misses edges of the complete graph", audits=hyp)
    if cycle is None:
        return BuildFailure("route", "no Hamilton cycle through the auxiliary vertices", audits=hyp)
    parts = _split(cycle, y, z)
    if parts is None:
        return BuildFailure("route", "degenerate split", audits=hyp)
    cert = TwoPathsCertificate(parts[0], parts[1], A, B, hyp, method)
    if not verify_two_paths(G, cert):
        return BuildFailure("verify", "paths failed verification", audits=hyp)
    return cert
