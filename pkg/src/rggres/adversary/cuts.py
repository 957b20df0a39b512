"""Partition and region based edge-deletion strategies."""

from __future__ import annotations

import math

import numpy as np
from numba import njit
from scipy.sparse import csgraph

from ..geom import Metric
from ..graph import GeometricGraph, base_graph
from ..rgg import as_rng
from .report import AttackReport, make_report


class PreconditionError(ValueError):
    pass


# -- bipartition by local search ---------------------------------------------

def _same_counts(g, part):
    e = g.edges
    same_edge = part[e[:, 0]] == part[e[:, 1]]
    return np.bincount(e[same_edge].ravel(), minlength=g.n)


def _local_search(g, part, wants_move, max_moves):
    """Move vertices while wants_move(same, degree) holds, never emptying a part."""
    part = part.copy()
    same = _same_counts(g, part)
    deg = g.degree
    sizes = np.bincount(part, minlength=2)
    todo = set(np.nonzero(wants_move(same, deg))[0].tolist())
    moves = 0
    while todo and moves < max_moves:
        v = todo.pop()
        if not wants_move(same[v:v + 1], deg[v:v + 1])[0] or sizes[part[v]] == 1:
            continue
        old = part[v]
        sizes[old] -= 1
        sizes[1 - old] += 1
        part[v] = 1 - old
        nb = g.neighbors(v)
        joined = part[nb] == part[v]
        same[nb[joined]] += 1
        same[nb[~joined]] -= 1
        same[v] = deg[v] - same[v]
        moves += 1
        for w in nb.tolist():
            todo.add(w)
    return part, same


def _majority(same, deg):
    return deg - same > same


def _weak(same, deg):
    # below the ceil(d/2) - 1 guarantee
    return same < np.ceil(deg / 2) - 1


def stiebitz_cut(g, seed=0, restarts: int = 3) -> AttackReport:
    """Bipartition by local search, deleting all cross edges.

    Tries a random balanced split and BFS-order splits, keeping the first
    partition in which every vertex has at least as many neighbours in its own
    part as across. If none is locally maximal (e.g. near-complete graphs, where
    no such partition with two nonempty parts exists) it falls back to a search
    that only enforces the ceil(d/2) - 1 guarantee.
    """
    G = base_graph(g)
    rng = as_rng(seed)
    n = G.n
    if n < 2:
        return make_report("stiebitz", g, np.ones(G.m, bool), {"local_max": True}, seed=seed)
    cap = 10 * (G.m + n)
    inits = []
    for _ in range(restarts):
        p = np.zeros(n, np.int64)
        p[rng.permutation(n)[: n // 2]] = 1
        inits.append(("random", p))
        root = int(rng.integers(n))
        order = csgraph.breadth_first_order(G.to_csr(), root, directed=False, return_predecessors=False)
        rest = np.setdiff1d(np.arange(n), order)
        order = np.concatenate([order, rest])
        q = np.zeros(n, np.int64)
        q[order[n // 2:]] = 1
        inits.append(("bfs", q))
    chosen = None
    for name, p in inits:
        part, same = _local_search(G, p, _majority, cap)
        if not np.any(_majority(same, G.degree)):
            chosen = (name, part, same, True)
            break
    if chosen is None:
        fallback = None
        for _, p in inits:
            part, same = _local_search(G, p, _weak, cap)
            bad = int(np.sum(_weak(same, G.degree)))
            if fallback is None or bad < fallback[0]:
                fallback = (bad, part, same)
            if bad == 0:
                break
        chosen = ("weak", fallback[1], fallback[2], False)
    name, part, same, local_max = chosen
    e = G.edges
    keep = part[e[:, 0]] == part[e[:, 1]]
    guarantee = bool(np.all(same >= np.ceil(G.degree / 2) - 1))
    witness = {"init": name, "local_max": local_max, "guarantee": guarantee,
               "part_sizes": tuple(np.bincount(part, minlength=2).tolist())}
    rep = make_report("stiebitz", g, keep, witness, seed=seed)
    rep.witness["partition"] = part
    return rep


# -- strips ------------------------------------------------------------------

def strip_count(r: float) -> int:
    return math.ceil(1.0 / (4.0 * r))


def strip_cut(g: GeometricGraph) -> AttackReport:
    """Cut [0,1]^d into k = ceil(1/(4r)) slabs along the first axis."""
    if g.metric is not Metric.CUBE:
        raise PreconditionError("strip_cut needs the cube metric")
    n, r = g.n, g.r
    bound = 5 * r * n
    if r >= 0.2:
        rep = make_report("strip", g, np.ones(g.graph.m, bool), {"exempt": True, "k": 1},
                          params={"r": r})
        rep.witness["bound_5rn"] = bound
        return rep
    k = strip_count(r)
    idx = np.minimum((g.points[:, 0] * k).astype(np.int64), k - 1)
    e = g.graph.edges
    keep = idx[e[:, 0]] == idx[e[:, 1]]
    rep = make_report("strip", g, keep, {"exempt": False, "k": k, "width": 1.0 / k}, params={"r": r})
    rep.witness["bound_5rn"] = bound
    rep.witness["strip_index"] = idx
    return rep


# -- colour classes ----------------------------------------------------------

def _k4_samples(h, sample, triples: int, rng) -> int:
    """Sampled quadruples (v, three kept neighbours of v) that span a K4."""
    quads = []
    for v in sample:
        nb = h.neighbors(int(v))
        if len(nb) >= 3:
            pick = np.sort(np.stack([rng.choice(nb, 3, replace=False) for _ in range(triples)]), axis=1)
            quads.append(pick)
    if not quads:
        return 0
    q = np.concatenate(quads)
    pairs = np.concatenate([q[:, [0, 1]], q[:, [0, 2]], q[:, [1, 2]]])
    present = (h.edge_ids(pairs) >= 0).reshape(3, -1).all(axis=0)
    return int(present.sum())


def tripartite_cut(g, seed=0, audit_samples: int = 200, triples: int = 50) -> AttackReport:
    """Random 3-colouring; delete edges inside colour classes."""
    G = base_graph(g)
    rng = as_rng(seed)
    colour = rng.integers(0, 3, size=G.n)
    e = G.edges
    keep = colour[e[:, 0]] != colour[e[:, 1]]
    rep = make_report("tripartite", g, keep, seed=seed)
    sample = rng.choice(G.n, size=min(audit_samples, G.n), replace=False) if G.n else []
    hits = _k4_samples(rep.mask.kept, sample, triples, rng)
    rep.witness.update({"k4_free": hits == 0, "audited": len(sample)})
    rep.witness["colouring"] = colour
    return rep


# -- triangles through one vertex --------------------------------------------

def killer_radius(r: float, eps: float, d: int) -> float:
    return (0.5 - 2 * eps) ** (1.0 / d) * r


def triangle_killer_cut(g: GeometricGraph, v: int, eps: float, margin: float | None = None) -> AttackReport:
    """Delete every edge from v into B(v,t) and every edge inside B(v,r) minus B(v,t).

    margin is the required distance from v to the boundary (default 2r).
    """
    if not 0 < eps < 0.25:
        raise ValueError("eps must lie in (0, 1/4)")
    r, d = g.r, g.d
    margin = 2 * r if margin is None else margin
    p = g.points[v]
    if g.metric is Metric.CUBE and float(np.minimum(p, 1 - p).min()) < margin:
        raise PreconditionError(f"vertex {v} is closer than {margin} to the boundary")
    t = killer_radius(r, eps, d)
    dist = g.dist_from(p)
    e = g.graph.edges
    near = dist <= t
    ring = (dist > t) & (dist <= r)
    ring[v] = False
    at_v = (e[:, 0] == v) | (e[:, 1] == v)
    other = np.where(e[:, 0] == v, e[:, 1], e[:, 0])
    drop = (at_v & near[other]) | (ring[e[:, 0]] & ring[e[:, 1]])
    keep = ~drop
    rep = make_report("triangle-killer", g, keep, {"v": v, "t": t}, params={"eps": eps})
    rep.witness["triangles_at_v"] = triangles_through(rep.mask.kept, v)
    return rep


def triangles_through(h, v: int) -> int:
    """Exhaustive count of triangles containing v."""
    nb = h.neighbors(v)
    if len(nb) < 2:
        return 0
    inside = np.zeros(h.n, bool)
    inside[nb] = True
    e = h.edges
    return int(np.sum(inside[e[:, 0]] & inside[e[:, 1]]))


# -- degree-budgeted deletion ------------------------------------------------

@njit(cache=True)
def _row_orders(indptr, slot, prio):
    """Incident edge ids of every vertex sorted by priority (ties by edge id)."""
    out = np.empty(len(slot), np.int64)
    for v in range(len(indptr) - 1):
        a, b = indptr[v], indptr[v + 1]
        row = slot[a:b]
        o = np.argsort(prio[row], kind="mergesort")
        out[a:b] = row[o]
    return out


@njit(cache=True)
def _vote_rounds(indptr, ordered, edges, allow, rounds):
    n = len(indptr) - 1
    m = edges.shape[0]
    keep = np.ones(m, np.bool_)
    left = allow.copy()
    votes = np.zeros(m, np.int8)
    for _ in range(rounds):
        votes[:] = 0
        for v in range(n):
            take = left[v]
            for i in range(indptr[v], indptr[v + 1]):
                if take <= 0:
                    break
                e = ordered[i]
                if keep[e]:
                    votes[e] += 1
                    take -= 1
        dropped = 0
        for e in range(m):
            if votes[e] == 2:
                keep[e] = False
                left[edges[e, 0]] -= 1
                left[edges[e, 1]] -= 1
                dropped += 1
        if dropped == 0:
            break
    return keep


def budget_deletion(g, budget: float, order: str = "farthest", seed=0, rounds: int = 4) -> AttackReport:
    """Delete edges while every vertex loses at most floor(budget * d(v)) of them.

    order='farthest' prefers long edges, order='random' a shared random priority.
    An edge goes only when both endpoints rank it inside their remaining budget,
    so the result is always a (1 - budget)-subgraph.
    """
    G = base_graph(g)
    if order == "farthest":
        if not isinstance(g, GeometricGraph):
            raise ValueError("farthest order needs geometry")
        prio = -g.edge_lengths
    elif order == "random":
        prio = as_rng(seed).random(G.m)
    else:
        raise ValueError(f"unknown order {order!r}")
    allow = np.floor(budget * G.degree + 1e-9).astype(np.int64)
    ordered = _row_orders(G.indptr, G.slot_edge, np.ascontiguousarray(prio))
    keep = _vote_rounds(G.indptr, ordered, G.edges, allow, rounds)
    return make_report(f"budget-{order}", g, keep, params={"budget": budget}, seed=seed)
