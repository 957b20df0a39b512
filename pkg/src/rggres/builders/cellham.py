"""Hamilton cycles in subgraphs of geometric graphs by gluing per-cell path pairs.

The cube is cut into cells along a snake-ordered spanning path of the grid.
Each cell is covered by two disjoint paths whose endpoints are joined to the
neighbouring cells by kept edges; walking forward along one family of paths
and back along the other closes a Hamilton cycle.
"""

from __future__ import annotations

import math

import numpy as np

from ..geom import Metric, ball_volume, grid_spanning_path, tessellate
from ..graph import CycleCertificate, GeometricGraph, SubgraphMask, verify_cycle
from .closure import closure_hamilton
from .common import BuildFailure
from .twopaths import degree_sequence_hypothesis, two_disjoint_paths


def deletable_fraction(d: int) -> float:
    """Per-vertex fraction of edges an adversary may delete in the cell-clique argument."""
    return 1.0 / (2 * d ** (d / 2) * ball_volume(d))


def improved_deletable_fraction(d: int) -> float:
    """Sharper budget available from degree-sequence routing (reported only)."""
    return 2 ** d / ((2 ** (1 / d) + 1) ** d * d ** (d / 2) * ball_volume(d))


def refined_count(m: int, delta: float, multiple: int = 1) -> int:
    """Smallest multiple of multiple*m that is at least m/delta."""
    step = multiple * m
    return step * max(1, math.ceil(m / delta / step - 1e-12))


def _face_candidates(pts, members, t, k, a, b):
    """Vertices of cell a ordered for the face shared with cell b.

    Those in the refined cell of side 1/k touching the face centre come first,
    each group sorted by distance to the centre.
    """
    s = t.side
    ia, ib = t.unflat(a)[0], t.unflat(b)[0]
    step = (ib - ia).astype(float)
    centre = (ia + 0.5) * s + step * s / 2
    inside = centre - step * (0.25 / k)
    ref = np.clip(np.ceil(inside * k).astype(np.int64) - 1, 0, k - 1)
    p = pts[members]
    pref = np.clip(np.ceil(p * k).astype(np.int64) - 1, 0, k - 1)
    in_ref = np.all(pref == ref, axis=1)
    dist = np.sqrt(((p - centre) ** 2).sum(axis=1))
    order = np.lexsort((members, dist, ~in_ref))
    return members[order], int(in_ref.sum())


def _pick_cross(H, cands, n_pref, target, excl, local_deg):
    """Find v, w among cands with distinct kept neighbours v', w' in target.

    Returns (v, w, v', w', used_fallback) or None.
    """
    def options(x):
        nb = H.neighbors(int(x))
        nb = nb[target[nb]]
        if excl:
            nb = nb[~np.isin(nb, list(excl))]
        return nb[np.argsort(-local_deg[nb], kind="stable")]

    opts = {}
    for i in range(len(cands)):
        v = int(cands[i])
        if v not in opts:
            opts[v] = options(v)
        if len(opts[v]) == 0:
            continue
        for j in range(i + 1, len(cands)):
            w = int(cands[j])
            if w not in opts:
                opts[w] = options(w)
            ov, ow = opts[v], opts[w]
            if len(ow) == 0:
                continue
            vp = int(ov[0])
            rest = ow[ow != vp]
            if len(rest):
                return v, w, vp, int(rest[0]), j >= n_pref
            wp = int(ow[0])
            rest = ov[ov != wp]
            if len(rest):
                return v, w, int(rest[0]), wp, j >= n_pref
    return None


def _end_edge(H, members, excl, local_deg):
    """A kept edge inside the cell avoiding excl, preferring high cell degree."""
    inside = np.zeros(H.n, bool)
    inside[members] = True
    inside[list(excl)] = False
    for a in members[np.argsort(-local_deg[members], kind="stable")]:
        if not inside[a]:
            continue
        nb = H.neighbors(int(a))
        nb = nb[inside[nb]]
        if len(nb):
            return int(a), int(nb[np.argmax(local_deg[nb])])
    return None


def _orient(path, A):
    return list(path) if path[0] in A else list(path)[::-1]


def _glue(mask: SubgraphMask, t, k: int, mode: str, kind: str, params: dict, audits: dict):
    g = mask.base
    H = mask.kept
    n = g.n
    pts = g.points
    cell = t.cell_of(pts)
    order = grid_spanning_path(t)
    N = len(order)
    members = [np.nonzero(cell == c)[0] for c in order]
    sizes = np.array([len(x) for x in members])
    audits["cells"] = N
    audits["min_cell_size"] = int(sizes.min()) if N else 0
    if N == 1:
        res = closure_hamilton(H)
        if not res:
            return BuildFailure("single-cell", str(res), audits=audits)
        return CycleCertificate(res.vertices, kind=kind, params=params, audits=audits)
    need = 4 if mode == "min-degree" else 5
    small = np.nonzero(sizes < need)[0]
    if len(small):
        i = int(small[0])
        return BuildFailure("cell-size", f"cell has {sizes[i]} vertices, routing needs {need}",
                            where=int(order[i]), audits=audits)
    e = H.edges
    same = cell[e[:, 0]] == cell[e[:, 1]]
    local_deg = np.bincount(e[same].ravel(), minlength=n)

    # cross edges: (v_i, w_i) in cell i joined to (v'_{i+1}, w'_{i+1}) in cell i+1
    cands = [None] * N
    for i in range(N - 1):
        cands[i] = _face_candidates(pts, members[i], t, k, order[i], order[i + 1])
    vw = [None] * N
    vw_in = [None] * N
    fallbacks = 0
    for i in range(N - 1):
        target = np.zeros(n, bool)
        target[members[i + 1]] = True
        lst, n_pref = cands[i]
        taken = set(vw_in[i]) if vw_in[i] else set()
        lst = np.array([x for x in lst if x not in taken], np.int64)
        reserve = set(int(x) for x in cands[i + 1][0][:2]) if i + 1 < N - 1 else set()
        got = _pick_cross(H, lst, n_pref, target, reserve, local_deg)
        if got is None and reserve:
            got = _pick_cross(H, lst, n_pref, target, set(), local_deg)
        if got is None:
            return BuildFailure("cross-edges", "no two disjoint kept edges across the shared face",
                                where=(int(order[i]), int(order[i + 1])), audits=audits)
        v, w, vp, wp, fb = got
        fallbacks += fb
        vw[i] = (v, w)
        vw_in[i + 1] = (vp, wp)
    audits["cross_fallbacks"] = fallbacks
    first = _end_edge(H, members[0], vw[0], local_deg)
    last = _end_edge(H, members[-1], vw_in[-1], local_deg)
    if first is None or last is None:
        where = int(order[0] if first is None else order[-1])
        return BuildFailure("end-edge", "no kept edge avoiding the cross-edge endpoints", where=where, audits=audits)
    vw_in[0] = first
    vw[-1] = last
    for i in range(N):
        if len(set(vw_in[i]) | set(vw[i])) != 4:
            return BuildFailure("endpoints", "endpoint pairs overlap", where=int(order[i]), audits=audits)

    # per-cell routing
    paths = []
    failed_hyp = []
    for i in range(N):
        sub, labels = H.induced(members[i])
        loc = {int(x): j for j, x in enumerate(labels)}
        A = (loc[vw_in[i][0]], loc[vw_in[i][1]])
        B = (loc[vw[i][0]], loc[vw[i][1]])
        res = two_disjoint_paths(sub, A, B, mode=mode)
        hyp = res.hypothesis if res else res.audits
        if hyp and not hyp.get("holds", True):
            failed_hyp.append(int(order[i]))
        if not res:
            audits["hypothesis_failed_cells"] = failed_hyp
            return BuildFailure("routing", f"{res}; hypothesis {hyp}", where=int(order[i]), audits=audits)
        P = [int(labels[x]) for x in _orient(res.P, A)]
        Q = [int(labels[x]) for x in _orient(res.Q, A)]
        paths.append((P, Q))
    audits["hypothesis_failed_cells"] = failed_hyp

    # glue: forward along P_i (x'_i -> x_i), back along P'_i (y_i -> y'_i)
    fwd, back = [], []
    x_in = vw_in[0][0]
    for i in range(N):
        P, Q = paths[i]
        Pi, Pi2 = (P, Q) if P[0] == x_in else (Q, P)
        fwd.append(Pi)
        back.append(Pi2)
        if i + 1 < N:
            x_out = Pi[-1]
            x_in = vw_in[i + 1][0] if x_out == vw[i][0] else vw_in[i + 1][1]
    seq = [x for p in fwd for x in p] + [x for p in reversed(back) for x in reversed(p)]
    cert = CycleCertificate(tuple(seq), kind=kind, params=params, audits=audits)
    if not verify_cycle(H, cert, length=n):
        return BuildFailure("verify", "glued sequence is not a Hamilton cycle", audits=audits)
    return cert


def _check_base(mask: SubgraphMask):
    g = mask.base
    if not isinstance(g, GeometricGraph):
        raise ValueError("builder needs a geometric base graph")
    if g.metric is not Metric.CUBE:
        raise ValueError("builder needs the cube metric")
    return g


def cell_hamilton(mask: SubgraphMask, eps: float, delta: float = 0.25) -> CycleCertificate | BuildFailure:
    """Hamilton cycle from cells small enough to be cliques of the base graph.

    Per-cell routing uses the minimum-degree condition; cross edges start from
    the refined cell (side 1/k, k a multiple of 1/s with k >= 1/(delta s)) at
    the centre of the shared face.
    """
    g = _check_base(mask)
    d = g.d
    t = tessellate(d, "clique", g.r)
    k = refined_count(t.m, delta)
    budget = deletable_fraction(d)
    alpha = mask.achieved_alpha()
    params = {"eps": eps, "delta": delta, "m": t.m, "k": k}
    audits = {"budget": budget, "improved_budget": improved_deletable_fraction(d),
              "achieved_alpha": alpha, "alpha_hypothesis": alpha >= 1 - budget + eps}
    sub_min = []
    H = mask.kept
    cell = t.cell_of(g.points)
    e = H.edges
    same = cell[e[:, 0]] == cell[e[:, 1]]
    local = np.bincount(e[same].ravel(), minlength=g.n)
    sizes = np.bincount(cell, minlength=t.n_cells)
    ratio = np.where(sizes[cell] > 0, local / np.maximum(sizes[cell], 1), 1.0)
    sub_min.append(float(ratio.min()) if g.n else 1.0)
    audits["min_cell_degree_ratio"] = sub_min[0]
    audits["cell_degree_condition"] = bool(np.all(local >= (1 + eps) * sizes[cell] / 2))
    return _glue(mask, t, k, "min-degree", "cell-hamilton", params, audits)


def interval_hamilton_1d(mask: SubgraphMask, eps: float, delta: float = 0.25) -> CycleCertificate | BuildFailure:
    """One-dimensional variant with intervals of length about 4r/3 and
    degree-sequence routing inside each interval."""
    g = _check_base(mask)
    if g.d != 1:
        raise ValueError("interval builder needs d = 1")
    t = tessellate(1, "interval", g.r)
    k = refined_count(t.m, delta, multiple=4)
    alpha = mask.achieved_alpha()
    params = {"eps": eps, "delta": delta, "m": t.m, "k": k}
    audits = {"budget": 1 / 3, "achieved_alpha": alpha, "alpha_hypothesis": alpha >= 2 / 3 + eps}
    H = mask.kept
    cell = t.cell_of(g.points)
    first = {}
    for c in range(t.n_cells):
        sub, _ = H.induced(np.nonzero(cell == c)[0])
        if sub.n >= 5:
            hyp = degree_sequence_hypothesis(sub)
            if not hyp["holds"]:
                first[c] = hyp["first_violation"]
    audits["degree_sequence_violations"] = first
    return _glue(mask, t, k, "degree-sequence", "interval-hamilton", params, audits)
