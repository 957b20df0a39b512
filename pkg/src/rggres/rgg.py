"""Sampling G_d(n,r) / T_d(n,r), the distance-ordered graph process, and hitting times."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .connectivity import is_k_connected
from .geom import Metric, as_metric, pairwise_delta
from .graph import GeometricGraph, Graph



def trial_rng(master_seed: int, trial: int = 0) -> np.random.Generator:
    """Counter-based generator keyed by (master seed, trial index)."""
    ss = np.random.SeedSequence(entropy=int(master_seed), spawn_key=(int(trial),))
    return np.random.Generator(np.random.Philox(ss))


def as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return trial_rng(int(seed), 0)


def sample_points(n: int, d: int, seed) -> np.ndarray:
    return as_rng(seed).random((n, d))


@njit(cache=True)
def _scan_cells(pts, starts, counts, cells, stencil, m, r, torus, fill, out_u, out_v, out_d):
    # fill=False: only count; fill=True: write pairs into the out arrays
    n_cells, d = cells.shape
    r2 = r * r
    total = 0
    nb = np.empty(d, np.int64)
    for c in range(n_cells):
        ca = counts[c]
        if ca == 0:
            continue
        sa = starts[c]
        for s in range(stencil.shape[0]):
            ok = True
            flat = 0
            for k in range(d):
                x = cells[c, k] + stencil[s, k]
                if torus:
                    x %= m
                elif x < 0 or x >= m:
                    ok = False
                    break
                nb[k] = x
                flat = flat * m + x
            if not ok:
                continue
            cb = counts[flat]
            if cb == 0:
                continue
            sb = starts[flat]
            same = flat == c
            for i in range(sa, sa + ca):
                j0 = i + 1 if same else sb
                for j in range(j0, sb + cb):
                    acc = 0.0
                    for k in range(d):
                        diff = abs(pts[i, k] - pts[j, k])
                        if torus and diff > 0.5:
                            diff = 1.0 - diff
                        acc += diff * diff
                    if acc <= r2:
                        if fill:
                            out_u[total] = i
                            out_v[total] = j
                            out_d[total] = np.sqrt(acc)
                        total += 1
    return total


def neighbour_pairs(points: np.ndarray, r: float, metric=Metric.CUBE):
    """All pairs at distance <= r via cell-list buckets of side >= r.

    Returns (edges, dists) with edges sorted lexicographically, u < v.
    """
    metric = as_metric(metric)
    pts = np.asarray(points, float)
    n, d = pts.shape
    if n < 2 or r <= 0:
        return np.zeros((0, 2), np.int64), np.zeros(0)
    m = max(1, int(math.floor(1.0 / r)))
    m = min(m, max(1, int(round(n ** (1.0 / d))) * 4))
    if metric is Metric.TORUS and m < 3:
        m = 1
    idx = np.minimum((pts * m).astype(np.int64), m - 1)
    flat = np.zeros(n, np.int64)
    for k in range(d):
        flat = flat * m + idx[:, k]
    order = np.argsort(flat, kind="stable")
    counts = np.bincount(flat, minlength=m ** d).astype(np.int64)
    starts = np.concatenate([[0], np.cumsum(counts)[:-1]]).astype(np.int64)
    cells = np.array(list(itertools.product(range(m), repeat=d)), np.int64).reshape(-1, d)
    # half stencil: the zero offset (pairs i<j inside a cell) plus offsets > 0
    stencil = [o for o in itertools.product((-1, 0, 1), repeat=d) if o >= (0,) * d]
    if m == 1:
        stencil = [(0,) * d]
    stencil = np.array(stencil, np.int64).reshape(-1, d)
    sp = np.ascontiguousarray(pts[order])
    torus = metric is Metric.TORUS
    empty_i = np.zeros(0, np.int64)
    total = _scan_cells(sp, starts, counts, cells, stencil, m, float(r), torus, False,
                        empty_i, empty_i, np.zeros(0))
    out_u = np.empty(total, np.int64)
    out_v = np.empty(total, np.int64)
    out_d = np.empty(total)
    _scan_cells(sp, starts, counts, cells, stencil, m, float(r), torus, True, out_u, out_v, out_d)
    u, v = order[out_u], order[out_v]
    lo_, hi_ = np.minimum(u, v), np.maximum(u, v)
    codes = lo_ * n + hi_
    srt = np.argsort(codes)
    codes = codes[srt]
    return np.stack([codes // n, codes % n], axis=1), out_d[srt]


def all_pairs_reference(points: np.ndarray, r: float, metric=Metric.CUBE) -> np.ndarray:
    """O(n^2) reference edge list (lexicographically sorted)."""
    pts = np.asarray(points, float)
    n = len(pts)
    out = []
    for i in range(n - 1):
        delta = pairwise_delta(pts[i + 1:], pts[i], metric)
        dist = np.sqrt((delta ** 2).sum(axis=1))
        js = np.nonzero(dist <= r)[0] + i + 1
        out.append(np.stack([np.full(len(js), i), js], axis=1))
    return np.concatenate(out) if out else np.zeros((0, 2), np.int64)


def geometric_graph(points, r: float, metric=Metric.CUBE) -> GeometricGraph:
    pts = np.asarray(points, float)
    if pts.ndim == 1:
        pts = pts[:, None]
    edges, _ = neighbour_pairs(pts, r, metric)
    return GeometricGraph(pts, float(r), as_metric(metric), Graph(len(pts), edges, trusted=True))


def sample_rgg(n: int, d: int, r: float, metric=Metric.CUBE, seed=0) -> GeometricGraph:
    """G_d(n, r) (cube) or T_d(n, r) (torus), deterministic in the seed."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return geometric_graph(sample_points(n, d, seed), r, metric)


def default_cutoff(n: int, d: int) -> float:
    return 4.0 * (math.log(max(n, 2)) / n) ** (1.0 / d)


@dataclass(eq=False)
class ProcessTrace:
    points: np.ndarray
    metric: Metric
    edges: np.ndarray  # in process order
    dists: np.ndarray
    cutoff: float

    @property
    def n(self) -> int:
        return len(self.points)

    def prefix(self, i: int) -> Graph:
        return Graph(self.n, self.edges[:i])

    def prefix_geometric(self, i: int) -> GeometricGraph:
        r = float(self.dists[i - 1]) if i > 0 else 0.0
        return GeometricGraph(self.points, r, self.metric, self.prefix(i))


def rgg_process(n: int, d: int, seed=0, cutoff_r: float | None = None, metric=Metric.CUBE,
                points=None) -> ProcessTrace:
    """Edges of the complete geometric process up to cutoff_r, sorted by length."""
    if points is None:
        points = sample_points(n, d, seed)
    pts = np.asarray(points, float)
    if pts.ndim == 1:
        pts = pts[:, None]
    n, d = pts.shape
    cutoff = default_cutoff(n, d) if cutoff_r is None else float(cutoff_r)
    if cutoff <= 0:
        raise ValueError("cutoff_r must be positive")
    edges, dist = neighbour_pairs(pts, cutoff, metric)
    # edges are already lexicographic, so a stable sort on length breaks ties that way
    order = np.argsort(dist, kind="stable")
    return ProcessTrace(pts, as_metric(metric), edges[order], dist[order], cutoff)


@dataclass(frozen=True)
class HittingRecord:
    property: str
    index: int | None
    radius: float | None

    @property
    def censored(self) -> bool:
        return self.index is None


@njit(cache=True)
def _uf_connect_index(n, eu, ev):
    parent = np.arange(n)
    comps = n
    if comps == 1:
        return 0
    for i in range(len(eu)):
        a = eu[i]
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        b = ev[i]
        while parent[b] != b:
            parent[b] = parent[parent[b]]
            b = parent[b]
        if a != b:
            parent[a] = b
            comps -= 1
            if comps == 1:
                return i + 1
    return -1


def _mindeg_index(trace: ProcessTrace, delta: int) -> int:
    if delta <= 0:
        return 0
    e = trace.edges
    verts = np.concatenate([e[:, 0], e[:, 1]])
    when = np.concatenate([np.arange(len(e)), np.arange(len(e))])
    counts = np.bincount(verts, minlength=trace.n)
    if counts.min() < delta:
        return -1
    order = np.lexsort((when, verts))
    v_sorted, w_sorted = verts[order], when[order]
    starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
    return int(w_sorted[starts + delta - 1].max()) + 1 if len(v_sorted) else -1


def _binary_search(trace: ProcessTrace, pred, lo: int) -> int:
    hi = len(trace.edges)
    if not pred(hi):
        return -1
    lo = max(lo, 0)
    while lo < hi:
        mid = (lo + hi) // 2
        if pred(mid):
            hi = mid
        else:
            lo = mid + 1
    return lo


def hitting_time(trace: ProcessTrace, prop: str, *, delta: int = 1, k: int = 1,
                 attack=None) -> HittingRecord:
    """Least prefix index at which a monotone property holds.

    prop is one of 'connected', 'min-degree', 'k-connected', 'resilient-connected'.
    For 'resilient-connected', attack maps a GeometricGraph to a SubgraphMask and
    the property is that the kept graph is connected.
    """
    if prop == "connected":
        idx = int(_uf_connect_index(trace.n, trace.edges[:, 0].copy(), trace.edges[:, 1].copy()))
        name = prop
    elif prop == "min-degree":
        idx = _mindeg_index(trace, delta)
        name = f"min-degree>={delta}"
    elif prop == "k-connected":
        lo = _mindeg_index(trace, k)
        name = f"{k}-connected"
        idx = -1 if lo < 0 else _binary_search(trace, lambda i: is_k_connected(trace.prefix(i), k).ok, lo)
    elif prop == "resilient-connected":
        if attack is None:
            raise ValueError("resilient-connected needs an attack callable")
        lo = int(_uf_connect_index(trace.n, trace.edges[:, 0].copy(), trace.edges[:, 1].copy()))
        name = prop
        idx = -1 if lo < 0 else _binary_search(
            trace, lambda i: attack(trace.prefix_geometric(i)).kept.is_connected(), lo)
    else:
        raise ValueError(f"unknown property {prop!r}")
    if idx < 0:
        return HittingRecord(name, None, None)
    radius = float(trace.dists[idx - 1]) if idx > 0 else 0.0
    return HittingRecord(name, idx, radius)
