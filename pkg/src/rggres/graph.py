"""Graphs, geometric graphs, subgraph masks and cycle certificates."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from numba import njit
from scipy import sparse
from scipy.sparse import csgraph

from .geom import Metric, as_metric, pairwise_delta


def _normalise_edges(n: int, edges) -> np.ndarray:
    e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if e.size == 0:
        return np.zeros((0, 2), np.int64)
    if e.min() < 0 or e.max() >= n:
        raise ValueError("edge endpoint out of range")
    if np.any(e[:, 0] == e[:, 1]):
        raise ValueError("loops are not allowed")
    e = np.sort(e, axis=1)
    codes = np.unique(e[:, 0] * n + e[:, 1])
    return np.stack([codes // n, codes % n], axis=1)


@njit(cache=True)
def _csr_from_sorted(n, edges):
    # edges sorted lexicographically with u < v, so each row comes out sorted:
    # smaller neighbours (reverse entries) first, then larger ones
    m = edges.shape[0]
    deg = np.zeros(n, np.int64)
    low = np.zeros(n, np.int64)
    for i in range(m):
        deg[edges[i, 0]] += 1
        deg[edges[i, 1]] += 1
        low[edges[i, 1]] += 1
    indptr = np.zeros(n + 1, np.int64)
    for v in range(n):
        indptr[v + 1] = indptr[v] + deg[v]
    fill_lo = indptr[:-1].copy()
    fill_hi = indptr[:-1] + low
    indices = np.empty(2 * m, np.int64)
    slot = np.empty(2 * m, np.int64)
    for i in range(m):
        u = edges[i, 0]
        v = edges[i, 1]
        indices[fill_lo[v]] = u
        slot[fill_lo[v]] = i
        fill_lo[v] += 1
        indices[fill_hi[u]] = v
        slot[fill_hi[u]] = i
        fill_hi[u] += 1
    return indptr, indices, slot


@njit(cache=True)
def _induced_edges(indptr, indices, vs, pos):
    cnt = 0
    for v in vs:
        for i in range(indptr[v], indptr[v + 1]):
            if pos[indices[i]] > pos[v]:
                cnt += 1
    out = np.empty((cnt, 2), np.int64)
    k = 0
    for v in vs:
        for i in range(indptr[v], indptr[v + 1]):
            w = pos[indices[i]]
            if w > pos[v]:
                out[k, 0] = pos[v]
                out[k, 1] = w
                k += 1
    return out


class Graph:
    """Simple undirected graph stored as a sorted edge list plus CSR adjacency.

    Edges satisfy u < v and are sorted lexicographically, so edge ids are stable.
    """

    def __init__(self, n: int, edges=(), *, trusted: bool = False):
        self.n = int(n)
        if trusted:
            self.edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        else:
            self.edges = _normalise_edges(self.n, edges)
        self.edges.setflags(write=False)
        self.indptr, self.indices, self.slot_edge = _csr_from_sorted(self.n, self.edges)

    @property
    def m(self) -> int:
        return len(self.edges)

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"

    @cached_property
    def degree(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def incident_edges(self, v: int) -> np.ndarray:
        return self.slot_edge[self.indptr[v]:self.indptr[v + 1]]

    @cached_property
    def _codes(self) -> np.ndarray:
        return self.edges[:, 0] * self.n + self.edges[:, 1]

    def edge_ids(self, pairs) -> np.ndarray:
        """Edge ids of the given pairs, -1 where absent."""
        p = np.sort(np.asarray(pairs, np.int64).reshape(-1, 2), axis=1)
        codes = p[:, 0] * self.n + p[:, 1]
        if self.m == 0:
            return np.full(len(codes), -1, np.int64)
        pos = np.minimum(np.searchsorted(self._codes, codes), self.m - 1)
        return np.where(self._codes[pos] == codes, pos, -1)

    def has_edge(self, u: int, v: int) -> bool:
        if u == v:
            return False
        nb = self.neighbors(u)
        i = np.searchsorted(nb, v)
        return bool(i < len(nb) and nb[i] == v)

    def adjacency_sets(self) -> list[set]:
        return [set(self.neighbors(v).tolist()) for v in range(self.n)]

    def adjacency_bits(self) -> list[int]:
        out = []
        for v in range(self.n):
            b = 0
            for w in self.neighbors(v).tolist():
                b |= 1 << w
            out.append(b)
        return out

    def to_csr(self) -> sparse.csr_matrix:
        data = np.ones(len(self.indices), np.int8)
        return sparse.csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))

    def dense(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), bool)
        a[self.edges[:, 0], self.edges[:, 1]] = True
        a[self.edges[:, 1], self.edges[:, 0]] = True
        return a

    def edge_subgraph(self, keep: np.ndarray) -> "Graph":
        return Graph(self.n, self.edges[np.asarray(keep, bool)], trusted=True)

    def induced(self, vertices) -> tuple["Graph", np.ndarray]:
        """Induced subgraph relabelled 0..k-1, plus the original labels."""
        if isinstance(vertices, (set, frozenset)):
            vertices = list(vertices)
        vs = np.unique(np.asarray(vertices, np.int64))
        pos = np.full(self.n, -1, np.int64)
        pos[vs] = np.arange(len(vs))
        return Graph(len(vs), _induced_edges(self.indptr, self.indices, vs, pos), trusted=True), vs

    def components(self) -> np.ndarray:
        """Component label per vertex."""
        if self.n == 0:
            return np.zeros(0, np.int64)
        _, lab = csgraph.connected_components(self.to_csr(), directed=False)
        return lab

    def is_connected(self) -> bool:
        return self.n <= 1 or int(self.components().max()) == 0

    def edges_list(self) -> list[tuple[int, int]]:
        return [tuple(e) for e in self.edges.tolist()]

    @classmethod
    def from_adjacency(cls, adj) -> "Graph":
        a = np.asarray(adj, bool)
        u, v = np.nonzero(np.triu(a, 1))
        return cls(a.shape[0], np.stack([u, v], axis=1))


def complete_graph(n: int) -> Graph:
    u, v = np.triu_indices(n, 1)
    return Graph(n, np.stack([u, v], axis=1), trusted=True)


def cycle_graph(n: int) -> Graph:
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def power_of_cycle(n: int, k: int) -> Graph:
    """C_n^k: i ~ j iff their cyclic distance is at most k."""
    if n < 3 or k < 1:
        raise ValueError("need n >= 3 and k >= 1")
    if k > n / 2:
        raise ValueError(f"k={k} exceeds n/2 for n={n}")
    pairs = [(i, (i + s) % n) for i in range(n) for s in range(1, k + 1)]
    return Graph(n, pairs)


@dataclass(eq=False)
class GeometricGraph:
    """Points in [0,1]^d with edges between pairs at distance <= r."""

    points: np.ndarray
    r: float
    metric: Metric
    graph: Graph

    def __post_init__(self):
        self.points = np.asarray(self.points, float).reshape(len(self.points), -1)
        self.points.setflags(write=False)
        self.metric = as_metric(self.metric)

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def d(self) -> int:
        return self.points.shape[1]

    @property
    def edges(self) -> np.ndarray:
        return self.graph.edges

    @cached_property
    def edge_lengths(self) -> np.ndarray:
        e = self.graph.edges
        delta = pairwise_delta(self.points[e[:, 0]], self.points[e[:, 1]], self.metric)
        return np.sqrt(np.einsum("ij,ij->i", delta, delta))

    def dist_from(self, p) -> np.ndarray:
        delta = pairwise_delta(self.points, np.asarray(p, float), self.metric)
        return np.sqrt(np.einsum("ij,ij->i", delta, delta))


def base_graph(g) -> Graph:
    return g.graph if isinstance(g, GeometricGraph) else g


class SubgraphMask:
    """Keep/delete flags over the edges of a base graph."""

    def __init__(self, base, keep=None):
        self.base = base
        g = base_graph(base)
        if keep is None:
            keep = np.ones(g.m, bool)
        keep = np.asarray(keep, bool)
        if keep.shape != (g.m,):
            raise ValueError("mask length does not match base edge count")
        self.keep = keep

    @property
    def graph(self) -> Graph:
        return base_graph(self.base)

    @cached_property
    def kept_degree(self) -> np.ndarray:
        e = self.graph.edges[self.keep]
        return np.bincount(e.ravel(), minlength=self.graph.n)

    @cached_property
    def kept(self) -> Graph:
        return self.graph.edge_subgraph(self.keep)

    def ratios(self) -> np.ndarray:
        deg = self.graph.degree
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(deg > 0, self.kept_degree / np.maximum(deg, 1), 1.0)

    def achieved_alpha(self) -> float:
        return float(self.ratios().min()) if self.graph.n else 1.0

    def deleted_count(self) -> int:
        return int((~self.keep).sum())


@dataclass(frozen=True)
class AlphaCheck:
    ok: bool
    min_ratio: float
    witness: int | None


def check_alpha_subgraph(h: SubgraphMask, alpha: float) -> AlphaCheck:
    """Does every vertex keep at least an alpha fraction of its base degree?"""
    if not 0 <= alpha <= 1:
        raise ValueError("alpha must lie in [0, 1]")
    if h.keep.shape != (h.graph.m,):
        raise ValueError("mask/base mismatch")
    deg = h.graph.degree
    kept = h.kept_degree
    ratios = h.ratios()
    worst = float(ratios.min()) if h.graph.n else 1.0
    bad = np.nonzero(kept < alpha * deg - 1e-9)[0]
    if len(bad) == 0:
        return AlphaCheck(True, worst, None)
    return AlphaCheck(False, worst, int(bad[np.argmin(ratios[bad])]))


@dataclass(frozen=True)
class CycleCertificate:
    vertices: tuple
    through: int | None = None
    kind: str = "cycle"
    params: dict = field(default_factory=dict)
    audits: dict = field(default_factory=dict)

    @property
    def length(self) -> int:
        return len(self.vertices)


def verify_cycle(g, cert, through: int | None = None, length: int | None = None) -> bool:
    g = base_graph(g)
    seq = list(cert.vertices if isinstance(cert, CycleCertificate) else cert)
    if len(seq) < 3 or len(set(seq)) != len(seq):
        return False
    if any(not 0 <= int(v) < g.n for v in seq):
        return False
    if length is not None and len(seq) != length:
        return False
    anchor = through if through is not None else (cert.through if isinstance(cert, CycleCertificate) else None)
    if anchor is not None and anchor not in seq:
        return False
    pairs = np.array([(seq[i], seq[(i + 1) % len(seq)]) for i in range(len(seq))], np.int64)
    return bool(np.all(g.edge_ids(pairs) >= 0))
