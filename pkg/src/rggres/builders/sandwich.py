"""Comparing a 1-D toroidal geometric graph with powers of its cyclic order."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..geom import Metric
from ..graph import GeometricGraph


@dataclass
class SandwichReport:
    status: str  # "holds", "lower-violation" or "upper-violation"
    k_lower: int
    k_upper: int
    witness: tuple | None = None  # vertex labels of the offending pair
    order: np.ndarray | None = None

    @property
    def holds(self) -> bool:
        return self.status == "holds"


def _rank_gap(a, b, n):
    d = np.abs(a - b) % n
    return np.minimum(d, n - d)


def sandwich_check(g: GeometricGraph, eps: float) -> SandwichReport:
    """Is C^{k_lo} <= T <= C^{k_hi} in cyclic order, k = floor((1 -/+ eps) r n)?

    Vertices are relabelled by their position around the circle. The lower
    inclusion is checked pair by pair up to rank gap k_lo; the upper one by
    the largest rank gap over the edges of T.
    """
    if g.d != 1 or g.metric is not Metric.TORUS:
        raise ValueError("sandwich check needs a 1-dimensional torus graph")
    n = g.n
    order = np.argsort(g.points[:, 0], kind="stable")
    rank = np.empty(n, np.int64)
    rank[order] = np.arange(n)
    rn = g.r * n
    k_lo = max(0, math.floor((1 - eps) * rn + 1e-12))
    k_hi = min(n // 2, math.floor((1 + eps) * rn + 1e-12))
    k_lo = min(k_lo, n // 2)
    G = g.graph
    if k_lo >= 1 and n >= 2:
        i = np.repeat(np.arange(n), k_lo)
        s = np.tile(np.arange(1, k_lo + 1), n)
        u, v = order[i], order[(i + s) % n]
        missing = np.nonzero(G.edge_ids(np.stack([u, v], axis=1)) < 0)[0]
        if len(missing):
            j = missing[0]
            return SandwichReport("lower-violation", k_lo, k_hi, (int(u[j]), int(v[j])), order)
    if G.m and k_hi < n // 2:
        e = G.edges
        gap = _rank_gap(rank[e[:, 0]], rank[e[:, 1]], n)
        j = int(np.argmax(gap))
        if gap[j] > k_hi:
            return SandwichReport("upper-violation", k_lo, k_hi, (int(e[j, 0]), int(e[j, 1])), order)
    return SandwichReport("holds", k_lo, k_hi, None, order)
