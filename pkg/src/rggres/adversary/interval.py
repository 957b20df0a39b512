"""One-dimensional cut across an empty interval."""

from __future__ import annotations

import math
import warnings

import numpy as np

from ..geom import Metric
from ..graph import GeometricGraph
from .cuts import PreconditionError
from .report import AttackReport, make_report


def interval_length(n: int) -> float:
    L = math.log(n)
    return (L - math.sqrt(L)) / n


def _alpha_for_gap(xs: np.ndarray, j: int, r: float) -> float:
    """Worst kept fraction when every edge across the gap (xs[j-1], xs[j]) goes."""
    a, b = xs[j - 1], xs[j]
    lo = np.searchsorted(xs, b - r, side="left")
    hi = np.searchsorted(xs, a + r, side="right")
    idx = np.arange(lo, hi)
    if len(idx) == 0:
        return 1.0
    p = xs[idx]
    left = np.searchsorted(xs, p - r, side="left")
    right = np.searchsorted(xs, p + r, side="right")
    deg = right - left - 1
    lost = np.where(idx < j, right - j, j - left)
    lost = np.maximum(lost, 0)
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(deg > 0, (deg - lost) / np.maximum(deg, 1), 1.0)
    return float(ratio.min())


def empty_interval_cut(g: GeometricGraph, eps: float, step: float | None = None) -> AttackReport:
    """Scan [1/3, 2/3] for an interval [a, b] of length l with no vertex inside.

    Candidate positions advance by l/4 (default). Every empty placement names
    a gap between consecutive vertices; the occupancy counts around it
    (rn +- (rn)^(2/3) vertices on each side) are recorded as an audit, and the
    gap whose cut leaves the largest worst-case kept fraction is used.
    """
    if g.d != 1 or g.metric is not Metric.CUBE:
        raise PreconditionError("empty_interval_cut needs d=1 and the cube metric")
    n, r = g.n, g.r
    L = math.log(n)
    if r > L / (4 * eps * n):
        warnings.warn(f"r={r} is outside the regime r <= log n/(4 eps n)", stacklevel=2)
    ell = interval_length(n)
    step = ell / 4 if step is None else step
    xs = np.sort(g.points[:, 0])
    params = {"eps": eps, "ell": ell, "r": r}
    a_vals = np.arange(1 / 3 + r, 2 / 3 - r - ell + 1e-15, step)
    if len(a_vals) == 0:
        return make_report("empty-interval", g, np.ones(g.graph.m, bool), params=params, found=False)
    b_vals = a_vals + ell

    def count(lo, hi):
        return np.searchsorted(xs, hi, side="right") - np.searchsorted(xs, lo, side="left")

    empty = count(a_vals, b_vals) == 0
    tol = (r * n) ** (2 / 3)
    inner = (r - ell) * n
    occ = ((np.abs(count(a_vals - r + ell, a_vals) - inner) <= tol)
           & (np.abs(count(b_vals, b_vals + r - ell) - inner) <= tol)
           & (np.abs(count(a_vals - r, a_vals) - r * n) <= tol)
           & (np.abs(count(b_vals, b_vals + r) - r * n) <= tol))
    if not empty.any():
        return make_report("empty-interval", g, np.ones(g.graph.m, bool), params=params, found=False)
    gaps = {}
    for a, b, ok in zip(a_vals[empty], b_vals[empty], occ[empty]):
        j = int(np.searchsorted(xs, a, side="right"))
        if j == 0 or j == n:
            continue
        prev = gaps.get(j)
        if prev is None or (ok and not prev[2]):
            gaps[j] = (a, b, bool(ok))
    if not gaps:
        return make_report("empty-interval", g, np.ones(g.graph.m, bool), params=params, found=False)
    scored = sorted(((_alpha_for_gap(xs, j, r), j) for j in gaps), reverse=True)
    alpha, j = scored[0]
    a, b, ok = gaps[j]
    x = g.points[:, 0]
    e = g.graph.edges
    lo_pt = np.minimum(x[e[:, 0]], x[e[:, 1]])
    hi_pt = np.maximum(x[e[:, 0]], x[e[:, 1]])
    keep = ~((lo_pt < a) & (hi_pt > b))
    witness = {"a": float(a), "b": float(b), "occupancy_ok": ok, "candidates": len(gaps),
               "left_side_max": float(xs[j - 1]), "right_side_min": float(xs[j])}
    return make_report("empty-interval", g, keep, witness, params=params)
