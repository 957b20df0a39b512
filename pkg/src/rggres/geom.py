"""Metric geometry on the unit cube and the flat torus.

Distances, ball volumes (exact where a closed form exists, deterministic
quadrature otherwise), simple regions built from balls, and axis-aligned
tessellations with their grid graph.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field

import numpy as np


class Metric(str, enum.Enum):
    CUBE = "cube"
    TORUS = "torus"


class AccuracyError(RuntimeError):
    """Requested volume tolerance is out of reach of the quadrature budget."""


class ShapeError(ValueError):
    """A cell restriction that is not an axis-aligned box."""


QUAD_BUDGET = 20_000_000
MAX_QUAD_DIM = 6


def as_metric(metric) -> Metric:
    return metric if isinstance(metric, Metric) else Metric(str(metric))


def distance(p, q, metric=Metric.CUBE) -> float:
    p = np.atleast_1d(np.asarray(p, dtype=float))
    q = np.atleast_1d(np.asarray(q, dtype=float))
    if p.shape != q.shape:
        raise ValueError(f"dimension mismatch: {p.shape} vs {q.shape}")
    diff = np.abs(p - q)
    if as_metric(metric) is Metric.TORUS:
        diff = np.minimum(diff, 1.0 - diff)
    return float(math.sqrt(float(np.dot(diff, diff))))


def pairwise_delta(a: np.ndarray, b: np.ndarray, metric=Metric.CUBE) -> np.ndarray:
    """Per-axis absolute differences, wrapped on the torus. Shapes broadcast."""
    diff = np.abs(a - b)
    if as_metric(metric) is Metric.TORUS:
        diff = np.minimum(diff, 1.0 - diff)
    return diff


def ball_volume(d: int) -> float:
    """Volume theta_d of the d-dimensional unit ball."""
    if d < 1:
        raise ValueError("d must be >= 1")
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1)


# -- exact 2-d pieces ---------------------------------------------------------

def _arc_primitive(u, R):
    # antiderivative of sqrt(R^2 - u^2)
    u = np.clip(u, -R, R)
    h = np.sqrt(np.maximum(R * R - u * u, 0.0))
    with np.errstate(invalid="ignore", divide="ignore"):
        ang = np.where(R > 0, np.arcsin(np.clip(u / np.where(R > 0, R, 1.0), -1, 1)), 0.0)
    return 0.5 * (u * h + R * R * ang)


def _quadrant_area(a, b, R):
    """Area of {X <= a, Y <= b} inside the disc of radius R at the origin."""
    a = np.clip(a, -R, R)
    b = np.clip(b, -R, R)
    c = np.sqrt(np.maximum(R * R - b * b, 0.0))
    lo = np.maximum(-c, -R)
    hi = np.minimum(a, c)
    inner = np.where(hi > lo, _arc_primitive(hi, R) - _arc_primitive(lo, R), 0.0)
    span = np.maximum(hi - lo, 0.0)
    full = 2.0 * (_arc_primitive(a, R) - _arc_primitive(-R, R))
    pos = full - (inner - b * span)
    neg = inner + b * span
    return np.where(b >= 0, pos, neg)


def disc_rect_area(cx, cy, R, x0=0.0, x1=1.0, y0=0.0, y1=1.0):
    """Exact area of disc(c, R) intersected with [x0,x1] x [y0,y1] (vectorized)."""
    cx, cy, R = np.broadcast_arrays(np.asarray(cx, float), np.asarray(cy, float), np.asarray(R, float))
    ax0, ax1 = x0 - cx, x1 - cx
    by0, by1 = y0 - cy, y1 - cy
    area = (_quadrant_area(ax1, by1, R) - _quadrant_area(ax0, by1, R)
            - _quadrant_area(ax1, by0, R) + _quadrant_area(ax0, by0, R))
    return np.maximum(area, 0.0)


def lens_area(r1: float, r2: float, dist: float) -> float:
    """Exact area of the intersection of two discs with centre distance dist."""
    if dist >= r1 + r2:
        return 0.0
    if dist <= abs(r1 - r2):
        return math.pi * min(r1, r2) ** 2
    a1 = math.acos(max(-1.0, min(1.0, (dist * dist + r1 * r1 - r2 * r2) / (2 * dist * r1))))
    a2 = math.acos(max(-1.0, min(1.0, (dist * dist + r2 * r2 - r1 * r1) / (2 * dist * r2))))
    k = (-dist + r1 + r2) * (dist + r1 - r2) * (dist - r1 + r2) * (dist + r1 + r2)
    return r1 * r1 * a1 + r2 * r2 * a2 - 0.5 * math.sqrt(max(k, 0.0))


# -- clipped balls ------------------------------------------------------------

def _clipped_nd(center: np.ndarray, r: float, tol: float) -> float:
    d = center.size
    if d == 1:
        c = center[0]
        return max(0.0, min(1.0, c + r) - max(0.0, c - r))
    if d == 2:
        return float(disc_rect_area(center[0], center[1], r))
    if d > MAX_QUAD_DIM:
        raise AccuracyError(f"clipped volumes unsupported for d={d} > {MAX_QUAD_DIM}")
    # integrate the exact 2-d slice area over the first d-2 coordinates
    lo = np.maximum(center[:-2] - r, 0.0)
    hi = np.minimum(center[:-2] + r, 1.0)
    if np.any(hi <= lo):
        return 0.0
    k = d - 2
    prev = None
    per_axis = 8
    while True:
        if per_axis ** k > QUAD_BUDGET:
            raise AccuracyError(f"tolerance {tol} not reached within quadrature budget (d={d})")
        axes = [lo[i] + (np.arange(per_axis) + 0.5) * (hi[i] - lo[i]) / per_axis for i in range(k)]
        grids = np.meshgrid(*axes, indexing="ij")
        sq = sum((g - center[i]) ** 2 for i, g in enumerate(grids))
        rad = np.sqrt(np.maximum(r * r - sq, 0.0))
        slab = disc_rect_area(center[-2], center[-1], rad)
        cellvol = float(np.prod((hi - lo) / per_axis))
        total = float(slab.sum()) * cellvol
        if prev is not None and abs(total - prev) < tol:
            # Richardson step for the second-order midpoint rule
            return total + (total - prev) / 3.0
        prev = total
        per_axis *= 2


def clipped_ball_volume(center, r: float, metric=Metric.CUBE, tol: float = 1e-6) -> float:
    """Volume of B(center, r) inside [0,1]^d (or the torus ball volume)."""
    if r <= 0:
        raise ValueError("r must be positive")
    if tol <= 0:
        raise ValueError("tol must be positive")
    center = np.atleast_1d(np.asarray(center, dtype=float))
    d = center.size
    if as_metric(metric) is Metric.TORUS:
        if r < 0.5:
            return ball_volume(d) * r ** d
        # a torus ball is the cube [-1/2,1/2]^d cut by the Euclidean ball
        return _clipped_nd(np.full(d, 0.5), r, tol)
    return _clipped_nd(center, r, tol)


# -- regions ------------------------------------------------------------------

@dataclass(frozen=True)
class Region:
    """A region built from balls.

    kinds: ball (c; r), annulus (c; r1 < r2), intersection (c1, c2; r1, r2),
    difference (c1 minus c2; r1, r2), halfspace-clip (c; r, with x[axis] <= offset).
    """

    kind: str
    centres: tuple
    radii: tuple
    axis: int = 0
    offset: float = 0.0

    def __post_init__(self):
        if any(r <= 0 for r in self.radii):
            raise ValueError("radii must be positive")
        if self.kind == "annulus" and not self.radii[0] < self.radii[1]:
            raise ValueError("annulus needs r1 < r2")
        need = {"ball": (1, 1), "annulus": (1, 2), "intersection": (2, 2),
                "difference": (2, 2), "halfspace-clip": (1, 1)}
        if self.kind not in need:
            raise ValueError(f"unknown region kind {self.kind!r}")
        if (len(self.centres), len(self.radii)) != need[self.kind]:
            raise ValueError(f"bad parameters for {self.kind}")

    @property
    def dim(self) -> int:
        return len(self.centres[0])

    def contains(self, pts: np.ndarray, metric=Metric.CUBE) -> np.ndarray:
        pts = np.atleast_2d(pts)

        def inside(c, r):
            delta = pairwise_delta(pts, np.asarray(c, float), metric)
            return np.einsum("ij,ij->i", delta, delta) <= r * r

        c, r = self.centres, self.radii
        if self.kind == "ball":
            return inside(c[0], r[0])
        if self.kind == "annulus":
            return inside(c[0], r[1]) & ~inside(c[0], r[0])
        if self.kind == "intersection":
            return inside(c[0], r[0]) & inside(c[1], r[1])
        if self.kind == "difference":
            return inside(c[0], r[0]) & ~inside(c[1], r[1])
        return inside(c[0], r[0]) & (pts[:, self.axis] <= self.offset)


def _inside_cube(c, r) -> bool:
    c = np.asarray(c, float)
    return bool(np.all(c - r >= 0) and np.all(c + r <= 1))


def _lens(region: Region, metric) -> float | None:
    (c1, c2), (r1, r2) = region.centres, region.radii
    torus = as_metric(metric) is Metric.TORUS
    if region.dim != 2:
        return None
    if torus and r1 + r2 < 0.5 or (not torus and _inside_cube(c1, r1) and _inside_cube(c2, r2)):
        return lens_area(r1, r2, distance(c1, c2, metric))
    return None


def _quadrature(region: Region, metric, tol: float) -> float:
    d = region.dim
    if d > 3:
        raise AccuracyError("region quadrature limited to d <= 3")
    per_axis = 64
    prev = None
    while True:
        if per_axis ** d > QUAD_BUDGET:
            raise AccuracyError(f"tolerance {tol} not reached within quadrature budget")
        ax = (np.arange(per_axis) + 0.5) / per_axis
        pts = np.stack([g.ravel() for g in np.meshgrid(*([ax] * d), indexing="ij")], axis=1)
        total = float(region.contains(pts, metric).mean())
        if prev is not None and abs(total - prev) < tol:
            return total
        prev = total
        per_axis *= 2


def region_volume(region: Region, tol: float = 1e-6, metric=Metric.CUBE) -> float:
    """Volume of region inside [0,1]^d (or the torus)."""
    c, r = region.centres, region.radii
    if region.kind == "ball":
        return clipped_ball_volume(c[0], r[0], metric, tol)
    if region.kind == "annulus":
        return clipped_ball_volume(c[0], r[1], metric, tol) - clipped_ball_volume(c[0], r[0], metric, tol)
    if region.kind == "intersection":
        exact = _lens(region, metric)
        if exact is not None:
            return exact
        return _quadrature(region, metric, tol)
    if region.kind == "difference":
        inter = Region("intersection", c, r)
        return clipped_ball_volume(c[0], r[0], metric, tol) - region_volume(inter, tol, metric)
    if region.dim == 1:
        lo = max(0.0, c[0][0] - r[0])
        hi = min(1.0, c[0][0] + r[0], region.offset)
        return max(0.0, hi - lo)
    if region.dim == 2 and as_metric(metric) is Metric.CUBE:
        box = [0.0, 1.0, 0.0, 1.0]
        box[2 * region.axis + 1] = min(1.0, max(0.0, region.offset))
        return float(disc_rect_area(c[0][0], c[0][1], r[0], *box))
    return _quadrature(region, metric, tol)


# -- tessellations ------------------------------------------------------------

RULES = ("clique", "jackson", "certify", "interval", "explicit")


def side_count(d: int, rule: str, r: float = 0.0, delta: float = 1.0, m: int | None = None) -> int:
    """Number of cells per axis prescribed by a side rule."""
    if rule == "explicit":
        if m is None or m < 1:
            raise ValueError("explicit rule needs m >= 1")
        return int(m)
    if not 0 < r <= math.sqrt(d):
        raise ValueError(f"r={r} outside (0, sqrt(d)]")
    if rule == "clique":
        val = math.sqrt(d) / r
    elif rule == "jackson":
        val = d / (delta * r)
    elif rule == "certify":
        val = math.sqrt(d + 3) / r
    elif rule == "interval":
        val = 3.0 / (4.0 * r)
    else:
        raise ValueError(f"unknown side rule {rule!r}")
    out = math.ceil(val)
    if out < 1:
        raise ValueError(f"rule {rule} gives m=0 at r={r}")
    return out


@dataclass(frozen=True)
class Tessellation:
    """Grid of m^d cells of side 1/m. Cell ids are row-major over index tuples."""

    d: int
    m: int
    r: float = 0.0
    metric: Metric = Metric.CUBE
    interior: frozenset = field(default=frozenset(), compare=False)

    @property
    def side(self) -> float:
        return 1.0 / self.m

    @property
    def n_cells(self) -> int:
        return self.m ** self.d

    def index_of(self, pts: np.ndarray) -> np.ndarray:
        """Per-point cell index tuples, shape (n, d).

        A point on a shared face goes to the lexicographically smallest cell.
        """
        pts = np.atleast_2d(np.asarray(pts, float))
        idx = np.ceil(pts * self.m).astype(np.int64) - 1
        return np.clip(idx, 0, self.m - 1)

    def cell_of(self, pts: np.ndarray) -> np.ndarray:
        return self.flat(self.index_of(pts))

    def flat(self, idx) -> np.ndarray:
        idx = np.atleast_2d(np.asarray(idx, np.int64))
        out = np.zeros(idx.shape[0], np.int64)
        for i in range(self.d):
            out = out * self.m + idx[:, i]
        return out

    def unflat(self, cid) -> np.ndarray:
        cid = np.atleast_1d(np.asarray(cid, np.int64)).copy()
        idx = np.zeros((cid.size, self.d), np.int64)
        for i in range(self.d - 1, -1, -1):
            idx[:, i] = cid % self.m
            cid //= self.m
        return idx

    def lower_corner(self, cid) -> np.ndarray:
        return self.unflat(cid) * self.side

    def neighbours(self, cid: int) -> list[int]:
        """Gamma-neighbours (cells sharing a (d-1)-face)."""
        base = self.unflat(cid)[0]
        out = []
        for i in range(self.d):
            for step in (-1, 1):
                j = base.copy()
                j[i] += step
                if 0 <= j[i] < self.m:
                    out.append(int(self.flat(j)[0]))
                elif self.metric is Metric.TORUS and self.m > 2:
                    j[i] %= self.m
                    out.append(int(self.flat(j)[0]))
        return sorted(set(out))

    def adjacent(self, a: int, b: int) -> bool:
        return b in self.neighbours(a)

    def cell_distance_to_boundary(self, cid) -> np.ndarray:
        lo = self.lower_corner(cid)
        return np.minimum(lo, 1.0 - (lo + self.side)).min(axis=1)

    def interior_cells(self, margin: float) -> list[int]:
        """Cells at distance >= margin from the boundary of [0,1]^d."""
        ids = np.arange(self.n_cells)
        if self.metric is Metric.TORUS:
            return ids.tolist()
        dist = self.cell_distance_to_boundary(ids)
        return ids[dist >= margin - 1e-12].tolist()


def tessellate(d: int, rule: str, r: float = 0.0, delta: float = 1.0, m: int | None = None,
               metric=Metric.CUBE) -> Tessellation:
    mm = side_count(d, rule, r, delta, m)
    t = Tessellation(d=d, m=mm, r=r, metric=as_metric(metric))
    q2r = frozenset(t.interior_cells(2 * r)) if r > 0 else frozenset(range(t.n_cells))
    return Tessellation(d=d, m=mm, r=r, metric=as_metric(metric), interior=q2r)


def _snake(shape: tuple) -> list[tuple]:
    if len(shape) == 1:
        return [(i,) for i in range(shape[0])]
    rest = _snake(shape[1:])
    out = []
    for i in range(shape[0]):
        seq = rest if i % 2 == 0 else rest[::-1]
        out.extend((i,) + s for s in seq)
    return out


def grid_spanning_path(t: Tessellation, restrict=None) -> list[int]:
    """Boustrophedon Hamilton path of Gamma, or of Gamma restricted to a box."""
    if restrict is None:
        lo = np.zeros(t.d, np.int64)
        shape = (t.m,) * t.d
    else:
        cells = sorted(set(int(c) for c in restrict))
        if not cells:
            return []
        idx = t.unflat(cells)
        lo, hi = idx.min(axis=0), idx.max(axis=0)
        shape = tuple(int(x) for x in hi - lo + 1)
        if int(np.prod(shape)) != len(cells):
            raise ShapeError("restricted cell set is not an axis-aligned box")
    rel = np.array(_snake(shape), dtype=np.int64)
    return t.flat(rel + lo).tolist()


def cell_inside_ball(t: Tessellation, cid: int, p, r: float) -> bool:
    """True iff every corner of the cell lies within distance r of p (cube metric)."""
    lo = t.lower_corner(cid)[0]
    p = np.asarray(p, float)
    far = np.where(np.abs(lo - p) > np.abs(lo + t.side - p), lo, lo + t.side)
    return float(np.sum((far - p) ** 2)) <= r * r


def corners(lo, side):
    d = len(lo)
    return np.array([np.asarray(lo) + side * np.array(b) for b in itertools.product((0, 1), repeat=d)])
