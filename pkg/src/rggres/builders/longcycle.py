"""Cycles of prescribed length through a prescribed vertex, via a three-colour scheme.

Vertices are coloured blue, red or green. Each red vertex is attached to one
cell lying inside its ball and each green vertex to one pair of face-sharing
cells inside its ball. A cycle alternates blue with non-blue: inside a cell,
blue vertices are threaded by red vertices of that cell (alternating cycles in
the blue/red bipartite graph), and consecutive cells are bridged by green
vertices attached to the pair.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from ..geom import Metric, Tessellation, grid_spanning_path, tessellate
from ..graph import CycleCertificate, GeometricGraph, Graph, SubgraphMask, verify_cycle
from ..rgg import as_rng
from .common import BuildFailure, ScopeError
from .jackson import jackson_cycle

BLUE, RED, GREEN = 0, 1, 2


@dataclass(frozen=True)
class ColourTuning:
    """Colour probabilities. None entries take the defaults
    blue = eta/(1+eta) + eps/40, green = eps/40, red = the remainder."""

    blue: float | None = None
    green: float | None = None

    def resolve(self, eta: float, eps: float) -> tuple[float, float, float]:
        b = eta / (1 + eta) + eps / 40 if self.blue is None else self.blue
        g = eps / 40 if self.green is None else self.green
        r = 1.0 - b - g
        if min(b, g, r) < 0:
            raise ValueError(f"colour probabilities out of range: blue={b}, red={r}, green={g}")
        return b, r, g


@dataclass
class Colouring:
    colour: np.ndarray      # BLUE / RED / GREEN per vertex
    cell: np.ndarray        # cell id per vertex
    red_cell: np.ndarray    # attached cell per red vertex, -1 otherwise
    green_pair: np.ndarray  # attached pair index per green vertex, -1 otherwise
    pairs: np.ndarray       # (P, 2) face-sharing cell pairs, a < b
    tess: Tessellation
    probabilities: tuple

    def pair_index(self) -> dict:
        return {(int(a), int(b)): i for i, (a, b) in enumerate(self.pairs)}


def grid_pairs(t: Tessellation) -> np.ndarray:
    out = []
    for c in range(t.n_cells):
        for nb in t.neighbours(c):
            if nb > c:
                out.append((c, nb))
    return np.array(out, np.int64).reshape(-1, 2)


def _far_sq(pts, lo, hi):
    far = np.maximum(np.abs(pts - lo), np.abs(pts - hi))
    return (far ** 2).sum(axis=1)


def _box_eligible(tree, pts, lo, hi, r):
    """Indices of points whose r-ball contains the box [lo, hi]."""
    idx = np.asarray(tree.query_ball_point((lo + hi) / 2, r), np.int64)
    if len(idx) == 0:
        return idx
    return np.sort(idx[_far_sq(pts[idx], lo, hi) <= r * r + 1e-15])


def _attach(rng, n, owners, targets):
    """Pick one target uniformly per owner; -1 for owners with none."""
    out = np.full(n, -1, np.int64)
    u = rng.random(n)
    if len(owners) == 0:
        return out
    o = np.lexsort((targets, owners))
    owners, targets = owners[o], targets[o]
    first = np.searchsorted(owners, np.arange(n))
    count = np.bincount(owners, minlength=n)
    has = count > 0
    pick = first[has] + np.minimum((u[has] * count[has]).astype(np.int64), count[has] - 1)
    out[has] = targets[pick]
    return out


def sample_colouring(g: GeometricGraph, v: int, t: Tessellation, probs: tuple, seed) -> Colouring:
    """Random colouring with v forced blue, plus the red and green attachments."""
    rng = as_rng(seed)
    n = g.n
    pts = g.points
    b, r_, _ = probs
    u = rng.random(n)
    colour = np.where(u < b, BLUE, np.where(u < b + r_, RED, GREEN)).astype(np.int8)
    colour[v] = BLUE
    cell = t.cell_of(pts)
    tree = cKDTree(pts)
    s = t.side
    r = g.r
    own, tgt = [], []
    reds = colour == RED
    for c in range(t.n_cells):
        lo = t.lower_corner(c)[0]
        idx = _box_eligible(tree, pts, lo, lo + s, r)
        idx = idx[reds[idx]]
        own.append(idx)
        tgt.append(np.full(len(idx), c, np.int64))
    red_cell = _attach(rng, n, np.concatenate(own), np.concatenate(tgt))
    pairs = grid_pairs(t)
    own, tgt = [], []
    greens = colour == GREEN
    for k, (a, c) in enumerate(pairs):
        lo = np.minimum(t.lower_corner(a)[0], t.lower_corner(c)[0])
        hi = np.maximum(t.lower_corner(a)[0], t.lower_corner(c)[0]) + s
        idx = _box_eligible(tree, pts, lo, hi, r)
        idx = idx[greens[idx]]
        own.append(idx)
        tgt.append(np.full(len(idx), k, np.int64))
    green_pair = _attach(rng, n, np.concatenate(own) if own else np.zeros(0, np.int64),
                         np.concatenate(tgt) if tgt else np.zeros(0, np.int64))
    return Colouring(colour, cell, red_cell, green_pair, pairs, t, tuple(probs))


def own_red_degree(H: Graph, col: Colouring) -> np.ndarray:
    """Per vertex: kept neighbours that are red and attached to the vertex's cell."""
    e = H.edges
    a, b = e[:, 0], e[:, 1]
    cnt = np.bincount(a[col.red_cell[b] == col.cell[a]], minlength=H.n)
    cnt += np.bincount(b[col.red_cell[a] == col.cell[b]], minlength=H.n)
    return cnt


def colouring_audits(mask: SubgraphMask, col: Colouring, eta: float, eps: float, allowed) -> dict:
    """Instance-level versions of the point-distribution conditions, each pass/fail."""
    g = mask.base
    H = mask.kept
    n = g.n
    t = col.tess
    vol = t.side ** g.d * n
    allowed = np.asarray(sorted(allowed), np.int64)
    counts = np.bincount(col.cell, minlength=t.n_cells)
    blues = np.bincount(col.cell[col.colour == BLUE], minlength=t.n_cells)
    reds = np.bincount(col.red_cell[col.red_cell >= 0], minlength=t.n_cells)
    rdeg = own_red_degree(H, col)
    in_allowed = np.isin(col.cell, allowed)
    greens = np.bincount(col.green_pair[col.green_pair >= 0], minlength=len(col.pairs))
    inside_pairs = np.isin(col.pairs, allowed).all(axis=1)
    deg = H.degree
    blue_nb = np.bincount(H.edges[:, 0][col.colour[H.edges[:, 1]] == BLUE], minlength=n) + \
        np.bincount(H.edges[:, 1][col.colour[H.edges[:, 0]] == BLUE], minlength=n)
    big = deg >= 40 * math.log(max(n, 2))
    out = {}
    c = counts[allowed]
    out["cell_counts"] = bool(np.all(np.abs(c - vol) <= eps / 100 * vol))
    bq = blues[allowed]
    lo, hi = (eta / (1 + eta) + eps / 70) * vol, (eta / (1 + eta) + eps / 3) * vol
    out["blue_per_cell"] = bool(np.all((bq >= lo) & (bq <= hi)))
    out["red_neighbours"] = bool(np.all(rdeg[in_allowed] >= (eta / (1 + eta) + eps / 3) * vol))
    out["red_cap"] = bool(np.all(reds[allowed] <= (1 / (1 + eta) + eps / 20) * vol))
    out["green_pool"] = bool(np.all(greens[inside_pairs] >= 5)) if inside_pairs.any() else True
    out["blue_neighbours"] = bool(np.all(blue_nb[big] >= deg[big] / 6))
    out["details"] = {
        "min_blue": int(bq.min()) if len(bq) else 0,
        "min_red_attached": int(reds[allowed].min()) if len(allowed) else 0,
        "min_green_pool": int(greens[inside_pairs].min()) if inside_pairs.any() else 0,
        "cells_allowed": int(len(allowed)),
    }
    return out


AUDIT_NAMES = ("cell_counts", "blue_per_cell", "red_neighbours", "red_cap", "green_pool", "blue_neighbours")


class _Failure(Exception):
    def __init__(self, step, reason, where=None):
        super().__init__(reason)
        self.step, self.reason, self.where = step, reason, where


class _Builder:
    def __init__(self, mask, col, allowed, forbidden, rng, jackson_bound, jackson_budget, chain_budget):
        self.H = mask.kept
        self.col = col
        self.t = col.tess
        self.allowed = set(int(c) for c in allowed)
        self.forbidden = set(int(x) for x in forbidden)
        self.rng = rng
        self.jb, self.jbudget = jackson_bound, jackson_budget
        self.chain_budget = chain_budget
        self.pidx = col.pair_index()
        n = self.H.n
        self.rdeg = own_red_degree(self.H, col)
        blue = np.nonzero(col.colour == BLUE)[0]
        self.blues = {}
        for c, vs in _group(col.cell[blue], blue).items():
            self.blues[c] = vs[np.lexsort((vs, -self.rdeg[vs]))]
        ok = np.ones(n, bool)
        ok[list(self.forbidden)] = False
        red = np.nonzero((col.red_cell >= 0) & ok)[0]
        self.reds = _group(col.red_cell[red], red)
        grn = np.nonzero((col.green_pair >= 0) & ok)[0]
        self.pool = _group(col.green_pair[grn], grn)
        self.n = n

    # -- small helpers ------------------------------------------------------
    def adj(self, a, b) -> bool:
        return self.H.has_edge(int(a), int(b))

    def pair(self, a, b) -> int:
        a, b = int(a), int(b)
        return self.pidx.get((min(a, b), max(a, b)), -1)

    def greens_for(self, a, b, x, y, used):
        """Unused greens attached to cell pair (a, b) adjacent to both x and y."""
        k = self.pair(a, b)
        if k < 0:
            return []
        return [int(z) for z in self.pool.get(k, ()) if int(z) not in used and self.adj(z, x) and self.adj(z, y)]

    def blue_in(self, c, exclude):
        return [int(x) for x in self.blues.get(int(c), ()) if int(x) not in exclude and int(x) not in self.forbidden]

    def grid_path(self, a, b):
        """Shortest path in the cell grid, moving one axis at a time."""
        ia, ib = self.t.unflat(a)[0].copy(), self.t.unflat(b)[0]
        out = [int(a)]
        for ax in range(self.t.d):
            step = 1 if ib[ax] > ia[ax] else -1
            while ia[ax] != ib[ax]:
                ia[ax] += step
                out.append(int(self.t.flat(ia)[0]))
        return out

    def to_allowed(self, sources, min_pool=0):
        """Shortest grid path from any source cell to an allowed cell, using
        only cell pairs with at least min_pool attached greens."""
        prev = {int(s): None for s in sources}
        dq = deque(int(s) for s in sources)
        while dq:
            c = dq.popleft()
            if c in self.allowed:
                path = [c]
                while prev[path[-1]] is not None:
                    path.append(prev[path[-1]])
                return path[::-1]
            for nb in self.t.neighbours(c):
                if nb not in prev and len(self.pool.get(self.pair(c, nb), ())) >= min_pool:
                    prev[nb] = c
                    dq.append(nb)
        return None

    def routes(self, sources):
        """Distinct routes to the allowed cells, best-supplied with greens first."""
        seen = []
        for k in (4, 3, 2, 0):
            r = self.to_allowed(sources, k)
            if r is not None and r not in seen:
                seen.append(r)
                yield r
        if not seen:
            raise _Failure("boundary", "no allowed cell reachable")

    # -- the even-cycle core ------------------------------------------------
    def capacity(self, c, anchor, A):
        cand = [x for x in self.blue_in(c, A | {anchor}) if self.rdeg[x] >= 2]
        room = len(self.reds.get(c, ())) - (1 if self.col.cell[anchor] == c else 0)
        return cand, max(0, min(len(cand), room))

    def cell_path(self, anchor, need, A, used_greens):
        """Cells q_1..q_m (consecutive ones face-sharing) containing the anchor's
        cell, each offering >= 2 blue vertices, together >= need of them."""
        c0 = int(self.col.cell[anchor])
        caps = {}

        def cap(c):
            if c not in caps:
                caps[c] = self.capacity(c, anchor, A)[1]
            return caps[c]

        def good(a, b):
            k = self.pair(a, b)
            return k >= 0 and sum(1 for z in self.pool.get(k, ()) if int(z) not in used_greens) >= 2

        order = grid_spanning_path(self.t, self.allowed)
        pos = order.index(c0)
        cs = np.array([cap(c) for c in order])
        ok_cell = cs >= 2
        ok_pair = np.array([good(order[i], order[i + 1]) for i in range(len(order) - 1)] + [False])
        pre = np.concatenate([[0], np.cumsum(cs)])
        bad_c = np.concatenate([[0], np.cumsum(~ok_cell)])
        bad_p = np.concatenate([[0], np.cumsum(~ok_pair)])
        for m in range(1, len(order) + 1):
            if 2 * m > need:
                break
            for st in range(max(0, pos - m + 1), min(pos, len(order) - m) + 1):
                en = st + m
                if bad_c[en] - bad_c[st] or bad_p[en - 1] - bad_p[st]:
                    continue
                if pre[en] - pre[st] >= need:
                    return order[st:en], caps
        path = self._long_path(c0, need, cap, good)
        if path is None:
            raise _Failure("cell-path", f"no grid path through the anchor cell carries {need} blue vertices",
                           where=c0)
        return path, caps

    def _long_path(self, c0, need, cap, good):
        """Randomised rotation-extension search for a path through c0 in the
        graph of usable cells, stopping once enough blue vertices are covered."""
        if cap(c0) < 2:
            return None
        usable = {c for c in self.allowed if cap(c) >= 2}
        nbrs = {c: [x for x in self.t.neighbours(c) if x in usable and good(c, x)] for c in usable}
        rng = np.random.default_rng(self.rng.integers(2 ** 32))
        for _ in range(8):
            path = [c0]
            pos = {c0: 0}
            total = cap(c0)
            for _ in range(self.chain_budget):
                if total >= need:
                    return path
                if rng.random() < 0.5:
                    path.reverse()
                    pos = {c: i for i, c in enumerate(path)}
                end = path[-1]
                opts = nbrs[end]
                if not opts:
                    continue
                fresh = [x for x in opts if x not in pos]
                if fresh:
                    x = fresh[rng.integers(len(fresh))]
                    pos[x] = len(path)
                    path.append(x)
                    total += cap(x)
                    continue
                x = opts[rng.integers(len(opts))]
                i = pos[x]
                if i < len(path) - 2:
                    path[i + 1:] = path[:i:-1]
                    for j in range(i + 1, len(path)):
                        pos[path[j]] = j
        return None

    def jackson(self, S, c):
        R = self.reds.get(int(c), np.zeros(0, np.int64))
        try:
            res = jackson_cycle(self.H, S, R.tolist(), bound=self.jb, budget=self.jbudget)
        except ScopeError as exc:
            raise _Failure("jackson", str(exc), where=int(c)) from None
        if not res:
            raise _Failure("jackson", str(res), where=int(c))
        return list(res.vertices)

    def claim(self, anchor, ell, A, used_greens):
        """Cycle of length 2*ell through the blue anchor in an allowed cell, avoiding A.

        Returns (cycle, (anchor, middle, other)) where anchor-middle-other is a
        subpath whose ends are blue vertices of the anchor's cell.
        """
        c0 = int(self.col.cell[anchor])
        if c0 not in self.allowed:
            raise _Failure("claim", "anchor outside the allowed cells", where=c0)
        if ell == 2:
            for other in self.blue_in(c0, A | {anchor}):
                try:
                    cyc = self.jackson([anchor, other], c0)
                except _Failure:
                    continue
                return self._with_p4(cyc, anchor, c0)
            raise _Failure("claim", "no 4-cycle through the anchor inside its cell", where=c0)
        cells, _ = self.cell_path(anchor, ell - 1, A, used_greens)
        # distribute the blue vertices
        chosen, extra = {}, ell - 1 - 2 * len(cells)
        for c in sorted(cells, key=lambda c: (c != c0, cells.index(c))):
            cand, capc = self.capacity(c, anchor, A)
            k = 2 + min(extra, capc - 2)
            extra -= k - 2
            chosen[c] = cand[:k]
        if extra > 0:
            raise _Failure("claim", "not enough blue vertices in the chosen cells", where=c0)
        chosen[c0] = [anchor] + chosen[c0]
        cycles = [self.jackson(chosen[c], c) for c in cells]
        seq = self._glue(cells, cycles, anchor, used_greens)
        return self._with_p4(seq, anchor, c0)

    def _with_p4(self, seq, anchor, c0):
        i = seq.index(anchor)
        n = len(seq)
        for d in (1, -1):
            mid, other = seq[(i + d) % n], seq[(i + 2 * d) % n]
            if self.col.colour[mid] == RED and self.col.cell[other] == c0 and other != anchor:
                return seq, (anchor, mid, other)
        raise _Failure("claim", "anchor has no two-step path to a blue vertex of its cell", where=c0)

    def _glue(self, cells, cycles, anchor, used_greens):
        m = len(cycles)
        sizes = [len(c) // 2 for c in cycles]
        blue = [c[0::2] for c in cycles]

        def w(j, p):
            return blue[j][p % sizes[j]]

        # order starting offsets so that paths of the anchor cell avoid the anchor
        def starts(j):
            a = sizes[j]
            if anchor in blue[j]:
                b = blue[j].index(anchor)
                return sorted(range(a), key=lambda p: (p in (b, (b - 1) % a), p))
            return list(range(a))

        p = [None] * m
        pp = [None] * m
        links = [None] * (m - 1)
        used = set(used_greens)
        p[0] = starts(0)[0]
        for j in range(m - 1):
            found = False
            a = sizes[j]
            cands_pp = [(p[j] + k) % a for k in range(1, a)]
            if anchor in blue[j]:
                bi = blue[j].index(anchor)
                cands_pp.sort(key=lambda x: x in (bi, (bi - 1) % a))
            for q2 in cands_pp:
                for q1 in starts(j + 1):
                    w1p, w2p = w(j, q2), w(j, q2 + 1)
                    w1n, w2n = w(j + 1, q1), w(j + 1, q1 + 1)
                    zs = self.greens_for(cells[j], cells[j + 1], w1p, w2n, used)
                    if not zs:
                        continue
                    z = zs[0]
                    zs2 = [x for x in self.greens_for(cells[j], cells[j + 1], w1n, w2p, used) if x != z]
                    if not zs2:
                        continue
                    pp[j], p[j + 1] = q2, q1
                    links[j] = (z, zs2[0])
                    used.update(links[j])
                    found = True
                    break
                if found:
                    break
            if not found:
                raise _Failure("greens", "no two green connectors for consecutive cells",
                               where=(int(cells[j]), int(cells[j + 1])))
        a = sizes[m - 1]
        cands = [(p[m - 1] + k) % a for k in range(1, a)]
        if anchor in blue[m - 1]:
            bi = blue[m - 1].index(anchor)
            cands.sort(key=lambda x: x in (bi, (bi - 1) % a))
        pp[m - 1] = cands[0]

        def arc(j, frm, to):
            """Vertices of cycle j walking forward from blue index frm to blue index to."""
            c = cycles[j]
            L = len(c)
            i, end = 2 * (frm % sizes[j]), 2 * (to % sizes[j])
            out = [c[i]]
            while i != end:
                i = (i + 1) % L
                out.append(c[i])
            return out

        seq = [w(0, p[0]), cycles[0][(2 * p[0] + 1) % len(cycles[0])]]
        for j in range(m):
            seq += arc(j, p[j] + 1, pp[j])  # T_j
            if j < m - 1:
                seq.append(links[j][0])
        cm = cycles[m - 1]
        seq.append(cm[(2 * pp[m - 1] + 1) % len(cm)])  # middle of P'_m
        seq += arc(m - 1, pp[m - 1] + 1, p[m - 1])  # T'_m
        for j in range(m - 2, -1, -1):
            seq.append(links[j][1])
            seq += arc(j, pp[j] + 1, p[j])  # T'_j
        seq = seq[:-1]  # the walk closes at w_{1,1}
        used_greens.update(z for lk in links if lk for z in lk)
        return [int(x) for x in seq]

    # -- chains of blue vertices bridged by greens ---------------------------
    def chain(self, cells, ends, used_blue, used_greens, pair_override=None):
        """Blue vertices x_0..x_k with x_i in cells[i] joined by distinct greens.

        ends maps fixed positions to vertices. The green between x_{i-1} and
        x_i is attached to (cells[i-1], cells[i]) unless pair_override[i] names
        another pair. Returns (blues, greens); depth-first with a node budget.
        """
        k = len(cells) - 1
        budget = [self.chain_budget]
        xs = [None] * (k + 1)
        zs = [None] * (k + 1)
        for i, x in ends.items():
            xs[i] = int(x)
        taken = set(used_blue) | {x for x in xs if x is not None}
        gused = set(used_greens)

        def rec(i):
            if i > k:
                return True
            budget[0] -= 1
            if budget[0] < 0:
                return False
            pa = pair_override.get(i) if pair_override else None
            a, b = pa if pa else (cells[i - 1], cells[i])
            if xs[i] is not None and i in ends:
                opts = [xs[i]]
            else:
                opts = self.blue_in(cells[i], taken)[:8]
            for x in opts:
                for z in self.greens_for(a, b, xs[i - 1], x, gused)[:3]:
                    fresh = i not in ends
                    if fresh:
                        xs[i] = x
                        taken.add(x)
                    zs[i] = z
                    gused.add(z)
                    if rec(i + 1):
                        return True
                    gused.discard(z)
                    if fresh:
                        taken.discard(x)
                        xs[i] = None
            return False

        if xs[0] is None:
            raise ValueError("chain needs a fixed start")
        if not rec(1):
            raise _Failure("chain", "no green-bridged chain of blue vertices", where=tuple(int(c) for c in cells))
        used_greens.update(zs[1:])
        used_blue.update(xs)
        return xs, zs

    # -- even cycles through v near the boundary -----------------------------
    def even(self, v, ell):
        c = int(self.col.cell[v])
        if c in self.allowed:
            used = set()
            seq, _ = self.claim(v, ell, set(self.forbidden), used)
            return seq, {"case": "interior"}
        last = None
        for route in self.routes([c]):
            t = len(route) - 1
            if ell <= 2 * t:
                # closed chain v_0 .. v_ell = v, cells going out and back
                k = ell
                cells = [route[min(i, ell - i)] for i in range(k + 1)]
                over = {}
                if ell % 2 == 1:
                    h = ell // 2
                    over[h + 1] = (route[h], route[h - 1])
                try:
                    xs, zs = self.chain(cells, {0: v, k: v}, set(), set(), over)
                except _Failure as exc:
                    last = exc
                    continue
                seq = []
                for i in range(k):
                    seq += [xs[i], zs[i + 1]]
                return seq, {"case": "near-boundary-short", "t": t}
            for anchor in self.blue_in(route[-1], {v})[:4]:
                try:
                    used_g = set()
                    O, (vt, mid, vt2) = self.claim(anchor, ell - 2 * t + 1, set(self.forbidden), used_g)
                except _Failure as exc:
                    last = exc
                    continue
                ub = set(x for x in O if self.col.colour[x] == BLUE)
                try:
                    xs, zs = self.chain(route, {0: v, t: vt}, set(ub) - {vt}, used_g)
                    ub.update(xs)
                    ys, ws = self.chain(route, {0: v, t: vt2}, ub - {vt2, v}, used_g)
                except _Failure as exc:
                    last = exc
                    continue
                # P_2: vt .. v .. vt2 ; P_1: the claim cycle minus mid, from vt2 around to vt
                p2 = []
                for i in range(t, 0, -1):
                    p2 += [xs[i], zs[i]]
                p2.append(v)
                for i in range(1, t + 1):
                    p2 += [ws[i], ys[i]]
                i0 = O.index(vt2)
                step = 1 if O[(i0 - 1) % len(O)] == mid else -1
                walk = [O[(i0 + step * j) % len(O)] for j in range(len(O))]
                # walk: vt2 ... vt, mid ; drop both ends already in p2 and mid
                seq = p2 + walk[1:-2]
                return seq, {"case": "near-boundary-long", "t": t}
        raise last or _Failure("claim", "no blue anchor in the nearest allowed cell")

    # -- odd cycles ------------------------------------------------------------
    def odd(self, v, L):
        c = int(self.col.cell[v])
        nb = self.H.neighbors(v)
        cand = [int(x) for x in nb if self.col.colour[x] == BLUE and self.col.cell[x] != c
                and int(x) not in self.forbidden]
        if not cand:
            raise _Failure("odd", "no blue kept neighbour outside the vertex's cell", where=c)
        dist = [np.abs(self.t.unflat(self.col.cell[x])[0] - self.t.unflat(c)[0]).sum() for x in cand]
        cand = [x for _, x in sorted(zip(dist, cand))]
        last = None
        for vp in cand[:6]:
            try:
                return self._odd_with(v, vp, L)
            except _Failure as exc:
                last = exc
        raise last

    def _odd_with(self, v, vp, L):
        path = self.grid_path(self.col.cell[v], self.col.cell[vp])
        last = None
        for route in self.routes(path):
            try:
                return self._odd_route(path, [v, vp], route, L)
            except _Failure as exc:
                if exc.step == "refused":
                    raise
                last = exc
        raise last

    def _odd_route(self, path, ends, route, L):
        istar = path.index(route[0])
        t, tp = len(path) - 1, len(route) - 1
        if istar == t:
            path, ends, istar = path[::-1], ends[::-1], 0
        lp = 2 * t + 4 * tp + 1
        if L < lp + 2:
            raise _Failure("refused", f"odd length {L} below the reach {lp + 2} of the odd-path surgery")
        v0, vt = ends
        # blue vertices of the odd path
        taken = {v0, vt}
        vs = [v0] + [None] * (t - 1) + [vt]
        for i in range(1, t):
            opts = self.blue_in(path[i], taken)
            if not opts:
                raise _Failure("odd", "cell on the odd path has no free blue vertex", where=path[i])
            vs[i] = opts[0]
            taken.add(opts[0])
        w = [vs[istar]] + [None] * tp
        wp = [None] * (tp + 1)
        for i in range(1, tp + 1):
            opts = self.blue_in(route[i], taken)
            if not opts:
                raise _Failure("odd", "cell on the route has no free blue vertex", where=route[i])
            w[i] = opts[0]
            taken.add(opts[0])
        for i in range(tp):
            opts = self.blue_in(route[i], taken)
            if not opts:
                raise _Failure("odd", "cell on the route has no second blue vertex", where=route[i])
            wp[i] = opts[0]
            taken.add(opts[0])
        B = {vs[i] for i in range(t + 1) if i != istar} | {w[i] for i in range(tp)} | {wp[i] for i in range(tp)}
        used_g = set()
        O, (_, mid, wlast) = self.claim(w[tp], (L - lp + 2) // 2, B | self.forbidden, used_g)
        wp[tp] = wlast
        if tp == 0:
            wp[0] = wlast
        # connectors
        gused = set(used_g)

        def bridge(a, b, x, y):
            zs = self.greens_for(a, b, x, y, gused)
            if not zs:
                raise _Failure("odd", "missing green connector on the odd path", where=(int(a), int(b)))
            gused.add(zs[0])
            return zs[0]

        z = [None] * (t + 1)
        for i in range(1, t + 1):
            left = wp[0] if i == istar + 1 else vs[i - 1]
            z[i] = bridge(path[i - 1], path[i], left, vs[i])
        y = [None] * (tp + 1)
        yp = [None] * (tp + 1)
        for i in range(1, tp + 1):
            y[i] = bridge(route[i - 1], route[i], w[i - 1], w[i])
            yp[i] = bridge(route[i - 1], route[i], wp[i - 1], wp[i])
        P = []
        for i in range(tp, 0, -1):
            P += [wp[i], yp[i]]
        P.append(wp[0])
        for i in range(istar + 1, t + 1):
            P += [z[i], vs[i]]
        P.append(vs[0])
        for i in range(1, istar + 1):
            P += [z[i], vs[i]]
        for i in range(1, tp + 1):
            P += [y[i], w[i]]
        i0 = O.index(w[tp])
        step = 1 if O[(i0 - 1) % len(O)] == mid else -1
        walk = [O[(i0 + step * j) % len(O)] for j in range(len(O))]
        seq = P + walk[1:-2]
        return seq, {"case": "odd", "t": t, "t_route": tp, "odd_path_length": lp}


def _group(keys, vals):
    if len(keys) == 0:
        return {}
    o = np.argsort(keys, kind="stable")
    keys, vals = keys[o], vals[o]
    cut = np.nonzero(np.diff(keys))[0] + 1
    return {int(ks[0]): vs for ks, vs in zip(np.split(keys, cut), np.split(vals, cut))}


def long_cycle(mask: SubgraphMask, v: int, L: int, eta: float = 0.5, eps: float = 0.1, delta: float = 1.0,
               seed=0, *, tuning: ColourTuning | None = None, margin: float | None = None, forbidden=(),
               short_odd: int = 9, strict_audits: bool = False, jackson_bound: int = 16,
               jackson_budget: int = 200_000, chain_budget: int = 20_000) -> CycleCertificate | BuildFailure:
    """Cycle of length L through v in the kept graph.

    Cells follow the side rule d/(delta r); ``margin`` (default 2r) sets the
    interior cells used for the cycle core. Even L uses the cell-path core, with
    a detour construction when v lies outside the interior; odd L replaces a
    two-step path by an odd path through a blue neighbour of v. Odd L below
    ``short_odd`` is refused: an adversary can remove every short odd cycle
    through a vertex.
    """
    g = mask.base
    if not isinstance(g, GeometricGraph) or g.metric is not Metric.CUBE:
        raise ValueError("long_cycle needs a geometric base graph with the cube metric")
    if not 0.5 <= eta < 1:
        raise ValueError("eta must lie in [1/2, 1)")
    if not 0 < eps <= 1 - eta + 1e-12:
        raise ValueError("eps must lie in (0, 1 - eta]")
    n = g.n
    if not 4 <= L <= 2 * eta * n / (1 + eta):
        raise ValueError(f"L={L} outside [4, 2 eta n/(1+eta)]")
    if not 0 <= v < n:
        raise ValueError("v out of range")
    probs = (tuning or ColourTuning()).resolve(eta, eps)
    margin = 2 * g.r if margin is None else margin
    t = tessellate(g.d, "jackson", g.r, delta)
    allowed = t.interior_cells(margin)
    params = {"L": L, "eta": eta, "eps": eps, "delta": delta, "m": t.m, "margin": margin,
              "probabilities": probs}
    if L % 2 == 1 and L < short_odd:
        return BuildFailure("refused", f"odd L={L} below the short-odd bound {short_odd}: the adversary may "
                            "delete every short odd cycle through a vertex", audits={"short_odd": short_odd})
    if not allowed:
        return BuildFailure("interior", f"no cell at distance >= {margin:.4g} from the boundary")
    rng = as_rng(seed)
    col = sample_colouring(g, v, t, probs, rng)
    audits = colouring_audits(mask, col, eta, eps, allowed)
    if strict_audits:
        for name in AUDIT_NAMES:
            if not audits[name]:
                return BuildFailure("audit", f"{name} fails on this instance", audits=audits)
    b = _Builder(mask, col, allowed, forbidden, rng, jackson_bound, jackson_budget, chain_budget)
    try:
        if L % 2 == 0:
            seq, info = b.even(v, L // 2)
        else:
            seq, info = b.odd(v, L)
    except _Failure as exc:
        return BuildFailure(exc.step, exc.reason, where=exc.where, audits=audits)
    audits = dict(audits, **info)
    cert = CycleCertificate(tuple(int(x) for x in seq), through=int(v), kind="long-cycle",
                            params=params, audits=audits)
    if not verify_cycle(mask.kept, cert, through=v, length=L):
        return BuildFailure("verify", "assembled sequence failed verification", audits=audits)
    if set(cert.vertices) & b.forbidden:
        return BuildFailure("verify", "cycle uses a forbidden vertex", audits=audits)
    return cert


def long_cycle_colouring(mask: SubgraphMask, v: int, eta: float = 0.5, eps: float = 0.1, delta: float = 1.0,
                         seed=0, tuning: ColourTuning | None = None) -> Colouring:
    """The colouring long_cycle draws for these arguments (same seed, same draw)."""
    g = mask.base
    t = tessellate(g.d, "jackson", g.r, delta)
    return sample_colouring(g, v, t, (tuning or ColourTuning()).resolve(eta, eps), as_rng(seed))
