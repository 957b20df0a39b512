"""Double-annulus cut in two dimensions and its parameter solver."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from ..geom import Metric, Region, region_volume
from ..graph import GeometricGraph
from .cuts import PreconditionError
from .report import AttackReport, make_report


class InfeasibleError(ValueError):
    pass


def zeta(n: int) -> float:
    return math.sqrt(math.log(n) / n)


def t_A(A: float) -> float:
    """Positive root of pi A^2 (t^2 + 2t) = 1."""
    return math.sqrt(1.0 + 1.0 / (math.pi * A * A)) - 1.0


def f_nu(nu: float) -> float:
    """(1+nu) log(e/(1+nu)); decreasing on [0, inf) with f(0) = 1."""
    return (1.0 + nu) * (1.0 - math.log1p(nu))


def c_value(A: float, C: float, t: float, nu: float) -> float:
    return 1.0 - math.pi * A * A * (t * t + 2 * t) - 4 * math.pi * C * (A - C) * (1.0 - f_nu(nu))


def nu_t(A: float, C: float, t: float, tol: float = 1e-15) -> float:
    """Unique nonnegative root of c(A, C, t, .) by bisection."""
    if c_value(A, C, t, 0.0) <= 0:
        return 0.0
    lo, hi = 0.0, 1.0
    while c_value(A, C, t, hi) > 0:
        hi *= 2
    while hi - lo > tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if c_value(A, C, t, mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def region_sizes(A: float, C: float, t: float, angle: float = 0.0):
    """|R1(y)|, |R2(y,t)|, |R1(z)|, |R2(z,t)| with y on the inner and z on the
    outer circle, in units where zeta is rescaled to fit the unit square."""
    scale = 0.45 / ((1 + t) * A + C)
    x = (0.5, 0.5)
    u = (math.cos(angle), math.sin(angle))
    y = (0.5 + A * scale * u[0], 0.5 + A * scale * u[1])
    z = (0.5 + (1 + t) * A * scale * u[0], 0.5 + (1 + t) * A * scale * u[1])
    rho, inner, outer = C * scale, A * scale, (1 + t) * A * scale
    r1y = region_volume(Region("intersection", (y, x), (rho, inner)))
    r2y = region_volume(Region("difference", (y, x), (rho, outer)))
    r1z = region_volume(Region("intersection", (z, x), (rho, inner)))
    r2z = region_volume(Region("difference", (z, x), (rho, outer)))
    return r1y, r2y, r1z, r2z


def margin_from_sizes(sizes, nu: float) -> float:
    r1y, r2y, r1z, r2z = sizes
    # an empty far region makes that inequality hold with any margin
    e1 = ((1 + nu) * r1y / r2y - 1) / 10 if r2y > 0 else math.inf
    e2 = (r2z / ((1 + nu) * r1z) - 1) / 10 if r1z > 0 else math.inf
    return min(e1, e2)


@dataclass(frozen=True)
class AnnulusParams:
    C: float
    A: float
    t: float
    nu: float
    eps_margin: float
    t_A: float
    nu_t: float
    zeta: float | None = None

    def Z(self, t: float | None = None) -> float:
        t = self.t if t is None else t
        return ((1 + t) * self.A + 2 * self.C) * (self.zeta or 1.0)


def solve_annulus_params(C: float, A: float, grid: int = 40, n: int | None = None) -> AnnulusParams:
    """Scan (t, nu) for the largest margin eps in both region inequalities."""
    if C <= 0 or A < 2 * C:
        raise ValueError("need C > 0 and A >= 2C")
    ta = t_A(A)
    best = None
    for i in range(1, grid + 1):
        t = ta * i / (grid + 1)
        nt = nu_t(A, C, t)
        sizes = region_sizes(A, C, t)
        for j in range(1, grid + 1):
            nu = nt * j / (grid + 1)
            eps = margin_from_sizes(sizes, nu)
            if not math.isfinite(eps):
                continue  # annulus wider than the radius: nothing to cut
            if best is None or eps > best[0]:
                best = (eps, t, nu, nt)
    if best is None or best[0] <= 0:
        raise InfeasibleError(f"no feasible (t, nu) found at A={A}, C={C}")
    eps, t, nu, nt = best
    return AnnulusParams(C, A, t, nu, eps, ta, nt, zeta(n) if n else None)


def smallest_feasible_A(C: float, A_grid=None, grid: int = 40) -> AnnulusParams:
    if A_grid is None:
        A_grid = [2 * C * k for k in (1, 1.5, 2, 3, 4, 6, 8, 12, 16, 25, 50, 100)]
    for A in A_grid:
        try:
            return solve_annulus_params(C, A, grid)
        except InfeasibleError:
            continue
    raise InfeasibleError(f"no feasible A on the grid for C={C}")


def annulus_cut(g: GeometricGraph, params: AnnulusParams, step: float | None = None) -> AttackReport:
    """Scan centres for an empty outer annulus around a dense inner one and cut across it."""
    if g.d != 2 or g.metric is not Metric.CUBE:
        raise PreconditionError("annulus_cut needs d=2 and the cube metric")
    n = g.n
    z = zeta(n)
    A, C, t, nu = params.A, params.C, params.t, params.nu
    L = math.log(n)
    inner, outer = A * z, (1 + t) * A * z
    Zt = ((1 + t) * A + 2 * C) * z
    ZtA = ((1 + params.t_A) * A + 2 * C) * z
    step = z / 2 if step is None else step
    info = {"A": A, "C": C, "t": t, "nu": nu, "zeta": z}
    if ZtA >= 0.5:
        return make_report("annulus", g, np.ones(g.graph.m, bool), params=info, found=False)
    axis = np.arange(ZtA, 1 - ZtA + 1e-15, step)
    cx, cy = np.meshgrid(axis, axis, indexing="ij")
    centres = np.stack([cx.ravel(), cy.ravel()], axis=1)
    tree = cKDTree(g.points)

    def within(rad):
        return tree.query_ball_point(centres, rad, return_length=True)

    n_inner = within(inner)
    n_outer = within(outer)
    E = n_outer == n_inner
    F_count = n_inner - within(max((A - 2 * C) * z, 0.0))
    F = (F_count >= (1 + nu) * 4 * math.pi * C * (A - C) * L) & (F_count <= L * L)
    G_count = within(Zt) - n_outer
    G = np.abs(G_count - 4 * math.pi * (C + (1 + t) * A) * C * L) <= L ** (2 / 3)
    hits = np.nonzero(E & F & G)[0]
    audit = {"centres": len(centres), "E": int(E.sum()), "EF": int((E & F).sum()), "EFG": len(hits)}
    if len(hits) == 0:
        return make_report("annulus", g, np.ones(g.graph.m, bool), audit, params=info, found=False)
    x = centres[hits[0]]
    keep = annulus_keep(g, x, inner, outer)
    audit["x"] = np.asarray(x)
    return make_report("annulus", g, keep, audit, params=info)


def annulus_keep(g: GeometricGraph, x, inner: float, outer: float) -> np.ndarray:
    dist = g.dist_from(x)
    ins = dist <= inner
    out = dist > outer
    e = g.graph.edges
    cross = (ins[e[:, 0]] & out[e[:, 1]]) | (ins[e[:, 1]] & out[e[:, 0]])
    return ~cross
