import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_graph
from rggres.adversary import (AnnulusParams, InfeasibleError, PreconditionError, annulus_cut, budget_deletion,
                              c_value, empty_interval_cut, nu_t, solve_annulus_params, stiebitz_cut, strip_count,
                              strip_cut, t_A, triangle_killer_cut, triangles_through, tripartite_cut)
from rggres.adversary.annulus import annulus_keep, zeta
from rggres.graph import Graph, SubgraphMask, check_alpha_subgraph, complete_graph, cycle_graph
from rggres.rgg import geometric_graph, sample_rgg


def recomputed_alpha(mask):
    deg = mask.graph.degree
    kept = np.bincount(mask.graph.edges[mask.keep].ravel(), minlength=mask.graph.n)
    ratios = np.where(deg > 0, kept / np.maximum(deg, 1), 1.0)
    return float(ratios.min()) if len(ratios) else 1.0


def assert_report_consistent(rep):
    assert rep.mask.keep.shape == (rep.mask.graph.m,)
    assert rep.achieved_alpha == pytest.approx(recomputed_alpha(rep.mask))
    assert sum(rep.component_sizes) == rep.mask.graph.n


# -- stiebitz -------------------------------------------------------------------

def test_stiebitz_k4():
    rep = stiebitz_cut(complete_graph(4), seed=0)
    kept = rep.mask.kept_degree
    assert (kept >= 1).all()
    assert sorted(np.bincount(rep.witness["partition"]).tolist()) == [2, 2]


def test_stiebitz_c4_split():
    rep = stiebitz_cut(cycle_graph(4), seed=3)
    assert rep.disconnected
    assert (rep.mask.kept_degree >= 0).all()
    assert_report_consistent(rep)


@given(st.integers(4, 60), st.floats(0.05, 0.9), st.integers(0, 2 ** 31))
def test_stiebitz_flags_are_accurate(n, p, seed):
    g = random_graph(n, p, np.random.default_rng(seed))
    rep = stiebitz_cut(g, seed=seed)
    part = rep.witness["partition"]
    assert 0 < part.sum() < n
    same = rep.mask.kept_degree
    assert rep.witness["guarantee"] == bool((same >= np.ceil(g.degree / 2) - 1).all())
    assert rep.witness["local_max"] == bool((same >= g.degree - same).all())
    # every kept edge is internal to a part
    e = g.edges[rep.mask.keep]
    assert (part[e[:, 0]] == part[e[:, 1]]).all()
    assert_report_consistent(rep)


@pytest.mark.parametrize("n", [5, 8, 13, 20])
def test_stiebitz_complete_graph_meets_guarantee(n):
    g = complete_graph(n)
    rep = stiebitz_cut(g, seed=n)
    assert rep.witness["guarantee"]
    assert (rep.mask.kept_degree >= math.ceil((n - 1) / 2) - 1).all()


@pytest.mark.parametrize("seed", range(10))
def test_stiebitz_sparse_graphs_reach_local_max(seed):
    rng = np.random.default_rng(seed)
    g = random_graph(200, 3 / 199, rng)
    rep = stiebitz_cut(g, seed=seed)
    same = rep.mask.kept_degree
    assert rep.witness["local_max"] and (same >= g.degree - same).all()


def test_stiebitz_random_geometric_alpha():
    n = 2000
    r = 3 * math.sqrt(math.log(n) / n)
    for seed in range(3):
        rep = stiebitz_cut(sample_rgg(n, 2, r, seed=seed), seed=seed)
        assert rep.achieved_alpha >= 0.4
        assert rep.witness["local_max"]


# -- strips ---------------------------------------------------------------------

def test_strip_count_example():
    assert strip_count(0.1) == 3
    assert 0.2 <= 1 / 3 <= 0.4


def test_strip_all_points_in_one_strip():
    pts = np.column_stack([np.linspace(0.01, 0.3, 50), np.linspace(0, 1, 50)])
    g = geometric_graph(pts, 0.1)
    rep = strip_cut(g)
    assert rep.mask.keep.all() and rep.achieved_alpha == 1.0


def test_strip_exempt_for_large_radius():
    rep = strip_cut(sample_rgg(100, 2, 0.3, seed=0))
    assert rep.witness["exempt"] and rep.mask.keep.all()


@pytest.mark.parametrize("seed", range(3))
def test_strip_components_stay_in_strips(seed):
    g = sample_rgg(3000, 2, 0.05, seed=seed)
    rep = strip_cut(g)
    idx = rep.witness["strip_index"]
    e = g.edges[rep.mask.keep]
    assert (idx[e[:, 0]] == idx[e[:, 1]]).all()
    lab = rep.mask.kept.components()
    for c in np.unique(lab):
        assert len(np.unique(idx[lab == c])) == 1
    width = rep.witness["width"]
    assert 2 * g.r <= width <= 4 * g.r
    assert_report_consistent(rep)


# -- empty interval -------------------------------------------------------------

def test_empty_interval_injected_gap():
    n, r = 400, 0.01
    rng = np.random.default_rng(0)
    xs = rng.random(3 * n)
    xs = xs[np.abs(xs - 0.5) > r][:n]
    g = geometric_graph(xs[:, None], r)
    rep = empty_interval_cut(g, 0.1)
    assert rep.found and rep.disconnected
    left, right = rep.witness["left_side_max"], rep.witness["right_side_min"]
    x = g.points[:, 0]
    e = g.edges[rep.mask.keep]
    lo, hi = np.minimum(x[e[:, 0]], x[e[:, 1]]), np.maximum(x[e[:, 0]], x[e[:, 1]])
    assert not np.any((lo <= left) & (hi >= right))
    # split exactly at the gap: the two sides are separated
    lab = rep.mask.kept.components()
    assert not set(lab[x <= left]) & set(lab[x >= right])


def test_empty_interval_dense_instance_has_no_witness():
    g = geometric_graph(np.linspace(0, 1, 5000)[:, None], 0.002)
    rep = empty_interval_cut(g, 0.1)
    assert not rep.found and rep.mask.keep.all()


def test_empty_interval_requires_1d():
    with pytest.raises(PreconditionError):
        empty_interval_cut(sample_rgg(50, 2, 0.2, seed=0), 0.1)


def test_empty_interval_success_passes_alpha_check():
    n, eps = 20000, 0.1
    r = math.log(n) / (8 * eps * n) * 2
    hits = 0
    for seed in range(10):
        rep = empty_interval_cut(sample_rgg(n, 1, r, seed=seed), eps)
        if rep.found and rep.disconnected:
            hits += 1
            assert_report_consistent(rep)
    assert hits >= 1


# -- annulus --------------------------------------------------------------------

def bisect_root(f, lo, hi):
    for _ in range(200):
        mid = (lo + hi) / 2
        if f(lo) * f(mid) <= 0:
            hi = mid
        else:
            lo = mid
    return (lo + hi) / 2


def test_t_A_closed_form_against_bisection():
    assert t_A(1.0) == pytest.approx(0.14818, abs=1e-5)
    for A in (1.0, 2.0, 5.0, 50.0):
        root = bisect_root(lambda t: math.pi * A * A * (t * t + 2 * t) - 1, 0.0, 1.0)
        assert t_A(A) == pytest.approx(root, abs=1e-12)


@given(st.floats(0.1, 5.0), st.floats(2.0, 20.0))
def test_c_vanishes_at_t_A(C, k):
    A = k * C
    assert abs(c_value(A, C, t_A(A), 0.0)) < 1e-9


@pytest.mark.parametrize("A", [50.0, 100.0, 200.0])
def test_nu0_asymptotics(A):
    nu0 = nu_t(A, 1.0, 0.0)
    assert abs(c_value(A, 1.0, 0.0, nu0)) < 1e-9
    assert 0.9 <= nu0 * math.sqrt(2 * math.pi * (A - 1.0)) <= 1.1


def test_zeta_at_a_million():
    assert zeta(10 ** 6) == pytest.approx(3.717e-3, rel=1e-3)


def test_solve_rejects_bad_constants():
    with pytest.raises(ValueError):
        solve_annulus_params(1.0, 1.5)


def test_solve_returns_feasible_margin():
    p = solve_annulus_params(1.0, 2.0, grid=20)
    assert p.eps_margin > 0 and 0 < p.t < p.t_A and 0 < p.nu < p.nu_t


def lattice_annulus_instance(p, boost=0.3, n0=20000):
    """Square lattice with an empty ring and a boosted inner annulus, centred on a scan centre."""
    C, A = p.C, p.A

    def build(n):
        z = zeta(n)
        h = 1 / math.sqrt(n)
        axis1 = (np.arange(int(1 / h)) + 0.5) * h
        X, Y = np.meshgrid(axis1, axis1)
        pts = np.stack([X.ravel(), Y.ravel()], 1)
        lo_scan = ((1 + p.t_A) * A + 2 * C) * z
        scan = np.arange(lo_scan, 1 - lo_scan + 1e-15, z / 2)
        x = np.full(2, scan[np.argmin(np.abs(scan - 0.5))])
        d = np.linalg.norm(pts - x, axis=1)
        pts = pts[(d <= A * z) | (d > (1 + p.t) * A * z)]
        lo, hi = (A - 2 * C) * z, A * z
        k = int(round(boost * n * math.pi * (hi ** 2 - lo ** 2)))
        ang = np.linspace(0, 2 * math.pi, k, endpoint=False)
        rad = np.sqrt(np.linspace(lo ** 2, hi ** 2, k + 2)[1:-1])
        np.random.default_rng(0).shuffle(rad)
        return np.vstack([pts, x + np.stack([rad * np.cos(ang), rad * np.sin(ang)], 1)]), x

    pts, _ = build(n0)
    for _ in range(3):
        pts, x = build(len(pts))
    return geometric_graph(pts, C * zeta(len(pts))), x


def test_annulus_synthetic_instance():
    p = solve_annulus_params(0.5, 1.0, grid=20)
    g, x = lattice_annulus_instance(p)
    rep = annulus_cut(g, p)
    assert rep.found and rep.disconnected
    assert check_alpha_subgraph(rep.mask, 0.5 + p.eps_margin / 2).ok
    z = zeta(g.n)
    d = g.dist_from(rep.witness["x"])
    inside, outside = d <= p.A * z, d > (1 + p.t) * p.A * z
    e = g.edges[rep.mask.keep]
    assert not np.any((inside[e[:, 0]] & outside[e[:, 1]]) | (inside[e[:, 1]] & outside[e[:, 0]]))
    assert_report_consistent(rep)


def test_annulus_dense_instance_has_no_witness():
    p = solve_annulus_params(0.5, 1.0, grid=10)
    g = sample_rgg(20000, 2, 0.5 * zeta(20000), seed=1)
    rep = annulus_cut(g, p)
    assert not rep.found and rep.mask.keep.all()


def test_annulus_keep_cuts_only_across():
    g = sample_rgg(500, 2, 0.1, seed=2)
    keep = annulus_keep(g, (0.5, 0.5), 0.2, 0.25)
    d = g.dist_from((0.5, 0.5))
    e = g.edges[~keep]
    assert ((d[e[:, 0]] <= 0.2) ^ (d[e[:, 1]] <= 0.2)).all()


# -- tripartite -----------------------------------------------------------------

def has_k4(g):
    adj = g.adjacency_sets()
    for a in range(g.n):
        for b in adj[a]:
            for c in adj[a] & adj[b]:
                if adj[a] & adj[b] & adj[c]:
                    return True
    return False


def test_tripartite_k4_loses_an_edge():
    for seed in range(10):
        rep = tripartite_cut(complete_graph(4), seed=seed)
        assert rep.mask.deleted_count() >= 1
        assert not has_k4(rep.mask.kept)


@given(st.integers(3, 30), st.floats(0.2, 1.0), st.integers(0, 2 ** 31))
def test_tripartite_is_k4_free(n, p, seed):
    g = random_graph(n, p, np.random.default_rng(seed))
    rep = tripartite_cut(g, seed=seed)
    col = rep.witness["colouring"]
    e = g.edges[rep.mask.keep]
    assert (col[e[:, 0]] != col[e[:, 1]]).all()
    assert not has_k4(rep.mask.kept) and rep.witness["k4_free"]
    assert_report_consistent(rep)


def test_tripartite_mean_alpha_fraction():
    n = 3000
    g = sample_rgg(n, 2, 6 * math.sqrt(math.log(n) / n), seed=0)
    fr = [rep.mask.kept.m / g.graph.m for rep in (tripartite_cut(g, seed=s) for s in range(10))]
    assert np.mean(fr) == pytest.approx(2 / 3, abs=0.05)


# -- triangle killer ------------------------------------------------------------

def test_killer_radius_1d():
    from rggres.adversary.cuts import killer_radius
    assert killer_radius(1.0, 0.05, 1) == pytest.approx(0.4)


def test_killer_isolated_vertex():
    pts = np.array([[0.5, 0.5], [0.9, 0.9], [0.91, 0.9]])
    g = geometric_graph(pts, 0.05)
    rep = triangle_killer_cut(g, 0, 0.05)
    assert rep.mask.keep.all() and triangles_through(rep.mask.kept, 0) == 0


def test_empty_interval_warns_outside_regime():
    g = geometric_graph(np.linspace(0, 1, 200)[:, None], 0.2)
    with pytest.warns(UserWarning):
        empty_interval_cut(g, 0.1)


def test_killer_boundary_precondition():
    g = sample_rgg(200, 2, 0.1, seed=0)
    v = int(np.argmin(g.points[:, 0]))
    with pytest.raises(PreconditionError):
        triangle_killer_cut(g, v, 0.05)


@pytest.mark.parametrize("seed", range(5))
def test_killer_removes_all_triangles_at_v(seed):
    n = 3000
    g = sample_rgg(n, 2, 3 * math.sqrt(math.log(n) / n), seed=seed)
    v = int(np.argmin(np.linalg.norm(g.points - 0.5, axis=1)))
    rep = triangle_killer_cut(g, v, 0.02)
    h = rep.mask.kept
    nb = set(h.neighbors(v).tolist())
    adj = h.adjacency_sets()
    assert not any(adj[a] & nb for a in nb)
    assert_report_consistent(rep)


# -- degree budget --------------------------------------------------------------

@given(st.floats(0.0, 0.6), st.sampled_from(["farthest", "random"]), st.integers(0, 2 ** 31))
def test_budget_deletion_respects_budget(budget, order, seed):
    g = sample_rgg(300, 2, 0.15, seed=seed % 1000)
    rep = budget_deletion(g, budget, order, seed=seed)
    lost = g.graph.degree - rep.mask.kept_degree
    assert (lost <= np.floor(budget * g.graph.degree + 1e-9)).all()
    assert check_alpha_subgraph(rep.mask, max(0.0, 1 - budget - 1e-9)).ok


def test_report_text_is_structured():
    rep = strip_cut(sample_rgg(500, 2, 0.05, seed=1))
    text = rep.to_text()
    assert text.startswith("strategy strip\n")
    assert "achieved_alpha" in text and "components " in text


def test_k4_audit_detects_k4():
    from rggres.adversary.cuts import _k4_samples
    assert _k4_samples(complete_graph(5), [0, 1], 10, np.random.default_rng(0)) == 20
    assert _k4_samples(cycle_graph(6), [0], 10, np.random.default_rng(0)) == 0
