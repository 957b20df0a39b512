import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rggres.geom import (Metric, Region, ShapeError, ball_volume, cell_inside_ball, clipped_ball_volume,
                         distance, grid_spanning_path, lens_area, region_volume, tessellate)

unit = st.floats(0.0, 1.0, allow_nan=False)


@pytest.mark.parametrize("p,q,metric,expected", [
    ([0.1], [0.9], "cube", 0.8),
    ([0.1], [0.9], "torus", 0.2),
    ([0.0, 0.0], [0.3, 0.4], "cube", 0.5),
])
def test_distance_examples(p, q, metric, expected):
    assert distance(p, q, metric) == pytest.approx(expected)


def test_distance_dimension_mismatch():
    with pytest.raises(ValueError):
        distance([0.1, 0.2], [0.3], "cube")


@given(st.lists(st.tuples(unit, unit), min_size=3, max_size=3), st.sampled_from(["cube", "torus"]))
def test_distance_is_a_metric(pts, metric):
    a, b, c = (np.array(p) for p in pts)
    dab, dba = distance(a, b, metric), distance(b, a, metric)
    assert dab >= 0 and dab == pytest.approx(dba)
    assert distance(a, c, metric) <= dab + distance(b, c, metric) + 1e-12


def test_torus_distance_never_exceeds_half_diagonal():
    rng = np.random.default_rng(1)
    for _ in range(200):
        p, q = rng.random(3), rng.random(3)
        assert distance(p, q, Metric.TORUS) <= math.sqrt(3) / 2 + 1e-12


@pytest.mark.parametrize("d,expected", [(1, 2.0), (2, math.pi), (3, 4 * math.pi / 3)])
def test_ball_volume_examples(d, expected):
    assert ball_volume(d) == pytest.approx(expected)


def test_ball_volume_recursion():
    # theta_d = 2 pi / d * theta_{d-2}
    for d in range(3, 12):
        assert ball_volume(d) == pytest.approx(2 * math.pi / d * ball_volume(d - 2))


@pytest.mark.parametrize("center,r,expected", [
    ([0.0], 0.3, 0.3),
    ([0.5, 0.5], 0.1, 0.01 * math.pi),
    ([0.0, 0.0], 0.1, 0.0025 * math.pi),
])
def test_clipped_ball_examples(center, r, expected):
    assert clipped_ball_volume(center, r) == pytest.approx(expected, rel=1e-6)


@given(st.integers(1, 3), st.floats(0.01, 0.2), st.data())
def test_interior_clipped_volume_is_full_ball(d, r, data):
    c = [data.draw(st.floats(r + 1e-3, 1 - r - 1e-3)) for _ in range(d)]
    assert clipped_ball_volume(c, r) == pytest.approx(ball_volume(d) * r ** d, rel=1e-5)


@given(st.tuples(unit, unit), st.floats(0.01, 0.6), st.floats(0.01, 0.6))
def test_clipped_volume_monotone_in_radius(c, r1, r2):
    lo, hi = sorted((r1, r2))
    assert clipped_ball_volume(c, lo) <= clipped_ball_volume(c, hi) + 1e-9


def test_clipped_volume_matches_monte_carlo_in_3d():
    rng = np.random.default_rng(7)
    c, r = np.array([0.05, 0.5, 0.95]), 0.3
    pts = rng.random((400_000, 3))
    est = np.mean(np.linalg.norm(pts - c, axis=1) <= r)
    se = math.sqrt(est * (1 - est) / len(pts))
    assert abs(clipped_ball_volume(c, r) - est) < 5 * se


def test_region_volume_examples():
    ann = Region("annulus", ((0.5, 0.5),), (0.05, 0.1))
    assert region_volume(ann, metric=Metric.TORUS) == pytest.approx(3 * math.pi * 0.0025, rel=1e-6)
    same = Region("intersection", ((0.0, 0.0), (0.0, 0.0)), (1.0, 1.0))
    # coincident unit discs, unclipped lens formula
    assert lens_area(1.0, 1.0, 0.0) == pytest.approx(math.pi)
    assert same.contains(np.array([[0.1, 0.1]])).all()
    tangent = Region("intersection", ((0.4, 0.5), (0.6, 0.5)), (0.1, 0.1))
    assert region_volume(tangent) == pytest.approx(0.0, abs=1e-9)


def test_lens_area_against_sampling():
    rng = np.random.default_rng(3)
    r1, r2, dist = 0.3, 0.2, 0.25
    pts = rng.uniform(-0.5, 0.5, (400_000, 2))
    inside = (np.hypot(pts[:, 0], pts[:, 1]) <= r1) & (np.hypot(pts[:, 0] - dist, pts[:, 1]) <= r2)
    est = inside.mean()
    se = math.sqrt(est * (1 - est) / len(pts))
    assert abs(lens_area(r1, r2, dist) - est) < 5 * se


@pytest.mark.parametrize("d,rule,r,m", [(2, "clique", 0.1, 15), (1, "interval", 0.25, 3), (2, "certify", 0.5, 5)])
def test_tessellate_examples(d, rule, r, m):
    t = tessellate(d, rule, r)
    assert t.m == m
    assert t.side == pytest.approx(1 / m)


def test_tessellate_rejects_radius_out_of_range():
    with pytest.raises(ValueError):
        tessellate(2, "clique", 2.0)


@given(st.integers(1, 3), st.floats(0.05, 0.9), st.data())
def test_clique_cell_lies_inside_ball(d, r, data):
    if r > math.sqrt(d):
        return
    t = tessellate(d, "clique", r)
    p = np.array([data.draw(unit) for _ in range(d)])
    cid = int(t.cell_of(p[None, :])[0])
    lo = t.lower_corner(cid)
    for corner in itertools.product(*[(x, x + t.side) for x in lo]):
        assert np.linalg.norm(np.array(corner) - p) <= r + 1e-12
    assert cell_inside_ball(t, cid, p, r)


def test_boundary_point_goes_to_smallest_cell():
    t = tessellate(1, "explicit", m=4)
    assert int(t.cell_of(np.array([[0.25]]))[0]) == 0


@pytest.mark.parametrize("shape", [(1, 3), (2, 2), (3, 3), (4, 5)])
def test_grid_path_examples(shape):
    t = tessellate(2, "explicit", m=max(shape))
    cells = [i * t.m + j for i in range(shape[0]) for j in range(shape[1])]
    path = grid_spanning_path(t, restrict=cells)
    assert sorted(path) == sorted(cells)
    for a, b in zip(path, path[1:]):
        ia, ib = t.unflat(a), t.unflat(b)
        assert np.abs(np.asarray(ia) - np.asarray(ib)).sum() == 1
    if shape == (1, 3):
        assert path == cells


@given(st.integers(1, 3), st.integers(1, 5))
def test_full_grid_path_visits_every_cell_once(d, m):
    t = tessellate(d, "explicit", m=m)
    path = grid_spanning_path(t)
    assert sorted(path) == list(range(t.n_cells))
    assert all(t.adjacent(a, b) for a, b in zip(path, path[1:]))


def test_grid_path_rejects_non_box():
    t = tessellate(2, "explicit", m=3)
    with pytest.raises(ShapeError):
        grid_spanning_path(t, restrict=[0, 1, 3])
