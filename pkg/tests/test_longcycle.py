import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rggres.adversary import budget_deletion
from rggres.builders import (BLUE, GREEN, RED, BuildFailure, ColourTuning, long_cycle, long_cycle_colouring)
from rggres.geom import Metric
from rggres.graph import SubgraphMask, verify_cycle
from rggres.rgg import sample_rgg

N = 5000
R = 6 * math.sqrt(math.log(N) / N)
TUNING = ColourTuning(0.37, 0.12)
KW = dict(delta=1.5, tuning=TUNING, margin=0)


@pytest.fixture(scope="module")
def base():
    return SubgraphMask(sample_rgg(N, 2, R, seed=11))


def centre_vertex(g):
    return int(np.argmin(((g.points - 0.5) ** 2).sum(axis=1)))


def test_colour_tuning_defaults():
    b, r, g = ColourTuning().resolve(0.5, 0.1)
    assert b == pytest.approx(1 / 3 + 0.1 / 40)
    assert g == pytest.approx(0.1 / 40)
    assert b + r + g == pytest.approx(1.0)
    with pytest.raises(ValueError):
        ColourTuning(0.9, 0.2).resolve(0.5, 0.1)


def test_shortest_even_cycle_in_interior():
    # default cell side and 2r margin need a radius small against the unit square
    g = sample_rgg(N, 2, 3 * math.sqrt(math.log(N) / N), seed=0)
    v = centre_vertex(g)
    res = long_cycle(SubgraphMask(g), v, 4, seed=0)
    assert verify_cycle(g.graph, res, through=v, length=4)


@pytest.mark.parametrize("L", [10, 11, 100, 2 * N // 3 - 2])
def test_lengths_through_random_vertex(base, L):
    v = int(np.random.default_rng(L).integers(N))
    res = long_cycle(base, v, L, seed=L, **KW)
    assert res, str(res)
    assert verify_cycle(base.kept, res, through=v, length=L)


def test_forbidden_vertices_are_avoided(base):
    g = base.base
    v = centre_vertex(g)
    forbidden = np.nonzero(np.linalg.norm(g.points - g.points[v], axis=1) < 0.08)[0]
    forbidden = forbidden[forbidden != v][::2]
    res = long_cycle(base, v, 60, seed=1, forbidden=forbidden.tolist(), **KW)
    assert res and not set(res.vertices) & set(forbidden.tolist())


def test_short_odd_lengths_are_refused(base):
    res = long_cycle(base, 0, 5, **KW)
    assert isinstance(res, BuildFailure) and res.step == "refused"


def test_argument_checks(base):
    with pytest.raises(ValueError):
        long_cycle(base, 0, 3)
    with pytest.raises(ValueError):
        long_cycle(base, 0, N)
    with pytest.raises(ValueError):
        long_cycle(base, 0, 10, eta=0.4)
    with pytest.raises(ValueError):
        long_cycle(base, 0, 10, eta=0.5, eps=0.6)
    with pytest.raises(ValueError):
        long_cycle(base, N, 10)
    torus = SubgraphMask(sample_rgg(200, 2, 0.3, Metric.TORUS, seed=0))
    with pytest.raises(ValueError):
        long_cycle(torus, 0, 10)


def test_no_interior_cell():
    m = SubgraphMask(sample_rgg(400, 2, 0.3, seed=0))
    res = long_cycle(m, 0, 10)
    assert isinstance(res, BuildFailure) and res.step == "interior"


def test_colouring_roles(base):
    g = base.base
    v = 17
    col = long_cycle_colouring(base, v, seed=3, delta=1.5, tuning=TUNING)
    t = col.tess
    assert col.colour[v] == BLUE
    assert np.all(col.red_cell[col.colour != RED] == -1)
    assert np.all(col.green_pair[col.colour != GREEN] == -1)
    # an attached red vertex sees its whole cell
    for x in np.nonzero(col.red_cell >= 0)[0][:300]:
        lo = t.lower_corner(int(col.red_cell[x]))[0]
        far = np.maximum(np.abs(g.points[x] - lo), np.abs(g.points[x] - lo - t.side))
        assert np.sqrt((far ** 2).sum()) <= g.r + 1e-12
    # green pairs share a face
    a, b = col.pairs[:, 0], col.pairs[:, 1]
    ca = np.array([t.lower_corner(int(x))[0] for x in a])
    cb = np.array([t.lower_corner(int(x))[0] for x in b])
    assert np.allclose(np.abs(ca - cb).sum(axis=1), t.side)


def test_colouring_is_reproducible(base):
    a = long_cycle_colouring(base, 5, seed=9, delta=1.5)
    b = long_cycle_colouring(base, 5, seed=9, delta=1.5)
    assert np.array_equal(a.colour, b.colour) and np.array_equal(a.green_pair, b.green_pair)


@pytest.mark.parametrize("L", [100, 1000])
def test_greens_per_pair_at_most_two(base, L):
    v = centre_vertex(base.base)
    res = long_cycle(base, v, L, seed=4, **KW)
    col = long_cycle_colouring(base, v, seed=4, delta=1.5, tuning=TUNING)
    gp = col.green_pair[np.array(res.vertices)]
    counts = np.bincount(gp[gp >= 0], minlength=len(col.pairs))
    assert counts.max(initial=0) <= 2


@settings(max_examples=15)
@given(st.integers(0, N - 1), st.integers(4, 400), st.integers(0, 2 ** 31))
def test_returned_cycles_always_verify(base, v, L, seed):
    res = long_cycle(base, v, L, seed=seed, **KW)
    if res:
        assert verify_cycle(base.kept, res, through=v, length=L)
    else:
        assert res.step


def test_on_a_resilient_subgraph():
    g = sample_rgg(N, 2, R, seed=2)
    mask = budget_deletion(g, 0.2, "random", seed=2).mask
    v = centre_vertex(g)
    res = long_cycle(mask, v, 50, eta=0.75, eps=0.05, seed=2, **KW)
    assert res, str(res)
    assert verify_cycle(mask.kept, res, through=v, length=50)
