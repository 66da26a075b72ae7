import itertools
import math

import numpy as np
import pytest

from bcclab.channels import BroadcastPair, Channel, CompoundBCC, random_compound
from bcclab.errors import DimensionMismatch, DomainError, EmptySet
from bcclab.info import AuxiliaryInput, random_aux
from bcclab.regions import (
    GridSpec,
    RateRectangle,
    _ProductCache,
    aux_from_grid,
    capacity_region_approx,
    convex_hull,
    grid_size,
    hull_contains,
    iter_aux_grid,
    rate_rectangle,
    rectangles_batch,
    region_Mn,
    simplex_lattice,
)


def _identity_uniform(x=2):
    return CompoundBCC((BroadcastPair(Channel(np.eye(x)), Channel(np.full((x, x), 1 / x))),))


def _plain_aux(x=2):
    return AuxiliaryInput(np.array([1.0]), Channel(np.full((1, x), 1 / x)), Channel(np.eye(x)), 1)


def test_rate_rectangle_identity_vs_uniform():
    r = rate_rectangle(_identity_uniform(), _plain_aux())
    assert r.a0 == pytest.approx(0.0, abs=1e-12)
    assert r.a1 == pytest.approx(1.0, abs=1e-12)


def test_rate_rectangle_same_channels_no_secrecy(rng):
    for _ in range(10):
        c0 = random_compound(rng, 1, 3, 3, 3)
        w = c0.states[0].w
        c = CompoundBCC((BroadcastPair(w, w),))
        r = rate_rectangle(c, random_aux(rng, 3, 1, 2, 3))
        assert r.a1 == pytest.approx(0.0, abs=1e-12)


def test_rate_rectangle_dimension_check(rng):
    with pytest.raises(DimensionMismatch):
        rate_rectangle(_identity_uniform(), random_aux(rng, 3, 1))


def test_adding_a_state_never_grows_rectangle(rng):
    for _ in range(20):
        c = random_compound(rng, 2, 2, 3, 2)
        more = c.extend(random_compound(rng, 1, 2, 3, 2).states[0])
        aux = random_aux(rng, 2, 1, 2, 3)
        r1, r2 = rate_rectangle(c, aux), rate_rectangle(more, aux)
        assert r2.a0 <= r1.a0 + 1e-12 and r2.a1 <= r1.a1 + 1e-12


@pytest.mark.parametrize("n", [1, 2])
def test_batch_matches_scalar(rng, n):
    c = random_compound(rng, 2, 2, 2, 3)
    products = _ProductCache(c)(n)
    auxes = [random_aux(rng, 2**n, n, 2, 3) for _ in range(12)]
    p_u = np.stack([a.p_u for a in auxes])
    p_vu = np.stack([a.p_v_given_u.matrix for a in auxes])
    enc = np.stack([a.encoder.matrix for a in auxes])
    batch = rectangles_batch(products, p_u, p_vu, enc, n)
    for row, aux in zip(batch, auxes):
        r = rate_rectangle(c, aux)
        assert row == pytest.approx([r.a0, r.a1], abs=1e-12)


def test_rectangle_contains():
    r = RateRectangle(1.0, 0.5)
    assert r.contains((0.3, 0.5)) and not r.contains((1.1, 0.0))


def test_simplex_lattice_counts_and_order():
    for dim, k in [(1, 4), (2, 4), (3, 8), (4, 3)]:
        pts = simplex_lattice(dim, k)
        assert len(pts) == math.comb(k + dim - 1, dim - 1)
        assert np.allclose(pts.sum(axis=1), 1.0)
        num = np.rint(pts * k).astype(int).tolist()
        assert num == sorted(num)
    with pytest.raises(DomainError):
        simplex_lattice(0, 4)


def test_grid_spec_validation():
    with pytest.raises(EmptySet):
        GridSpec(resolution=0)
    with pytest.raises(EmptySet):
        GridSpec(max_aux=0)


def test_grid_ids_round_trip():
    grid = GridSpec(2, u_size=2, v_size=2)
    seen = []
    for ids, p_u, p_vu, enc in iter_aux_grid(grid, 2, 1):
        for i, aid in enumerate(ids):
            aux = aux_from_grid(grid, 2, 1, aid)
            assert np.allclose(aux.p_u, p_u[i])
            assert np.allclose(aux.p_v_given_u.matrix, p_vu[i])
            assert np.allclose(aux.encoder.matrix, enc[i])
        seen.extend(ids)
    assert seen == list(range(grid_size(grid, 2, 1)))


def test_grid_subsampling_deterministic():
    grid = GridSpec(8, max_aux=500, seed=3)
    a = [i for ids, *_ in iter_aux_grid(grid, 2, 1) for i in ids]
    b = [i for ids, *_ in iter_aux_grid(grid, 2, 1) for i in ids]
    assert a == b and a == sorted(set(a)) and 0 < len(a) <= 500


def test_convex_hull_examples():
    square = [(0, 0), (1, 0), (1, 1), (0, 1), (0.5, 0.5), (0.5, 0)]
    hull = convex_hull(square)
    assert sorted(map(tuple, hull.tolist())) == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert convex_hull([(1, 2)]).tolist() == [[1, 2]]
    with pytest.raises(EmptySet):
        convex_hull(np.zeros((0, 2)))


def test_convex_hull_is_ccw_and_idempotent(rng):
    pts = rng.random((50, 2))
    hull = convex_hull(pts)
    x, y = hull[:, 0], hull[:, 1]
    assert 0.5 * (x @ np.roll(y, -1) - y @ np.roll(x, -1)) > 0
    assert np.array_equal(convex_hull(hull), hull)


def test_hull_containment_matches_half_planes(rng):
    hull = convex_hull(rng.random((30, 2)))
    e = np.roll(hull, -1, axis=0) - hull
    for p in rng.random((100, 2)) * 1.4 - 0.2:
        r = p - hull
        inside = bool(np.all(e[:, 0] * r[:, 1] - e[:, 1] * r[:, 0] >= 0))
        assert hull_contains(hull, p) == inside


def test_region_identity_uniform_reaches_secret_key_corner():
    reg = region_Mn(_identity_uniform(), 1, GridSpec(4, u_size=1, v_size=2))
    best = reg.points[np.argmin(np.abs(reg.points - [0.0, 1.0]).sum(axis=1))]
    assert best == pytest.approx([0.0, 1.0], abs=1e-12)
    assert reg.label == "inner approximation"
    assert reg.contains((0.0, 1.0)) and not reg.contains((0.5, 1.0))


def test_grid_refinement_is_monotone(rng):
    c = random_compound(rng, 2, 2, 2, 2)
    coarse = region_Mn(c, 1, GridSpec(2, u_size=2, v_size=2))
    fine = region_Mn(c, 1, GridSpec(4, u_size=2, v_size=2))
    assert not fine.grid_spec["subsampled"]
    for p in coarse.hull:
        assert fine.contains(p, tol=1e-9)


def test_capacity_hull_grows_with_n_max(rng):
    c = random_compound(rng, 1, 2, 2, 2)
    grid = GridSpec(2, u_size=2, v_size=2)
    one = capacity_region_approx(c, 1, grid)
    two = capacity_region_approx(c, 2, grid)
    assert two.n_values == (1, 2)
    for p in one.hull:
        assert two.contains(p, tol=1e-9)


def test_region_vertices_respect_entropy_bounds(rng):
    c = random_compound(rng, 2, 3, 2, 3)
    reg = region_Mn(c, 1, GridSpec(3, max_aux=2000))
    assert np.all(reg.hull >= -1e-12)
    assert np.all(reg.hull[:, 0] <= math.log2(2) + 1e-9)
    assert np.all(reg.hull[:, 1] <= math.log2(2) + 1e-9)
    assert reg.grid_spec["enumerated"] == len(reg.points)


def test_region_points_match_scalar_path(rng):
    c = random_compound(rng, 2, 2, 2, 2)
    grid = GridSpec(2, u_size=2, v_size=2)
    reg = region_Mn(c, 1, grid)
    for k in rng.choice(len(reg.points), 15, replace=False):
        r = rate_rectangle(c, aux_from_grid(grid, 2, 1, reg.aux_ids[k]))
        assert reg.points[k] == pytest.approx([r.a0, r.a1], abs=1e-12)


def test_region_rejects_bad_n():
    with pytest.raises(DomainError):
        region_Mn(_identity_uniform(), 0)
    with pytest.raises(DomainError):
        capacity_region_approx(_identity_uniform(), 0)


def test_rectangle_enumeration_brute_force_small():
    # every lattice chain evaluated by explicit loops
    c = _identity_uniform()
    grid = GridSpec(2, u_size=1, v_size=2)
    reg = region_Mn(c, 1, grid)
    lat = simplex_lattice(2, 2)
    corners = []
    for r0 in range(3):
        for e0, e1 in itertools.product(range(3), repeat=2):
            aux = AuxiliaryInput(np.array([1.0]), Channel(lat[[r0]]), Channel(lat[[e0, e1]]), 1)
            corners.append(rate_rectangle(c, aux).corner)
    assert np.allclose(np.array(corners), reg.points, atol=1e-12)


def test_region_without_secrecy_when_receivers_match(rng):
    w = random_compound(rng, 1, 2, 2, 2).states[0].w
    reg = region_Mn(CompoundBCC((BroadcastPair(w, w),)), 1, GridSpec(3, max_aux=2000))
    assert np.all(reg.points[:, 1] <= 1e-12)
    assert reg.points[:, 0].max() > 0
