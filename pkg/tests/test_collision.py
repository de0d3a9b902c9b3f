"""Collision verdicts vs dense-sampling oracles, plane slicing, pruning."""

import math

import numpy as np
import pytest

from cablesteer.collision import (CollisionReport, ConvexPolyhedron, Cylinder,
                                  arc_region_intersects, collides_2d,
                                  collides_3d, slice_cylinder,
                                  slice_polyhedron)
from cablesteer.elastica import (CableProperties, Config2D, ElasticaParams,
                                 sample_shape)
from cablesteer.geometry import ConvexPiece, Polygon, decompose_convex
from oracles import (cyl_distance, dist_to_poly, hull_signed_margin,
                     oracle_collides_2d, oracle_collides_3d, point_in_poly,
                     random_free_config, star_polygon)

L = 1.0
PROPS = CableProperties(L=L, EI=0.0027)


def pieces_of(polys):
    pieces, ids = [], []
    for pid, poly in enumerate(polys):
        for piece in decompose_convex(poly):
            pieces.append(piece)
            ids.append(pid)
    return pieces, ids


def random_scene(rng, npoly_hi=4):
    config = random_free_config(rng, L)
    polys = [star_polygon(rng, rng.uniform(-1.2, 1.2, 2), 0.05, 0.35,
                          int(rng.integers(3, 9)))
             for _ in range(int(rng.integers(1, npoly_hi)))]
    return config, polys


def test_report_requires_witness_iff_colliding():
    CollisionReport(False, None)
    CollisionReport(True, (0.1, 0, np.zeros(2)))
    with pytest.raises(ValueError):
        CollisionReport(True, None)
    with pytest.raises(ValueError):
        CollisionReport(False, (0.1, 0, np.zeros(2)))


def test_planar_verdicts_match_dense_oracle():
    rng = np.random.default_rng(42)
    agree = undecided = 0
    for trial in range(40):
        config, polys = random_scene(rng)
        pieces, ids = pieces_of(polys)
        rep_on = collides_2d(config, L, pieces, obstacle_ids=ids, prune=True)
        rep_off = collides_2d(config, L, pieces, obstacle_ids=ids, prune=False)
        assert rep_on.colliding == rep_off.colliding
        if rep_on.colliding:
            assert rep_on.witness[0] == rep_off.witness[0]
            assert rep_on.witness[1] == rep_off.witness[1]
        truth = oracle_collides_2d(config, L, polys)
        if truth is None:
            undecided += 1
            continue
        assert truth == rep_on.colliding, f"trial {trial}"
        agree += 1
    assert agree >= 20  # sanity: the guard band must not swallow the corpus


def test_witness_lies_on_cable_near_obstacle():
    config = Config2D(0.0, 0.0, 0.2, ElasticaParams(k=0.6, s0=0.1, Ltilde=1.3))
    sq = Polygon(np.array([[0.2, -0.5], [0.6, -0.5], [0.6, 0.5], [0.2, 0.5]]))
    pieces = decompose_convex(sq)
    rep = collides_2d(config, L, pieces)
    assert rep.colliding
    s_w, oid, p_w = rep.witness
    assert 0.0 <= s_w <= L
    assert oid == 0
    pos = sample_shape(config, np.array([s_w]), PROPS)[0]
    assert np.linalg.norm(pos[0] - p_w) < 1e-9
    # the witness is the first flattened sample of the hit, so it sits
    # within one flattening step of the obstacle
    inside = bool(point_in_poly(p_w[None, :], sq.vertices)[0])
    assert inside or float(dist_to_poly(p_w[None, :], sq.vertices)[0]) < 2e-3


def test_refining_flatten_tol_never_flips_clear_verdicts():
    rng = np.random.default_rng(1001)
    for _ in range(25):
        config, polys = random_scene(rng, npoly_hi=2)
        pieces, _ = pieces_of(polys)
        r1 = collides_2d(config, L, pieces, flatten_tol=1e-6)
        r2 = collides_2d(config, L, pieces, flatten_tol=5e-7)
        truth = oracle_collides_2d(config, L, polys)
        if truth is not None:
            assert r1.colliding == r2.colliding == truth


def test_inflation_grows_the_hit_set():
    # straight cable along x, box 0.1 above it
    config = Config2D(0.0, 0.0, 0.0, ElasticaParams(k=0.0, s0=0.0, Ltilde=2.0))
    box = Polygon(np.array([[0.2, 0.1], [0.4, 0.1], [0.4, 0.3], [0.2, 0.3]]))
    pieces = decompose_convex(box)
    assert not collides_2d(config, L, pieces).colliding
    assert not collides_2d(config, L, pieces, inflation=0.05).colliding
    assert collides_2d(config, L, pieces, inflation=0.12).colliding
    # anything colliding stays colliding under extra inflation
    rng = np.random.default_rng(5)
    for _ in range(10):
        cfgv, polys = random_scene(rng)
        pcs, _ = pieces_of(polys)
        if collides_2d(cfgv, L, pcs).colliding:
            assert collides_2d(cfgv, L, pcs, inflation=0.02).colliding


def test_zero_area_region_never_intersects():
    cfgv = Config2D(0, 0, 0, ElasticaParams(k=0.3, s0=0.2, Ltilde=1.2))
    flat = np.array([[0.0, 0.0], [0.5, 0.0], [1.0, 0.0]])
    assert not arc_region_intersects(cfgv, (0.0, L), flat)


# --------------------------------------------------------------------------
# plane slices of 3-D primitives


def random_basis(rng):
    A = np.linalg.qr(rng.normal(size=(3, 3)))[0]
    if np.linalg.det(A) < 0:
        A[:, 2] *= -1
    return A


def test_cylinder_slice_membership():
    rng = np.random.default_rng(314)
    for trial in range(150):
        origin = rng.uniform(-1, 1, 3)
        A = random_basis(rng)
        cyl = Cylinder(rng.uniform(-1, 1, 3), rng.normal(size=3),
                       rng.uniform(0.05, 0.5), rng.uniform(0.1, 1.0))
        sections = slice_cylinder(cyl, origin, A)
        for _ in range(40):
            ab = rng.uniform(-2, 2, 2)
            p3 = origin + A[:, 0] * ab[0] + A[:, 1] * ab[1]
            d = cyl_distance(p3, cyl)
            inside_sec = any(point_in_poly(ab[None, :], v)[0] for v in sections)
            if d == 0.0 and not inside_sec:
                # interior point outside the polygonization: must be in
                # the thin band along the curved wall
                shrunk = Cylinder(cyl.base_center, cyl.axis,
                                  max(cyl.radius - 2e-4, 1e-6), cyl.height)
                assert cyl_distance(p3, shrunk) <= 2.5e-4, (trial, ab)
            if d > 2.5e-4 and inside_sec:
                # circumscribed chords overshoot by a bounded amount only
                assert d <= 3.5e-4, (trial, d)


def test_polyhedron_slice_membership_exact():
    rng = np.random.default_rng(2718)
    done = 0
    while done < 120:
        origin = rng.uniform(-1, 1, 3)
        A = random_basis(rng)
        vv = (rng.uniform(-0.6, 0.6, size=(int(rng.integers(4, 10)), 3))
              + rng.uniform(-0.5, 0.5, 3))
        try:
            ph = ConvexPolyhedron(vv)
        except ValueError:
            continue
        sections = slice_polyhedron(ph, origin, A)
        for _ in range(40):
            ab = rng.uniform(-2, 2, 2)
            p3 = origin + A[:, 0] * ab[0] + A[:, 1] * ab[1]
            d = float(hull_signed_margin(p3[None, :], ph)[0])
            inside_sec = any(point_in_poly(ab[None, :], v)[0] for v in sections)
            if d < -1e-9:
                assert inside_sec, (done, d, ab)
            if d > 1e-9:
                assert not inside_sec, (done, d, ab)
        done += 1


def test_spatial_verdicts_match_distance_oracle():
    rng = np.random.default_rng(27182)
    decided = 0
    for trial in range(30):
        config = random_free_config(rng, L, mode="3d")
        obstacles = []
        for _ in range(int(rng.integers(1, 4))):
            if rng.random() < 0.5:
                obstacles.append(Cylinder(rng.uniform(-1, 1, 3),
                                          rng.normal(size=3),
                                          rng.uniform(0.05, 0.4),
                                          rng.uniform(0.1, 0.8)))
            else:
                vv = (rng.uniform(-0.35, 0.35, size=(8, 3))
                      + rng.uniform(-0.9, 0.9, 3))
                obstacles.append(ConvexPolyhedron(vv))
        r_on = collides_3d(config, L, obstacles, prune=True)
        r_off = collides_3d(config, L, obstacles, prune=False)
        assert r_on.colliding == r_off.colliding
        truth = oracle_collides_3d(config, L, obstacles)
        if truth is None:
            continue
        assert truth == r_on.colliding, f"trial {trial}"
        decided += 1
    assert decided >= 10


def test_spatial_witness_world_coordinates():
    # cable arcing in the x=0 plane, cylinder across it at mid-span
    from cablesteer.elastica import Config3D
    config = Config3D(0.0, 0.0, 0.0, 0.0, -math.pi / 2, 0.0,
                      ElasticaParams(k=0.3, s0=0.0, Ltilde=2.0))
    cyl = Cylinder(np.array([-0.5, -0.19, 0.45]), np.array([1.0, 0.0, 0.0]),
                   0.08, 1.0)
    rep = collides_3d(config, L, [cyl])
    assert rep.colliding
    s_w, oid, p_w = rep.witness
    assert oid == 0
    assert p_w.shape == (3,)
    pos = sample_shape(config, np.array([s_w]), PROPS)[0]
    assert np.linalg.norm(pos[0] - p_w) < 1e-9
    # curved arc flattens densely, so the witness hugs the obstacle
    assert cyl_distance(p_w, cyl) < 2e-3


def test_obstacle_validation():
    with pytest.raises(ValueError):
        Cylinder(np.zeros(3), np.zeros(3), 0.1, 1.0)
    with pytest.raises(ValueError):
        Cylinder(np.zeros(3), np.array([1.0, 0, 0]), -0.1, 1.0)
    with pytest.raises(ValueError):
        ConvexPolyhedron(np.zeros((4, 3)))  # coplanar/degenerate
