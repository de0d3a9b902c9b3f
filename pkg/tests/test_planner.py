"""Lattice search behavior: optimality, snapping, failure modes."""

import math

import numpy as np
import pytest

from cablesteer.elastica import (CableProperties, Config2D, Config3D,
                                 ElasticaParams)
from cablesteer.geometry import Polygon
from cablesteer.planner import (InvalidQueryError, NoPathError, Path,
                                PlannerParams, plan, validate_path)
from cablesteer.scene import build_scene
from oracles import bfs_uniform_cost

PROPS = CableProperties(L=0.5, EI=0.0027)
PK = ElasticaParams(k=0.0, s0=0.0, Ltilde=0.5)


def straight_scene():
    return build_scene("planar", PROPS, (0.0, 0.0), (1.0, 1.0),
                       dpos=0.05, dangle=math.tau / 8, ltilde_max_frac=1.0,
                       ds0_frac=0.4, sigma_min=1.0)


def corridor_scene():
    boxA = Polygon(np.array([[0.40, 0.00], [0.48, 0.00],
                             [0.48, 0.42], [0.40, 0.42]]))
    boxB = Polygon(np.array([[0.40, 0.58], [0.48, 0.58],
                             [0.48, 1.00], [0.40, 1.00]]))
    return build_scene("planar", PROPS, (0.0, 0.0), (1.0, 1.0),
                       dpos=0.05, dangle=math.tau / 6, ltilde_max_frac=1.12,
                       ds0_frac=0.3, dsigma=0.1, sigma_min=0.62,
                       polygons=[boxA, boxB])


def test_straight_line_is_five_steps():
    scene = straight_scene()
    start = Config2D(0.20, 0.30, 0.0, PK)
    target = Config2D(0.45, 0.30, 0.0, PK)
    path = plan(start, target, scene, PlannerParams(w=0.88))
    assert len(path) == 6
    # both grip points translate together by dpos per hop
    assert abs(path.cost - 5 * math.sqrt(2) * 0.05) < 1e-12
    assert validate_path(path, scene)


def test_tampered_path_fails_validation():
    scene = straight_scene()
    path = plan(Config2D(0.20, 0.30, 0.0, PK), Config2D(0.45, 0.30, 0.0, PK),
                scene)
    bad = Path(configs=path.configs[:-1] + (Config2D(0.9, 0.9, 0.0, PK),),
               grips=path.grips, cost=path.cost, stats={})
    rep = validate_path(bad, scene)
    assert not rep
    assert rep.issues


def test_w_zero_matches_uniform_cost_search():
    box = Polygon(np.array([[0.58, -0.05], [0.62, -0.05],
                            [0.62, 0.18], [0.58, 0.18]]))
    scene = build_scene("planar", PROPS, (0.0, -0.1), (0.8, 0.4),
                        dpos=0.1, dangle=math.tau / 4, ltilde_max_frac=1.0,
                        ds0_frac=0.4, sigma_min=1.0, polygons=[box])
    p0 = plan(Config2D(0.0, 0.0, 0.0, PK), Config2D(0.3, 0.0, 0.0, PK),
              scene, PlannerParams(w=0.0))
    ref = bfs_uniform_cost(scene, p0.stats["start_index"],
                           p0.stats["goal_index"])
    assert p0.cost == ref
    assert len(p0) > 4  # forced detour around the box


def test_corridor_scene_plans_and_validates():
    scene = corridor_scene()
    total = 1
    for a in scene.grid.axes:
        total *= a.count
    assert total <= 10**6
    start = Config2D(0.15, 0.50, 0.0, PK)
    target = Config2D(0.85, 0.50, 0.0, PK)
    path = plan(start, target, scene, PlannerParams(w=0.88))
    assert validate_path(path, scene, PlannerParams(w=0.88))
    # the path threads the corridor rather than leaving the gap band
    mid_y = [c.y0 for c in path.configs if 0.40 <= c.x0 <= 0.48]
    assert mid_y
    assert all(0.42 <= y <= 0.58 for y in mid_y)


def test_deterministic_replan():
    scene = corridor_scene()
    start = Config2D(0.15, 0.50, 0.0, PK)
    target = Config2D(0.85, 0.50, 0.0, PK)
    p1 = plan(start, target, scene)
    p2 = plan(start, target, scene)
    assert p1.cost == p2.cost
    assert p1.stats == p2.stats
    assert all(a == b for a, b in zip(p1.configs, p2.configs))


def test_off_grid_start_snaps():
    scene = corridor_scene()
    start = Config2D(0.151, 0.502, 0.01,
                     ElasticaParams(k=0.01, s0=0.001, Ltilde=0.5 * 1.001))
    path = plan(start, Config2D(0.85, 0.50, 0.0, PK), scene)
    assert validate_path(path, scene)
    first = path.configs[0]
    assert abs(first.x0 - 0.15) < 1e-9
    assert abs(first.y0 - 0.50) < 1e-9


def test_start_inside_thin_obstacle_escapes():
    scene = corridor_scene()
    path = plan(Config2D(0.44, 0.20, 0.0, PK), Config2D(0.85, 0.50, 0.0, PK),
                scene)
    assert validate_path(path, scene)


def test_start_deep_inside_fat_obstacle_rejected():
    fat = Polygon(np.array([[0.25, 0.25], [0.75, 0.25],
                            [0.75, 0.75], [0.25, 0.75]]))
    scene = build_scene("planar", PROPS, (0.0, 0.0), (1.0, 1.0),
                        dpos=0.05, dangle=math.tau / 8, ltilde_max_frac=1.0,
                        ds0_frac=0.4, sigma_min=1.0, polygons=[fat])
    with pytest.raises(InvalidQueryError):
        plan(Config2D(0.5, 0.5, 0.0, PK), Config2D(0.0, 0.05, 0.0, PK), scene)


def test_query_outside_workspace_rejected():
    scene = corridor_scene()
    with pytest.raises(InvalidQueryError):
        plan(Config2D(-0.2, 0.5, 0.0, PK), Config2D(0.85, 0.5, 0.0, PK),
             scene)


def test_mode_mismatch_rejected():
    scene = corridor_scene()
    with pytest.raises(InvalidQueryError):
        plan(Config3D(0.1, 0.1, 0.1, 0.0, 0.0, 0.0, PK),
             Config2D(0.85, 0.5, 0.0, PK), scene)


def test_budget_exhaustion_reports_reason():
    scene = corridor_scene()
    with pytest.raises(NoPathError) as e:
        plan(Config2D(0.15, 0.50, 0.0, PK), Config2D(0.85, 0.50, 0.0, PK),
             scene, PlannerParams(w=0.0, max_expansions=10))
    assert e.value.reason == "budget"
    # the over-budget expansion itself is counted
    assert e.value.stats["expansions"] == 11


def test_sealed_pocket_exhausts_frontier():
    pocketA = Polygon(np.array([[0.55, -0.06], [0.60, -0.06],
                                [0.60, 0.04], [0.55, 0.04]]))
    pocketB = Polygon(np.array([[0.50, 0.05], [0.55, 0.05],
                                [0.55, 0.15], [0.50, 0.15]]))
    scene = build_scene("planar", PROPS, (0.0, -0.1), (0.8, 0.4),
                        dpos=0.1, dangle=math.tau / 4, ltilde_max_frac=1.0,
                        ds0_frac=0.4, sigma_min=1.0,
                        polygons=[pocketA, pocketB])
    with pytest.raises(NoPathError) as e:
        plan(Config2D(0.0, 0.0, 0.0, PK), Config2D(0.3, 0.3, 0.0, PK), scene)
    assert e.value.reason == "exhausted"


def test_scene_carries_its_own_planner_params():
    scene = corridor_scene()
    tight = build_scene("planar", PROPS, (0.0, 0.0), (1.0, 1.0),
                        dpos=0.05, dangle=math.tau / 6, ltilde_max_frac=1.12,
                        ds0_frac=0.3, dsigma=0.1, sigma_min=0.62,
                        polygons=list(scene.polygons),
                        planner=PlannerParams(w=0.0, max_expansions=10))
    with pytest.raises(NoPathError) as e:
        plan(Config2D(0.15, 0.50, 0.0, PK), Config2D(0.85, 0.50, 0.0, PK),
             tight)
    assert e.value.reason == "budget"
    # explicit params override the scene's own
    path = plan(Config2D(0.15, 0.50, 0.0, PK), Config2D(0.85, 0.50, 0.0, PK),
                tight, PlannerParams(w=0.88))
    assert validate_path(path, tight, PlannerParams(w=0.88))


def test_path_length_counts_waypoints():
    scene = straight_scene()
    path = plan(Config2D(0.20, 0.30, 0.0, PK), Config2D(0.45, 0.30, 0.0, PK),
                scene)
    assert len(path) == len(path.configs)
    assert len(path.grips) == len(path.configs)
