"""Lattice planning in grip space.

The planner runs weighted A* over the configuration lattice.  Edge
costs and the heuristic use the same grip-space metric (endpoint
positions plus scaled hand orientations), so the heuristic is
consistent and w = 0 reduces to exact Dijkstra.  Cell validity
(stability, workspace, collision) is memoized per lattice index; a
cell is evaluated at most once per query no matter how many times the
search touches it.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field

from .cspace import (_ANGLE_AXES, OffGridError, _axis_offset, _coord_values,
                     config_to_index, in_C_free, index_to_config, index_valid,
                     neighbor_indices)
from .elastica import Config2D, Config3D, grip_distance, psi
from .scene import Scene


@dataclass(frozen=True)
class PlannerParams:
    """Search knobs.  w interpolates the expansion order between exact
    Dijkstra (0) and pure greedy best-first (1)."""

    w: float = 0.88
    angle_scale: float = 1.0
    max_expansions: int = 2_000_000
    inflation: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.w <= 1.0:
            raise ValueError("w must lie in [0, 1]")
        if self.max_expansions < 1:
            raise ValueError("max_expansions must be positive")
        if self.angle_scale <= 0.0:
            raise ValueError("angle_scale must be positive")
        if self.inflation < 0.0:
            raise ValueError("inflation must be nonnegative")


class PlanningError(Exception):
    pass


class InvalidQueryError(PlanningError):
    """Start or target cannot be mapped to a valid lattice cell."""


class NoPathError(PlanningError):
    """Search ended without reaching the target; reason is 'exhausted'
    (lattice component fully explored) or 'budget' (expansion cap)."""

    def __init__(self, reason: str, stats: dict):
        super().__init__(f"no path found ({reason})")
        self.reason = reason
        self.stats = stats


@dataclass(frozen=True)
class Path:
    configs: tuple
    grips: tuple
    cost: float
    stats: dict = field(compare=False, default_factory=dict)

    def __len__(self):
        return len(self.configs)


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    issues: tuple = ()
    stats: dict = field(compare=False, default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok


class _Search:
    """Per-query caches: grip states, cell validity, heuristic values."""

    def __init__(self, scene: Scene, params: PlannerParams):
        self.scene = scene
        self.grid = scene.grid
        self.params = params
        self._grips: dict = {}
        self._ok: dict = {}

    def grip(self, idx: tuple):
        g = self._grips.get(idx)
        if g is None:
            g = psi(index_to_config(idx, self.grid), self.scene.props)
            self._grips[idx] = g
        return g

    def cell_ok(self, idx: tuple) -> bool:
        v = self._ok.get(idx)
        if v is None:
            v = self._evaluate(idx)
            self._ok[idx] = v
        return v

    def _evaluate(self, idx: tuple) -> bool:
        grid = self.grid
        if not index_valid(idx, grid):
            return False
        cfg = index_to_config(idx, grid)
        if not in_C_free(cfg, grid.cable_L, grid.tol_L, grid.tol_s0):
            return False
        if not self.scene.grip_in_workspace(self.grip(idx)):
            return False
        return not self.scene.collision(
            cfg, inflation=self.params.inflation).colliding


def _expected_config_type(scene: Scene):
    return Config2D if scene.mode == "planar" else Config3D


def _snap(config, search: _Search, label: str) -> tuple:
    """Nearest valid lattice cell within one step of the rounded index;
    candidates are ordered by lattice distance, ties by index."""
    grid = search.grid
    if not isinstance(config, _expected_config_type(search.scene)):
        raise InvalidQueryError(
            f"{label} configuration does not match the scene mode {grid.mode!r}")
    vals = _coord_values(config)
    offs = [_axis_offset(a, vals[a.name]) for a in grid.axes]
    base = []
    for a, off in zip(grid.axes, offs):
        raw = int(round(off / a.step))
        if raw < -1 or raw > a.count:
            raise InvalidQueryError(
                f"{label} coordinate {a.name}={vals[a.name]!r} lies more "
                f"than one lattice step outside the grid range")
        base.append(min(max(raw, 0), a.count - 1))
    cands = []
    for deltas in itertools.product((-1, 0, 1), repeat=grid.dim):
        idx = tuple(b + d for b, d in zip(base, deltas))
        if not index_valid(idx, grid):
            continue
        d2 = 0.0
        for a, off, i in zip(grid.axes, offs, idx):
            dv = off - a.step * i
            if a.name in _ANGLE_AXES:
                dv = math.remainder(dv, math.tau)
            d2 += (dv / a.step) ** 2
        cands.append((d2, idx))
    cands.sort()
    for _, idx in cands:
        if search.cell_ok(idx):
            return idx
    raise InvalidQueryError(
        f"no valid lattice cell near the {label} configuration")


def plan(start, target, scene: Scene,
         params: PlannerParams | None = None) -> Path:
    """Grip-space path from start to target over the scene lattice.
    Off-lattice endpoints snap to the nearest valid cell.  Raises
    InvalidQueryError when snapping fails and NoPathError when the
    search exhausts its component or expansion budget.  Planner
    parameters default to the scene's own, then to PlannerParams()."""
    if params is None:
        params = scene.planner if scene.planner is not None else PlannerParams()
    search = _Search(scene, params)
    s_idx = _snap(start, search, "start")
    t_idx = _snap(target, search, "target")
    target_grip = search.grip(t_idx)
    w = params.w
    asc = params.angle_scale

    h_cache: dict = {}

    def h(idx: tuple) -> float:
        v = h_cache.get(idx)
        if v is None:
            v = grip_distance(search.grip(idx), target_grip, asc)
            h_cache[idx] = v
        return v

    g = {s_idx: 0.0}
    came: dict = {}
    closed: set = set()
    h0 = h(s_idx)
    heap = [(w * h0, h0, s_idx)]
    expansions = 0
    pushed = 1

    def stats() -> dict:
        return {"expansions": expansions, "pushed": pushed,
                "cells_evaluated": len(search._ok),
                "start_index": s_idx, "goal_index": t_idx}

    while heap:
        _, _, idx = heapq.heappop(heap)
        if idx in closed:
            continue
        closed.add(idx)
        if idx == t_idx:
            chain = [idx]
            while chain[-1] != s_idx:
                chain.append(came[chain[-1]])
            chain.reverse()
            out_stats = stats()
            out_stats["length"] = len(chain)
            out_stats["cost"] = g[t_idx]
            return Path(
                configs=tuple(index_to_config(i, search.grid) for i in chain),
                grips=tuple(search.grip(i) for i in chain),
                cost=g[t_idx], stats=out_stats)
        expansions += 1
        if expansions > params.max_expansions:
            raise NoPathError("budget", stats())
        gi = g[idx]
        grip_i = search.grip(idx)
        for nb in neighbor_indices(idx, search.grid):
            if nb in closed or not search.cell_ok(nb):
                continue
            ng = gi + grip_distance(grip_i, search.grip(nb), asc)
            if ng < g.get(nb, math.inf):
                g[nb] = ng
                came[nb] = idx
                hn = h(nb)
                heapq.heappush(heap, ((1.0 - w) * ng + w * hn, hn, nb))
                pushed += 1
    raise NoPathError("exhausted", stats())


def validate_path(path: Path, scene: Scene,
                  params: PlannerParams | None = None) -> ValidationReport:
    """Independent re-check of a planned path: every config on-lattice
    and valid, consecutive cells adjacent (one axis, one step), grips
    consistent, total cost consistent."""
    if params is None:
        params = scene.planner if scene.planner is not None else PlannerParams()
    issues = []
    if len(path.configs) == 0:
        return ValidationReport(False, ("path is empty",))
    if len(path.grips) != len(path.configs):
        issues.append("grips and configs differ in length")
    search = _Search(scene, params)
    indices = []
    for i, cfg in enumerate(path.configs):
        if not isinstance(cfg, _expected_config_type(scene)):
            issues.append(f"config {i} does not match scene mode")
            return ValidationReport(False, tuple(issues))
        try:
            indices.append(config_to_index(cfg, scene.grid))
        except (OffGridError, ValueError) as exc:
            issues.append(f"config {i} is off-lattice: {exc}")
            indices.append(None)
    for i, idx in enumerate(indices):
        if idx is None:
            continue
        if not search.cell_ok(idx):
            grid = scene.grid
            cfg = index_to_config(idx, grid)
            if not index_valid(idx, grid):
                issues.append(f"config {i} is outside the lattice bounds")
            elif not in_C_free(cfg, grid.cable_L, grid.tol_L, grid.tol_s0):
                issues.append(f"config {i} leaves the stable free space")
            elif not scene.grip_in_workspace(search.grip(idx)):
                issues.append(f"config {i} puts a hand outside the workspace")
            else:
                issues.append(f"config {i} collides with an obstacle")
    for i in range(len(indices) - 1):
        a, b = indices[i], indices[i + 1]
        if a is None or b is None:
            continue
        diff = [abs(x - y) for x, y in zip(a, b)]
        if sorted(diff) != [0] * (len(diff) - 1) + [1]:
            issues.append(f"step {i} is not a single-axis lattice move")
    cost = 0.0
    for i in range(len(indices) - 1):
        if indices[i] is None or indices[i + 1] is None:
            continue
        cost += grip_distance(search.grip(indices[i]),
                              search.grip(indices[i + 1]), params.angle_scale)
    if abs(cost - path.cost) > 1e-9 * (1.0 + abs(cost)):
        issues.append(
            f"stored cost {path.cost!r} differs from recomputed {cost!r}")
    for i, (idx, grip) in enumerate(zip(indices, path.grips)):
        if idx is None:
            continue
        if grip_distance(grip, search.grip(idx), params.angle_scale) > 1e-9:
            issues.append(f"grip {i} does not match its configuration")
    stats = {"cells": len(path.configs), "recomputed_cost": cost}
    return ValidationReport(not issues, tuple(issues), stats)
