"""Runtime scene: workspace box, cable, obstacles, and the search
lattice, with the obstacle polygons pre-decomposed into convex pieces
so repeated collision queries skip that stage."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .collision import (CollisionReport, Cylinder, ConvexPolyhedron,
                        collides_2d, collides_3d)
from .cspace import GridSpec
from .elastica import CableProperties, Config2D, Config3D, GripState
from .geometry import Polygon, decompose_convex

MODES = ("planar", "semi-spatial")


@dataclass(frozen=True)
class Scene:
    mode: str
    props: CableProperties
    workspace_lo: tuple
    workspace_hi: tuple
    grid: GridSpec
    polygons: tuple = ()
    obstacles: tuple = ()
    # PlannerParams or None; untyped to keep scene importable without planner
    planner: object = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        dim = 2 if self.mode == "planar" else 3
        lo = tuple(float(v) for v in self.workspace_lo)
        hi = tuple(float(v) for v in self.workspace_hi)
        if len(lo) != dim or len(hi) != dim:
            raise ValueError(f"workspace bounds must have {dim} coordinates")
        if any(h <= l for l, h in zip(lo, hi)):
            raise ValueError("workspace must have positive extent on every axis")
        if self.grid.mode != self.mode:
            raise ValueError("grid mode does not match scene mode")
        if self.mode == "planar":
            if self.obstacles:
                raise ValueError("planar scenes take polygon obstacles only")
            if not all(isinstance(p, Polygon) for p in self.polygons):
                raise ValueError("polygons must be Polygon instances")
        else:
            if self.polygons:
                raise ValueError("semi-spatial scenes take 3-D obstacles only")
            if not all(isinstance(o, (Cylinder, ConvexPolyhedron))
                       for o in self.obstacles):
                raise ValueError("obstacles must be cylinders or polyhedra")
        object.__setattr__(self, "workspace_lo", lo)
        object.__setattr__(self, "workspace_hi", hi)
        object.__setattr__(self, "polygons", tuple(self.polygons))
        object.__setattr__(self, "obstacles", tuple(self.obstacles))
        pieces, ids = [], []
        for pi, poly in enumerate(self.polygons):
            for piece in decompose_convex(poly):
                pieces.append(piece)
                ids.append(pi)
        object.__setattr__(self, "_pieces", tuple(pieces))
        object.__setattr__(self, "_piece_ids", tuple(ids))

    @property
    def pieces(self) -> tuple:
        return self._pieces

    @property
    def piece_ids(self) -> tuple:
        return self._piece_ids

    @property
    def L(self) -> float:
        return self.props.L

    def collision(self, config, *, inflation: float = 0.0,
                  prune: bool = True) -> CollisionReport:
        """Cable-vs-scene verdict; witness obstacle id refers to the
        scene's polygon / obstacle list."""
        if self.mode == "planar":
            if not isinstance(config, Config2D):
                raise ValueError("planar scene expects a planar config")
            return collides_2d(config, self.L, list(self._pieces),
                               obstacle_ids=list(self._piece_ids),
                               inflation=inflation, prune=prune)
        if not isinstance(config, Config3D):
            raise ValueError("semi-spatial scene expects a 3-D config")
        return collides_3d(config, self.L, list(self.obstacles),
                           inflation=inflation, prune=prune)

    def grip_in_workspace(self, grip: GripState) -> bool:
        lo = np.asarray(self.workspace_lo)
        hi = np.asarray(self.workspace_hi)
        for p in (grip.position0, grip.positionL):
            q = np.asarray(p)
            if np.any(q < lo) or np.any(q > hi):
                return False
        return True


def build_scene(mode: str, props: CableProperties, workspace_lo, workspace_hi,
                polygons=(), obstacles=(), planner=None,
                **grid_kwargs) -> Scene:
    """Scene with the default lattice over the given workspace."""
    grid = GridSpec.build(mode, props.L, workspace_lo, workspace_hi,
                          **grid_kwargs)
    return Scene(mode=mode, props=props, workspace_lo=tuple(workspace_lo),
                 workspace_hi=tuple(workspace_hi), grid=grid,
                 polygons=tuple(polygons), obstacles=tuple(obstacles),
                 planner=planner)
