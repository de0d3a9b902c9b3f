"""Steering plans for an elastic cable held by two hands.

The cable's equilibrium shapes are closed-form curves, so feasibility,
collision, and energy queries are exact function evaluations rather
than simulations.  Start from build_scene / plan for planning, or the
schemas module for the JSON file formats.
"""

from .collision import CollisionReport, ConvexPolyhedron, Cylinder
from .cspace import GridSpec, SafetyConstants, in_C_free, in_C_stable
from .elastica import (CableProperties, Config2D, Config3D, ElasticaParams,
                       GripState, grip_distance, psi, sample_shape)
from .energy import (EnergyBreakdown, bin_stability_report, elastic_energy,
                     gravity_ratio, hamiltonian, stability_survey)
from .geometry import Polygon, PolygonError, decompose_convex
from .planner import (InvalidQueryError, NoPathError, Path, PlannerParams,
                      PlanningError, ValidationReport, plan, validate_path)
from .render import render_frames, render_svgs
from .scene import Scene, build_scene
from .schemas import (ConfigModel, PathFileModel, SceneFormatError,
                      SceneModel, parse_scene)
from .verify import run_suites

__version__ = "0.1.0"

__all__ = [
    "CableProperties", "CollisionReport", "Config2D", "Config3D",
    "ConfigModel", "ConvexPolyhedron", "Cylinder", "ElasticaParams",
    "EnergyBreakdown", "GridSpec", "GripState", "InvalidQueryError",
    "NoPathError", "Path", "PathFileModel", "PlannerParams", "PlanningError",
    "Polygon", "PolygonError", "SafetyConstants", "Scene", "SceneFormatError",
    "SceneModel", "ValidationReport", "bin_stability_report", "build_scene",
    "decompose_convex", "elastic_energy", "gravity_ratio", "grip_distance",
    "hamiltonian", "in_C_free", "in_C_stable", "parse_scene", "plan", "psi",
    "render_frames", "render_svgs", "run_suites", "sample_shape",
    "stability_survey", "validate_path",
]
