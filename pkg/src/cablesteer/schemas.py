"""JSON schemas and file formats.

Field names carry their SI units (L_m, EI_Nm2, radius_m) so a mis-unit
value is visible at the call site.  Serialization is canonical: keys
sorted, no whitespace, shortest round-trip float repr.  The scene
digest is the sha256 of that canonical form, so two scene files that
differ only in formatting share a digest.
"""

from __future__ import annotations

import hashlib
import json
import math
from typing import Annotated, Any, Literal, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .collision import ConvexPolyhedron, Cylinder
from .cspace import GridSpec
from .elastica import (CableProperties, Config2D, Config3D, ElasticaParams,
                       GripState)
from .geometry import Polygon, PolygonError
from .planner import Path, PlannerParams
from .scene import Scene


class SceneFormatError(ValueError):
    """Input rejected; code is a stable machine-readable class."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


class _StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class CableModel(_StrictModel):
    L_m: float = Field(gt=0)
    EI_Nm2: float = Field(gt=0)
    rho_kg_per_m: float = Field(default=0.0, ge=0)
    g_m_per_s2: float = Field(default=9.80665, ge=0)

    def to_props(self) -> CableProperties:
        return CableProperties(L=self.L_m, EI=self.EI_Nm2,
                               rho=self.rho_kg_per_m, g=self.g_m_per_s2)

    @classmethod
    def from_props(cls, props: CableProperties) -> "CableModel":
        return cls(L_m=props.L, EI_Nm2=props.EI, rho_kg_per_m=props.rho,
                   g_m_per_s2=props.g)


class PolygonModel(_StrictModel):
    vertices_m: list[tuple[float, float]] = Field(min_length=3)


class CylinderModel(_StrictModel):
    type: Literal["cylinder"] = "cylinder"
    base_center_m: tuple[float, float, float]
    axis: tuple[float, float, float]
    radius_m: float = Field(gt=0)
    height_m: float = Field(gt=0)


class PolyhedronModel(_StrictModel):
    type: Literal["polyhedron"] = "polyhedron"
    vertices_m: list[tuple[float, float, float]] = Field(min_length=4)


Obstacle3DModel = Annotated[Union[CylinderModel, PolyhedronModel],
                            Field(discriminator="type")]


class GridModel(_StrictModel):
    dpos_m: float = Field(default=0.01, gt=0)
    dangle_rad: float = Field(default=math.radians(2.0), gt=0)
    dltilde_frac: float = Field(default=0.03, gt=0)
    ds0_frac: float = Field(default=0.01, gt=0)
    dsigma: float = Field(default=0.015, gt=0)
    ltilde_max_frac: float = Field(default=4.0, ge=1.0)
    sigma_min: float = Field(default=-0.455, le=1.0)


class PlannerModel(_StrictModel):
    w: float = Field(default=0.88, ge=0.0, le=1.0)
    angle_scale: float = Field(default=1.0, gt=0)
    max_expansions: int = Field(default=2_000_000, ge=1)
    inflation_m: float = Field(default=0.0, ge=0)

    def to_params(self) -> PlannerParams:
        return PlannerParams(w=self.w, angle_scale=self.angle_scale,
                             max_expansions=self.max_expansions,
                             inflation=self.inflation_m)


class SceneModel(_StrictModel):
    mode: Literal["planar", "semi-spatial"]
    cable: CableModel
    workspace_lo_m: list[float] = Field(min_length=2, max_length=3)
    workspace_hi_m: list[float] = Field(min_length=2, max_length=3)
    polygons: list[PolygonModel] = Field(default_factory=list)
    obstacles: list[Obstacle3DModel] = Field(default_factory=list)
    grid: GridModel = Field(default_factory=GridModel)
    planner: PlannerModel = Field(default_factory=PlannerModel)


class ConfigModel(_StrictModel):
    x0_m: float
    y0_m: float
    z0_m: float | None = None
    phi_x_rad: float | None = None
    phi_y_rad: float | None = None
    phi_base_rad: float
    k: float = Field(ge=0.0, lt=1.0)
    s0_m: float = Field(ge=0.0)
    Ltilde_m: float = Field(gt=0.0)

    @property
    def is_spatial(self) -> bool:
        return self.z0_m is not None

    def to_config(self):
        spatial = [self.z0_m, self.phi_x_rad, self.phi_y_rad]
        given = [v is not None for v in spatial]
        if any(given) and not all(given):
            raise SceneFormatError(
                "config-mode",
                "z0_m, phi_x_rad, phi_y_rad must all be given or all omitted")
        params = ElasticaParams(k=self.k, s0=self.s0_m, Ltilde=self.Ltilde_m)
        if all(given):
            return Config3D(self.x0_m, self.y0_m, self.z0_m, self.phi_x_rad,
                            self.phi_y_rad, self.phi_base_rad, params)
        return Config2D(self.x0_m, self.y0_m, self.phi_base_rad, params)

    @classmethod
    def from_config(cls, config) -> "ConfigModel":
        p = config.params
        if isinstance(config, Config3D):
            return cls(x0_m=config.x0, y0_m=config.y0, z0_m=config.z0,
                       phi_x_rad=config.phi_x, phi_y_rad=config.phi_y,
                       phi_base_rad=config.phi_base, k=p.k, s0_m=p.s0,
                       Ltilde_m=p.Ltilde)
        return cls(x0_m=config.x0, y0_m=config.y0,
                   phi_base_rad=config.phi_base, k=p.k, s0_m=p.s0,
                   Ltilde_m=p.Ltilde)


class GripModel(_StrictModel):
    position0_m: list[float]
    tangent0: float | list[float]
    positionL_m: list[float]
    tangentL: float | list[float]

    def to_grip(self) -> GripState:
        def pose(pos, tan):
            p = np.asarray(pos, dtype=float)
            t = float(tan) if np.ndim(tan) == 0 else np.asarray(tan, dtype=float)
            return (p, t)
        return GripState(pose0=pose(self.position0_m, self.tangent0),
                         poseL=pose(self.positionL_m, self.tangentL))

    @classmethod
    def from_grip(cls, grip: GripState) -> "GripModel":
        def dump_tan(t):
            return float(t) if np.ndim(t) == 0 else [float(v) for v in t]
        return cls(position0_m=[float(v) for v in grip.pose0[0]],
                   tangent0=dump_tan(grip.pose0[1]),
                   positionL_m=[float(v) for v in grip.poseL[0]],
                   tangentL=dump_tan(grip.poseL[1]))


class PathFileModel(_StrictModel):
    """Self-contained plan result: the scene rides along so downstream
    commands (rendering, re-checking) need no second file.  The digest
    is the sha256 of the embedded scene's canonical form and doubles as
    a tamper check."""

    scene_digest: str
    mode: Literal["planar", "semi-spatial"]
    scene: SceneModel
    configs: list[ConfigModel] = Field(min_length=1)
    grips: list[GripModel] = Field(min_length=1)
    cost: float
    stats: dict[str, Any] = Field(default_factory=dict)


# --------------------------------------------------------------------------
# Canonical serialization and digests


def canonical_json(data) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"),
                      allow_nan=False)


def model_digest(model: BaseModel) -> str:
    payload = canonical_json(model.model_dump(mode="json"))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def dump_model(model: BaseModel) -> str:
    return canonical_json(model.model_dump(mode="json"))


# --------------------------------------------------------------------------
# Scene assembly


def _validation_detail(exc: ValidationError) -> str:
    err = exc.errors()[0]
    loc = ".".join(str(p) for p in err["loc"]) or "<root>"
    return f"{loc}: {err['msg']}"


def model_from_text(text: str, model_cls):
    """Parse JSON text into the given model, folding both JSON and
    schema failures into SceneFormatError codes."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SceneFormatError("json-syntax", f"not valid JSON: {exc}") from exc
    try:
        return model_cls.model_validate(raw)
    except ValidationError as exc:
        raise SceneFormatError("schema", _validation_detail(exc)) from exc


def scene_model_from_text(text: str) -> SceneModel:
    return model_from_text(text, SceneModel)


def scene_from_model(model: SceneModel) -> Scene:
    dim = 2 if model.mode == "planar" else 3
    if len(model.workspace_lo_m) != dim or len(model.workspace_hi_m) != dim:
        raise SceneFormatError(
            "workspace-bounds",
            f"workspace bounds must have {dim} coordinates in {model.mode} mode")
    if any(h <= l for l, h in zip(model.workspace_lo_m, model.workspace_hi_m)):
        raise SceneFormatError(
            "workspace-bounds", "workspace upper bounds must exceed lower bounds")
    if model.mode == "planar" and model.obstacles:
        raise SceneFormatError(
            "mode-obstacles", "planar scenes take polygons, not 3-D obstacles")
    if model.mode == "semi-spatial" and model.polygons:
        raise SceneFormatError(
            "mode-obstacles", "semi-spatial scenes take 3-D obstacles, not polygons")
    polygons = []
    for i, pm in enumerate(model.polygons):
        try:
            polygons.append(Polygon(np.asarray(pm.vertices_m, dtype=float)))
        except PolygonError as exc:
            raise SceneFormatError(exc.code, f"polygons[{i}]: {exc}") from exc
    obstacles = []
    for i, om in enumerate(model.obstacles):
        try:
            if isinstance(om, CylinderModel):
                obstacles.append(Cylinder(np.asarray(om.base_center_m),
                                          np.asarray(om.axis),
                                          om.radius_m, om.height_m))
            else:
                obstacles.append(ConvexPolyhedron(np.asarray(om.vertices_m)))
        except ValueError as exc:
            raise SceneFormatError("obstacle-geometry",
                                   f"obstacles[{i}]: {exc}") from exc
    props = model.cable.to_props()
    g = model.grid
    try:
        grid = GridSpec.build(model.mode, props.L, model.workspace_lo_m,
                              model.workspace_hi_m, dpos=g.dpos_m,
                              dangle=g.dangle_rad, dltilde_frac=g.dltilde_frac,
                              ds0_frac=g.ds0_frac, dsigma=g.dsigma,
                              ltilde_max_frac=g.ltilde_max_frac,
                              sigma_min=g.sigma_min)
        return Scene(mode=model.mode, props=props,
                     workspace_lo=tuple(model.workspace_lo_m),
                     workspace_hi=tuple(model.workspace_hi_m), grid=grid,
                     polygons=tuple(polygons), obstacles=tuple(obstacles),
                     planner=model.planner.to_params())
    except ValueError as exc:
        raise SceneFormatError("scene-semantics", str(exc)) from exc


def parse_scene(text: str) -> Scene:
    """Validated runtime scene from JSON text.  SceneFormatError codes:
    json-syntax, schema, workspace-bounds, mode-obstacles,
    polygon-not-simple (and the other polygon codes), obstacle-geometry,
    scene-semantics."""
    return scene_from_model(scene_model_from_text(text))


def config_from_text(text: str):
    return model_from_text(text, ConfigModel).to_config()


# --------------------------------------------------------------------------
# Path files


def _sanitize_stats(stats: dict) -> dict:
    out = {}
    for key, val in stats.items():
        if isinstance(val, tuple):
            out[key] = list(val)
        else:
            out[key] = val
    return out


def path_file_from_path(path: Path, scene_model: SceneModel) -> PathFileModel:
    return PathFileModel(
        scene_digest=model_digest(scene_model),
        mode=scene_model.mode,
        scene=scene_model,
        configs=[ConfigModel.from_config(c) for c in path.configs],
        grips=[GripModel.from_grip(g) for g in path.grips],
        cost=path.cost,
        stats=_sanitize_stats(path.stats))


def path_file_from_text(text: str) -> PathFileModel:
    model = model_from_text(text, PathFileModel)
    if model.mode != model.scene.mode:
        raise SceneFormatError(
            "path-format", "path mode does not match the embedded scene")
    if model.scene_digest != model_digest(model.scene):
        raise SceneFormatError(
            "digest-mismatch",
            "scene digest does not match the embedded scene (file edited?)")
    return model


def path_from_file(model: PathFileModel) -> Path:
    configs = tuple(c.to_config() for c in model.configs)
    spatial = model.mode == "semi-spatial"
    for i, c in enumerate(configs):
        if isinstance(c, Config3D) != spatial:
            raise SceneFormatError(
                "config-mode", f"configs[{i}] does not match mode {model.mode!r}")
    return Path(configs=configs,
                grips=tuple(g.to_grip() for g in model.grips),
                cost=model.cost, stats=dict(model.stats))
