"""HTTP service exposing the planner and analysis queries.

Thin wrapper: every endpoint validates with the shared schema models,
calls the core library, and maps failures to status codes (400 for bad
input, 409 when no path exists).  The CLI talks to the same functions
in-process, so service and CLI cannot drift apart.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, ConfigDict, Field

from .cspace import in_C_free
from .elastica import Config3D, psi, sample_shape
from .energy import elastic_energy, gravity_ratio
from .planner import InvalidQueryError, NoPathError, plan, validate_path
from .render import render_svgs
from .schemas import (ConfigModel, PathFileModel, SceneFormatError,
                      SceneModel, path_file_from_path, path_from_file,
                      scene_from_model)
from .verify import SUITES, run_suites


class _Payload(BaseModel):
    model_config = ConfigDict(extra="forbid")


class PlanRequest(_Payload):
    scene: SceneModel
    start: ConfigModel
    target: ConfigModel


class CheckRequest(_Payload):
    scene: SceneModel
    config: ConfigModel


class ShapeRequest(_Payload):
    scene: SceneModel
    config: ConfigModel
    samples: int = Field(default=512, ge=2, le=100_000)


class RenderRequest(_Payload):
    path_file: PathFileModel
    frames: int = Field(default=8, ge=1, le=512)


class VerifyRequest(_Payload):
    suites: list[str] = Field(default_factory=lambda: list(SUITES))


class WitnessModel(_Payload):
    s_m: float
    obstacle: int
    point_m: list[float]


class CheckResponse(_Payload):
    feasible: bool
    in_free_space: bool
    grips_in_workspace: bool
    colliding: bool
    witness: WitnessModel | None = None


class ShapeResponse(_Payload):
    points_m: list[list[float]]
    tangents_rad: list[float]
    curvatures_per_m: list[float]


class EnergyResponse(_Payload):
    elastic_J: float


class GravityRatioResponse(_Payload):
    elastic_J: float
    gravity_J: float
    ratio: float | None


class RenderResponse(_Payload):
    frames: list[str]


class SuiteResult(_Payload):
    name: str
    ok: bool
    text: str


class VerifyResponse(_Payload):
    ok: bool
    reports: list[SuiteResult]


def _bad_input(exc: Exception, code: str = "invalid-input") -> HTTPException:
    if isinstance(exc, SceneFormatError):
        return HTTPException(400, {"code": exc.code, "message": exc.message})
    return HTTPException(400, {"code": code, "message": str(exc)})


def _build(scene_model: SceneModel, config_model: ConfigModel):
    scene = scene_from_model(scene_model)
    config = config_model.to_config()
    spatial = scene.mode == "semi-spatial"
    if isinstance(config, Config3D) != spatial:
        raise SceneFormatError(
            "config-mode", f"configuration does not match mode {scene.mode!r}")
    return scene, config


def check_config(scene_model: SceneModel,
                 config_model: ConfigModel) -> CheckResponse:
    scene, config = _build(scene_model, config_model)
    free = in_C_free(config, scene.L)
    grips_ok = scene.grip_in_workspace(psi(config, scene.props))
    report = scene.collision(config)
    witness = None
    if report.witness is not None:
        s_hit, obstacle, point = report.witness
        witness = WitnessModel(s_m=s_hit, obstacle=obstacle,
                               point_m=[float(v) for v in point])
    return CheckResponse(
        feasible=free and grips_ok and not report.colliding,
        in_free_space=free, grips_in_workspace=grips_ok,
        colliding=report.colliding, witness=witness)


def shape_polyline(scene_model: SceneModel, config_model: ConfigModel,
                   samples: int) -> ShapeResponse:
    scene, config = _build(scene_model, config_model)
    s = np.linspace(0.0, scene.L, samples)
    pos, phi, kap = sample_shape(config, s, scene.props)
    return ShapeResponse(
        points_m=[[float(v) for v in row] for row in pos],
        tangents_rad=[float(v) for v in phi],
        curvatures_per_m=[float(v) for v in kap])


def create_app() -> FastAPI:
    app = FastAPI(title="cablesteer", version="1.0")

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/plan", response_model=PathFileModel)
    def plan_endpoint(req: PlanRequest):
        try:
            scene, start = _build(req.scene, req.start)
            target = req.target.to_config()
            path = plan(start, target, scene)
        except InvalidQueryError as exc:
            raise _bad_input(exc, code="invalid-query") from exc
        except (SceneFormatError, ValueError) as exc:
            raise _bad_input(exc) from exc
        except NoPathError as exc:
            raise HTTPException(
                409, {"code": "no-path", "reason": exc.reason,
                      "stats": exc.stats}) from exc
        return path_file_from_path(path, req.scene)

    @app.post("/check", response_model=CheckResponse)
    def check_endpoint(req: CheckRequest):
        try:
            return check_config(req.scene, req.config)
        except (SceneFormatError, ValueError) as exc:
            raise _bad_input(exc) from exc

    @app.post("/shape", response_model=ShapeResponse)
    def shape_endpoint(req: ShapeRequest):
        try:
            return shape_polyline(req.scene, req.config, req.samples)
        except (SceneFormatError, ValueError) as exc:
            raise _bad_input(exc) from exc

    @app.post("/energy", response_model=EnergyResponse)
    def energy_endpoint(req: CheckRequest):
        try:
            scene, config = _build(req.scene, req.config)
        except (SceneFormatError, ValueError) as exc:
            raise _bad_input(exc) from exc
        return EnergyResponse(elastic_J=elastic_energy(config, scene.props))

    @app.post("/gravity-ratio", response_model=GravityRatioResponse)
    def gravity_endpoint(req: CheckRequest):
        try:
            scene, config = _build(req.scene, req.config)
            if not isinstance(config, Config3D):
                raise SceneFormatError(
                    "config-mode",
                    "gravity ratio needs a semi-spatial configuration "
                    "(the deformation plane carries the vertical axis)")
            breakdown = gravity_ratio(config, scene.props)
        except (SceneFormatError, ValueError, TypeError) as exc:
            raise _bad_input(exc) from exc
        return GravityRatioResponse(elastic_J=breakdown.elastic_J,
                                    gravity_J=breakdown.gravity_J,
                                    ratio=breakdown.ratio)

    @app.post("/render", response_model=RenderResponse)
    def render_endpoint(req: RenderRequest):
        try:
            scene = scene_from_model(req.path_file.scene)
            path = path_from_file(req.path_file)
            svgs = render_svgs(path, scene, req.frames)
        except (SceneFormatError, ValueError) as exc:
            raise _bad_input(exc) from exc
        return RenderResponse(frames=svgs)

    @app.post("/verify", response_model=VerifyResponse)
    def verify_endpoint(req: VerifyRequest):
        unknown = [s for s in req.suites if s not in SUITES]
        if unknown:
            raise HTTPException(
                400, {"code": "unknown-suite",
                      "message": f"unknown suites: {', '.join(unknown)}"})
        reports, ok = run_suites(req.suites)
        return VerifyResponse(ok=ok, reports=[
            SuiteResult(name=r.name, ok=r.ok, text=r.text())
            for r in reports])

    return app


app = create_app()
