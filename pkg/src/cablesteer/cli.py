"""Command-line front end.

Every subcommand is a thin client over the same functions the HTTP
service exposes; pass --server to route through a running instance
instead of computing in-process.  Exit codes: 0 success, 2 bad input,
3 no path, 4 verification failure.

`steer defaults` prints a complete scene with every numeric default
materialized, so an experiment can be reproduced from one file.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path as FsPath

import click

from . import service
from .planner import InvalidQueryError, NoPathError, plan
from .render import render_frames
from .schemas import (CableModel, ConfigModel, GridModel, PathFileModel,
                      PlannerModel, SceneFormatError, SceneModel, dump_model,
                      model_from_text, path_file_from_path,
                      path_file_from_text, path_from_file, scene_from_model)
from .verify import SUITES, run_suites

EXIT_INPUT = 2
EXIT_NO_PATH = 3
EXIT_VERIFY = 4


class _NoPath(Exception):
    def __init__(self, reason: str, stats: dict):
        super().__init__(f"no path found ({reason})")
        self.reason = reason
        self.stats = stats


def _fail_input(code: str, message: str):
    click.echo(f"error[{code}]: {message}", err=True)
    sys.exit(EXIT_INPUT)


def _read(path: str) -> str:
    try:
        return FsPath(path).read_text(encoding="utf-8")
    except OSError as exc:
        _fail_input("file-access", f"{path}: {exc}")


def _load(path: str, model_cls):
    return model_from_text(_read(path), model_cls)


class LocalClient:
    """Runs every query in-process."""

    def plan(self, scene: SceneModel, start: ConfigModel,
             target: ConfigModel) -> PathFileModel:
        runtime, start_cfg = service._build(scene, start)
        try:
            path = plan(start_cfg, target.to_config(), runtime)
        except NoPathError as exc:
            raise _NoPath(exc.reason, exc.stats) from exc
        return path_file_from_path(path, scene)

    def check(self, scene: SceneModel, config: ConfigModel) -> dict:
        return service.check_config(scene, config).model_dump()

    def shape(self, scene: SceneModel, config: ConfigModel,
              samples: int) -> dict:
        return service.shape_polyline(scene, config, samples).model_dump()

    def energy(self, scene: SceneModel, config: ConfigModel) -> dict:
        runtime, cfg = service._build(scene, config)
        from .energy import elastic_energy
        return {"elastic_J": elastic_energy(cfg, runtime.props)}

    def gravity_ratio(self, scene: SceneModel, config: ConfigModel) -> dict:
        from .elastica import Config3D
        from .energy import gravity_ratio
        runtime, cfg = service._build(scene, config)
        if not isinstance(cfg, Config3D):
            raise SceneFormatError(
                "config-mode",
                "gravity ratio needs a semi-spatial configuration "
                "(the deformation plane carries the vertical axis)")
        b = gravity_ratio(cfg, runtime.props)
        return {"elastic_J": b.elastic_J, "gravity_J": b.gravity_J,
                "ratio": b.ratio}

    def render(self, path_file: PathFileModel, out_dir: str,
               frames: int) -> list:
        runtime = scene_from_model(path_file.scene)
        return render_frames(path_from_file(path_file), runtime, out_dir,
                             frames)

    def verify(self, suites) -> tuple:
        reports, ok = run_suites(suites)
        return [{"name": r.name, "ok": r.ok, "text": r.text()}
                for r in reports], ok


class HttpClient:
    """Routes every query through a running service instance."""

    def __init__(self, base_url: str):
        import httpx
        self._httpx = httpx
        self.base = base_url.rstrip("/")

    def _post(self, endpoint: str, payload: dict) -> dict:
        resp = self._httpx.post(f"{self.base}{endpoint}", json=payload,
                                timeout=600.0)
        if resp.status_code == 400:
            detail = resp.json().get("detail", {})
            raise SceneFormatError(detail.get("code", "invalid-input"),
                                   detail.get("message", resp.text))
        if resp.status_code == 409:
            detail = resp.json().get("detail", {})
            raise _NoPath(detail.get("reason", "unknown"),
                          detail.get("stats", {}))
        resp.raise_for_status()
        return resp.json()

    def plan(self, scene, start, target) -> PathFileModel:
        data = self._post("/plan", {"scene": scene.model_dump(mode="json"),
                                    "start": start.model_dump(mode="json"),
                                    "target": target.model_dump(mode="json")})
        return PathFileModel.model_validate(data)

    def check(self, scene, config) -> dict:
        return self._post("/check", {"scene": scene.model_dump(mode="json"),
                                     "config": config.model_dump(mode="json")})

    def shape(self, scene, config, samples) -> dict:
        return self._post("/shape", {"scene": scene.model_dump(mode="json"),
                                     "config": config.model_dump(mode="json"),
                                     "samples": samples})

    def energy(self, scene, config) -> dict:
        return self._post("/energy", {"scene": scene.model_dump(mode="json"),
                                      "config": config.model_dump(mode="json")})

    def gravity_ratio(self, scene, config) -> dict:
        return self._post("/gravity-ratio",
                          {"scene": scene.model_dump(mode="json"),
                           "config": config.model_dump(mode="json")})

    def render(self, path_file, out_dir, frames) -> list:
        data = self._post("/render",
                          {"path_file": path_file.model_dump(mode="json"),
                           "frames": frames})
        out = FsPath(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        digits = max(3, len(str(len(data["frames"]) - 1)))
        written = []
        for n, svg in enumerate(data["frames"]):
            dest = out / f"frame_{n:0{digits}d}.svg"
            dest.write_text(svg, encoding="utf-8")
            written.append(str(dest))
        return written

    def verify(self, suites) -> tuple:
        data = self._post("/verify", {"suites": list(suites)})
        return data["reports"], data["ok"]


def _make_client(server: str | None):
    return HttpClient(server) if server else LocalClient()


def _echo_json(data: dict):
    click.echo(json.dumps(data, indent=2, sort_keys=True))


# ---------------------------------------------------------------------------
# Command bodies (also the programmatic entry points)


def cmd_plan(client, scene_path: str, start_path: str, target_path: str,
             out_path: str) -> int:
    try:
        scene = _load(scene_path, SceneModel)
        start = _load(start_path, ConfigModel)
        target = _load(target_path, ConfigModel)
        path_file = client.plan(scene, start, target)
    except (SceneFormatError, InvalidQueryError) as exc:
        code = getattr(exc, "code", "invalid-query")
        _fail_input(code, str(exc))
    except _NoPath as exc:
        click.echo(f"error[no-path]: {exc} stats={exc.stats}", err=True)
        return EXIT_NO_PATH
    FsPath(out_path).write_text(dump_model(path_file), encoding="utf-8")
    _echo_json({"out": out_path, "waypoints": len(path_file.configs),
                "cost": path_file.cost, "stats": path_file.stats})
    return 0


def cmd_check(client, scene_path: str, config_path: str) -> int:
    try:
        result = client.check(_load(scene_path, SceneModel),
                              _load(config_path, ConfigModel))
    except SceneFormatError as exc:
        _fail_input(exc.code, exc.message)
    _echo_json(result)
    return 0


def cmd_shape(client, scene_path: str, config_path: str, samples: int,
              out_path: str | None) -> int:
    try:
        result = client.shape(_load(scene_path, SceneModel),
                              _load(config_path, ConfigModel), samples)
    except SceneFormatError as exc:
        _fail_input(exc.code, exc.message)
    if out_path:
        FsPath(out_path).write_text(
            json.dumps(result, sort_keys=True, separators=(",", ":")),
            encoding="utf-8")
        _echo_json({"out": out_path, "points": len(result["points_m"])})
    else:
        _echo_json(result)
    return 0


def cmd_energy(client, scene_path: str, config_path: str) -> int:
    try:
        result = client.energy(_load(scene_path, SceneModel),
                               _load(config_path, ConfigModel))
    except SceneFormatError as exc:
        _fail_input(exc.code, exc.message)
    _echo_json(result)
    return 0


def cmd_gravity_ratio(client, scene_path: str, config_path: str) -> int:
    try:
        result = client.gravity_ratio(_load(scene_path, SceneModel),
                                      _load(config_path, ConfigModel))
    except SceneFormatError as exc:
        _fail_input(exc.code, exc.message)
    _echo_json(result)
    return 0


def cmd_render(client, path_path: str, out_dir: str, frames: int) -> int:
    try:
        path_file = path_file_from_text(_read(path_path))
        written = client.render(path_file, out_dir, frames)
    except SceneFormatError as exc:
        _fail_input(exc.code, exc.message)
    _echo_json({"out": out_dir, "frames": written})
    return 0


def cmd_verify(client, suite: str) -> int:
    names = list(SUITES) if suite == "all" else [suite]
    reports, ok = client.verify(names)
    for r in reports:
        click.echo(r["text"])
    click.echo("verification: " + ("PASS" if ok else "FAIL"))
    return 0 if ok else EXIT_VERIFY


def default_scene_block() -> str:
    """A complete planar scene with every numeric default materialized."""
    scene = SceneModel(
        mode="planar",
        cable=CableModel(L_m=0.5, EI_Nm2=1.0),
        workspace_lo_m=[0.0, 0.0],
        workspace_hi_m=[1.0, 1.0],
        polygons=[],
        obstacles=[],
        grid=GridModel(),
        planner=PlannerModel(),
    )
    return json.dumps(scene.model_dump(mode="json"), indent=2, sort_keys=True)


# ---------------------------------------------------------------------------
# Click wiring


@click.group(name="steer")
@click.option("--server", default=None, metavar="URL",
              help="Base URL of a running service; default is in-process.")
@click.pass_context
def main(ctx, server):
    """Plan and inspect elastic-cable steering motions."""
    ctx.obj = _make_client(server)


@main.command("plan")
@click.option("--scene", "scene_path", required=True, type=click.Path())
@click.option("--start", "start_path", required=True, type=click.Path())
@click.option("--target", "target_path", required=True, type=click.Path())
@click.option("--out", "out_path", required=True, type=click.Path())
@click.pass_obj
def _plan(client, scene_path, start_path, target_path, out_path):
    """Plan a path between two configurations."""
    sys.exit(cmd_plan(client, scene_path, start_path, target_path, out_path))


@main.command("check")
@click.option("--scene", "scene_path", required=True, type=click.Path())
@click.option("--config", "config_path", required=True, type=click.Path())
@click.pass_obj
def _check(client, scene_path, config_path):
    """Feasibility and collision verdict for one configuration."""
    sys.exit(cmd_check(client, scene_path, config_path))


@main.command("shape")
@click.option("--scene", "scene_path", required=True, type=click.Path())
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--samples", default=512, show_default=True,
              type=click.IntRange(2, 100_000))
@click.option("--out", "out_path", default=None, type=click.Path())
@click.pass_obj
def _shape(client, scene_path, config_path, samples, out_path):
    """Sample the cable polyline for one configuration."""
    sys.exit(cmd_shape(client, scene_path, config_path, samples, out_path))


@main.command("energy")
@click.option("--scene", "scene_path", required=True, type=click.Path())
@click.option("--config", "config_path", required=True, type=click.Path())
@click.pass_obj
def _energy(client, scene_path, config_path):
    """Stored bending energy of one configuration."""
    sys.exit(cmd_energy(client, scene_path, config_path))


@main.command("gravity-ratio")
@click.option("--scene", "scene_path", required=True, type=click.Path())
@click.option("--config", "config_path", required=True, type=click.Path())
@click.pass_obj
def _gravity_ratio(client, scene_path, config_path):
    """Gravitational-to-elastic energy ratio of one configuration."""
    sys.exit(cmd_gravity_ratio(client, scene_path, config_path))


@main.command("render")
@click.option("--path", "path_path", required=True, type=click.Path())
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--frames", default=8, show_default=True,
              type=click.IntRange(1, 512))
@click.pass_obj
def _render(client, path_path, out_dir, frames):
    """Write SVG snapshots of a planned path."""
    sys.exit(cmd_render(client, path_path, out_dir, frames))


@main.command("verify")
@click.option("--suite", default="all", show_default=True,
              type=click.Choice(list(SUITES) + ["all"]))
@click.pass_obj
def _verify(client, suite):
    """Re-derive library constants and identities; exit 4 on failure."""
    sys.exit(cmd_verify(client, suite))


@main.command("defaults")
def _defaults():
    """Print a scene file with every numeric default filled in."""
    click.echo(default_scene_block())


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
def _serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app
    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
