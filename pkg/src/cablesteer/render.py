"""SVG snapshots of cable configurations along a planned path.

Planar scenes render in world XY.  Semi-spatial scenes render in the
current waypoint's deformation plane: obstacles are sliced by that
plane and the start/target overlays are projected orthographically
onto it (out-of-plane offsets are dropped, so overlays are a guide,
not a measurement).

Output is deterministic: a fixed element order, fixed formatting, and
a camera computed from the whole path rather than per frame.
"""

from __future__ import annotations

import os

import numpy as np

from .collision import slice_obstacle
from .elastica import CableProperties, Config3D, plane_attitude, sample_shape
from .planner import Path
from .scene import Scene

CABLE_SAMPLES = 512

_STYLE_OBSTACLE = 'fill="#c8ccd4" stroke="#8a8f98" stroke-width="0.75"'
_STYLE_CABLE = 'fill="none" stroke="#1f6feb" stroke-width="2"'
_STYLE_START = ('fill="none" stroke="#2da44e" stroke-width="1.5" '
                'stroke-dasharray="6 3"')
_STYLE_TARGET = ('fill="none" stroke="#cf222e" stroke-width="1.5" '
                 'stroke-dasharray="2 3"')


def _fmt(v: float) -> str:
    return f"{v:.3f}"


class _Camera:
    """World-to-pixel map with a fixed output width and padded bounds."""

    def __init__(self, lo, hi, width_px: float = 640.0, pad_px: float = 12.0):
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        span = np.maximum(hi - lo, 1e-9)
        self.scale = (width_px - 2.0 * pad_px) / span[0]
        self.lo = lo
        self.pad = pad_px
        self.width = width_px
        self.height = span[1] * self.scale + 2.0 * pad_px
        self.y_hi = hi[1]

    def map(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(pts)
        x = (pts[:, 0] - self.lo[0]) * self.scale + self.pad
        y = (self.y_hi - pts[:, 1]) * self.scale + self.pad
        return np.stack([x, y], axis=1)


def _polyline(cam: _Camera, pts: np.ndarray, style: str) -> str:
    px = cam.map(pts)
    coords = " ".join(f"{_fmt(p[0])},{_fmt(p[1])}" for p in px)
    return f'<polyline points="{coords}" {style}/>'


def _polygon(cam: _Camera, pts: np.ndarray, style: str) -> str:
    px = cam.map(pts)
    coords = " ".join(f"{_fmt(p[0])},{_fmt(p[1])}" for p in px)
    return f'<polygon points="{coords}" {style}/>'


def _circle(cam: _Camera, pt, r_px: float, style: str) -> str:
    px = cam.map(np.asarray(pt, dtype=float))[0]
    return (f'<circle cx="{_fmt(px[0])}" cy="{_fmt(px[1])}" r="{r_px}" '
            f'{style}/>')


def _cable_points(config, props: CableProperties) -> np.ndarray:
    s = np.linspace(0.0, props.L, CABLE_SAMPLES)
    return sample_shape(config, s, props)[0]


def _project(points3: np.ndarray, origin: np.ndarray,
             basis: np.ndarray) -> np.ndarray:
    return (points3 - origin) @ basis[:, :2]


class _FrameContent:
    """Geometry of one snapshot, in view coordinates (meters)."""

    def __init__(self, obstacles, start, target, cable):
        self.obstacles = obstacles  # list of (n,2) polygons
        self.start = start
        self.target = target
        self.cable = cable

    def all_points(self) -> np.ndarray:
        chunks = list(self.obstacles) + [self.start, self.target, self.cable]
        return np.concatenate([c for c in chunks if len(c)], axis=0)


def _planar_frame(scene: Scene, config, start, target) -> _FrameContent:
    props = scene.props
    return _FrameContent(
        obstacles=[p.vertices for p in scene.polygons],
        start=_cable_points(start, props),
        target=_cable_points(target, props),
        cable=_cable_points(config, props))


def _spatial_frame(scene: Scene, config: Config3D, start,
                   target) -> _FrameContent:
    props = scene.props
    origin = np.array([config.x0, config.y0, config.z0])
    basis = plane_attitude(config)
    slabs = []
    for ob in scene.obstacles:
        for piece in slice_obstacle(ob, origin, basis):
            slabs.append(np.asarray(piece))
    return _FrameContent(
        obstacles=slabs,
        start=_project(_cable_points(start, props), origin, basis),
        target=_project(_cable_points(target, props), origin, basis),
        cable=_project(_cable_points(config, props), origin, basis))


def _frame_indices(n_waypoints: int, frames: int) -> list:
    if frames < 1:
        raise ValueError("frames must be >= 1")
    if frames == 1:
        return [n_waypoints - 1]
    return [round(i * (n_waypoints - 1) / (frames - 1)) for i in range(frames)]


def _frame_svg(cam: _Camera, content: _FrameContent) -> str:
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_fmt(cam.width)}" height="{_fmt(cam.height)}" '
        f'viewBox="0 0 {_fmt(cam.width)} {_fmt(cam.height)}">',
        f'<rect width="{_fmt(cam.width)}" height="{_fmt(cam.height)}" '
        f'fill="#ffffff"/>',
    ]
    for poly in content.obstacles:
        parts.append(_polygon(cam, poly, _STYLE_OBSTACLE))
    parts.append(_polyline(cam, content.start, _STYLE_START))
    parts.append(_polyline(cam, content.target, _STYLE_TARGET))
    parts.append(_polyline(cam, content.cable, _STYLE_CABLE))
    parts.append(_circle(cam, content.cable[0], 3.0, 'fill="#1f6feb"'))
    parts.append(_circle(cam, content.cable[-1], 2.5,
                         'fill="#ffffff" stroke="#1f6feb"'))
    parts.append('</svg>')
    return "\n".join(parts) + "\n"


def render_svgs(path: Path, scene: Scene, frames: int) -> list:
    """SVG snapshot documents (strings) along the path, shared camera."""
    indices = _frame_indices(len(path.configs), frames)
    start, target = path.configs[0], path.configs[-1]
    contents = []
    for i in indices:
        cfg = path.configs[i]
        if scene.mode == "planar":
            contents.append(_planar_frame(scene, cfg, start, target))
        else:
            contents.append(_spatial_frame(scene, cfg, start, target))

    pts = np.concatenate([c.all_points() for c in contents], axis=0)
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    if scene.mode == "planar":
        lo = np.minimum(lo, np.asarray(scene.workspace_lo[:2]))
        hi = np.maximum(hi, np.asarray(scene.workspace_hi[:2]))
    margin = 0.05 * max(float(np.max(hi - lo)), 1e-9)
    cam = _Camera(lo - margin, hi + margin)
    return [_frame_svg(cam, content) for content in contents]


def render_frames(path: Path, scene: Scene, out_dir, frames: int) -> list:
    """Write SVG snapshots of the path to out_dir (frame_000.svg, ...)
    and return the written file paths in order."""
    svgs = render_svgs(path, scene, frames)
    os.makedirs(out_dir, exist_ok=True)
    digits = max(3, len(str(len(svgs) - 1)))
    written = []
    for n, svg in enumerate(svgs):
        dest = os.path.join(str(out_dir), f"frame_{n:0{digits}d}.svg")
        with open(dest, "w", encoding="utf-8") as fh:
            fh.write(svg)
        written.append(dest)
    return written
