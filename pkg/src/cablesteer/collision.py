"""Cable-vs-obstacle collision checking.

The 2-D pipeline runs in stages: obstacle polygons arrive already split
into convex pieces (done once per scene), the cable is covered by one
bounding triangle per convex arc, triangle/piece pairs are pruned by a
separating-axis test, surviving pieces are clipped to the (slightly
inflated) triangle, and the clipped region is finally tested against an
adaptively flattened arc polyline.  Verdicts carry a witness; they are
guaranteed only for clearances above the documented guard band since
the flattening is tolerance-bounded, not exact.

The semi-spatial case reduces to 2-D: each 3-D obstacle is intersected
with the cable's deformation plane, the cross-section is conservatively
polygonized (outward Hausdorff error <= 1e-4 m for cylinder ellipses),
and the planar checker runs in plane coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull

from .elastica import Config2D, Config3D, frame, plane_attitude, shape_local
from .elliptic import complete_K
from .geometry import (BoundingTriangle, ConvexPiece, bounding_triangles,
                       clip_convex, convex_contains, signed_area)

FLATTEN_TOL = 1e-6  # meters; sagitta bound for arc flattening
CLEARANCE_GUARD = 1e-4  # meters; verdicts guaranteed outside this band


@dataclass(frozen=True)
class CollisionReport:
    """Boolean verdict plus, when colliding, a witness tuple
    (arclength s, obstacle id, world point)."""

    colliding: bool
    witness: tuple | None = None

    def __post_init__(self):
        if self.colliding != (self.witness is not None):
            raise ValueError("witness must be present iff colliding")


# --------------------------------------------------------------------------
# 3-D obstacle types


@dataclass(frozen=True)
class Cylinder:
    base_center: np.ndarray
    axis: np.ndarray  # unit vector
    radius: float
    height: float

    def __post_init__(self):
        c = np.asarray(self.base_center, dtype=float).reshape(3)
        a = np.asarray(self.axis, dtype=float).reshape(3)
        norm = float(np.linalg.norm(a))
        if norm < 1e-12:
            raise ValueError("cylinder axis must be a nonzero vector")
        if self.radius <= 0 or self.height <= 0:
            raise ValueError("cylinder radius and height must be positive")
        object.__setattr__(self, "base_center", c)
        object.__setattr__(self, "axis", a / norm)


@dataclass(frozen=True)
class ConvexPolyhedron:
    """Convex hull of the given vertices (at least 4, non-coplanar)."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 3 or len(v) < 4:
            raise ValueError("polyhedron needs >= 4 3-D vertices")
        try:
            hull = ConvexHull(v)
        except Exception as exc:
            raise ValueError(f"degenerate polyhedron: {exc}") from exc
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "_hull", hull)

    @property
    def hull(self) -> ConvexHull:
        return self._hull


Obstacle3D = Cylinder | ConvexPolyhedron


# --------------------------------------------------------------------------
# Flattened-arc vs convex-region primitives


def _segment_point_dist(P: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    ab = b - a
    denom = float(ab @ ab)
    if denom == 0.0:
        return np.linalg.norm(P - a, axis=-1)
    t = np.clip(((P - a) @ ab) / denom, 0.0, 1.0)
    closest = a + t[..., None] * ab
    return np.linalg.norm(P - closest, axis=-1)


def _polyline_region_hits(pts: np.ndarray, region: np.ndarray,
                          band: float) -> np.ndarray:
    """Per-sample hit flags: the sample is inside the region (grown by
    band) or one of its incident chords passes within band of the
    region boundary."""
    hits = convex_contains(region, pts, eps=band)
    m = len(region)
    seg_hit = np.zeros(len(pts) - 1, dtype=bool)
    A, B = pts[:-1], pts[1:]
    for j in range(m):
        c, d = region[j], region[(j + 1) % m]
        # proper crossing of chord and edge
        e = d - c
        d1 = e[0] * (A[:, 1] - c[1]) - e[1] * (A[:, 0] - c[0])
        d2 = e[0] * (B[:, 1] - c[1]) - e[1] * (B[:, 0] - c[0])
        f = B - A
        d3 = f[:, 0] * (c[1] - A[:, 1]) - f[:, 1] * (c[0] - A[:, 0])
        d4 = f[:, 0] * (d[1] - A[:, 1]) - f[:, 1] * (d[0] - A[:, 0])
        seg_hit |= (d1 * d2 < 0) & (d3 * d4 < 0)
        # proximity of chord endpoints to the edge and edge endpoints
        # to the chord
        seg_hit |= _segment_point_dist(A, c, d) <= band
        seg_hit |= _segment_point_dist(B, c, d) <= band
        for q in (c, d):
            ab = f
            denom = np.einsum("ij,ij->i", ab, ab)
            t = np.clip(np.einsum("ij,ij->i", q - A, ab)
                        / np.where(denom == 0, 1.0, denom), 0.0, 1.0)
            closest = A + t[:, None] * ab
            seg_hit |= np.linalg.norm(q - closest, axis=1) <= band
    hits[:-1] |= seg_hit
    hits[1:] |= seg_hit
    return hits


def _arc_samples(config: Config2D, s_span, flatten_tol: float) -> np.ndarray:
    sa, sb = float(s_span[0]), float(s_span[1])
    p = config.params
    rt = 4.0 * complete_K(p.k) / p.Ltilde
    kappa_max = 2.0 * p.k * rt
    if kappa_max > 0.0:
        delta = math.sqrt(8.0 * flatten_tol / kappa_max)
        n = max(1, int(math.ceil((sb - sa) / delta)))
    else:
        n = 1
    return np.linspace(sa, sb, n + 1)


def _arc_points(config: Config2D, s: np.ndarray) -> np.ndarray:
    xt, yt = shape_local(s, config.params)
    base, M = frame(config)
    return base + np.stack([xt, yt], axis=1) @ M.T


def _region_area(region: np.ndarray) -> float:
    return abs(signed_area(region))


def _arc_region_witness(config: Config2D, s_span, region: np.ndarray,
                        flatten_tol: float, inflation: float):
    """First flattened sample that hits the region, or None.  The hit
    band is the flattening tolerance plus the cable inflation radius."""
    scale = max(1.0, float(np.max(np.abs(region))))
    if _region_area(region) <= 1e-15 * scale * scale:
        return None
    band = flatten_tol + inflation
    s = _arc_samples(config, s_span, flatten_tol)
    pts = _arc_points(config, s)
    hits = _polyline_region_hits(pts, region, band)
    idx = np.flatnonzero(hits)
    if len(idx) == 0:
        return None
    i = int(idx[0])
    return float(s[i]), pts[i]


def arc_region_intersects(config: Config2D, s_span, region,
                          flatten_tol: float = FLATTEN_TOL,
                          inflation: float = 0.0) -> bool:
    """Does the cable arc over s_span intersect the convex region?
    Exact up to the documented band: flattening sagitta below
    flatten_tol, verdict band flatten_tol + inflation."""
    verts = region.vertices if isinstance(region, ConvexPiece) else np.asarray(region)
    return _arc_region_witness(config, s_span, verts, flatten_tol, inflation) is not None


# --------------------------------------------------------------------------
# Stage III pruning and triangle offsetting


def _sat_separated(A: np.ndarray, B: np.ndarray, margin: float) -> bool:
    """True if an edge-normal axis of either polygon separates A and B
    by more than margin.  Conservative: never separates overlapping or
    nearly touching polygons."""
    for P, Q in ((A, B), (B, A)):
        e = np.roll(P, -1, axis=0) - P
        lengths = np.hypot(e[:, 0], e[:, 1])
        ok = lengths > 0
        n = np.stack([e[:, 1], -e[:, 0]], axis=1)[ok] / lengths[ok, None]
        if len(n) == 0:
            continue
        projP = n @ P.T
        projQ = n @ Q.T
        gap = projQ.min(axis=1) - projP.max(axis=1)
        if np.any(gap > margin):
            return True
    return False


def _offset_convex(verts: np.ndarray, r: float) -> np.ndarray:
    """Mitered outward offset of a CCW convex polygon; contains the
    Minkowski sum with a disc of radius r."""
    if r <= 0.0:
        return verts
    n = len(verts)
    e = np.roll(verts, -1, axis=0) - verts
    lengths = np.hypot(e[:, 0], e[:, 1])
    lengths[lengths == 0] = 1.0
    normals = np.stack([e[:, 1], -e[:, 0]], axis=1) / lengths[:, None]
    out = []
    for i in range(n):
        n_prev = normals[i - 1]
        n_cur = normals[i]
        a_prev = verts[i] + r * n_prev
        a_cur = verts[i] + r * n_cur
        d_prev = e[i - 1]
        d_cur = e[i]
        denom = d_prev[0] * d_cur[1] - d_prev[1] * d_cur[0]
        if abs(denom) < 1e-14 * max(1.0, lengths[i - 1] * lengths[i]):
            out.append(a_cur)
            continue
        rhs = a_cur - a_prev
        t = (rhs[0] * d_cur[1] - rhs[1] * d_cur[0]) / denom
        out.append(a_prev + t * d_prev)
    return np.array(out)


def _triangle_region(tri: BoundingTriangle, grow: float) -> np.ndarray | None:
    """CCW triangle grown outward, or a thick chord band for degenerate
    arcs."""
    if not tri.degenerate:
        return _offset_convex(tri.ccw_vertices(), grow)
    a, b = tri.v_start, tri.v_end
    d = b - a
    ln = float(np.hypot(*d))
    if ln < 1e-15:
        n = np.array([grow, 0.0])
        d = np.array([0.0, grow])
        return np.array([a - n - d, a + n - d, a + n + d, a - n + d])
    t = d / ln
    n = np.array([-t[1], t[0]])
    g = max(grow, 1e-12)
    return np.array([a - g * t - g * n, b + g * t - g * n,
                     b + g * t + g * n, a - g * t + g * n])


# --------------------------------------------------------------------------
# Main predicates


def _collide_pieces(config: Config2D, L: float, pieces: list,
                    obstacle_ids: list, inflation: float,
                    flatten_tol: float, prune: bool) -> CollisionReport:
    band = flatten_tol + inflation
    grow = band + 1e-9
    tris = bounding_triangles(config, L)
    for tri in tris:
        tri_verts = tri.ccw_vertices() if not tri.degenerate else None
        clip_region = _triangle_region(tri, grow)
        for pid, piece in enumerate(pieces):
            pv = piece.vertices
            if prune:
                probe = tri_verts if tri_verts is not None else clip_region
                if _sat_separated(probe, pv, band + 1e-9):
                    continue
            region = clip_convex(pv, clip_region)
            if region is None:
                continue
            hit = _arc_region_witness(config, (tri.s_start, tri.s_end),
                                      region, flatten_tol, inflation)
            if hit is not None:
                s, point = hit
                return CollisionReport(True, (s, obstacle_ids[pid], point))
    return CollisionReport(False, None)


def collides_2d(config: Config2D, L: float, pieces: list, *,
                obstacle_ids: list | None = None, inflation: float = 0.0,
                flatten_tol: float = FLATTEN_TOL,
                prune: bool = True) -> CollisionReport:
    """Planar cable-vs-pieces collision verdict with witness.  The
    obstacle id in the witness is the index into pieces unless
    obstacle_ids remaps pieces to their source obstacles."""
    if obstacle_ids is None:
        obstacle_ids = list(range(len(pieces)))
    return _collide_pieces(config, L, pieces, obstacle_ids,
                           inflation, flatten_tol, prune)


def plane_coords_config(config: Config3D) -> Config2D:
    """The cable in deformation-plane coordinates: base at the plane
    origin, same in-plane tangent and shape."""
    return Config2D(0.0, 0.0, config.phi_base, config.params)


def collides_3d(config: Config3D, L: float, obstacles: list, *,
                inflation: float = 0.0, flatten_tol: float = FLATTEN_TOL,
                prune: bool = True) -> CollisionReport:
    """Semi-spatial verdict: slice every obstacle by the deformation
    plane and run the planar pipeline in plane coordinates.  Witness
    points are mapped back to world coordinates; the obstacle id is the
    index into obstacles."""
    origin = np.array([config.x0, config.y0, config.z0])
    A = plane_attitude(config)
    pieces = []
    ids = []
    for oid, ob in enumerate(obstacles):
        for verts in slice_obstacle(ob, origin, A):
            pieces.append(ConvexPiece(verts))
            ids.append(oid)
    report = _collide_pieces(plane_coords_config(config), L, pieces, ids,
                             inflation, flatten_tol, prune)
    if not report.colliding:
        return report
    s, oid, p2 = report.witness
    p3 = origin + A[:, 0] * p2[0] + A[:, 1] * p2[1]
    return CollisionReport(True, (s, oid, p3))


# --------------------------------------------------------------------------
# Plane slicing of 3-D obstacles


def _hull2d(points: np.ndarray) -> np.ndarray | None:
    """Monotone-chain convex hull, CCW; None if degenerate."""
    pts = np.unique(np.round(points, 14), axis=0)
    if len(pts) < 3:
        return None
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts = pts[order]

    def build(seq):
        out = []
        for p in seq:
            while len(out) >= 2:
                o, a = out[-2], out[-1]
                if (a[0] - o[0]) * (p[1] - o[1]) - (a[1] - o[1]) * (p[0] - o[0]) <= 0:
                    out.pop()
                else:
                    break
            out.append(p)
        return out

    lower = build(pts)
    upper = build(pts[::-1])
    hull = np.array(lower[:-1] + upper[:-1])
    if len(hull) < 3 or abs(signed_area(hull)) < 1e-18:
        return None
    return hull


def _clip_halfplane(verts: np.ndarray, point: np.ndarray,
                    normal: np.ndarray) -> np.ndarray | None:
    """Keep the side normal points away from: {x : (x-point).normal <= 0}."""
    out = []
    n = len(verts)
    vals = (verts - point) @ normal
    for i in range(n):
        cur, nxt = verts[i], verts[(i + 1) % n]
        vc, vn = vals[i], vals[(i + 1) % n]
        if vc <= 0:
            out.append(cur)
        if (vc < 0 < vn) or (vn < 0 < vc):
            t = vc / (vc - vn)
            out.append(cur + t * (nxt - cur))
    if len(out) < 3:
        return None
    arr = np.array(out)
    if abs(signed_area(arr)) < 1e-18:
        return None
    return arr


def slice_cylinder(cyl: Cylinder, origin: np.ndarray,
                   basis: np.ndarray, tol: float = 1e-4) -> list:
    """Cross-section of a finite cylinder with the plane spanned by
    basis[:,0], basis[:,1] through origin, as 0 or 1 CCW polygon in
    plane coordinates.  The curved boundary is circumscribed so the
    polygon contains the true section with outward error <= tol."""
    u1, u2 = basis[:, 0], basis[:, 1]
    a = cyl.axis
    w0 = (origin - cyl.base_center)
    w0 = w0 - (w0 @ a) * a
    w1 = u1 - (u1 @ a) * a
    w2 = u2 - (u2 @ a) * a
    M = np.array([[w1 @ w1, w1 @ w2], [w1 @ w2, w2 @ w2]])
    q = np.array([w0 @ w1, w0 @ w2])
    c0 = float(w0 @ w0)
    r2 = cyl.radius * cyl.radius
    evals, evecs = np.linalg.eigh(M)
    if evals[1] < 1e-14:
        return []
    if evals[0] > 1e-12 * evals[1]:
        center = np.linalg.solve(M, -q)
        qmin = c0 + float(q @ center)
        if r2 - qmin <= 0.0:
            return []
        semi = np.sqrt((r2 - qmin) / evals)  # [major along evecs[:,0], minor]
        major = float(np.max(semi))
        ratio = 1.0 + tol / major
        nsides = int(math.ceil(math.pi / math.acos(min(1.0, 1.0 / ratio))))
        nsides = min(max(nsides, 8), 4096)
        sec = 1.0 / math.cos(math.pi / nsides)
        theta = 2.0 * math.pi * np.arange(nsides) / nsides
        ring = (np.outer(np.cos(theta), evecs[:, 0] * semi[0])
                + np.outer(np.sin(theta), evecs[:, 1] * semi[1]))
        verts = center + sec * ring
        if signed_area(verts) < 0:
            verts = verts[::-1].copy()
    else:
        # plane (nearly) contains the axis direction: the quadratic only
        # bounds one eigendirection (a strip); caps bound the other
        g = evecs.T @ q
        w1e = evals[1]
        disc = g[1] * g[1] - w1e * (c0 - r2)
        if disc <= 0:
            return []
        lo1 = (-g[1] - math.sqrt(disc)) / w1e
        hi1 = (-g[1] + math.sqrt(disc)) / w1e
        B = float(np.linalg.norm(origin - cyl.base_center)) + cyl.height + cyl.radius + 1.0
        corners = np.array([[-B, lo1], [B, lo1], [B, hi1], [-B, hi1]])
        verts = (evecs @ corners.T).T  # eigen coords back to plane coords
        if signed_area(verts) < 0:
            verts = verts[::-1].copy()
    # cap half-planes: 0 <= t0 + a1*alpha + a2*beta <= height
    t0 = float((origin - cyl.base_center) @ a)
    cap = np.array([u1 @ a, u2 @ a])
    cap_norm = float(np.hypot(*cap))
    if cap_norm > 1e-14:
        anchor_lo = -t0 * cap / (cap_norm * cap_norm)
        verts = _clip_halfplane(verts, anchor_lo, -cap)
        if verts is None:
            return []
        anchor_hi = (cyl.height - t0) * cap / (cap_norm * cap_norm)
        verts = _clip_halfplane(verts, anchor_hi, cap)
        if verts is None:
            return []
    else:
        # plane parallel to the caps: t is constant over the whole plane
        if not 0.0 <= t0 <= cyl.height:
            return []
    return [verts]


def slice_polyhedron(poly: ConvexPolyhedron, origin: np.ndarray,
                     basis: np.ndarray) -> list:
    """Exact cross-section polygon (if any) of a convex polyhedron."""
    u1, u2, nrm = basis[:, 0], basis[:, 1], basis[:, 2]
    v = poly.vertices
    d = (v - origin) @ nrm
    scale = max(1.0, float(np.max(np.abs(d))))
    on = np.abs(d) <= 1e-12 * scale
    pts = [v[i] for i in np.flatnonzero(on)]
    edges = set()
    for simplex in poly.hull.simplices:
        for i in range(3):
            a, b = simplex[i], simplex[(i + 1) % 3]
            edges.add((min(a, b), max(a, b)))
    for i, j in sorted(edges):
        if on[i] or on[j]:
            continue
        if d[i] * d[j] < 0:
            t = d[i] / (d[i] - d[j])
            pts.append(v[i] + t * (v[j] - v[i]))
    if len(pts) < 3:
        return []
    arr = np.asarray(pts)
    plane_pts = np.stack([(arr - origin) @ u1, (arr - origin) @ u2], axis=1)
    hull = _hull2d(plane_pts)
    return [] if hull is None else [hull]


def slice_obstacle(ob: Obstacle3D, origin: np.ndarray,
                   basis: np.ndarray) -> list:
    if isinstance(ob, Cylinder):
        return slice_cylinder(ob, origin, basis)
    return slice_polyhedron(ob, origin, basis)
