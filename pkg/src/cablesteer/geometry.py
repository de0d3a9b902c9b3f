"""Planar geometry substrate for the collision pipeline.

Provides validated simple polygons, convex decomposition (ear-clipping
triangulation followed by greedy convex merging), convex-convex
clipping, and the bounding-triangle construction that covers each
convex cable arc by the triangle of its chord endpoints and the
intersection of its endpoint tangents.

Orientation tests use a floating-point filter with an exact rational
fallback, so clipping and simplicity checks stay consistent near
touching contacts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction

import numpy as np

from .elastica import Config2D, frame, shape_local
from .elliptic import complete_K, jacobi

# Floating-point filter constant for the 2x2 orientation determinant
# (relative rounding bound of the naive evaluation).
_ORIENT_FILTER = 3.3306690738754716e-16


def orient(a, b, c) -> int:
    """Exact sign of the orientation determinant of the triangle
    (a, b, c): +1 counterclockwise, -1 clockwise, 0 collinear."""
    ax, ay = float(a[0]), float(a[1])
    bx, by = float(b[0]), float(b[1])
    cx, cy = float(c[0]), float(c[1])
    detleft = (bx - ax) * (cy - ay)
    detright = (by - ay) * (cx - ax)
    det = detleft - detright
    errbound = _ORIENT_FILTER * (abs(detleft) + abs(detright))
    if det > errbound:
        return 1
    if det < -errbound:
        return -1
    # fall back to exact rational arithmetic
    fa, fb = Fraction(bx) - Fraction(ax), Fraction(by) - Fraction(ay)
    fc, fd = Fraction(cx) - Fraction(ax), Fraction(cy) - Fraction(ay)
    exact = fa * fd - fb * fc
    return (exact > 0) - (exact < 0)


def signed_area(vertices: np.ndarray) -> float:
    x, y = vertices[:, 0], vertices[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _segments_properly_cross(a, b, c, d) -> bool:
    """Segment ab intersects cd in a point interior to at least one of
    them, or they overlap collinearly."""
    d1 = orient(c, d, a)
    d2 = orient(c, d, b)
    d3 = orient(a, b, c)
    d4 = orient(a, b, d)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and d1 and d2 and d3 and d4:
        return True

    def on_segment(p, q, r):
        # r collinear with pq: does it land inside the closed box?
        return (min(p[0], q[0]) <= r[0] <= max(p[0], q[0])
                and min(p[1], q[1]) <= r[1] <= max(p[1], q[1]))

    if d1 == 0 and on_segment(c, d, a):
        return True
    if d2 == 0 and on_segment(c, d, b):
        return True
    if d3 == 0 and on_segment(a, b, c):
        return True
    if d4 == 0 and on_segment(a, b, d):
        return True
    return False


def is_simple(vertices: np.ndarray) -> bool:
    """No two non-adjacent edges intersect; adjacent edges meet only at
    their shared endpoint."""
    n = len(vertices)
    for i in range(n):
        a, b = vertices[i], vertices[(i + 1) % n]
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue
            c, d = vertices[j], vertices[(j + 1) % n]
            if _segments_properly_cross(a, b, c, d):
                return False
    return True


class PolygonError(ValueError):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class Polygon:
    """Simple polygon, vertices counterclockwise.  Clockwise input is
    reversed on construction; degenerate or self-intersecting input is
    rejected."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
            raise PolygonError("polygon-shape", "polygon needs >= 3 2-D vertices")
        if not np.all(np.isfinite(v)):
            raise PolygonError("polygon-finite", "polygon vertices must be finite")
        for i in range(len(v)):
            if np.all(v[i] == v[(i + 1) % len(v)]):
                raise PolygonError("polygon-duplicate",
                                   f"duplicate consecutive vertex at index {i}")
        area = signed_area(v)
        if area < 0:
            v = v[::-1].copy()
            area = -area
        if area <= 0 or not is_simple(v):
            raise PolygonError("polygon-not-simple",
                               "polygon is self-intersecting or has zero area")
        object.__setattr__(self, "vertices", v)


@dataclass(frozen=True)
class ConvexPiece:
    """Convex polygon, counterclockwise."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
            raise ValueError("convex piece needs >= 3 2-D vertices")
        scale = max(1.0, float(np.max(np.abs(v))))
        slack = 1e-12 * scale * scale
        e = np.roll(v, -1, axis=0) - v
        cr = e[:, 0] * np.roll(e, -1, axis=0)[:, 1] - e[:, 1] * np.roll(e, -1, axis=0)[:, 0]
        if np.any(cr < -slack):
            raise ValueError("piece is not convex/counterclockwise")
        object.__setattr__(self, "vertices", v)

    @property
    def area(self) -> float:
        return signed_area(self.vertices)


def convex_contains(vertices: np.ndarray, points: np.ndarray,
                    eps: float = 0.0) -> np.ndarray:
    """Inclusive membership of points in a CCW convex polygon; eps > 0
    grows the polygon by that margin along edge normals."""
    p = np.atleast_2d(points)
    v = vertices
    e = np.roll(v, -1, axis=0) - v
    elen = np.hypot(e[:, 0], e[:, 1])
    rel = p[:, None, :] - v[None, :, :]
    cr = e[None, :, 0] * rel[:, :, 1] - e[None, :, 1] * rel[:, :, 0]
    return np.all(cr >= -eps * elen[None, :], axis=1)


# --------------------------------------------------------------------------
# Convex decomposition


def _point_in_triangle_inclusive(a, b, c, p) -> bool:
    return orient(a, b, p) >= 0 and orient(b, c, p) >= 0 and orient(c, a, p) >= 0


def triangulate(poly: Polygon) -> list:
    """Ear-clipping triangulation; returns index triples into
    poly.vertices.  Zero-area (collinear) ears are clipped but not
    reported."""
    v = poly.vertices
    idx = list(range(len(v)))
    tris = []

    def ear_ok(h, strict: bool) -> bool:
        p, c, n = v[idx[h - 1]], v[idx[h]], v[idx[(h + 1) % len(idx)]]
        o = orient(p, c, n)
        if o < 0 or (strict and o == 0):
            return False
        if o == 0:
            return True  # degenerate ear: clip silently
        for j in idx:
            if j in (idx[h - 1], idx[h], idx[(h + 1) % len(idx)]):
                continue
            if _point_in_triangle_inclusive(p, c, n, v[j]):
                return False
        return True

    while len(idx) > 3:
        clipped = False
        for strict in (True, False):
            for h in range(len(idx)):
                if ear_ok(h, strict):
                    tri = (idx[h - 1], idx[h], idx[(h + 1) % len(idx)])
                    if orient(v[tri[0]], v[tri[1]], v[tri[2]]) > 0:
                        tris.append(tri)
                    idx.pop(h)
                    clipped = True
                    break
            if clipped:
                break
        if not clipped:
            raise PolygonError("polygon-not-simple",
                               "triangulation failed; polygon is not simple")
    if orient(v[idx[0]], v[idx[1]], v[idx[2]]) > 0:
        tris.append(tuple(idx))
    return tris


def _piece_convex_at(v, ring, h) -> bool:
    return orient(v[ring[h - 1]], v[ring[h]], v[ring[(h + 1) % len(ring)]]) >= 0


def decompose_convex(poly: Polygon) -> list:
    """Split a simple polygon into interior-disjoint convex pieces:
    triangulate, then greedily merge across shared diagonals whenever
    the union stays convex.  Piece count never exceeds n - 2."""
    v = poly.vertices
    n = len(v)
    convex_already = all(
        orient(v[i - 1], v[i], v[(i + 1) % n]) >= 0 for i in range(n))
    if convex_already:
        return [ConvexPiece(v.copy())]

    rings = [list(t) for t in triangulate(poly)]

    def try_merge(ra, rb):
        # find a shared directed edge a->b in ra that appears b->a in rb
        set_b = set(rb)
        for i in range(len(ra)):
            a, b = ra[i], ra[(i + 1) % len(ra)]
            if a in set_b and b in set_b:
                jb = rb.index(b)
                if rb[(jb + 1) % len(rb)] != a:
                    continue
                # path in rb from a forward to b, exclusive
                ja = rb.index(a)
                path = []
                t = (ja + 1) % len(rb)
                while t != jb:
                    path.append(rb[t])
                    t = (t + 1) % len(rb)
                merged = ra[: i + 1] + path + ra[i + 1:]
                if all(_piece_convex_at(v, merged, h) for h in range(len(merged))):
                    return merged
        return None

    changed = True
    while changed:
        changed = False
        for ia in range(len(rings)):
            for ib in range(ia + 1, len(rings)):
                merged = try_merge(rings[ia], rings[ib])
                if merged is not None:
                    rings[ia] = merged
                    rings.pop(ib)
                    changed = True
                    break
            if changed:
                break
    return [ConvexPiece(v[ring].copy()) for ring in rings]


# --------------------------------------------------------------------------
# Convex clipping


def clip_convex(subject: np.ndarray, clipper: np.ndarray):
    """Sutherland-Hodgman intersection of two CCW convex polygons.
    Returns the vertex array of the intersection or None if (nearly)
    empty."""
    out = [np.asarray(p, dtype=float) for p in subject]
    for i in range(len(clipper)):
        a, b = clipper[i], clipper[(i + 1) % len(clipper)]
        ex, ey = b[0] - a[0], b[1] - a[1]
        if ex == 0.0 and ey == 0.0:
            continue
        inp, out = out, []
        if not inp:
            return None

        def side(p):
            return ex * (p[1] - a[1]) - ey * (p[0] - a[0])

        sprev = side(inp[-1])
        prev = inp[-1]
        for cur in inp:
            scur = side(cur)
            if scur >= 0.0:
                if sprev < 0.0:
                    t = sprev / (sprev - scur)
                    out.append(prev + t * (cur - prev))
                out.append(cur)
            elif sprev >= 0.0:
                t = sprev / (sprev - scur)
                out.append(prev + t * (cur - prev))
            prev, sprev = cur, scur
    if not out:
        return None
    # drop duplicate consecutive points produced by on-edge vertices
    verts = [out[0]]
    scale = max(1.0, max(float(np.max(np.abs(p))) for p in out))
    for p in out[1:]:
        if np.max(np.abs(p - verts[-1])) > 1e-14 * scale:
            verts.append(p)
    while len(verts) > 1 and np.max(np.abs(verts[0] - verts[-1])) <= 1e-14 * scale:
        verts.pop()
    if len(verts) < 3:
        return None
    arr = np.array(verts)
    if signed_area(arr) <= 0.0:
        return None
    return arr


# --------------------------------------------------------------------------
# Bounding triangles


@dataclass(frozen=True)
class BoundingTriangle:
    """Cover of one convex cable arc: chord endpoints v_start, v_end
    and the intersection m_mid of the endpoint tangent lines.  When the
    tangents are within 1e-9 rad of parallel the arc is (numerically) a
    chord; m_mid is then the chord midpoint and degenerate is set."""

    v_start: np.ndarray
    m_mid: np.ndarray
    v_end: np.ndarray
    s_start: float
    s_end: float
    degenerate: bool

    def ccw_vertices(self) -> np.ndarray:
        v = np.array([self.v_start, self.m_mid, self.v_end])
        return v if signed_area(v) >= 0 else v[::-1].copy()


def clip(piece: ConvexPiece, tri: BoundingTriangle):
    """Intersection of an obstacle piece with a bounding triangle's
    interior; None when empty or when the triangle is degenerate."""
    if tri.degenerate:
        return None
    verts = clip_convex(piece.vertices, tri.ccw_vertices())
    return None if verts is None else ConvexPiece(verts)


def quarter_splits(params, L: float) -> list:
    """Arclengths strictly inside (0, L) where s + s0 crosses a
    multiple of Ltilde/4: the curvature zeros and extrema."""
    quarter = params.Ltilde / 4.0
    eps = 1e-12 * L
    m_lo = int(math.floor((params.s0 + eps) / quarter)) + 1
    m_hi = int(math.ceil((params.s0 + L - eps) / quarter)) - 1
    return [m * quarter - params.s0 for m in range(m_lo, m_hi + 1)]


@lru_cache(maxsize=65536)
def _local_arcs(params, L: float) -> tuple:
    """Per-arc local-frame data (start, apex/mid, end, s-span, degenerate
    flag).  Depends only on the deformation parameters, so it is cached;
    world placement is a rigid map applied by the caller."""
    breaks = [0.0] + quarter_splits(params, L) + [L]
    s_arr = np.asarray(breaks)
    xt, yt = shape_local(s_arr, params)
    rt = 4.0 * complete_K(params.k) / params.Ltilde
    sn = jacobi(rt * (s_arr + params.s0), params.k)[1]
    theta = 2.0 * np.arcsin(np.clip(params.k * sn, -1.0, 1.0))
    arcs = []
    for i in range(len(breaks) - 1):
        va = (float(xt[i]), float(yt[i]))
        vb = (float(xt[i + 1]), float(yt[i + 1]))
        ta, tb = float(theta[i]), float(theta[i + 1])
        dturn = tb - ta
        if abs(dturn) < 1e-9:
            m = (0.5 * (va[0] + vb[0]), 0.5 * (va[1] + vb[1]))
            arcs.append((va, m, vb, breaks[i], breaks[i + 1], True))
            continue
        da = (math.cos(ta), math.sin(ta))
        db = (math.cos(tb), math.sin(tb))
        denom = da[0] * db[1] - da[1] * db[0]  # sin(dturn), safely away from 0
        rx, ry = vb[0] - va[0], vb[1] - va[1]
        t = (rx * db[1] - ry * db[0]) / denom
        m = (va[0] + t * da[0], va[1] + t * da[1])
        arcs.append((va, m, vb, breaks[i], breaks[i + 1], False))
    return tuple(arcs)


def bounding_triangles(config: Config2D, L: float) -> list:
    """Cover the cable with one triangle per convex arc: split at
    quarter-period crossings, intersect the endpoint tangent lines.
    Tangent-line intersections survive the local-to-world affine map, so
    the cached local triangles are simply mapped through the frame."""
    base, M = frame(config)
    out = []
    for va, m, vb, sa, sb, deg in _local_arcs(config.params, L):
        pts = base + np.array([va, m, vb]) @ M.T
        out.append(BoundingTriangle(pts[0], pts[1], pts[2], sa, sb, deg))
    return out
