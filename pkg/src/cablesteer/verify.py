"""Self-contained derivation suites behind `steer verify`.

Each suite re-derives a quantity the library depends on (elliptic
identities, the closure and self-touch moduli, the closed-form energy,
collision verdicts) with an independent method and reports whether the
library agrees.  Reports are deterministic: fixed seeds, repr-formatted
floats, no timing or environment data in the body.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .collision import collides_2d
from .elastica import (CableProperties, Config2D, ElasticaParams, curvature,
                       sample_shape, shape_local)
from .elliptic import complete_E, complete_K, epsilon, jacobi
from .energy import elastic_energy, hamiltonian
from .geometry import Polygon, decompose_convex

_TOL_IDENT = 1e-11


@dataclass(frozen=True)
class SuiteReport:
    name: str
    ok: bool
    lines: tuple

    def text(self) -> str:
        body = "\n".join(self.lines)
        verdict = "PASS" if self.ok else "FAIL"
        return f"[{self.name}]\n{body}\n[{self.name}] {verdict}\n"


def suite_elliptic(n: int = 10_000, seed: int = 1234) -> SuiteReport:
    rng = np.random.default_rng(seed)
    ks = rng.uniform(0.0, 0.99, size=n)
    us = rng.uniform(-20.0, 20.0, size=n)
    e1 = e2 = e3 = e4 = 0.0
    for u, k in zip(us.tolist(), ks.tolist()):
        _, sn, cn, dn = jacobi(u, k)
        e1 = max(e1, abs(sn * sn + cn * cn - 1.0))
        e2 = max(e2, abs(dn * dn + k * k * sn * sn - 1.0))
        K = complete_K(k)
        _, sn4, cn4, _ = jacobi(u + 4.0 * K, k)
        e3 = max(e3, abs(sn4 - sn), abs(cn4 - cn))
        e4 = max(e4, abs(epsilon(u + 2.0 * K, k)
                         - epsilon(u, k) - 2.0 * complete_E(k)))
    worst = max(e1, e2, e3, e4)
    lines = (
        f"samples={n} seed={seed} k<=0.99",
        f"sn^2+cn^2-1        max |dev| = {e1!r}",
        f"dn^2+k^2*sn^2-1    max |dev| = {e2!r}",
        f"sn,cn 4K-period    max |dev| = {e3!r}",
        f"eps(u+2K)-eps-2E   max |dev| = {e4!r}",
        f"tolerance = {_TOL_IDENT!r}",
    )
    return SuiteReport("elliptic", worst < _TOL_IDENT, lines)


def _full_period_points(k: float, n: int) -> np.ndarray:
    params = ElasticaParams(k=k, s0=0.0, Ltilde=1.0)
    s = np.linspace(0.0, 1.0, n)
    xt, yt = shape_local(s, params)
    return np.stack([xt, yt], axis=1)


def _self_intersects(pts: np.ndarray) -> bool:
    a, b = pts[:-1], pts[1:]
    n = len(a)
    for i in range(n - 2):
        A, B = a[i], b[i]
        C, D = a[i + 2:], b[i + 2:]
        r = B - A
        d1 = np.cross(C - A, r)
        d2 = np.cross(D - A, r)
        e = D - C
        d3 = np.cross(np.atleast_2d(A - C), e)
        d4 = np.cross(np.atleast_2d(B - C), e)
        if np.any((d1 * d2 < 0.0) & (d3.ravel() * d4.ravel() < 0.0)):
            return True
    return False


def suite_constants(samples: int = 2001) -> SuiteReport:
    # closure modulus: root of 2E(k) - K(k)
    kc = brentq(lambda k: 2.0 * complete_E(k) - complete_K(k), 0.85, 0.95,
                xtol=1e-14)
    kc_ok = 0.9085 <= kc <= 0.9095
    end = _full_period_points(kc, 2)[-1]
    closure = float(np.hypot(end[0], end[1]))
    closure_ok = closure < 1e-8

    # self-touch modulus: bisection on the polyline intersection oracle
    lo, hi = 0.80, 0.90
    assert not _self_intersects(_full_period_points(lo, samples))
    assert _self_intersects(_full_period_points(hi, samples))
    while hi - lo > 5e-5:
        mid = 0.5 * (lo + hi)
        if _self_intersects(_full_period_points(mid, samples)):
            hi = mid
        else:
            lo = mid
    kmax_ok = 0.852 <= lo and hi <= 0.858

    lines = (
        f"closure modulus root = {kc!r} in [0.9085, 0.9095]: {kc_ok}",
        f"full-period closure |endpoint| = {closure!r} < 1e-08: {closure_ok}",
        f"self-touch bracket = [{lo!r}, {hi!r}] in [0.852, 0.858]: {kmax_ok}"
        f" (polyline {samples} pts)",
    )
    return SuiteReport("constants", kc_ok and closure_ok and kmax_ok, lines)


def suite_energy(n: int = 300, seed: int = 2024) -> SuiteReport:
    rng = np.random.default_rng(seed)
    props = CableProperties(L=0.5, EI=1.3)
    worst_j = 0.0
    worst_h = 0.0
    s_grid = np.linspace(0.0, props.L, 50)
    for _ in range(n):
        k = rng.uniform(0.02, 0.97)
        lt = rng.uniform(0.8 * props.L, 5.0 * props.L)
        s0 = rng.uniform(0.0, lt * 0.999)
        params = ElasticaParams(k=k, s0=s0, Ltilde=lt)
        cfg = Config2D(0.0, 0.0, rng.uniform(-math.pi, math.pi), params)
        closed = elastic_energy(cfg, props)
        val, _ = quad(lambda s: curvature(s, params, props) ** 2,
                      0.0, props.L, epsabs=1e-13, epsrel=1e-13, limit=400)
        ref = 0.5 * props.EI * val
        worst_j = max(worst_j, abs(closed - ref) / max(abs(ref), 1e-30))
        H = hamiltonian(s_grid, cfg, props)
        href = float(np.mean(H))
        worst_h = max(worst_h,
                      float(np.max(np.abs(H - href))) / max(abs(href), 1e-30))
    lines = (
        f"configs={n} seed={seed}",
        f"closed-form vs quadrature   max rel = {worst_j!r} (tol 1e-08)",
        f"conserved-quantity spread   max rel = {worst_h!r} (tol 1e-09)",
    )
    return SuiteReport("energy", worst_j < 1e-8 and worst_h < 1e-9, lines)


def _point_in_polygon(pts: np.ndarray, poly: np.ndarray) -> np.ndarray:
    inside = np.zeros(len(pts), dtype=bool)
    x, y = pts[:, 0], pts[:, 1]
    n = len(poly)
    for i in range(n):
        x1, y1 = poly[i]
        x2, y2 = poly[(i + 1) % n]
        crosses = ((y1 > y) != (y2 > y))
        with np.errstate(invalid="ignore", divide="ignore"):
            xi = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
        inside ^= crosses & (x < np.where(crosses, xi, np.inf))
    return inside


def _dist_to_polygon(pts: np.ndarray, poly: np.ndarray) -> np.ndarray:
    best = np.full(len(pts), np.inf)
    n = len(poly)
    for i in range(n):
        a = poly[i]
        e = poly[(i + 1) % n] - a
        ee = float(e @ e)
        t = np.clip(((pts - a) @ e) / ee, 0.0, 1.0) if ee > 0 else 0.0
        proj = a + np.outer(t, e)
        best = np.minimum(best, np.linalg.norm(pts - proj, axis=1))
    return best


def _oracle_clearance(cfg, L, polys, n=20_001) -> float:
    """Signed clearance of a dense cable polyline: negative inside."""
    s = np.linspace(0.0, L, n)
    pts = sample_shape(cfg, s, CableProperties(L=L, EI=1.0))[0]
    worst = np.inf
    for poly in polys:
        d = _dist_to_polygon(pts, poly)
        d[_point_in_polygon(pts, poly)] *= -1.0
        worst = min(worst, float(np.min(d)))
    return worst


def suite_collision(n_scenes: int = 200, seed: int = 31415,
                    guard: float = 1e-4) -> SuiteReport:
    rng = np.random.default_rng(seed)
    agree = 0
    skipped = 0
    prune_mismatch = 0
    done = 0
    while done < n_scenes:
        k = rng.uniform(0.05, 0.85)
        lt = rng.uniform(0.6, 2.2)
        s0 = rng.uniform(0.0, lt * 0.98)
        cfg = Config2D(rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2),
                       rng.uniform(-math.pi, math.pi),
                       ElasticaParams(k=k, s0=s0, Ltilde=lt))
        L = 0.5
        polys = []
        for _ in range(rng.integers(1, 4)):
            raw = rng.uniform(-0.6, 0.8, size=(rng.integers(4, 9), 2))
            hull_pts = _convex_hull(raw)
            if hull_pts is not None:
                polys.append(hull_pts)
        if not polys:
            continue
        clearance = _oracle_clearance(cfg, L, polys)
        if abs(clearance) <= guard:
            skipped += 1
            continue
        pieces = []
        ids = []
        for j, poly in enumerate(polys):
            for piece in decompose_convex(Polygon(poly)):
                pieces.append(piece)
                ids.append(j)
        rep_on = collides_2d(cfg, L, pieces, obstacle_ids=ids, prune=True)
        rep_off = collides_2d(cfg, L, pieces, obstacle_ids=ids, prune=False)
        if rep_on.colliding != rep_off.colliding:
            prune_mismatch += 1
        if rep_on.colliding == (clearance < 0.0):
            agree += 1
        done += 1
    lines = (
        f"scenes={n_scenes} seed={seed} guard={guard!r}",
        f"verdicts agreeing with dense-polyline oracle: {agree}/{n_scenes}",
        f"near-boundary scenes regenerated: {skipped}",
        f"prune on/off verdict mismatches: {prune_mismatch}",
    )
    return SuiteReport("collision",
                       agree == n_scenes and prune_mismatch == 0, lines)


def _convex_hull(pts: np.ndarray):
    pts = np.unique(np.round(pts, 12), axis=0)
    if len(pts) < 3:
        return None
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts = pts[order]

    def half(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and np.cross(out[-1] - out[-2],
                                             p - out[-2]) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = half(pts)
    upper = half(pts[::-1])
    hull = np.array(lower[:-1] + upper[:-1])
    return hull if len(hull) >= 3 else None


SUITES = {
    "elliptic": suite_elliptic,
    "constants": suite_constants,
    "energy": suite_energy,
    "collision": suite_collision,
}


def run_suites(names=("elliptic", "constants", "energy", "collision")):
    """Run the named suites in order; returns (reports, all_ok)."""
    reports = [SUITES[name]() for name in names]
    return reports, all(r.ok for r in reports)
