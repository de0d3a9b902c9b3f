"""Configuration-space membership and grid neighborhoods.

C_stable collects shapes that are locally stable: modulus below the
figure-eight constant k_c, period at least the cable length, and (at
the full-period boundary Ltilde = L) phases away from the two unstable
equal-tangent lines s0 = L/4 and 3L/4.  C_free additionally bounds the
modulus by the first self-touch constant k_max, which conservatively
excludes self-intersecting shapes.  Both constants are stored here and
re-derived by the verify suites.

The planner walks an axis-aligned lattice over (x0, y0, [z0], angles,
Ltilde, s0, sigma) where sigma = 1 - 2 k^2 is the gridded modulus
coordinate; k is recovered on demand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .elastica import (Config, Config2D, Config3D, ElasticaParams, GripState,
                       shape_local)
from .elliptic import complete_K

# Modulus of the full-period figure-eight closure (root of 2E(k) = K(k));
# stability bound for full-period shapes.
K_C = 0.908
# Modulus at which the full-period shape first touches itself;
# conservative non-self-intersection bound.
K_MAX = 0.855


@dataclass(frozen=True)
class SafetyConstants:
    k_c: float = K_C
    k_max: float = K_MAX

    def __post_init__(self):
        if not 0.0 < self.k_max < self.k_c < 1.0:
            raise ValueError("need 0 < k_max < k_c < 1")


def sigma_from_k(k: float) -> float:
    return 1.0 - 2.0 * k * k


def k_from_sigma(sigma: float) -> float:
    if sigma > 1.0:
        sigma = min(sigma, 1.0)
    k2 = 0.5 * (1.0 - sigma)
    if k2 >= 1.0:
        raise ValueError(f"sigma={sigma} maps outside the modulus range")
    return math.sqrt(max(0.0, k2))


def _default_tols(L: float, tol_L, tol_s):
    # half the default Ltilde / s0 grid steps (0.03 L and 0.01 L)
    if tol_L is None:
        tol_L = 0.015 * L
    if tol_s is None:
        tol_s = 0.005 * L
    return tol_L, tol_s


def in_C_stable(config: Config, L: float, tol_L: float | None = None,
                tol_s: float | None = None,
                constants: SafetyConstants = SafetyConstants()) -> bool:
    """Local stability: k < k_c, Ltilde >= L, and not on the fattened
    excluded lines s0 = L/4, 3L/4 at Ltilde = L."""
    p = config.params
    if not (0.0 <= p.k < constants.k_c):
        return False
    if p.Ltilde < L * (1.0 - 1e-12):
        return False
    tol_L, tol_s = _default_tols(L, tol_L, tol_s)
    if abs(p.Ltilde - L) <= tol_L:
        if abs(p.s0 - 0.25 * L) <= tol_s or abs(p.s0 - 0.75 * L) <= tol_s:
            return False
    return True


def in_C_free(config: Config, L: float, tol_L: float | None = None,
              tol_s: float | None = None,
              constants: SafetyConstants = SafetyConstants()) -> bool:
    """C_stable with the modulus further bounded by k_max, below which
    sub-full-period shapes cannot self-intersect."""
    if config.params.k >= constants.k_max:
        return False
    return in_C_stable(config, L, tol_L, tol_s, constants)


def grip_feasible(grip: GripState, L: float) -> bool:
    """Membership in the feasible endpoint set: hand separation <= L
    (closed boundary; an inextensible cable cannot span farther)."""
    d = np.asarray(grip.positionL) - np.asarray(grip.position0)
    return float(np.linalg.norm(d)) <= L * (1.0 + 1e-12)


# --------------------------------------------------------------------------
# Grid


@dataclass(frozen=True)
class GridAxis:
    name: str
    lo: float
    step: float
    count: int

    def value(self, i: int) -> float:
        return self.lo + self.step * i

    @property
    def hi(self) -> float:
        return self.value(self.count - 1)


AXES_2D = ("x0", "y0", "phi_base", "Ltilde", "s0", "sigma")
AXES_3D = ("x0", "y0", "z0", "phi_x", "phi_y", "phi_base", "Ltilde", "s0", "sigma")
_ANGLE_AXES = ("phi_x", "phi_y", "phi_base")


@dataclass(frozen=True)
class GridSpec:
    """Axis-aligned lattice over the configuration coordinates, plus
    the cable length the membership filters need."""

    axes: tuple[GridAxis, ...]
    mode: str  # "planar" | "semi-spatial"
    cable_L: float

    def __post_init__(self):
        names = tuple(a.name for a in self.axes)
        expected = AXES_2D if self.mode == "planar" else AXES_3D
        if names != expected:
            raise ValueError(f"grid axes {names} do not match mode {self.mode}")
        for a in self.axes:
            if a.step <= 0 or a.count < 1:
                raise ValueError(f"axis {a.name}: need step > 0 and count >= 1")
        lt = self.axis("Ltilde")
        if lt.lo < self.cable_L * (1.0 - 1e-12):
            raise ValueError("Ltilde grid extends below the cable length")

    @property
    def dim(self) -> int:
        return len(self.axes)

    def axis(self, name: str) -> GridAxis:
        for a in self.axes:
            if a.name == name:
                return a
        raise KeyError(name)

    @property
    def tol_L(self) -> float:
        return 0.5 * self.axis("Ltilde").step

    @property
    def tol_s0(self) -> float:
        return 0.5 * self.axis("s0").step

    @classmethod
    def build(cls, mode: str, L: float, workspace_lo, workspace_hi, *,
              dpos: float = 0.01, dangle: float = math.radians(2.0),
              dltilde_frac: float = 0.03, ds0_frac: float = 0.01,
              dsigma: float = 0.015, ltilde_max_frac: float = 4.0,
              sigma_min: float = -0.455) -> "GridSpec":
        """Default lattice: positions span the workspace, angles span a
        full turn, Ltilde in [L, ltilde_max_frac*L], s0 in [0, Ltilde
        max), sigma anchored so sigma = 1 (k = 0) is on-grid."""
        lo = np.asarray(workspace_lo, dtype=float)
        hi = np.asarray(workspace_hi, dtype=float)
        axes = []

        def linear(name, a, b, step):
            count = int(math.floor((b - a) / step + 1e-9)) + 1
            axes.append(GridAxis(name, float(a), float(step), max(count, 1)))

        names_pos = ("x0", "y0") if mode == "planar" else ("x0", "y0", "z0")
        for i, name in enumerate(names_pos):
            linear(name, lo[i], hi[i], dpos)
        n_ang = int(math.floor(math.tau / dangle + 1e-9))
        angle_names = ("phi_base",) if mode == "planar" else ("phi_x", "phi_y", "phi_base")
        for name in angle_names:
            axes.append(GridAxis(name, -math.pi, dangle, max(n_ang, 1)))
        linear("Ltilde", L, ltilde_max_frac * L, dltilde_frac * L)
        # s0 stops one step short of the Ltilde ceiling so s0 < Ltilde
        # can hold on every admissible cell
        n_s0 = int(math.floor(ltilde_max_frac * L / (ds0_frac * L) + 1e-9))
        axes.append(GridAxis("s0", 0.0, ds0_frac * L, max(n_s0, 1)))
        n_sig = int(math.floor((1.0 - sigma_min) / dsigma + 1e-9)) + 1
        axes.append(GridAxis("sigma", 1.0 - dsigma * (n_sig - 1), dsigma, n_sig))
        return cls(axes=tuple(axes), mode=mode, cable_L=L)


class OffGridError(ValueError):
    pass


def _coord_values(config: Config) -> dict:
    p = config.params
    vals = {"x0": config.x0, "y0": config.y0, "phi_base": config.phi_base,
            "Ltilde": p.Ltilde, "s0": p.s0, "sigma": sigma_from_k(p.k)}
    if isinstance(config, Config3D):
        vals.update({"z0": config.z0, "phi_x": config.phi_x, "phi_y": config.phi_y})
    return vals


def _axis_offset(axis: GridAxis, value: float) -> float:
    off = value - axis.lo
    if axis.name in _ANGLE_AXES:
        off = off % math.tau
        # value just below lo wraps to the top of the range; fold an
        # exact full turn back to index 0
        if off > math.tau - 0.5 * axis.step:
            off -= math.tau
    return off


def config_to_index(config: Config, grid: GridSpec, tol: float = 1e-6) -> tuple:
    """Lattice index of an on-grid config; OffGridError if any
    coordinate is farther than tol*step from its lattice line."""
    if (grid.mode == "planar") != isinstance(config, Config2D):
        raise ValueError("config dimensionality does not match grid mode")
    vals = _coord_values(config)
    idx = []
    for a in grid.axes:
        off = _axis_offset(a, vals[a.name])
        i = int(round(off / a.step))
        if abs(off - i * a.step) > tol * a.step or not 0 <= i < a.count:
            raise OffGridError(
                f"coordinate {a.name}={vals[a.name]!r} is off-grid "
                f"(nearest index {i} of {a.count})")
        idx.append(i)
    return tuple(idx)


def index_to_config(index: tuple, grid: GridSpec) -> Config:
    vals = {a.name: a.value(i) for a, i in zip(grid.axes, index)}
    params = ElasticaParams(k=k_from_sigma(vals["sigma"]), s0=vals["s0"],
                            Ltilde=vals["Ltilde"])
    if grid.mode == "planar":
        return Config2D(vals["x0"], vals["y0"], vals["phi_base"], params)
    return Config3D(vals["x0"], vals["y0"], vals["z0"], vals["phi_x"],
                    vals["phi_y"], vals["phi_base"], params)


def index_valid(index: tuple, grid: GridSpec) -> bool:
    """Bounds plus the lattice-level s0 < Ltilde requirement (so a cell
    never aliases a reduced-phase cell)."""
    for a, i in zip(grid.axes, index):
        if not 0 <= i < a.count:
            return False
    vals = {a.name: a.value(i) for a, i in zip(grid.axes, index)}
    return vals["s0"] < vals["Ltilde"] * (1.0 - 1e-12)


def neighbor_indices(index: tuple, grid: GridSpec) -> list:
    """One step along each axis, minus then plus, axes in order."""
    out = []
    for ax in range(grid.dim):
        for delta in (-1, 1):
            cand = list(index)
            cand[ax] += delta
            cand = tuple(cand)
            if index_valid(cand, grid):
                out.append(cand)
    return out


def neighbors(config: Config, grid: GridSpec,
              constants: SafetyConstants = SafetyConstants()) -> list:
    """Grid neighbors of an on-grid config (12 candidates in 6-D, 18 in
    9-D) filtered to bounds and C_free membership."""
    idx = config_to_index(config, grid)
    out = []
    for cand in neighbor_indices(idx, grid):
        cfg = index_to_config(cand, grid)
        if in_C_free(cfg, grid.cable_L, grid.tol_L, grid.tol_s0, constants):
            out.append(cfg)
    return out


# --------------------------------------------------------------------------
# Self-intersection oracle


def _segments_intersect_any(P: np.ndarray) -> bool:
    """True if any two non-adjacent segments of the polyline P cross."""
    A, B = P[:-1], P[1:]
    m = len(A)
    if m < 3:
        return False
    I, J = np.triu_indices(m, k=2)
    a, b, c, d = A[I], B[I], A[J], B[J]

    def cross(u, v):
        return u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0]

    d1 = cross(b - a, c - a)
    d2 = cross(b - a, d - a)
    d3 = cross(d - c, a - c)
    d4 = cross(d - c, b - c)
    return bool(np.any((d1 * d2 < 0.0) & (d3 * d4 < 0.0)))


def self_intersects(params: ElasticaParams, L: float,
                    chord_tol: float | None = None) -> bool:
    """Polyline self-intersection oracle: the cable is sampled densely
    enough that the chord sagitta error stays below chord_tol (default
    1e-4 L) using the curvature bound 2k sqrt(lam), then all
    non-adjacent segment pairs are tested."""
    if params.k == 0.0:
        return False
    if chord_tol is None:
        chord_tol = 1e-4 * L
    rt = 4.0 * complete_K(params.k) / params.Ltilde
    kappa_max = 2.0 * params.k * rt
    delta = math.sqrt(8.0 * chord_tol / kappa_max)
    n = max(8, int(math.ceil(L / delta)))
    s = np.linspace(0.0, L, n + 1)
    xt, yt = shape_local(s, params)
    return _segments_intersect_any(np.stack([xt, yt], axis=1))
