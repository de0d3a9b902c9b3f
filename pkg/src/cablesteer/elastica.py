"""Closed-form model of an inextensible elastic cable held at both ends.

The cable is an inflectional elastica determined by three shape
parameters: the elliptic modulus k, the arclength phase s0 locating the
physical cable within one period, and the full-period length Ltilde.
With lam = (4 K(k) / Ltilde)^2 the curvature and tangent are

    kappa(s) = -2 k sqrt(lam) cn(sqrt(lam) (s + s0), k)
    phi(s)   = phi0 - 2 asin(k sn(sqrt(lam) (s + s0), k))

and the local-frame position integrates these in closed form through
the second-kind integral.  A configuration adds the base pose: planar
configs place the base at (x0, y0) with base tangent phi_base; the
semi-spatial case keeps the deformation planar but lets the plane
rotate about the world x and y axes and translate in z.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .elliptic import complete_K, epsilon, jacobi


def wrap_angle(a: float) -> float:
    """Reduce an angle to (-pi, pi]."""
    r = math.remainder(float(a), math.tau)
    if r <= -math.pi:
        r += math.tau
    return r


def _require_finite(name, *values):
    for v in values:
        if not math.isfinite(v):
            raise ValueError(f"{name} must be finite, got {v!r}")


@dataclass(frozen=True)
class CableProperties:
    """Physical cable constants: length L (m), bending stiffness EI
    (N m^2), linear density rho (kg/m), gravity g (m/s^2)."""

    L: float
    EI: float
    rho: float = 0.0
    g: float = 9.80665

    def __post_init__(self):
        _require_finite("cable properties", self.L, self.EI, self.rho, self.g)
        if self.L <= 0 or self.EI <= 0 or self.rho < 0 or self.g < 0:
            raise ValueError(
                f"need L > 0, EI > 0, rho >= 0, g >= 0; got L={self.L}, "
                f"EI={self.EI}, rho={self.rho}, g={self.g}"
            )


@dataclass(frozen=True)
class ElasticaParams:
    """Shape parameters (k, s0, Ltilde); s0 is stored reduced modulo
    Ltilde so 0 <= s0 < Ltilde always holds."""

    k: float
    s0: float
    Ltilde: float

    def __post_init__(self):
        _require_finite("elastica params", self.k, self.s0, self.Ltilde)
        if not 0.0 <= self.k < 1.0:
            raise ValueError(f"modulus k must satisfy 0 <= k < 1, got {self.k}")
        if self.Ltilde <= 0:
            raise ValueError(f"period length Ltilde must be positive, got {self.Ltilde}")
        s0 = math.fmod(self.s0, self.Ltilde)
        if s0 < 0:
            s0 += self.Ltilde
        object.__setattr__(self, "s0", s0)


@dataclass(frozen=True)
class Config2D:
    """Planar configuration: base position, base tangent, shape."""

    x0: float
    y0: float
    phi_base: float
    params: ElasticaParams

    def __post_init__(self):
        _require_finite("config", self.x0, self.y0, self.phi_base)
        object.__setattr__(self, "phi_base", wrap_angle(self.phi_base))


@dataclass(frozen=True)
class Config3D:
    """Semi-spatial configuration: base position in 3-D, deformation
    plane attitude (rotations about world x then y), in-plane base
    tangent, shape."""

    x0: float
    y0: float
    z0: float
    phi_x: float
    phi_y: float
    phi_base: float
    params: ElasticaParams

    def __post_init__(self):
        _require_finite("config", self.x0, self.y0, self.z0,
                        self.phi_x, self.phi_y, self.phi_base)
        for name in ("phi_x", "phi_y", "phi_base"):
            object.__setattr__(self, name, wrap_angle(getattr(self, name)))


Config = Config2D | Config3D


@dataclass(frozen=True)
class DerivedElastica:
    """Quantities derived from the shape parameters.  lam is the
    squared spatial frequency (4K/Ltilde)^2 in 1/m^2, lam_r = EI*lam
    the internal force magnitude (N), phi0_axis the direction of the
    elastica axis, sigma = 1 - 2k^2, and H_star = EI*lam*sigma the
    conserved Hamiltonian value."""

    lam: float
    lam_r: float
    phi0_axis: float
    sigma: float
    H_star: float


@dataclass(frozen=True)
class CablePoint:
    """Pointwise cable state: position (2- or 3-vector), in-plane
    tangent angle, and signed curvature at arclength s."""

    s: float
    position: np.ndarray
    tangent_angle: float
    curvature: float


@dataclass(frozen=True)
class GripState:
    """Endpoint poses of both hands: pose0 = (position, tangent) at
    s=0 and poseL at s=L.  Tangents are angles in the planar case and
    unit 3-vectors in the semi-spatial case."""

    pose0: tuple
    poseL: tuple

    @property
    def position0(self):
        return self.pose0[0]

    @property
    def positionL(self):
        return self.poseL[0]


def derive(params: ElasticaParams, props: CableProperties,
           phi_base: float = 0.0) -> DerivedElastica:
    """Derived constants for a shape; phi_base feeds the axis angle
    phi0 = phi_base + 2 asin(k sn(sqrt(lam) s0, k))."""
    K = complete_K(params.k)
    rt_lam = 4.0 * K / params.Ltilde
    lam = rt_lam * rt_lam
    sn0 = jacobi(rt_lam * params.s0, params.k)[1]
    phi0 = wrap_angle(phi_base + 2.0 * math.asin(params.k * sn0))
    sigma = 1.0 - 2.0 * params.k * params.k
    lam_r = props.EI * lam
    return DerivedElastica(lam=lam, lam_r=lam_r, phi0_axis=phi0,
                           sigma=sigma, H_star=lam_r * sigma)


def _params_of(config_or_params):
    if isinstance(config_or_params, ElasticaParams):
        return config_or_params
    return config_or_params.params


def _check_arclength(s, L: float):
    tol = 1e-9 * L
    smin = np.min(s) if np.ndim(s) else s
    smax = np.max(s) if np.ndim(s) else s
    if smin < -tol or smax > L + tol:
        raise ValueError(f"arclength outside [0, L={L}]: range [{smin}, {smax}]")


def _rt_lam(params: ElasticaParams) -> float:
    return 4.0 * complete_K(params.k) / params.Ltilde


def curvature(s, params: ElasticaParams, props: CableProperties):
    """Signed curvature kappa(s) = -2k sqrt(lam) cn(sqrt(lam)(s+s0), k).

    Accepts scalar or array s in [0, L]."""
    _check_arclength(s, props.L)
    rt = _rt_lam(params)
    cn = jacobi(rt * (np.asarray(s, dtype=float) + params.s0), params.k)[2]
    out = -2.0 * params.k * rt * cn
    return float(out) if np.ndim(s) == 0 else out


def tangent(s, config: Config, props: CableProperties | None = None):
    """In-plane tangent angle phi(s), continuous in s (not wrapped).

    The arclength domain check runs when props is supplied."""
    if props is not None:
        _check_arclength(s, props.L)
    params = config.params
    rt = _rt_lam(params)
    sn0 = jacobi(rt * params.s0, params.k)[1]
    phi0 = config.phi_base + 2.0 * math.asin(params.k * sn0)
    sn = jacobi(rt * (np.asarray(s, dtype=float) + params.s0), params.k)[1]
    out = phi0 - 2.0 * np.arcsin(params.k * sn)
    return float(out) if np.ndim(s) == 0 else out


def shape_local(s, params: ElasticaParams, props: CableProperties | None = None):
    """Local-frame coordinates (x_t, y_t) before the axis rotation and
    base translation.  Accepts scalar or array s."""
    if props is not None:
        _check_arclength(s, props.L)
    rt = _rt_lam(params)
    k = params.k
    u0 = rt * params.s0
    u = rt * (np.asarray(s, dtype=float) + params.s0)
    xt = (2.0 / rt) * (epsilon(u, k) - epsilon(u0, k)) - np.asarray(s, dtype=float)
    yt = (-2.0 * k / rt) * (jacobi(u, k)[2] - jacobi(u0, k)[2])
    if np.ndim(s) == 0:
        return float(xt), float(yt)
    return xt, yt


def _axis_matrix(phi0: float) -> np.ndarray:
    """The (reflection-type, det = -1) local-to-axis frame map
    [[cos, sin], [sin, -cos]] evaluated at phi0."""
    c, sn = math.cos(phi0), math.sin(phi0)
    return np.array([[c, sn], [sn, -c]])


def rot_x(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def rot_y(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def plane_attitude(config: Config3D) -> np.ndarray:
    """Rotation carrying the deformation plane: columns 0 and 1 span
    the plane, column 2 is its normal."""
    return rot_x(config.phi_x) @ rot_y(config.phi_y)


def frame(config: Config):
    """Base point and the (dim x 2) map from local coordinates to
    world displacement."""
    params = config.params
    rt = _rt_lam(params)
    sn0 = jacobi(rt * params.s0, params.k)[1]
    phi0 = config.phi_base + 2.0 * math.asin(params.k * sn0)
    R = _axis_matrix(phi0)
    if isinstance(config, Config2D):
        return np.array([config.x0, config.y0]), R
    base = np.array([config.x0, config.y0, config.z0])
    A = plane_attitude(config)
    M = A[:, :2] @ R  # (3 x 2): local plane coords to world
    return base, M


def sample_shape(config: Config, s, props: CableProperties):
    """Vectorized cable sampling.  Returns (positions, tangent angles,
    curvatures) at the given arclengths; positions are world-frame rows."""
    _check_arclength(s, props.L)
    s_arr = np.atleast_1d(np.asarray(s, dtype=float))
    params = config.params
    xt, yt = shape_local(s_arr, params)
    base, M = frame(config)
    pos = base + np.stack([xt, yt], axis=1) @ M.T
    phi = tangent(s_arr, config)
    kap = curvature(s_arr, params, props)
    return pos, np.atleast_1d(phi), np.atleast_1d(kap)


def shape_world(config: Config, s: float, props: CableProperties) -> CablePoint:
    """World-frame cable point at arclength s."""
    pos, phi, kap = sample_shape(config, float(s), props)
    return CablePoint(s=float(s), position=pos[0], tangent_angle=float(phi[0]),
                      curvature=float(kap[0]))


def _tangent_vector(config: Config, phi):
    """World tangent: (cos phi, sin phi) in-plane, lifted by the plane
    attitude for 3-D configs."""
    t2 = np.stack([np.cos(phi), np.sin(phi)], axis=-1)
    if isinstance(config, Config2D):
        return t2
    A = plane_attitude(config)
    return t2 @ A[:, :2].T


def psi(config: Config, props: CableProperties) -> GripState:
    """Endpoint map: poses of both hands at s = 0 and s = L."""
    pos, phi, _ = sample_shape(config, np.array([0.0, props.L]), props)
    if isinstance(config, Config2D):
        return GripState(pose0=(pos[0], float(phi[0])),
                         poseL=(pos[1], float(phi[1])))
    tv = _tangent_vector(config, phi)
    return GripState(pose0=(pos[0], tv[0]), poseL=(pos[1], tv[1]))


def grip_distance(a: GripState, b: GripState, angle_scale: float = 1.0) -> float:
    """Euclidean norm of the endpoint-map difference.  Angle components
    are wrapped to (-pi, pi] and scaled by angle_scale (m/rad); 3-D
    tangents compare as unit vectors scaled the same way."""
    acc = 0.0
    for (pa, ta), (pb, tb) in ((a.pose0, b.pose0), (a.poseL, b.poseL)):
        d = pa - pb
        acc += float(d @ d)
        if np.ndim(ta) == 0:
            dt = angle_scale * wrap_angle(float(ta) - float(tb))
            acc += dt * dt
        else:
            dt = angle_scale * (ta - tb)
            acc += float(dt @ dt)
    return math.sqrt(acc)


def costates(config: Config, props: CableProperties, s):
    """Costates of the bending-energy optimal control problem:
    constant force components (lam_x, lam_y) = lam_r (cos phi0, sin
    phi0) and the moment costate lam_phi(s) = -EI kappa(s)."""
    d = derive(config.params, props, config.phi_base)
    lam_x = d.lam_r * math.cos(d.phi0_axis)
    lam_y = d.lam_r * math.sin(d.phi0_axis)
    lam_phi = -props.EI * np.asarray(curvature(s, config.params, props))
    if np.ndim(s) == 0:
        lam_phi = float(lam_phi)
    return lam_x, lam_y, lam_phi


def hamiltonian(s, config: Config, props: CableProperties):
    """Pointwise Hamiltonian lam_x cos phi + lam_y sin phi + lam_phi
    kappa + EI kappa^2 / 2; constant along the cable and equal to
    H_star for exact shapes."""
    lam_x, lam_y, lam_phi = costates(config, props, s)
    phi = tangent(s, config, props)
    kap = curvature(s, config.params, props)
    return (lam_x * np.cos(phi) + lam_y * np.sin(phi)
            + np.asarray(lam_phi) * kap + 0.5 * props.EI * kap * kap)
