"""Bending energy, gravity comparison, and the endpoint-bin survey.

The elastic term has a closed form in the incomplete elliptic integral
of the second kind, so no quadrature is involved.  The gravitational
term is a genuine integral and is evaluated with adaptive quadrature
against the cable's lowest point as the potential datum; it factors as
rho * g * (a purely geometric integral), which keeps the reported
ratio exactly linear in rho and g.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.optimize import minimize_scalar

from .cspace import K_C
from .elastica import (CableProperties, Config2D, Config3D, ElasticaParams,
                       curvature, frame, shape_local, tangent)
from .elliptic import complete_K, epsilon, jacobi


def elastic_energy(config, props: CableProperties) -> float:
    """Stored bending energy of the held cable (joules), closed form."""
    p = config.params
    rt = 4.0 * complete_K(p.k) / p.Ltilde
    u0 = rt * p.s0
    u1 = rt * (p.s0 + props.L)
    term = epsilon(u1, p.k) - epsilon(u0, p.k) - (1.0 - p.k * p.k) * rt * props.L
    return 2.0 * props.EI * rt * term


def hamiltonian(s, config, props: CableProperties):
    """Conserved quantity along a held shape: the endpoint force
    resolved along the shape axis minus the bending energy density,
    lam_r * cos(phi(s) - phi0) - EI * kappa(s)^2 / 2.  Constant in s
    for every equilibrium configuration; useful as a consistency check
    between the tangent and curvature evaluations."""
    p = config.params
    rt = 4.0 * complete_K(p.k) / p.Ltilde
    lam_r = props.EI * rt * rt
    sn0 = jacobi(rt * p.s0, p.k)[1]
    phi0 = config.phi_base + 2.0 * math.asin(p.k * sn0)
    phi = tangent(s, config, props)
    kap = curvature(s, p, props)
    return lam_r * np.cos(np.asarray(phi) - phi0) - 0.5 * props.EI * np.asarray(kap) ** 2


@dataclass(frozen=True)
class EnergyBreakdown:
    """Elastic and gravitational energy (joules) and their ratio; the
    ratio is None for a straight cable with no stored bending."""

    elastic_J: float
    gravity_J: float
    ratio: float | None


def _height_profile(config: Config3D):
    """z(s) along the cable as a scalar function."""
    base, M = frame(config)
    z0 = base[2]
    mz = M[2]

    def z_of_s(s):
        xt, yt = shape_local(s, config.params)
        return z0 + mz[0] * xt + mz[1] * yt

    return z_of_s


def _lowest_point(z_of_s, L: float) -> float:
    s = np.linspace(0.0, L, 2049)
    zs = np.array([z_of_s(si) for si in s])
    i = int(np.argmin(zs))
    lo = s[max(i - 1, 0)]
    hi = s[min(i + 1, len(s) - 1)]
    if hi > lo:
        res = minimize_scalar(z_of_s, bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-12})
        return min(float(res.fun), float(zs[i]))
    return float(zs[i])


def gravity_ratio(config: Config3D, props: CableProperties) -> EnergyBreakdown:
    """Gravitational potential (datum: the cable's lowest point) next
    to the stored bending energy.  Requires a 3-D configuration since
    height needs the plane attitude."""
    if not isinstance(config, Config3D):
        raise TypeError("gravity comparison needs a 3-D configuration")
    z_of_s = _height_profile(config)
    z_min = _lowest_point(z_of_s, props.L)
    geom, _ = quad(lambda s: z_of_s(s) - z_min, 0.0, props.L,
                   epsabs=1e-10, limit=200)
    j_gravity = props.rho * props.g * geom
    j_elastic = elastic_energy(config, props)
    ratio = None if j_elastic == 0.0 else j_gravity / j_elastic
    return EnergyBreakdown(j_elastic, j_gravity, ratio)


# --------------------------------------------------------------------------
# Endpoint-bin survey


@dataclass(frozen=True)
class SurveyRow:
    k: float
    s0: float
    Ltilde: float
    xL: float
    yL: float
    J: float
    bin: tuple


def _endpoint_bin(x: float, y: float, width: float) -> tuple:
    return (int(math.floor(x / width)), int(math.floor(y / width)))


def _survey_row(k: float, s0: float, ltilde: float,
                props: CableProperties, width: float) -> SurveyRow:
    params = ElasticaParams(k=k, s0=s0, Ltilde=ltilde)
    config = Config2D(0.0, 0.0, 0.0, params)
    xt, yt = shape_local(props.L, params)
    base, M = frame(config)
    p = base + M @ np.array([xt, yt])
    j = elastic_energy(config, props)
    return SurveyRow(k=k, s0=params.s0, Ltilde=ltilde,
                     xL=float(p[0]), yL=float(p[1]), J=j,
                     bin=_endpoint_bin(float(p[0]), float(p[1]), width))


def stability_survey(k_grid, s0_grid, props: CableProperties,
                     endpoint_bins: float, ltilde_grid=None) -> list:
    """Sweep deformation parameters, record the far endpoint and the
    stored energy, and bin endpoints on a square lattice of the given
    width (meters).

    Two families are swept: full-period shapes (Ltilde = L) over
    k_grid x s0_grid, and, when ltilde_grid is given, sub-period shapes
    with the deformation window centered (s0 at Ltilde/4 + (Ltilde-L)/2
    and at 3*Ltilde/4 + (Ltilde-L)/2) over k_grid x ltilde_grid.
    Row order is deterministic."""
    if endpoint_bins <= 0.0:
        raise ValueError("endpoint bin width must be positive")
    rows = []
    for k in k_grid:
        for s0 in s0_grid:
            rows.append(_survey_row(float(k), float(s0), props.L,
                                    props, endpoint_bins))
    if ltilde_grid is not None:
        for k in k_grid:
            for lt in ltilde_grid:
                lt = float(lt)
                half_slack = 0.5 * (lt - props.L)
                for quarter in (0.25, 0.75):
                    rows.append(_survey_row(float(k),
                                            quarter * lt + half_slack,
                                            lt, props, endpoint_bins))
    return rows


def survey_to_csv(rows) -> str:
    """Deterministic CSV (repr-formatted floats)."""
    lines = ["k,s0_m,Ltilde_m,xL_m,yL_m,J_J,bin_x,bin_y"]
    for r in rows:
        lines.append(f"{r.k!r},{r.s0!r},{r.Ltilde!r},{r.xL!r},{r.yL!r},"
                     f"{r.J!r},{r.bin[0]},{r.bin[1]}")
    return "\n".join(lines) + "\n"


def min_energy_by_bin(rows) -> dict:
    """Lowest-energy row per endpoint bin (first wins ties)."""
    best: dict = {}
    for r in rows:
        cur = best.get(r.bin)
        if cur is None or r.J < cur.J:
            best[r.bin] = r
    return best


@dataclass(frozen=True)
class BinReport:
    bin: tuple
    n_low: int            # members with k < K_C
    n_high: int           # members with k >= K_C
    min_row: SurveyRow
    min_is_low_k: bool

    @property
    def mixed(self) -> bool:
        return self.n_low > 0 and self.n_high > 0


def bin_stability_report(rows) -> list:
    """Per endpoint bin: does the lowest-energy member sit below the
    stability threshold K_C?  Bins ordered lexicographically."""
    groups: dict = {}
    for r in rows:
        groups.setdefault(r.bin, []).append(r)
    out = []
    for b in sorted(groups):
        members = groups[b]
        low = sum(1 for r in members if r.k < K_C)
        best = members[0]
        for r in members[1:]:
            if r.J < best.J:
                best = r
        out.append(BinReport(bin=b, n_low=low, n_high=len(members) - low,
                             min_row=best, min_is_low_k=best.k < K_C))
    return out
