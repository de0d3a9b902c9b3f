"""Stable-set membership rules and the search lattice."""

import math

import numpy as np
import pytest
from scipy.optimize import brentq

from cablesteer.cspace import (AXES_2D, AXES_3D, K_C, K_MAX, GridSpec,
                               OffGridError, SafetyConstants, config_to_index,
                               grip_feasible, in_C_free, in_C_stable,
                               index_to_config, index_valid, k_from_sigma,
                               neighbor_indices, sigma_from_k)
from cablesteer.elastica import (CableProperties, Config2D, Config3D,
                                 ElasticaParams, psi)
from cablesteer.elliptic import complete_E, complete_K

L = 1.0


def cfg(k=0.3, s0=0.0, lt=1.5, phi=0.0):
    return Config2D(0.0, 0.0, phi, ElasticaParams(k=k, s0=s0, Ltilde=lt))


# --------------------------------------------------------------------------
# constants


def test_k_c_is_closure_root():
    root = brentq(lambda k: 2.0 * complete_E(k) - complete_K(k), 0.85, 0.95,
                  xtol=1e-14)
    assert root == pytest.approx(0.9089085575485432, abs=1e-12)
    # the shipped constant is a 3-digit truncation sitting below the
    # true root (conservative for a k < k_c test)
    assert K_C == 0.908
    assert K_C < root


def test_k_max_below_k_c():
    assert K_MAX == 0.855
    assert K_MAX < K_C
    with pytest.raises(ValueError):
        SafetyConstants(k_c=0.5, k_max=0.6)


def test_sigma_k_bijection():
    for k in np.linspace(0.0, 0.99, 50):
        assert k_from_sigma(sigma_from_k(k)) == pytest.approx(k, abs=1e-12)
    assert sigma_from_k(0.0) == 1.0


# --------------------------------------------------------------------------
# membership


def test_stable_rejects_k_at_or_above_k_c():
    assert in_C_stable(cfg(k=0.89), L)
    assert not in_C_stable(cfg(k=K_C), L)
    assert not in_C_stable(cfg(k=0.95), L)


def test_stable_rejects_short_period():
    assert not in_C_stable(cfg(lt=0.99), L)
    assert in_C_stable(cfg(lt=1.0), L)


def test_full_period_quarter_phase_excluded():
    # at Ltilde = L the s0 = L/4 and 3L/4 lines are excluded
    assert not in_C_stable(cfg(s0=0.25, lt=1.0), L)
    assert not in_C_stable(cfg(s0=0.75, lt=1.0), L)
    assert in_C_stable(cfg(s0=0.5, lt=1.0), L)
    assert in_C_stable(cfg(s0=0.0, lt=1.0), L)
    # sub-period shapes are not subject to the exclusion
    assert in_C_stable(cfg(s0=0.25 * 1.5, lt=1.5), L)


def test_tolerances_fatten_the_exclusion():
    near = cfg(s0=0.25 + 0.02, lt=1.0)
    assert in_C_stable(near, L)
    assert not in_C_stable(near, L, tol_s=0.05)
    almost_full = cfg(s0=0.25, lt=1.04)
    assert in_C_stable(almost_full, L)
    assert not in_C_stable(almost_full, L, tol_L=0.05)


def test_free_adds_k_max_bound():
    assert in_C_free(cfg(k=0.80), L)
    assert not in_C_free(cfg(k=K_MAX), L)
    assert not in_C_free(cfg(k=0.89), L)  # stable but may self-intersect
    assert in_C_stable(cfg(k=0.89), L)


def test_grip_feasible_is_separation_bound(unit_props):
    near = psi(cfg(k=0.0, lt=2.0), unit_props)
    assert grip_feasible(near, L)
    # k=0 straight cable: separation exactly L (boundary included)
    sep = np.linalg.norm(near.positionL - near.position0)
    assert sep == pytest.approx(L, abs=1e-12)


# --------------------------------------------------------------------------
# lattice


def make_grid(mode="planar"):
    lo = (0.0, 0.0) if mode == "planar" else (0.0, 0.0, 0.0)
    hi = (1.0, 1.0) if mode == "planar" else (1.0, 1.0, 1.0)
    return GridSpec.build(mode, L, lo, hi, dpos=0.25, dangle=math.tau / 8,
                          dltilde_frac=0.5, ds0_frac=0.5, dsigma=0.5,
                          ltilde_max_frac=2.0, sigma_min=-0.5)


def test_axes_match_mode():
    g2 = make_grid("planar")
    g3 = make_grid("semi-spatial")
    assert tuple(a.name for a in g2.axes) == AXES_2D
    assert tuple(a.name for a in g3.axes) == AXES_3D
    with pytest.raises(ValueError):
        GridSpec(axes=g2.axes, mode="semi-spatial", cable_L=L)


def test_ltilde_axis_starts_at_cable_length():
    g = make_grid()
    assert g.axis("Ltilde").lo == L
    # a max fraction below 1 degenerates to the single admissible line
    g1 = GridSpec.build("planar", 2.0, (0, 0), (1, 1), ltilde_max_frac=0.9)
    ax = g1.axis("Ltilde")
    assert ax.lo == 2.0 and ax.count == 1


def test_sigma_axis_hits_one_exactly():
    g = make_grid()
    ax = g.axis("sigma")
    assert ax.hi == pytest.approx(1.0, abs=1e-15)


def test_index_config_roundtrip():
    g = make_grid()
    rng = np.random.default_rng(17)
    for _ in range(200):
        idx = tuple(int(rng.integers(0, a.count)) for a in g.axes)
        if not index_valid(idx, g):
            continue
        c = index_to_config(idx, g)
        assert config_to_index(c, g) == idx


def test_roundtrip_3d():
    g = make_grid("semi-spatial")
    rng = np.random.default_rng(18)
    hits = 0
    for _ in range(200):
        idx = tuple(int(rng.integers(0, a.count)) for a in g.axes)
        if not index_valid(idx, g):
            continue
        c = index_to_config(idx, g)
        assert isinstance(c, Config3D)
        assert config_to_index(c, g) == idx
        hits += 1
    assert hits > 50


def test_off_grid_raises():
    g = make_grid()
    with pytest.raises(OffGridError):
        config_to_index(cfg(k=0.0, lt=1.3), g)  # Ltilde between lines
    with pytest.raises(ValueError):
        config_to_index(
            Config3D(0, 0, 0, 0, 0, 0, ElasticaParams(k=0, s0=0, Ltilde=1.0)),
            g)


def test_angle_wrap_on_grid():
    g = make_grid()
    c = cfg(k=0.0, lt=1.0, phi=math.pi)  # wraps to -pi, the axis origin
    idx = config_to_index(c, g)
    assert idx[2] == 0


def test_index_valid_requires_s0_below_ltilde():
    g = make_grid()
    i_lt = [a.name for a in g.axes].index("Ltilde")
    i_s0 = [a.name for a in g.axes].index("s0")
    idx = [0] * g.dim
    idx[i_lt] = 0  # Ltilde = L = 1.0
    idx[i_s0] = 2  # s0 = 1.0 -> not < Ltilde
    assert not index_valid(tuple(idx), g)
    idx[i_s0] = 1  # s0 = 0.5 < 1.0
    assert index_valid(tuple(idx), g)


def test_neighbors_differ_in_one_axis():
    g = make_grid()
    idx = tuple(min(1, a.count - 1) for a in g.axes)
    nbs = neighbor_indices(idx, g)
    assert nbs
    for nb in nbs:
        diffs = [abs(a - b) for a, b in zip(nb, idx)]
        assert sum(diffs) == 1
        assert index_valid(nb, g)


def test_neighbor_order_deterministic():
    g = make_grid()
    idx = tuple(min(1, a.count - 1) for a in g.axes)
    assert neighbor_indices(idx, g) == neighbor_indices(idx, g)


def test_grid_tolerances_are_half_steps():
    g = make_grid()
    assert g.tol_L == 0.25 * L  # half of dltilde_frac * L
    assert g.tol_s0 == 0.25 * L
