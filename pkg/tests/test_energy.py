"""Closed-form energy vs quadrature, gravity comparison, endpoint survey."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from cablesteer.cspace import K_C, sigma_from_k
from cablesteer.elastica import (CableProperties, Config2D, Config3D,
                                 ElasticaParams, curvature)
from cablesteer.elliptic import complete_K
from cablesteer.energy import (SurveyRow, bin_stability_report,
                               elastic_energy, gravity_ratio, hamiltonian,
                               min_energy_by_bin, stability_survey,
                               survey_to_csv)


def random_params(rng, L):
    k = rng.uniform(0.05, 0.9)
    lt = rng.uniform(L, 2.2 * L)
    s0 = rng.uniform(0.0, lt * 0.999)
    return ElasticaParams(k=k, s0=s0, Ltilde=lt)


def test_closed_form_matches_quadrature(props):
    rng = np.random.default_rng(2024)
    for _ in range(50):
        p = random_params(rng, props.L)
        config = Config2D(0.0, 0.0, 0.0, p)
        j_closed = elastic_energy(config, props)
        j_quad, _ = quad(lambda s: curvature(s, p, props) ** 2,
                         0.0, props.L, epsabs=1e-13, epsrel=1e-13, limit=400)
        j_quad *= 0.5 * props.EI
        assert j_closed == pytest.approx(j_quad, rel=1e-8, abs=1e-14)


def test_straight_cable_stores_nothing(props):
    config = Config2D(0.0, 0.0, 0.0, ElasticaParams(k=0.0, s0=0.1, Ltilde=1.0))
    assert elastic_energy(config, props) == 0.0


def test_energy_scales_inversely_with_size(props):
    p = ElasticaParams(k=0.6, s0=0.1, Ltilde=0.8)
    j1 = elastic_energy(Config2D(0, 0, 0, p), props)
    c = 2.0
    props2 = CableProperties(L=props.L * c, EI=props.EI)
    p2 = ElasticaParams(k=0.6, s0=0.1 * c, Ltilde=0.8 * c)
    j2 = elastic_energy(Config2D(0, 0, 0, p2), props2)
    assert j2 == pytest.approx(j1 / c, rel=1e-12)


def test_hamiltonian_constant_along_cable(props):
    rng = np.random.default_rng(7)
    s = np.linspace(0.0, props.L, 50)
    for _ in range(30):
        p = random_params(rng, props.L)
        config = Config2D(0.2, -0.1, 0.9, p)
        h = hamiltonian(s, config, props)
        scale = max(abs(float(np.mean(h))), 1e-30)
        assert float(h.max() - h.min()) / scale < 1e-9


def test_hamiltonian_value_is_lattice_invariant(props):
    # the conserved value reduces to EI * (4K/Ltilde)^2 * (1 - 2k^2)
    rng = np.random.default_rng(8)
    for _ in range(20):
        p = random_params(rng, props.L)
        config = Config2D(0.0, 0.0, 0.3, p)
        rt = 4.0 * complete_K(p.k) / p.Ltilde
        expected = props.EI * rt * rt * sigma_from_k(p.k)
        h = hamiltonian(np.array([0.31 * props.L]), config, props)
        assert float(h[0]) == pytest.approx(expected, rel=1e-11)


# --------------------------------------------------------------------------
# gravity


def zip_tie_config(L):
    params = ElasticaParams(k=0.87367, s0=0.13 * (1.1 * L), Ltilde=1.1 * L)
    return Config3D(0.0, 0.0, 0.0, math.pi / 2, 0.0,
                    -6.136223504550693, params)


def test_gravity_needs_spatial_config(props):
    with pytest.raises(TypeError):
        gravity_ratio(Config2D(0, 0, 0, ElasticaParams(0.3, 0.0, 1.0)), props)


def test_gravity_ratio_none_for_straight_cable():
    props = CableProperties(L=0.5, EI=0.0027, rho=0.013)
    config = Config3D(0, 0, 0, math.pi / 2, 0.0, 0.3,
                      ElasticaParams(k=0.0, s0=0.0, Ltilde=0.5))
    br = gravity_ratio(config, props)
    assert br.elastic_J == 0.0
    assert br.ratio is None
    assert br.gravity_J >= 0.0


def test_gravity_energy_nonnegative_datum_at_lowest_point():
    rng = np.random.default_rng(11)
    props = CableProperties(L=0.5, EI=0.0027, rho=0.02)
    for _ in range(10):
        p = random_params(rng, props.L)
        config = Config3D(rng.uniform(-0.2, 0.2), 0.0, rng.uniform(-0.2, 0.2),
                          rng.uniform(-1.2, 1.2), rng.uniform(-1.2, 1.2),
                          rng.uniform(-math.pi, math.pi), p)
        br = gravity_ratio(config, props)
        assert br.gravity_J >= 0.0


def test_gravity_scales_linearly_in_density_and_g():
    L = 0.5
    base = CableProperties(L=L, EI=0.0027, rho=0.013)
    doubled = CableProperties(L=L, EI=0.0027, rho=0.026)
    config = zip_tie_config(L)
    b1 = gravity_ratio(config, base)
    b2 = gravity_ratio(config, doubled)
    # doubling rho doubles the potential bit-exactly (same geometry)
    assert b2.gravity_J == 2.0 * b1.gravity_J
    assert b2.elastic_J == b1.elastic_J
    half_g = CableProperties(L=L, EI=0.0027, rho=0.013,
                             g=base.g * 0.5)
    b3 = gravity_ratio(config, half_g)
    assert b3.gravity_J == 0.5 * b1.gravity_J


def test_bent_hanging_cable_ratio_small_and_frozen():
    # a stiff zip-tie-like cable held in a vertical plane: gravity is a
    # small correction to the stored bending energy at both sizes
    frozen = {0.5: 0.009306531773059292, 1.0: 0.07445225418447429}
    nominal = {0.5: 0.0047, 1.0: 0.0375}
    for L, expect in frozen.items():
        props = CableProperties(L=L, EI=0.0027, rho=0.013)
        br = gravity_ratio(zip_tie_config(L), props)
        assert br.ratio == pytest.approx(expect, rel=1e-9)
        assert 0.5 <= br.ratio / nominal[L] <= 2.0
        assert br.ratio < 0.1


# --------------------------------------------------------------------------
# endpoint survey


def test_survey_deterministic_csv(props):
    ks = np.arange(0.80, 0.86, 0.02)
    s0s = np.linspace(0.0, props.L * 0.9, 5)
    lts = np.array([1.05 * props.L, 1.2 * props.L])
    rows1 = stability_survey(ks, s0s, props, endpoint_bins=0.02,
                             ltilde_grid=lts)
    rows2 = stability_survey(ks, s0s, props, endpoint_bins=0.02,
                             ltilde_grid=lts)
    assert survey_to_csv(rows1) == survey_to_csv(rows2)
    assert len(rows1) == len(ks) * len(s0s) + len(ks) * len(lts) * 2


def test_survey_rejects_bad_bin_width(props):
    with pytest.raises(ValueError):
        stability_survey([0.5], [0.0], props, endpoint_bins=0.0)


def test_survey_bins_follow_endpoints(props):
    rows = stability_survey([0.3], [0.0, 0.1], props, endpoint_bins=0.05)
    for r in rows:
        assert r.bin == (math.floor(r.xL / 0.05), math.floor(r.yL / 0.05))
        assert r.J == pytest.approx(
            elastic_energy(Config2D(0, 0, 0, ElasticaParams(r.k, r.s0,
                                                            r.Ltilde)),
                           props), rel=1e-15)


def mk_row(k, j, b):
    return SurveyRow(k=k, s0=0.0, Ltilde=1.0, xL=0.0, yL=0.0, J=j, bin=b)


def test_min_energy_by_bin_first_wins_ties():
    rows = [mk_row(0.3, 1.0, (0, 0)), mk_row(0.4, 1.0, (0, 0)),
            mk_row(0.5, 0.5, (1, 0))]
    best = min_energy_by_bin(rows)
    assert best[(0, 0)].k == 0.3
    assert best[(1, 0)].J == 0.5


def test_bin_report_counts_and_minimum():
    rows = [mk_row(0.3, 2.0, (0, 0)), mk_row(0.95, 3.0, (0, 0)),
            mk_row(0.96, 1.0, (1, 1)), mk_row(0.2, 5.0, (1, 1))]
    reps = bin_stability_report(rows)
    assert [r.bin for r in reps] == [(0, 0), (1, 1)]
    first, second = reps
    assert first.n_low == 1 and first.n_high == 1 and first.mixed
    assert first.min_is_low_k  # J=2.0 with k=0.3 < K_C wins
    assert second.mixed
    assert not second.min_is_low_k  # J=1.0 with k=0.96 wins
    assert second.min_row.k == 0.96
    assert K_C == 0.908
