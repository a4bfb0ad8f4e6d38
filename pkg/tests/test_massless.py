from __future__ import annotations

import cmath
import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import seeds
from poincare_gq.massive import SingularConfigurationError
from poincare_gq.massless import (
    ChartDomainError,
    J_spinor,
    MasslessSpec,
    cone_section_values,
    cone_sections,
    fiber_spinor,
    helicity_apply,
    iota4,
    massless_inner,
    massless_statespace,
    massless_wave,
    penrose_prewave,
    r_minus,
    r_plus,
    sigma_U,
    sigma_V,
    weyl_prewave,
)
from poincare_gq.quadrature import Profile, build_polar_grid, chart_to_momentum
from poincare_gq.sections import HomogeneousSection
from poincare_gq.spinor import I2, coform_from_dyn_vars, h_inv, h_map, minkowski, pauli_lubanski

PR = Profile("bump", "CPLUS", (0.3, 0.1, 0.8), 0.4)
SIGNS = list(itertools.product((-1, 1), (-1, 1)))


def cone_point(rng):
    p = np.array(PR.center) + 0.2 * rng.normal(size=3)
    return p, chart_to_momentum("CPLUS", p)


def test_spec_validation():
    with pytest.raises(ValueError):
        MasslessSpec(T=0)
    assert MasslessSpec(-1, 1, 1).nu == 1 / (4 * math.pi)


def test_r_plus_r_minus_examples(rng):
    assert np.allclose(r_plus([1, 0]), np.diag([1, 0]))
    assert np.allclose(r_plus([0, 1]), np.diag([0, 1]))
    with pytest.raises(ValueError):
        r_plus([0, 0])
    for _ in range(20):
        z = rng.normal(size=2) + 1j * rng.normal(size=2)
        R2 = np.vdot(z, z).real
        for r in (r_plus, r_minus):
            K = r(z)
            assert math.isclose(np.trace(K).real, R2, rel_tol=1e-14)
            assert abs(np.linalg.det(K)) <= 1e-14 * R2 * R2
            assert np.all(np.linalg.eigvalsh(K) >= -1e-14 * R2)
        assert np.abs(r_minus(z) - r_plus(J_spinor(z))).max() <= 1e-14 * R2
        assert np.abs(r_plus(z) - r_minus(J_spinor(z))).max() <= 1e-14 * R2


def test_cone_section_examples():
    assert np.allclose(sigma_U(np.array([0, 0, 1.0])), [math.sqrt(2), 0])
    assert np.allclose(sigma_V(np.array([0, 0, -1.0])), [0, math.sqrt(2)])
    with pytest.raises(ChartDomainError):
        cone_section_values(np.array([[0, 0, -1.0]]), chart="U")
    with pytest.raises(ChartDomainError):
        cone_section_values(np.zeros((1, 3)))
    # the automatic chart switches to V on the negative p3 axis
    z = cone_sections(chart_to_momentum("CPLUS", np.array([0, 0, -2.0])))
    assert np.allclose(r_plus(z), chart_to_momentum("CPLUS", np.array([0, 0, -2.0])))


def test_section_property_bulk(rng):
    p = rng.normal(size=(1000, 3))
    K = chart_to_momentum("CPLUS", p)
    for chart in ("U", "V"):
        z = cone_section_values(p, 1, chart)
        assert np.abs(r_plus(z) - K).max() <= 1e-12 * np.abs(K).max()
    z = cone_section_values(p, -1)
    assert np.abs(r_minus(z) - K).max() <= 1e-12 * np.abs(K).max()


def test_neutrino_fibre_from_antineutrino(rng):
    p, K = cone_point(rng)
    assert np.allclose(fiber_spinor(K, -1), J_spinor(fiber_spinor(K, 1)), atol=1e-15)


@pytest.mark.parametrize("eta,chi", SIGNS)
def test_weyl_prewave_at_zero_and_phase_independence(eta, chi, rng):
    spec = MasslessSpec(eta, chi, 1)
    f = HomogeneousSection(1, PR, (1.0, 0.3j))
    p, K = cone_point(rng)
    z = fiber_spinor(K, chi)[0]
    v = weyl_prewave(spec, f, K, np.zeros((2, 2)))
    assert np.allclose(v, f.massless(K[None], z[None], chi)[0] * z, atol=1e-15)
    H = h_map(rng.normal(size=4))
    a, b = weyl_prewave(spec, f, K, H), weyl_prewave(spec, f, K, H, phase_rep=cmath.exp(2.1j))
    assert np.abs(a - b).max() <= 1e-12 * np.abs(a).max()


def test_plane_wave_exponent_sign(rng):
    spec = MasslessSpec(-1, 1, 1)
    f = HomogeneousSection(1, PR)
    p, K = cone_point(rng)
    x = rng.normal(size=4)
    ratio = penrose_prewave(spec, f, K, h_map(x)) / penrose_prewave(spec, f, K, np.zeros((2, 2)))
    Q = h_inv(K)
    assert np.allclose(ratio, cmath.exp(-2j * math.pi * minkowski(Q, x)), atol=1e-13)


@pytest.mark.parametrize("T", [1, 2, 3])
def test_penrose_rank_one_and_phase_independence(T, rng):
    spec = MasslessSpec(-1, 1, T)
    f = HomogeneousSection(T, PR, (1.0, 0.3j))
    p, K = cone_point(rng)
    H = h_map(rng.normal(size=4))
    v = penrose_prewave(spec, f, K, H)
    w = penrose_prewave(spec, f, K, H, phase_rep=cmath.exp(0.4j))
    assert np.abs(v - w).max() <= 1e-12 * np.abs(v).max()
    t = v.reshape((2,) * T)
    for axis in range(T if T > 1 else 0):
        flat = np.moveaxis(t, axis, 0).reshape(2, -1)
        s = np.linalg.svd(flat, compute_uv=False)
        assert s[1] <= 1e-12 * s[0]


def test_penrose_base_point_and_zero_profile():
    spec = MasslessSpec(-1, 1, 2)
    pr = Profile("bump", "CPLUS", (0.0, 0.0, 0.5), 0.3)
    f = HomogeneousSection(2, pr)
    K = chart_to_momentum("CPLUS", np.array([0, 0, 0.5]))
    v = penrose_prewave(spec, f, K, np.zeros((2, 2)))
    z = fiber_spinor(K, 1)[0]
    b = pr(np.array([[0, 0, 0.5]]))[0]
    assert np.allclose(v, b * np.conj(z[0]) ** 2 * np.kron(z, z))
    assert abs(z[1]) == 0.0  # z is a multiple of e1 on the positive p3 axis
    zero = HomogeneousSection(2, Profile("bump", "CPLUS", PR.center, PR.radius, amplitude=0.0))
    grid = build_polar_grid(PR.center, PR.support_radius_fn(), (8, 4, 8), "OMEGA_CPLUS")
    assert not np.any(massless_wave(spec, zero, np.ones((2, 4)), grid))


@pytest.mark.parametrize("T", [1, 2])
@pytest.mark.parametrize("eta,chi", SIGNS)
def test_helicity_eigenvalue(eta, chi, T, rng):
    spec = MasslessSpec(eta, chi, T)
    f = HomogeneousSection(T, PR, (1.0, 0.3j))
    lam = -eta * chi * T / (4 * math.pi)
    for _ in range(100):
        p, K = cone_point(rng)
        v = penrose_prewave(spec, f, K, h_map(rng.normal(size=4)))
        assert np.linalg.norm(helicity_apply(spec, v, K) - lam * v) <= 1e-12 * np.linalg.norm(lam * v)


def test_massless_inner_two_routes():
    spec = MasslessSpec(-1, 1, 1)
    f1, f2 = HomogeneousSection(1, PR, (1.0, 0.3j)), HomogeneousSection(1, PR, (0.2, 1.0))
    grid = build_polar_grid(PR.center, PR.support_radius_fn(), (12, 6, 12), "OMEGA_CPLUS")
    a = massless_inner(spec, f1, f2, grid, "functions")
    b = massless_inner(spec, f1, f2, grid, "spinors")
    assert abs(a - b) <= 1e-12 * abs(a)


@pytest.mark.parametrize("eta", [-1, 1])
def test_statespace_base_example(eta):
    spec = MasslessSpec(eta, 1, 1)
    v = np.array([0, 0, 1.0])
    P, l, g, W = massless_statespace(spec, I2, v, np.zeros(4))
    assert np.allclose(P, np.append(-eta / 2 * v, -eta / 2))
    Kc, Hx = iota4(spec, I2, v, np.zeros(4))
    assert np.linalg.det(Kc) == 0.0


@given(seeds, st.sampled_from(SIGNS), st.integers(1, 3))
def test_statespace_cross_checks(seed, signs, T):
    eta, chi = signs
    rng = np.random.default_rng(seed)
    spec = MasslessSpec(eta, chi, T)
    K = chart_to_momentum("HM", 0.5 * rng.normal(size=3), 1.0)
    v = rng.normal(size=3)
    v /= np.linalg.norm(v)
    x = rng.normal(size=4)
    P, l, g, W = massless_statespace(spec, K, v, x)
    assert np.allclose(W, chi * T / (4 * math.pi) * P, rtol=0, atol=1e-15)
    W2 = pauli_lubanski(coform_from_dyn_vars(P, l, g))
    assert np.abs(W - W2).max() <= 1e-12 * max(1.0, np.abs(W).max())
    Kc, _ = iota4(spec, K, v, x)
    assert np.abs(h_map(P) + eta * Kc).max() <= 1e-12 * np.abs(Kc).max()


def test_statespace_singular():
    K = chart_to_momentum("HM", np.array([0, 0, 1e4]), 1.0)
    with pytest.raises(SingularConfigurationError):
        massless_statespace(MasslessSpec(), K, np.array([0, 0, 1.0]), np.zeros(4), tol=1e-3)
