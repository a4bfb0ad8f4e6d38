from __future__ import annotations

import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import seeds
from poincare_gq.massive import (
    GAMMA,
    MassiveSpec,
    SingularConfigurationError,
    beta_sphere,
    covering_shift,
    dirac_inner,
    dirac_prewave,
    dirac_r,
    dirac_r_inverse,
    dirac_section,
    dirac_wave,
    highT_prewave,
    kg_inner,
    kg_prewave,
    kg_wave,
    nu2_kg,
    proj_spinor,
    statespace_dynvars,
)
from poincare_gq.quadrature import Profile, build_polar_grid, chart_to_momentum, integrate
from poincare_gq.sections import HomogeneousSection
from poincare_gq.spinor import I2, coform_from_dyn_vars, h_map, minkowski, pauli_lubanski, random_sl2

M = 1.3
PR = Profile("bump", "HM", (0.2, 0.0, 0.1), 0.8)


def shell_point(rng, m=M, scale=0.5):
    return chart_to_momentum("HM", scale * rng.normal(size=3), m)


def rand_spinor(rng):
    return rng.normal(size=2) + 1j * rng.normal(size=2)


def test_spec_validation():
    with pytest.raises(ValueError):
        MassiveSpec(0.0)
    with pytest.raises(ValueError):
        MassiveSpec(1.0, eta=0)


@pytest.mark.parametrize("eta", [-1, 1])
def test_kg_prewave_examples(eta, rng):
    spec = MassiveSpec(M, eta, 0)
    K = chart_to_momentum("HM", np.array([0.3, 0.1, 0.2]), M)
    fK = PR(np.array([[0.3, 0.1, 0.2]]))[0]
    assert kg_prewave(spec, PR, np.zeros((2, 2)), K) == fK
    for _ in range(10):
        assert math.isclose(abs(kg_prewave(spec, PR, h_map(rng.normal(size=4)), K)), abs(fK), rel_tol=1e-13)
    t = 0.37
    val = kg_prewave(spec, PR, h_map([0, 0, 0, t]), M * I2)
    assert abs(val - PR(np.zeros((1, 3)))[0] * cmath.exp(2j * math.pi * eta * M * t)) < 1e-14


def test_kg_wave_at_origin_and_zero_profile():
    spec = MassiveSpec(M, -1, 0)
    grid = build_polar_grid(PR.center, PR.support_radius_fn(), (16, 8, 16), "NU_HM", M)
    at0 = kg_wave(spec, PR, np.zeros((1, 4)), grid)[0]
    assert at0 == integrate(lambda b: PR(b.p), grid)
    zero = Profile("bump", "HM", PR.center, PR.radius, amplitude=0.0)
    assert not np.any(kg_wave(spec, zero, np.ones((2, 4)), grid))


def test_dirac_r_examples():
    e1 = np.array([1, 0], dtype=complex)
    K, a = dirac_r(e1, e1, M)
    assert np.allclose(K, M * I2) and np.allclose(a, e1)
    K, a = dirac_r(np.array([2, 0]), np.array([0.5, 0]), M)
    assert np.allclose(K, M * np.diag([4, 0.25])) and np.allclose(a, e1)
    w, z = np.array([1 + 1j, 0.5]), np.array([0.2, 0.0])
    z = z / np.conj(np.vdot(z, w))  # enforce z^* w = 1
    K1, a1 = dirac_r(w, z, M)
    s = cmath.exp(0.7j)
    K2, a2 = dirac_r(s * w, s * z, M)
    assert np.allclose(K1, K2, atol=1e-14) and np.allclose(a1, a2, atol=1e-14)
    with pytest.raises(ValueError):
        dirac_r(w, 2 * z, M)


@given(seeds)
def test_dirac_r_equivariance_and_shell(seed):
    rng = np.random.default_rng(seed)
    w = rand_spinor(rng)
    z = rand_spinor(rng)
    z = z / np.conj(np.vdot(z, w))
    A = random_sl2(rng, 0.5)
    K, a = dirac_r(w, z, M)
    assert math.isclose(np.linalg.det(K).real, M * M, rel_tol=1e-10) and np.trace(K).real > 0
    K2, a2 = dirac_r(A @ w, np.linalg.inv(A.conj().T) @ z, M)
    assert np.abs(K2 - A @ K @ A.conj().T).max() <= 1e-12 * max(1.0, np.abs(K2).max())
    assert np.abs(a2 - proj_spinor(A @ a)).max() <= 1e-12


@given(seeds)
def test_dirac_section_properties(seed):
    rng = np.random.default_rng(seed)
    K, w = shell_point(rng), rand_spinor(rng)
    S = dirac_section(K, w, M)
    assert abs(np.linalg.det(S) - 1) <= 1e-12
    assert np.abs(S @ (M * I2) @ S.conj().T - K).max() <= 1e-12 * np.abs(K).max()
    assert np.abs(proj_spinor(S[:, 0]) - proj_spinor(w)).max() <= 1e-12


def test_dirac_section_base_point_and_zero():
    assert np.allclose(dirac_section(M * I2, np.array([1, 0]), M), I2, atol=1e-15)
    with pytest.raises(ValueError):
        dirac_section(M * I2, np.zeros(2), M)


def test_beta_sphere_examples():
    assert np.allclose(beta_sphere([1, 0]), [0, 0, 1])
    assert np.allclose(beta_sphere([0, 1]), [0, 0, -1])
    assert np.allclose(beta_sphere(np.array([1, 1]) / math.sqrt(2)), [1, 0, 0])


@given(seeds)
def test_beta_sphere_eigen_relations(seed):
    z = rand_spinor(np.random.default_rng(seed))
    u = beta_sphere(z)
    assert np.abs(h_map(np.append(u, 1.0)) @ z - 2 * z).max() <= 1e-12 * np.linalg.norm(z)
    assert np.abs(h_map(np.append(u, -1.0)) @ z).max() <= 1e-12 * np.linalg.norm(z)


def test_dirac_prewave_base_point():
    spec = MassiveSpec(M, -1, 1)
    f = HomogeneousSection(1, Profile("bump", "HM", (0.0, 0.0, 0.0), 0.8))
    v = dirac_prewave(spec, f, np.zeros((2, 2)), M * I2, np.array([1, 0]))
    b = f.profile(np.zeros((1, 3)))[0]
    assert np.allclose(v, b * np.array([1, 0, 1, 0]), atol=1e-15)


@pytest.mark.parametrize("T", [1, 2, 3])
def test_prewaves_do_not_depend_on_the_representative(T, rng):
    spec = MassiveSpec(M, 1, T)
    f = HomogeneousSection(T, PR, (1.0, 0.4j))
    for _ in range(10):
        K = chart_to_momentum("HM", np.array(PR.center) + 0.2 * rng.normal(size=3), M)
        H, a = h_map(rng.normal(size=4)), rand_spinor(rng)
        v0 = highT_prewave(spec, f, H, K, a)
        v1 = highT_prewave(spec, f, H, K, a, phase_rep=cmath.exp(1.9j))
        assert np.abs(v0 - v1).max() <= 1e-12 * max(1e-300, np.abs(v0).max())


def test_highT_base_point_and_rank_one(rng):
    spec = MassiveSpec(M, -1, 2)
    f = HomogeneousSection(2, Profile("bump", "HM", (0.0, 0.0, 0.0), 0.8))
    v = highT_prewave(spec, f, np.zeros((2, 2)), M * I2, np.array([1, 0]))
    e = np.array([1, 0, 1, 0])
    assert np.allclose(v, f.profile(np.zeros((1, 3)))[0] * np.kron(e, e), atol=1e-15)
    K = chart_to_momentum("HM", np.array([0.1, 0.2, 0.0]), M)
    v = highT_prewave(MassiveSpec(M, 1, 2), HomogeneousSection(2, PR, (1.0, 0.4j)), h_map(rng.normal(size=4)), K,
                      rand_spinor(rng)).reshape(4, 4)
    s = np.linalg.svd(v, compute_uv=False)
    assert s[1] <= 1e-12 * s[0]


def test_dirac_wave_at_origin():
    spec = MassiveSpec(M, -1, 1)
    f = HomogeneousSection(1, PR, (1.0, 0.4j))
    grid = build_polar_grid(PR.center, PR.support_radius_fn(), (12, 6, 12), "MU_HM_P1", M, fiber_order=4)
    v = dirac_wave(spec, f, np.zeros((1, 4)), grid)[0]

    def direct(b):
        Z = dirac_r_inverse(b.K, b.spinor, M)
        return f.massive(b.K, Z)[:, None] * Z

    assert np.abs(v - integrate(direct, grid)).max() <= 1e-15 * np.abs(v).max()


def test_dirac_inner_two_routes():
    spec = MassiveSpec(M, -1, 1)
    f1 = HomogeneousSection(1, PR, (1.0, 0.4j))
    f2 = HomogeneousSection(1, PR, (0.3, 1.0))
    grid = build_polar_grid(PR.center, PR.support_radius_fn(), (12, 6, 12), "MU_HM_P1", M, fiber_order=6)
    a = dirac_inner(spec, f1, f2, grid, via="functions")
    b = dirac_inner(spec, f1, f2, grid, via="spinors")
    assert abs(a - b) <= 1e-10 * abs(a)
    assert kg_inner(MassiveSpec(M), PR, PR, build_polar_grid(PR.center, PR.support_radius_fn(), (8, 4, 8),
                                                               "NU_HM", M)).real > 0


def test_gamma_matrices_anticommute():
    eta = np.diag([-1.0, -1.0, -1.0, 1.0])
    for i in range(4):
        for j in range(4):
            ac = GAMMA[i] @ GAMMA[j] + GAMMA[j] @ GAMMA[i]
            assert np.allclose(ac, 2 * eta[i, j] * np.eye(4))


@pytest.mark.parametrize("eta", [-1, 1])
def test_statespace_base_example(eta):
    T = 1
    P, l, g, W = statespace_dynvars(MassiveSpec(M, eta, T), M * I2, np.array([0, 0, 1.0]), np.zeros(4))
    assert np.allclose(P, [0, 0, 0, -eta * M]) and np.allclose(l, [0, 0, T / (4 * math.pi)]) and np.allclose(g, 0)


@given(seeds, st.integers(0, 3), st.sampled_from([-1, 1]))
def test_statespace_cross_checks(seed, T, eta):
    rng = np.random.default_rng(seed)
    spec = MassiveSpec(M, eta, T)
    K = shell_point(rng)
    u = rng.normal(size=3)
    u /= np.linalg.norm(u)
    x = rng.normal(size=4)
    P, l, g, W = statespace_dynvars(spec, K, u, x)
    # W from the spinor-core route: Pauli-Lubanski vector of the reconstructed dual element
    W2 = pauli_lubanski(coform_from_dyn_vars(P, l, g))
    assert np.abs(W - W2).max() <= 1e-12 * max(1.0, np.abs(W).max())
    assert math.isclose(minkowski(W, W), -((T * M / (4 * math.pi)) ** 2), rel_tol=1e-9, abs_tol=1e-12)
    # W does not see the position, and l - x x P is parallel to P4 u - P
    _, _, _, W0 = statespace_dynvars(spec, K, u, np.zeros(4))
    assert np.abs(W - W0).max() <= 1e-12 * max(1.0, np.abs(W).max())
    v = l - np.cross(x[:3], P[:3])
    assert np.linalg.norm(np.cross(v, P[3] * u - P[:3])) <= 1e-12 * max(1.0, np.linalg.norm(v))


def test_statespace_singular():
    K = chart_to_momentum("HM", np.array([0.0, 0.0, 50.0]), 1e-3)
    with pytest.raises(SingularConfigurationError):
        statespace_dynvars(MassiveSpec(1e-3, -1, 1), K, np.array([0, 0, 1.0]), np.zeros(4), tol=1e-6)


def test_kg_state_space_maps(rng):
    spec = MassiveSpec(M, -1, 0)
    x = rng.normal(size=3)
    _, pos = nu2_kg(spec, M * I2, h_map(np.append(x, 0.7)))
    assert np.allclose(pos, x, atol=1e-14)
    K = shell_point(rng)
    H0 = h_map(np.append(x, 0.0))
    assert np.allclose(nu2_kg(spec, K, H0)[1], x, atol=1e-14)
    H = h_map(rng.normal(size=4))
    ref = nu2_kg(spec, K, H)[1]
    for N in range(-3, 4):
        K2, H2 = covering_shift(spec, N, K, H)
        assert np.abs(nu2_kg(spec, K2, H2)[1] - ref).max() <= 1e-12
