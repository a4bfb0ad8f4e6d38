from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given

from conftest import seeds
from poincare_gq.spinor import (
    BASIS,
    EPS,
    I2,
    PAULI,
    AlgElem,
    CoForm,
    GroupElem,
    ValidationError,
    act_on_spacetime,
    adjoint,
    alg_exp,
    coadjoint,
    coform_from_dyn_vars,
    dyn_vars,
    group_inv,
    group_mul,
    h_inv,
    h_map,
    minkowski,
    orbit_invariants,
    pairing,
    pauli_lubanski,
    random_alg,
    random_coform,
    random_group,
    tolerances,
)

Z2 = np.zeros((2, 2), dtype=complex)


def close_group(g1, g2, tol=1e-12):
    return np.abs(g1.A - g2.A).max() <= tol and np.abs(g1.H - g2.H).max() <= tol


def test_h_map_basis_cases():
    assert np.allclose(h_map([0, 0, 0, 1]), I2, atol=0)
    assert np.allclose(h_map([1, 0, 0, 0]), PAULI[0], atol=0)
    assert abs(np.linalg.det(h_map([3, 0, 4, 5]))) < 1e-12


def test_h_inv_basis_cases():
    assert np.array_equal(h_inv(I2), [0, 0, 0, 1])
    assert np.array_equal(h_inv(PAULI[2]), [0, 0, 1, 0])


def test_h_inv_rejects_non_hermitian():
    with pytest.raises(ValidationError):
        h_inv(np.array([[1, 1], [0, 1]], dtype=complex))


def test_h_round_trip_bulk(rng):
    x = rng.normal(size=(1000, 4))
    M = h_map(x)
    assert np.abs(h_map(h_inv(M)) - M).max() <= 1e-14
    det = np.linalg.det(M).real
    assert np.allclose(det, minkowski(x, x), rtol=1e-12, atol=1e-12)


def test_group_identity_and_inverse(rng):
    e = GroupElem.identity()
    for _ in range(20):
        g = random_group(rng)
        assert close_group(group_mul(e, g), g)
        assert close_group(group_mul(g, group_inv(g)), e, 1e-11)


@given(seeds)
def test_group_associativity(seed):
    rng = np.random.default_rng(seed)
    g1, g2, g3 = (random_group(rng, 0.7) for _ in range(3))
    lhs = group_mul(group_mul(g1, g2), g3)
    rhs = group_mul(g1, group_mul(g2, g3))
    scale = max(1.0, np.abs(lhs.H).max(), np.abs(lhs.A).max())
    assert close_group(lhs, rhs, 1e-12 * scale)


@given(seeds)
def test_action_is_an_isometric_group_action(seed):
    rng = np.random.default_rng(seed)
    g1, g2 = random_group(rng, 0.5), random_group(rng, 0.5)
    x, y = rng.normal(size=4), rng.normal(size=4)
    lhs = act_on_spacetime(group_mul(g1, g2), x)
    rhs = act_on_spacetime(g1, act_on_spacetime(g2, x))
    assert np.allclose(lhs, rhs, rtol=1e-11, atol=1e-11)
    d0 = minkowski(x - y, x - y)
    d1 = act_on_spacetime(g1, x) - act_on_spacetime(g1, y)
    assert math.isclose(minkowski(d1, d1), d0, rel_tol=1e-9, abs_tol=1e-9)


def test_action_trivial_cases(rng):
    x = rng.normal(size=4)
    assert np.allclose(act_on_spacetime(GroupElem.identity(), x), x, atol=1e-15)
    t = rng.normal(size=4)
    assert np.allclose(act_on_spacetime(GroupElem(I2, h_map(t)), x), x + t, atol=1e-14)


def test_alg_exp_special_cases(rng):
    assert close_group(alg_exp(random_alg(rng), 0.0), GroupElem.identity(), 1e-15)
    h = h_map(rng.normal(size=4))
    g = alg_exp(AlgElem(Z2, h), 1.7)
    assert close_group(g, GroupElem(I2, 1.7 * h), 1e-13)
    a = 0.3 * PAULI[0] + 0.2j * PAULI[2]
    g = alg_exp(AlgElem(a, Z2), -0.8)
    ev, V = np.linalg.eig(-0.8 * a)
    eA = V @ np.diag(np.exp(ev)) @ np.linalg.inv(V)
    assert np.abs(g.A - eA).max() < 1e-13 and np.abs(g.H).max() < 1e-15


@given(seeds)
def test_alg_exp_one_parameter_subgroup(seed):
    rng = np.random.default_rng(seed)
    X = random_alg(rng, 0.6)
    s, t = rng.uniform(-1.5, 1.5, size=2)
    lhs = alg_exp(X, s + t)
    rhs = group_mul(alg_exp(X, s), alg_exp(X, t))
    scale = max(1.0, np.abs(lhs.H).max(), np.abs(lhs.A).max())
    assert close_group(lhs, rhs, 1e-10 * scale)


def test_alg_exp_nilpotent_generator():
    # a nilpotent: e^{sa} = I + s a, so the integral is a polynomial in t
    a = np.array([[0, 1], [0, 0]], dtype=complex)
    h = I2.copy()
    t = 1.3
    g = alg_exp(AlgElem(a, h), t)
    # int_0^t (I + s a)(I + s a^*) ds = t I + t^2/2 (a + a^*) + t^3/3 a a^*
    ref = t * I2 + t**2 / 2 * (a + a.conj().T) + t**3 / 3 * a @ a.conj().T
    assert np.abs(g.H - ref).max() < 1e-13


def test_pairing_examples():
    assert math.isclose(pairing(CoForm(Z2, I2), AlgElem(Z2, I2)), -1.0, abs_tol=1e-15)
    assert pairing(CoForm(PAULI[0], Z2), AlgElem(Z2, h_map([1, 2, 3, 4]))) == 0.0
    for eta in (-1, 1):
        m = 1.7
        assert math.isclose(pairing(CoForm(Z2, eta * m * I2), BASIS["P4"]), -eta * m, rel_tol=1e-15)


def test_pairing_closed_form(rng):
    for _ in range(20):
        al, X = random_coform(rng), random_alg(rng)
        ref = 0.5 * np.trace(al.k @ EPS @ np.conj(X.h) @ EPS).real - 2 * np.trace(al.a @ X.a).real
        assert math.isclose(pairing(al, X), ref, rel_tol=1e-13, abs_tol=1e-13)


def _adjoint_fd(g: GroupElem, X: AlgElem, h: float = 1e-4) -> AlgElem:
    """``Ad_g X`` by a central difference of the curve ``g exp(tX) g^-1``."""
    gi = group_inv(g)

    def curve(t):
        c = group_mul(group_mul(g, alg_exp(X, t)), gi)
        return c.A, c.H

    (Ap, Hp), (Am, Hm) = curve(h), curve(-h)
    (Ap2, Hp2), (Am2, Hm2) = curve(2 * h), curve(-2 * h)
    dA = (8 * (Ap - Am) - (Ap2 - Am2)) / (12 * h)
    dH = (8 * (Hp - Hm) - (Hp2 - Hm2)) / (12 * h)
    # difference noise is removed the same way the constructor projects near-valid input
    dA = dA - 0.5 * np.trace(dA) * I2
    return AlgElem(dA, 0.5 * (dH + dH.conj().T))


def test_adjoint_matches_curve_oracle(rng):
    for _ in range(10):
        g, X = random_group(rng, 0.5), random_alg(rng)
        a1, a2 = adjoint(g, X), _adjoint_fd(g, X)
        assert np.abs(a1.a - a2.a).max() < 1e-9 and np.abs(a1.h - a2.h).max() < 1e-9


@given(seeds)
def test_coadjoint_duality(seed):
    rng = np.random.default_rng(seed)
    g, al, X = random_group(rng, 0.5), random_coform(rng), random_alg(rng)
    lhs = pairing(coadjoint(g, al), X)
    rhs = pairing(al, _adjoint_fd(group_inv(g), X))
    assert abs(lhs - rhs) <= 1e-8 * max(1.0, abs(lhs))


@given(seeds)
def test_coadjoint_homomorphism_and_invariants(seed):
    rng = np.random.default_rng(seed)
    g1, g2, al = random_group(rng, 0.5), random_group(rng, 0.5), random_coform(rng)
    lhs = coadjoint(group_mul(g1, g2), al)
    rhs = coadjoint(g1, coadjoint(g2, al))
    scale = max(1.0, lhs.norm())
    assert np.abs(lhs.a - rhs.a).max() <= 1e-12 * scale and np.abs(lhs.k - rhs.k).max() <= 1e-12 * scale
    m0, w0 = orbit_invariants(al)
    m1, w1 = orbit_invariants(lhs)
    assert abs(m1 - m0) <= 1e-9 * max(1.0, abs(m0)) and abs(w1 - w0) <= 1e-9 * max(1.0, abs(w0))


def test_coadjoint_identity(rng):
    al = random_coform(rng)
    out = coadjoint(GroupElem.identity(), al)
    assert np.array_equal(out.a, al.a) and np.array_equal(out.k, al.k)


def test_dyn_vars_examples():
    for eta in (-1, 1):
        P, l, g = dyn_vars(CoForm(Z2, eta * 2.0 * I2))
        assert np.allclose(P, [0, 0, 0, -eta * 2.0]) and not l.any() and not g.any()
    P, l, g = dyn_vars(CoForm(0.5 * PAULI[2], Z2))
    assert np.allclose(g, [0, 0, -1]) and np.allclose(l, 0) and np.allclose(P, 0)


@given(seeds)
def test_dyn_vars_round_trip(seed):
    rng = np.random.default_rng(seed)
    P, l, g = rng.normal(size=4), rng.normal(size=3), rng.normal(size=3)
    back = dyn_vars(coform_from_dyn_vars(P, l, g))
    for u, v in zip(back, (P, l, g)):
        assert np.abs(u - v).max() <= 1e-14


def test_pauli_lubanski_examples():
    assert not pauli_lubanski(CoForm(Z2, h_map([1, 2, 3, 4]))).any()
    for eta in (-1, 1):
        m = 1.3
        al = CoForm(1j / (8 * math.pi) * PAULI[2], eta * m * I2)
        assert np.abs(h_map(pauli_lubanski(al)) + eta * m / (4 * math.pi) * PAULI[2]).max() < 1e-15
        ms, ws = orbit_invariants(al)
        assert math.isclose(ms, m * m, rel_tol=1e-15)
        assert math.isclose(ws, -((m / (4 * math.pi)) ** 2), rel_tol=1e-14)
        assert orbit_invariants(CoForm(Z2, eta * m * I2)) == pytest.approx((m * m, 0.0))


def test_pauli_lubanski_equivariance(rng):
    worst = 0.0
    for _ in range(1000):
        g, al = random_group(rng, 0.5), random_coform(rng)
        lhs = h_map(pauli_lubanski(coadjoint(g, al)))
        rhs = g.A @ h_map(pauli_lubanski(al)) @ g.A.conj().T
        worst = max(worst, np.abs(lhs - rhs).max() / max(1.0, np.abs(rhs).max()))
    assert worst <= 1e-12


def test_construction_projects_or_rejects():
    a = np.array([[1e-14, 1], [0, -2e-14]], dtype=complex)
    assert abs(np.trace(CoForm(a, Z2).a)) == 0.0
    with pytest.raises(ValidationError):
        CoForm(np.array([[1, 0], [0, 0]], dtype=complex), Z2)
    with pytest.raises(ValidationError):
        GroupElem(2 * I2, Z2)
    with tolerances(matrix=0.5):
        CoForm(np.array([[0.1, 0], [0, 0]], dtype=complex), Z2)
