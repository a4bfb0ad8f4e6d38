from __future__ import annotations

import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import seeds
from poincare_gq.orbits import (
    NILPOTENT,
    DegenerateInputError,
    MissingParameterError,
    OrbitType,
    canonical_rep,
    classify,
    family_orbit_types,
    quantizability,
)
from poincare_gq.spinor import I2, PAULI, CoForm, coadjoint, h_map, orbit_invariants, pauli_lubanski, random_group

Z2 = np.zeros((2, 2), dtype=complex)
S3 = PAULI[2]


@pytest.mark.parametrize("eta", [-1, 1])
def test_scalar_particle_is_type_5(eta):
    t = classify(CoForm(Z2, eta * I2))
    assert (t.type_id, t.massSq, t.wSq) == (5, 1.0, 0.0)
    assert quantizability(t) == (True, True)


def test_spin_half_particle_is_type_5_with_negative_wsq():
    t = classify(CoForm(1j / (8 * math.pi) * S3, I2))
    assert t.type_id == 5 and t.wSq < 0
    assert quantizability(t) == (True, False)
    assert t.T == 1


@pytest.mark.parametrize("eta,chi", list(itertools.product((-1, 1), (-1, 1))))
def test_massless_particle_is_type_4(eta, chi):
    al = CoForm(1j * chi / (8 * math.pi) * S3, eta * np.diag([1.0, 0.0]))
    t = classify(al)
    assert t.type_id == 4
    assert math.isclose(t.s, chi / (4 * math.pi), rel_tol=1e-12)
    # h(W) = s h(P) entrywise
    W = h_map(pauli_lubanski(al))
    assert np.abs(W - t.s * (-al.k)).max() <= 1e-10
    assert (t.T, t.chi) == (1, chi)


def test_zero_form_is_degenerate():
    with pytest.raises(DegenerateInputError):
        classify(CoForm(Z2, Z2))


def test_canonical_rows_from_the_table():
    assert np.array_equal(canonical_rep(OrbitType(1)).alpha.a, NILPOTENT)
    assert not canonical_rep(OrbitType(1)).alpha.k.any()
    rep = canonical_rep(OrbitType(6, massSq=-4.0))
    assert not rep.alpha.a.any() and np.allclose(rep.alpha.k, 2.0 * S3)


def test_missing_parameters_are_reported():
    with pytest.raises(MissingParameterError):
        canonical_rep(OrbitType(4))
    with pytest.raises(MissingParameterError):
        canonical_rep(OrbitType(7, massSq=-1.0, wSq=0.5))


def test_type_1_is_not_listed():
    t = classify(CoForm(NILPOTENT, Z2))
    assert t.type_id == 1 and quantizability(t) == (False, False) and not t.listed


@pytest.mark.parametrize("eta,chi,T,m", list(itertools.product((-1, 1), (-1, 1), (1, 2, 3), (0.5, 1.0, 2.0))))
def test_table_round_trip(eta, chi, T, m):
    for t in family_orbit_types(eta, chi, T, m):
        rep = canonical_rep(t)
        back = classify(rep.alpha)
        assert back.type_id == t.type_id
        assert math.isclose(back.massSq, t.massSq, rel_tol=1e-12, abs_tol=1e-12)
        assert math.isclose(back.wSq, t.wSq, rel_tol=1e-10, abs_tol=1e-12)
        if t.s is not None:
            assert math.isclose(back.s, t.s, rel_tol=1e-12)
        for attr in ("sign_trP", "sign_trW"):
            if getattr(t, attr) is not None:
                assert getattr(back, attr) == getattr(t, attr)


@given(seeds, st.integers(0, 8))
def test_type_is_constant_along_orbits(seed, row):
    rng = np.random.default_rng(seed)
    t = family_orbit_types(-1, 1, 2, 1.0)[row]
    al = canonical_rep(t).alpha
    g = random_group(rng, 0.5)
    moved = coadjoint(g, al)
    assert classify(moved).type_id == t.type_id
    m0, w0 = orbit_invariants(al)
    m1, w1 = orbit_invariants(moved)
    assert abs(m1 - m0) <= 1e-9 * max(1.0, abs(m0)) and abs(w1 - w0) <= 1e-9 * max(1.0, abs(w0))
