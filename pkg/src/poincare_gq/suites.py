"""Named verification suites.

A suite is a function ``suite(seed) -> list[Check]``.  Each check records a
measured value next to its tolerance; a suite passes when every check passes.
The registry backs ``gq verify <suite>`` and the acceptance tests.
"""
from __future__ import annotations

import itertools
import math
import os
from contextlib import contextmanager
from typing import Callable

import numpy as np

from .fields import spacetime_grid
from .io import field_to_csv
from .massive import MassiveSpec, dirac_prewave, dirac_r_inverse
from .massless import MasslessSpec, cone_section_values, helicity_apply, penrose_prewave
from .orbits import canonical_rep, classify, family_orbit_types
from .photon import (
    ConeVectorField,
    PhotonSpec,
    closed_form_wave,
    em_fields,
    em_identity_check,
    f_from_field,
    gauge_shift,
    photon_wave,
    sym_from_spinor,
)
from .pipeline import synthesize
from .quadrature import (
    Profile,
    build_polar_grid,
    build_pullback_grid,
    chart_to_momentum,
    direction_of_spinor,
    integrate,
)
from .representation import SectionState, Trivialization, rep_on_f, sample_field, state_inner, wave_operator
from .schemas import Check, RunConfig
from .sections import HomogeneousSection
from .spinor import (
    EPS,
    I2,
    AlgElem,
    GroupElem,
    alg_exp,
    coadjoint,
    dyn_vars,
    h_inv,
    h_map,
    orbit_invariants,
    pauli_lubanski,
    random_sl2,
    random_traceless,
)
from .twistor import (
    TwistorFamily,
    contact_pullback_check,
    kg_volume_coefficient,
    mu1_act,
    omega0_pair,
    phi_form,
    pi_map,
    twistor_dynvars,
)
from .verify import (
    dalembert_residual,
    dirac_residual,
    kg_residual,
    lorenz_gauge_residual,
    penrose_residual,
    pointwise_residual,
    synth_massive,
    synth_massless,
    synth_potential,
    weyl_residual,
)

PROFILE_HM = Profile("bump", "HM", (0.2, 0.0, 0.1), 0.8)
PROFILE_CONE = Profile("bump", "CPLUS", (0.3, 0.1, 0.8), 0.4)
MASS = 1.3


def _check(name: str, value: float, tol: float, **detail) -> Check:
    value = float(value)
    return Check(name=name, value=value, tolerance=tol, passed=bool(value <= tol), detail=detail)


def _ball(rng, center, radius, n, frac=0.7):
    """``n`` points uniformly inside ``frac`` of a ball."""
    d = rng.normal(size=(n, 3))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    r = frac * radius * rng.uniform(size=(n, 1)) ** (1.0 / 3.0)
    return np.asarray(center) + r * d


def _rand_herm(rng, scale=1.0):
    return h_map(scale * rng.normal(size=4))


def _rand_spinor(rng):
    return rng.normal(size=2) + 1j * rng.normal(size=2)


def _interior_points(n=6, half=0.5):
    return spacetime_grid((-half, -half, -half, 0.0), (2 * half,) * 3 + (0.0,), (n, n, n, 1))


# ---------------------------------------------------------------------------
# 1-3: group and orbit algebra
# ---------------------------------------------------------------------------

def suite_classify(seed: int = 0) -> list[Check]:
    bad = []
    count = 0
    for eta, chi, T, m in itertools.product((-1, 1), (-1, 1), (1, 2, 3), (0.5, 1.0, 2.0)):
        for t in family_orbit_types(eta, chi, T, m):
            got = classify(canonical_rep(t).alpha).type_id
            count += 1
            if got != t.type_id:
                bad.append([eta, chi, T, m, t.type_id, got])
    return [_check("canonical representatives classify to their own type", len(bad), 0,
                   cases=count, mismatches=bad[:10])]


def random_transport(rng, scale=0.5) -> GroupElem:
    return GroupElem(random_sl2(rng, scale), _rand_herm(rng))


def suite_coadjoint(seed: int = 0, n: int = 1000) -> list[Check]:
    rng = np.random.default_rng(seed)
    worst_p = worst_w = 0.0
    for t in family_orbit_types(-1, 1, 1, 1.0):
        alpha = canonical_rep(t).alpha
        p0, w0 = orbit_invariants(alpha)
        for _ in range(n):
            beta = coadjoint(random_transport(rng), alpha)
            p1, w1 = orbit_invariants(beta)
            nb = beta.norm()
            # a relative drift; forms with vanishing invariants are measured against |beta|^degree
            worst_p = max(worst_p, abs(p1 - p0) / max(abs(p0), nb ** 2))
            worst_w = max(worst_w, abs(w1 - w0) / max(abs(w0), nb ** 4))
    return [_check("|P| drift", worst_p, 1e-9, transports_per_type=n),
            _check("|W| drift", worst_w, 1e-9, transports_per_type=n)]


def rk4_flow(X: AlgElem, t: float, steps: int = 400) -> GroupElem:
    """Left-invariant flow from the identity by classical RK4.

    ``g(t) = g(0) exp(tX)`` solves ``A' = A a`` and ``H' = A h A^*``.
    """
    a, h = X.a, X.h
    A = np.eye(2, dtype=complex)
    H = np.zeros((2, 2), dtype=complex)
    dt = t / steps

    def rhs(A_):
        return A_ @ a, A_ @ h @ A_.conj().T

    for _ in range(steps):
        k1A, k1H = rhs(A)
        k2A, k2H = rhs(A + 0.5 * dt * k1A)
        k3A, k3H = rhs(A + 0.5 * dt * k2A)
        k4A, k4H = rhs(A + dt * k3A)
        A = A + dt / 6.0 * (k1A + 2 * k2A + 2 * k3A + k4A)
        H = H + dt / 6.0 * (k1H + 2 * k2H + 2 * k3H + k4H)
    return GroupElem(A, 0.5 * (H + H.conj().T))


def suite_exp(seed: int = 0, n: int = 100) -> list[Check]:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        X = AlgElem(random_traceless(rng, 0.5), _rand_herm(rng, 0.5))
        t = rng.uniform(-2.0, 2.0)
        g, r = alg_exp(X, t), rk4_flow(X, t)
        worst = max(worst, np.abs(g.A - r.A).max(), np.abs(g.H - r.H).max())
    return [_check("alg_exp vs RK4 flow", worst, 1e-8, samples=n)]


# ---------------------------------------------------------------------------
# 4-7: wave equations and helicity
# ---------------------------------------------------------------------------

def suite_kg(seed: int = 0) -> list[Check]:
    grid = build_polar_grid(PROFILE_HM.center, PROFILE_HM.support_radius_fn(), (32, 16, 32), "NU_HM", MASS)
    s = synth_massive(MassiveSpec(MASS, -1, 0), PROFILE_HM, grid)
    X = _interior_points()
    ra = kg_residual(s, X, MASS, -1, "analytic")
    rf = kg_residual(s, X, MASS, -1, "fd", h=1e-3)
    zero = kg_residual(lambda Y, mult=None: np.zeros((len(Y), 1), complex), X, MASS, -1, "fd")
    return [_check("KG analytic relative residual", ra.max_rel, 1e-10, **ra.to_dict()),
            _check("KG finite-difference relative residual", rf.max_rel, 1e-4, **rf.to_dict()),
            _check("KG zero field", zero.max_abs, 0.0)]


def _cone_point(p):
    return h_map(np.append(p, np.linalg.norm(p)))


def suite_dirac(seed: int = 0, n: int = 1000) -> list[Check]:
    rng = np.random.default_rng(seed)
    f = HomogeneousSection(1, PROFILE_HM, (1.0, 0.4j))
    worst = 0.0
    ps = _ball(rng, PROFILE_HM.center, PROFILE_HM.radius, n)
    for i in range(n):
        eta = (-1, 1)[i % 2]
        K = chart_to_momentum("HM", ps[i], MASS)
        v = dirac_prewave(MassiveSpec(MASS, eta, 1), f, _rand_herm(rng), K, _rand_spinor(rng))
        worst = max(worst, pointwise_residual("dirac", v, K, eta, m=MASS))
    grid = build_polar_grid(PROFILE_HM.center, PROFILE_HM.support_radius_fn(), (16, 8, 16), "MU_HM_P1", MASS,
                            fiber_order=8)
    s = synth_massive(MassiveSpec(MASS, -1, 1), f, grid)
    X = rng.uniform(-1, 1, size=(6, 4))
    rf = dirac_residual(s, X, MASS, -1, "fd")
    return [_check("Dirac pointwise prewave residual", worst, 1e-12, samples=n),
            _check("Dirac integrated finite-difference residual", rf.max_rel, 1e-6, **rf.to_dict())]


def _massless_pointwise(rng, T, n, equation):
    worst = 0.0
    ps = _ball(rng, PROFILE_CONE.center, PROFILE_CONE.radius, n)
    f = HomogeneousSection(T, PROFILE_CONE, (1.0, 0.3j))
    for i in range(n):
        eta, chi = ((-1, -1), (-1, 1), (1, -1), (1, 1))[i % 4]
        K = _cone_point(ps[i])
        v = penrose_prewave(MasslessSpec(eta, chi, T), f, K, _rand_herm(rng))
        worst = max(worst, pointwise_residual(equation, v, K, eta, chi=chi, T=T))
    return worst


def _cone_grid():
    return build_polar_grid(PROFILE_CONE.center, PROFILE_CONE.support_radius_fn(), (16, 8, 16), "OMEGA_CPLUS")


def suite_weyl(seed: int = 0, n: int = 1000) -> list[Check]:
    rng = np.random.default_rng(seed)
    out = [_check("Weyl pointwise prewave residual", _massless_pointwise(rng, 1, n, "weyl"), 1e-12, samples=n)]
    grid = _cone_grid()
    X = rng.uniform(-1, 1, size=(6, 4))
    for eta, chi in itertools.product((-1, 1), (-1, 1)):
        s = synth_massless(MasslessSpec(eta, chi, 1), HomogeneousSection(1, PROFILE_CONE, (1.0, 0.3j)), grid)
        r = weyl_residual(s, X, eta, chi, "fd")
        out.append(_check(f"Weyl integrated residual eta={eta} chi={chi}", r.max_rel, 1e-6, **r.to_dict()))
    return out


def suite_penrose(seed: int = 0, n: int = 1000) -> list[Check]:
    rng = np.random.default_rng(seed)
    out = []
    grid = _cone_grid()
    X = rng.uniform(-1, 1, size=(6, 4))
    for T in (2, 3):
        out.append(_check(f"Penrose T={T} pointwise prewave residual", _massless_pointwise(rng, T, n, "penrose"),
                          1e-12, samples=n))
        for eta, chi in itertools.product((-1, 1), (-1, 1)):
            s = synth_massless(MasslessSpec(eta, chi, T), HomogeneousSection(T, PROFILE_CONE, (1.0, 0.3j)), grid)
            r = penrose_residual(s, X, eta, chi, T, "fd")
            out.append(_check(f"Penrose T={T} integrated residual eta={eta} chi={chi}", r.max_rel, 1e-6,
                              **r.to_dict()))
    return out


def suite_helicity(seed: int = 0, n: int = 50) -> list[Check]:
    rng = np.random.default_rng(seed)
    out = []
    for T in (1, 2):
        f = HomogeneousSection(T, PROFILE_CONE, (1.0, 0.3j))
        for eta, chi in itertools.product((-1, 1), (-1, 1)):
            spec = MasslessSpec(eta, chi, T)
            lam = -eta * chi * T / (4.0 * math.pi)
            worst = 0.0
            for p in _ball(rng, PROFILE_CONE.center, PROFILE_CONE.radius, n):
                K = _cone_point(p)
                v = penrose_prewave(spec, f, K, _rand_herm(rng))
                worst = max(worst, np.abs(helicity_apply(spec, v, K) - lam * v).max() / np.abs(lam * v).max())
            out.append(_check(f"helicity T={T} eta={eta} chi={chi}", worst, 1e-12, eigenvalue=lam))
    return out


# ---------------------------------------------------------------------------
# 8: measures
# ---------------------------------------------------------------------------

def _coords(K):
    """``(x1, x2, x3, x4)`` with ``K = h(x)``, read off the entries directly."""
    return np.stack([K[..., 1, 0].real, K[..., 1, 0].imag, 0.5 * (K[..., 0, 0] - K[..., 1, 1]).real,
                     0.5 * (K[..., 0, 0] + K[..., 1, 1]).real], -1)


def _spatial(A, K):
    """Spatial momentum of ``A K A^*``.

    The map is linear in the coordinates of ``K``, so its 4x4 real matrix is
    assembled once from the images of the basis matrices.
    """
    basis = np.array([h_map(e) for e in np.eye(4)])
    L = _coords(A @ basis @ A.conj().T)
    return _coords(K) @ L[:, :3]


def suite_measure(seed: int = 0, n: int = 20) -> list[Check]:
    rng = np.random.default_rng(seed)
    pr_h = Profile("bump", "HM", (0.3, -0.2, 0.5), 0.8)
    pr_c = Profile("bump", "CPLUS", (0.3, 0.2, 1.5), 0.8)
    # a non-constant fibre factor so that the P1 directions are exercised as well
    gfun = lambda u: 1 + 0.3 * u[:, 0] - 0.2 * u[:, 2] + 0.1 * u[:, 1] * u[:, 2]  # noqa: E731
    plans = (("NU_HM", pr_h, (32, 16, 32), 8), ("OMEGA_CPLUS", pr_c, (48, 24, 48), 8),
             ("MU_HM_P1", pr_h, (32, 16, 32), 16))
    out = []
    for mid, pf, orders, fo in plans:
        # the untransformed integral is the reference, so it gets a finer grid
        ref_orders = tuple(3 * o // 2 for o in orders)
        base = build_polar_grid(pf.center, pf.support_radius_fn(), ref_orders, mid, MASS, fiber_order=fo)
        fib = mid == "MU_HM_P1"
        I0 = integrate((lambda b: pf(b.p) * gfun(b.u)) if fib else (lambda b: pf(b.p)), base)
        worst = 0.0
        for _ in range(n):
            A = random_sl2(rng, 0.3)
            grid = build_pullback_grid(pf, A, orders, mid, MASS, fiber_order=fo)

            def fA(b, A=A):
                v = pf(_spatial(A, b.K))
                if b.spinor is not None:
                    v = v * gfun(direction_of_spinor(np.einsum("ij,nj->ni", A, b.spinor)))
                return v

            worst = max(worst, abs(integrate(fA, grid) - I0) / abs(I0))
        out.append(_check(f"{mid} invariance", worst, 1e-6, transforms=n, orders=list(orders)))
    return out


# ---------------------------------------------------------------------------
# 9: photons
# ---------------------------------------------------------------------------

def photon_field() -> ConeVectorField:
    pr = PROFILE_CONE
    return ConeVectorField([lambda p, a=a: pr(p) * a * (1 + 0.2 * p[:, 0]) for a in (0.3, 1j, -0.5, 0.7 + 0.2j)])


def suite_photon_gauge(seed: int = 0, n: int = 200) -> list[Check]:
    rng = np.random.default_rng(seed)
    A = photon_field()
    pr = PROFILE_CONE
    gf = lambda K: pr(h_inv(K)[..., :3]) * (0.5 + 0.1j)  # noqa: E731
    Ag = gauge_shift(A, lambda K: gf(K)[..., None, None] * I2)
    gauge = em = 0.0
    for p in _ball(rng, pr.center, pr.radius, n):
        for chi in (-1, 1):
            s = sym_from_spinor(cone_section_values(p[None], chi)[0])
            f0 = f_from_field(A, s)
            gauge = max(gauge, abs(f_from_field(Ag, s) - f0) / max(abs(f0), 1e-300))
        K = _cone_point(p)
        scale = np.abs(A(K)).max() * np.abs(K).max()
        em = max(em, em_identity_check(A, K) / scale)
    grid = _cone_grid()
    X = rng.uniform(-1, 1, size=(4, 4))
    closed = rel = 0.0
    for eta in (-1, 1):
        w = photon_wave(PhotonSpec(eta, -eta), A, X, grid)
        E, B = em_fields(A, X, grid, eta)
        closed = max(closed, np.abs(w - closed_form_wave(PhotonSpec(eta, -eta), E, B)).max() / np.abs(w).max())
        # the other helicity: its wave is -eps conj(.) eps of the opposite-energy one
        w2 = photon_wave(PhotonSpec(-eta, -eta), A, X, grid)
        rel = max(rel, np.abs(w2 + EPS @ np.conj(w) @ EPS).max() / np.abs(w2).max())
    s = synth_potential(A, grid, -1)
    lor = lorenz_gauge_residual(s, X, -1, "analytic")
    dal = dalembert_residual(s, X, -1, "analytic")
    return [_check("gauge invariance of f_A", gauge, 1e-12, samples=n),
            _check("EM identity", em, 1e-13, samples=n),
            _check("closed-form wave vs quadrature", closed, 1e-6),
            _check("opposite-helicity wave relation", rel, 1e-12),
            _check("Lorenz gauge (analytic)", lor.max_rel, 1e-10, **lor.to_dict()),
            _check("d'Alembert (analytic)", dal.max_rel, 1e-10, **dal.to_dict())]


# ---------------------------------------------------------------------------
# 10-11: twistors and contact forms
# ---------------------------------------------------------------------------

def _twistor(rng, nu):
    Z = rng.normal(size=4) + 1j * rng.normal(size=4)
    if np.sign(phi_form(Z)) != np.sign(nu):
        Z[2:] *= -1
    return Z


def suite_twistor(seed: int = 0, n: int = 50) -> list[Check]:
    rng = np.random.default_rng(seed)
    eqv = dyn = wrel = om = 0.0
    for i in range(n):
        eta, chi = ((-1, -1), (-1, 1), (1, -1), (1, 1))[i % 4]
        fam = TwistorFamily(eta, chi, 1 + i % 3)
        nu = fam.nu
        Z = _twistor(rng, nu)
        g = random_transport(rng, 0.5)
        a1, a2 = pi_map(mu1_act(g, Z), nu, eta), coadjoint(g, pi_map(Z, nu, eta))
        sc = max(a2.norm(), 1.0)
        eqv = max(eqv, max(np.abs(a1.a - a2.a).max(), np.abs(a1.k - a2.k).max()) / sc)
        P, l, gg, W = twistor_dynvars(Z, nu, eta)
        alpha = pi_map(Z, nu, eta)
        P2, l2, g2 = dyn_vars(alpha)
        W2 = pauli_lubanski(alpha)
        dsc = max(1.0, np.abs(P2).max(), np.abs(l2).max(), np.abs(g2).max())
        dyn = max(dyn, max(np.abs(P - P2).max(), np.abs(l - l2).max(), np.abs(gg - g2).max()) / dsc)
        wrel = max(wrel, np.abs(W2 + eta * nu * P2).max() / max(1.0, np.abs(W2).max()))
        X = AlgElem(random_traceless(rng), _rand_herm(rng))
        lhs, rhs = omega0_pair(Z, X, nu, eta, method="fd")
        om = max(om, abs(lhs - rhs) / max(1.0, abs(rhs)))
    return [_check("Pi equivariance", eqv, 1e-10, samples=n),
            _check("twistor dynamical variables vs spinor path", dyn, 1e-12),
            _check("W = -eta nu P", wrel, 1e-12),
            _check("omega0 pairing identity (finite differences)", om, 1e-8)]


def _wedge(f1: dict, f2: dict) -> dict:
    """Wedge product of forms stored as ``{sorted index tuple: coefficient}``."""
    out: dict = {}
    for i1, c1 in f1.items():
        for i2, c2 in f2.items():
            idx = i1 + i2
            if len(set(idx)) < len(idx):
                continue
            # sign of the sorting permutation, by counting inversions
            inv = sum(1 for a in range(len(idx)) for b in range(a + 1, len(idx)) if idx[a] > idx[b])
            key = tuple(sorted(idx))
            out[key] = out.get(key, 0.0) + (-1) ** inv * c1 * c2
    return out


def kg_volume_oracle(m: float, eta: int) -> float:
    """Coefficient of ``Omega ^ (dOmega)^3`` on ``dt dk1 dk2 dk3 dx1 dx2 dx3`` by explicit wedges.

    Indices: t = 0, k_i = 1..3, x_i = 4..6.  ``dOmega = eta m dk_i ^ dx^i``;
    only the ``dt`` part of ``Omega`` survives the top wedge.
    """
    # the dx part is kept (with arbitrary weights) to show that it drops out
    omega = {(0,): 1.0, **{(4 + i,): 0.37 * (i + 1) for i in range(3)}}
    d_omega = {(1 + i, 4 + i): eta * m for i in range(3)}
    top = _wedge(omega, _wedge(d_omega, _wedge(d_omega, d_omega)))
    return top.get(tuple(range(7)), 0.0)


def suite_contact(seed: int = 0, n: int = 5) -> list[Check]:
    rng = np.random.default_rng(seed)
    kg = dirac = 0.0
    vol_err_oracle = vol_err_stated = 0.0
    for i in range(n):
        eta = (-1, 1)[i % 2]
        c = np.concatenate([rng.normal(size=6) * 0.7, [0.2]])
        kg = max(kg, contact_pullback_check("kg", c, MASS, eta)["residual"])
        w = _rand_spinor(rng)
        y = complex(*(0.5 * rng.normal(size=2)))
        cd = np.concatenate([[w[0].real, w[0].imag, w[1].real, w[1].imag, y.real, y.imag], rng.normal(size=3)])
        dirac = max(dirac, contact_pullback_check("dirac", cd, MASS, eta)["residual"])
        vol = kg_volume_coefficient(c, MASS, eta)
        oracle = kg_volume_oracle(MASS, eta)
        stated = eta * MASS ** 3 / 16.0
        vol_err_oracle = max(vol_err_oracle, abs(vol - oracle) / abs(oracle))
        vol_err_stated = max(vol_err_stated, abs(vol - stated) / abs(stated))
    return [_check("KG contact form pullback", kg, 1e-6),
            _check("Dirac contact form pullback", dirac, 1e-6),
            _check("KG volume coefficient vs explicit wedge oracle (-6 eta m^3)", vol_err_oracle, 1e-8),
            _check("KG volume coefficient vs eta m^3/16", vol_err_stated, 1e-8)]


# ---------------------------------------------------------------------------
# 12: representation
# ---------------------------------------------------------------------------

def suite_representation(seed: int = 0) -> list[Check]:
    rng = np.random.default_rng(seed)
    pr = PROFILE_HM
    hom = 0.0
    cases = [(Trivialization("kg", MASS, -1), HomogeneousSection(0, pr)),
             (Trivialization("massive", MASS, 1, T=1), HomogeneousSection(1, pr, (1, 0.4j))),
             (Trivialization("massless", eta=-1, chi=1, T=1), HomogeneousSection(1, PROFILE_CONE, (1, 0.3))),
             (Trivialization("massless", eta=1, chi=-1, T=2), HomogeneousSection(2, PROFILE_CONE, (1, 0.3)))]
    for triv, f in cases:
        st = SectionState(triv, f)
        # normalized by the largest value over the samples, not pointwise
        err = size = 0.0
        for _ in range(10):
            if triv.family == "massless":
                p = _ball(rng, PROFILE_CONE.center, PROFILE_CONE.radius, 1, 0.5)
                pt = cone_section_values(p, triv.chi)[0]
            else:
                K = chart_to_momentum("HM", _ball(rng, pr.center, pr.radius, 1, 0.5)[0], MASS)
                pt = K if triv.family == "kg" else dirac_r_inverse(K, _rand_spinor(rng), MASS)
            g1 = GroupElem(random_sl2(rng, 0.05), _rand_herm(rng))
            g2 = GroupElem(random_sl2(rng, 0.05), _rand_herm(rng))
            a = rep_on_f(g1, rep_on_f(g2, st))(pt)
            b = rep_on_f(g1 @ g2, st)(pt)
            err = max(err, np.abs(a - b).max())
            size = max(size, np.abs(b).max())
        hom = max(hom, err / size)

    unit = 0.0
    g = GroupElem(random_sl2(rng, 0.1), _rand_herm(rng))
    # both states share one support, so the transformed grid fits both integrands
    for triv, f1, f2, mid, orders, fo in (
        (Trivialization("kg", MASS, -1), HomogeneousSection(0, pr), HomogeneousSection(0, pr), "NU_HM",
         (32, 16, 32), 8),
        (Trivialization("massive", MASS, 1, T=1), HomogeneousSection(1, pr, (1, 0.4j)),
         HomogeneousSection(1, pr, (0.3, 1)), "MU_HM_P1", (24, 12, 24), 8),
    ):
        s1, s2 = SectionState(triv, f1), SectionState(triv, f2)
        G0 = build_polar_grid(pr.center, pr.support_radius_fn(), orders, mid, MASS, fiber_order=fo)
        G1 = build_pullback_grid(pr, np.linalg.inv(g.A), orders, mid, MASS, fiber_order=fo)
        a = state_inner(s1, s2, G0)
        b = state_inner(rep_on_f(g, s1), rep_on_f(g, s2), G1)
        unit = max(unit, abs(a - b) / abs(a))

    spec = MassiveSpec(MASS, -1, 0)
    G = build_polar_grid(pr.center, pr.support_radius_fn(), (24, 12, 24), "NU_HM", MASS)
    h = 0.01
    axes = [np.linspace(-2 * h, 4 * h, 7) + 0.05 * i for i in range(4)]
    fld = sample_field(lambda X: synth_massive(spec, pr, G)(X), axes, Trivialization("kg", MASS, -1))
    Xi = fld.interior_points().reshape(-1, 4)
    pk = 0.0
    for k in range(4):
        op = wave_operator(f"P{k + 1}", fld).reshape(-1)
        ref = synth_massive(spec, pr, G)(Xi, lambda b, k=k: (-spec.eta * h_inv(b.K)[:, k])[:, None]).reshape(-1)
        pk = max(pk, np.abs(op - ref).max() / np.abs(ref).max())
    return [_check("delta' homomorphism", hom, 1e-12),
            _check("unitarity", unit, 1e-8),
            _check("momentum operators: finite differences vs momentum multiplication", pk, 1e-5)]


# ---------------------------------------------------------------------------
# 13: determinism
# ---------------------------------------------------------------------------

@contextmanager
def threads(n: int):
    old = os.environ.get("GQ_THREADS")
    os.environ["GQ_THREADS"] = str(n)
    try:
        yield
    finally:
        if old is None:
            os.environ.pop("GQ_THREADS", None)
        else:
            os.environ["GQ_THREADS"] = old


def suite_determinism(seed: int = 0) -> list[Check]:
    outs = []
    for family in ("kg", "dirac"):
        cfg = RunConfig.model_validate({"particle": {"family": family}, "seed": seed,
                                        "grid": {"samples": [4, 4, 4, 1]} if family == "dirac" else {}})
        texts = set()
        for n in (1, 4, 1, 4):
            with threads(n):
                texts.add(field_to_csv(synthesize(cfg)))
        outs.append(_check(f"{family} output identical for GQ_THREADS in (1, 4)", len(texts) - 1, 0))
    return outs


SUITES: dict[str, Callable[..., list[Check]]] = {
    "classify": suite_classify,
    "coadjoint": suite_coadjoint,
    "exp": suite_exp,
    "kg": suite_kg,
    "dirac": suite_dirac,
    "weyl": suite_weyl,
    "penrose": suite_penrose,
    "helicity": suite_helicity,
    "measure": suite_measure,
    "photon-gauge": suite_photon_gauge,
    "twistor": suite_twistor,
    "contact": suite_contact,
    "representation": suite_representation,
    "determinism": suite_determinism,
}


class UnknownSuiteError(KeyError):
    pass


def run_suite(name: str, seed: int = 0) -> tuple[bool, list[Check]]:
    if name not in SUITES:
        raise UnknownSuiteError(f"unknown suite {name!r}; known: {', '.join(sorted(SUITES))}")
    checks = SUITES[name](seed)
    return all(c.passed for c in checks), checks
