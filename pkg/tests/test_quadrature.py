from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.integrate import quad

from poincare_gq.quadrature import (
    ChartPoint,
    DomainError,
    Profile,
    QuadratureError,
    build_grid,
    build_polar_grid,
    build_pullback_grid,
    direction_of_spinor,
    integrate,
    measure_density,
    sphere_rule,
    spinor_of_direction,
)
from poincare_gq.spinor import random_sl2


def radial_oracle(R: float, m: float, amp: float = 1.0) -> float:
    """``int bump(|p|/R) / sqrt(m^2 + p^2) d^3p`` as a 1-D adaptive integral."""
    f = lambda r: math.exp(-1.0 / (1.0 - (r / R) ** 2)) * r * r / math.sqrt(m * m + r * r) if r < R else 0.0
    val, _ = quad(f, 0.0, R, epsabs=0.0, epsrel=1e-13, limit=200)
    return 4.0 * math.pi * amp * val


def test_density_examples():
    assert measure_density(ChartPoint("HM", (0.0, 0.0, 0.0)), "NU_HM", 1.0) == 1.0
    assert measure_density(ChartPoint("CPLUS", (0.0, 0.0, 2.0)), "OMEGA_CPLUS") == 0.5
    assert math.isclose(measure_density(ChartPoint("HM_P1_S", (0, 0, 0, 0, 0)), "MU_HM_P1", 1.0), 1.0)


def test_density_domain_errors():
    with pytest.raises(DomainError):
        measure_density(ChartPoint("CPLUS", (0.0, 0.0, 0.0)), "OMEGA_CPLUS")
    with pytest.raises(DomainError):
        measure_density(ChartPoint("HM", (0.0, 0.0, 0.0)), "OMEGA_CPLUS")
    with pytest.raises(DomainError):
        ChartPoint("XX", ())


def test_grid_node_count_and_zero_integrand():
    pr = Profile("bump", "HM", (0.0, 0.0, 0.0), 1.0)
    g = build_grid(pr, 4, "NU_HM")
    assert g.n_nodes == 64
    assert integrate(lambda b: np.zeros(len(b)), g) == 0


def test_empty_support_and_apex_rejected():
    with pytest.raises(DomainError):
        Profile("bump", "HM", (0.0, 0.0, 0.0), 0.0)
    with pytest.raises(DomainError):
        Profile("bump", "CPLUS", (0.0, 0.0, 0.5), 0.6)


@pytest.mark.parametrize("m", [0.5, 1.3])
def test_bump_against_radial_oracle(m):
    pr = Profile("bump", "HM", (0.0, 0.0, 0.0), 0.9, amplitude=1.0)
    ref = radial_oracle(0.9, m)
    box = integrate(lambda b: pr(b.p), build_grid(pr, 64, "NU_HM", m))
    polar = integrate(lambda b: pr(b.p), build_polar_grid(pr.center, pr.support_radius_fn(), (32, 16, 32), "NU_HM", m))
    assert abs(box - ref) / ref <= 1e-8
    assert abs(polar - ref) / ref <= 1e-8


def test_doubling_the_order_at_least_halves_the_error():
    pr = Profile("bump", "HM", (0.0, 0.0, 0.0), 1.0)
    ref = radial_oracle(1.0, 1.0)
    errs = [abs(integrate(lambda b: pr(b.p), build_grid(pr, o, "NU_HM")) - ref) for o in (8, 16, 32)]
    assert errs[1] <= 0.5 * errs[0] and errs[2] <= 0.5 * errs[1]


def test_conjugation_symmetry_is_exact():
    pr = Profile("bump", "CPLUS", (0.3, 0.1, 0.8), 0.4, amplitude=0.3 + 0.7j)
    g = build_polar_grid(pr.center, pr.support_radius_fn(), (12, 6, 12), "OMEGA_CPLUS")
    f = lambda b: pr(b.p) * np.exp(1j * b.p[:, 0])
    assert integrate(lambda b: np.conj(f(b)), g) == np.conj(integrate(f, g))


def test_reduction_is_independent_of_thread_count():
    pr = Profile("bump", "HM", (0.2, 0.0, 0.1), 0.8)
    g = build_polar_grid(pr.center, pr.support_radius_fn(), (24, 12, 24), "MU_HM_P1", 1.3, fiber_order=6)
    f = lambda b: pr(b.p) * (1 + b.u[:, 2])
    vals = {complex(integrate(f, g, threads=t)) for t in (1, 2, 4)}
    assert len(vals) == 1


def test_non_finite_integrand_rejected():
    pr = Profile("bump", "HM", (0.0, 0.0, 0.0), 1.0)
    with pytest.raises(QuadratureError):
        integrate(lambda b: np.full(len(b), np.nan), build_grid(pr, 4, "NU_HM"))


def test_sphere_rule_and_spinor_directions():
    th, ph, w = sphere_rule(8)
    assert math.isclose(w.sum(), 4 * math.pi, rel_tol=1e-14)
    u = direction_of_spinor(spinor_of_direction(th, ph))
    ref = np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], -1)
    assert np.abs(u - ref).max() < 1e-14


@pytest.mark.parametrize("mid,chart,center", [("NU_HM", "HM", (0.3, -0.2, 0.5)),
                                              ("OMEGA_CPLUS", "CPLUS", (0.3, 0.2, 1.5))])
def test_single_transform_invariance(mid, chart, center, rng):
    pr = Profile("bump", chart, center, 0.8)
    base = build_polar_grid(pr.center, pr.support_radius_fn(), (32, 16, 32), mid, 1.3)
    I0 = integrate(lambda b: pr(b.p), base)
    A = random_sl2(rng, 0.2)

    def fA(b):
        K2 = A @ b.K @ A.conj().T
        q = np.stack([K2[:, 1, 0].real, K2[:, 1, 0].imag, 0.5 * (K2[:, 0, 0] - K2[:, 1, 1]).real], -1)
        return pr(q)

    I1 = integrate(fA, build_pullback_grid(pr, A, (32, 16, 32), mid, 1.3))
    assert abs(I1 - I0) / abs(I0) <= 1e-6


def test_profile_dict_round_trip():
    tab = np.arange(64, dtype=float).reshape(4, 4, 4) + 0.5j
    pr = Profile("table", "HM", (0.0, 0.1, 0.2), 0.5, amplitude=2 - 1j, table=tab)
    back = Profile.from_dict(pr.to_dict())
    pts = np.array([[0.0, 0.1, 0.2], [0.1, 0.2, 0.1]])
    assert np.array_equal(back(pts), pr(pts))
    with pytest.raises(ValueError):
        Profile("table", "HM", (0.0, 0.0, 0.0), 0.5, table=np.ones((3, 3, 3)))
