"""Twistor space, the massless orbit ``O_nu`` and the contact forms of the
Klein-Gordon and Dirac contact manifolds.

Twistors are pairs ``Z = (w, z)`` of 2-spinors with the hermitian form of
signature (+, +, -, -) whose quadratic form is ``Phi(Z) = Re z^* w``.
Differential forms are stored as coefficient arrays over explicit real
charts; derivatives of chart maps use finite differences.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .spinor import EPS, I2, PAULI, AlgElem, CoForm, GroupElem, h_inv, h_map, pairing

__all__ = [
    "TwistorError", "TwistorFamily", "phi_form", "mu1_matrix", "mu1_act", "dmu1", "standardize",
    "pi_map", "twistor_dynvars", "omega0", "omega0_pair", "generator_tangent", "fd_derivative",
    "left_invariant_pullback", "kg_section", "kg_contact_closed_form", "dirac_section",
    "dirac_contact_closed_form", "contact_pullback_check", "top_form_coefficient",
    "kg_volume_coefficient", "chart_twistor", "chart_coords", "local_omega", "local_omega_closed_form",
    "local_symplectic", "exterior_derivative", "stabilizer_element",
]


class TwistorError(ValueError):
    pass


@dataclass(frozen=True)
class TwistorFamily:
    """Massless type-4 particle: ``nu = -eta chi T / 4 pi``."""

    eta: int = -1
    chi: int = 1
    T: int = 1

    @property
    def nu(self) -> float:
        return -self.eta * self.chi * self.T / (4.0 * math.pi)

    @property
    def q(self) -> np.ndarray:
        return np.array([0.0, 2.0 * self.nu, 0.0, 1.0], dtype=complex)

    @property
    def alpha(self) -> CoForm:
        return CoForm(1j * self.chi * self.T / (8.0 * math.pi) * PAULI[2],
                      self.eta * np.diag([1.0, 0.0]).astype(complex))


def _split(Z):
    Z = np.asarray(Z, dtype=complex)
    if Z.shape[-1] != 4:
        raise TwistorError("a twistor has four complex components")
    return Z[..., :2], Z[..., 2:]


def phi_form(Z) -> np.ndarray | float:
    w, z = _split(Z)
    return np.real(np.sum(np.conj(z) * w, axis=-1))


def mu1_matrix(g: GroupElem) -> np.ndarray:
    Ais = np.linalg.inv(g.A.conj().T)
    return np.block([[g.A, -1j * g.H @ Ais], [np.zeros((2, 2)), Ais]])


def mu1_act(g: GroupElem, Z) -> np.ndarray:
    return np.asarray(Z, dtype=complex) @ mu1_matrix(g).T


def dmu1(X: AlgElem) -> np.ndarray:
    """Derivative of ``mu_1`` at the identity along ``X``."""
    return np.block([[X.a, -1j * X.h], [np.zeros((2, 2)), -X.a.conj().T]])


def stabilizer_element(nu: float, a: complex, b: float) -> GroupElem:
    """Element of the identity component of the isotropy group of ``q``."""
    c = -2j * nu * a
    return GroupElem(np.array([[1, a], [0, 1]], dtype=complex), np.array([[b, c], [np.conj(c), 0]], dtype=complex))


def _check_sign(Z, nu):
    phi = phi_form(Z)
    if phi == 0 or np.sign(phi) != np.sign(nu):
        raise TwistorError("sign(Phi(Z)) must equal sign(nu)")
    return phi


def standardize(Z, nu: float) -> GroupElem:
    """``(A(w, z), H(w, z))`` with ``mu_1(A, H) q = sqrt(2 nu / Phi) Z``."""
    Z = np.asarray(Z, dtype=complex)
    phi = _check_sign(Z, nu)
    w, z = _split(Z)
    nz = float(np.sum(np.abs(z) ** 2))
    if nz == 0:
        raise TwistorError("z must be nonzero")
    im = float(np.imag(np.conj(z) @ w))
    c1 = EPS @ np.conj(z)
    # second column taken with the sign that gives det A = +1 and mu_1(A, H) q
    # proportional to +Z (the opposite sign yields det A = -1)
    c2 = (w - 1j * im / nz * z) / (2.0 * nu)
    A = math.sqrt(2.0 * nu / phi) * np.column_stack([c1, c2])
    H = -im / nz * I2
    return GroupElem(A, H.astype(complex))


def pi_map(Z, nu: float, eta: int) -> CoForm:
    """Point of the coadjoint orbit attached to the projective class of ``Z``."""
    Z = np.asarray(Z, dtype=complex)
    phi = _check_sign(Z, nu)
    w, z = _split(Z)
    c = 2.0 * nu * eta / phi
    wz = np.outer(w, np.conj(z))
    zw = np.outer(z, np.conj(w))
    a = 0.25j * (wz + EPS @ np.conj(zw) @ EPS)
    k = -(EPS @ np.conj(np.outer(z, np.conj(z))) @ EPS)
    return CoForm(c * a, c * k)


def twistor_dynvars(Z, nu: float, eta: int):
    """``(P, l, g, W)`` from the twistor formulas (W as a 4-vector)."""
    Z = np.asarray(Z, dtype=complex)
    phi = phi_form(Z)
    if phi == 0:
        raise TwistorError("Phi(Z) = 0")
    w, z = _split(Z)
    zz = np.outer(z, np.conj(z))
    zw = np.outer(z, np.conj(w))
    wz = np.outer(w, np.conj(z))
    hP = 2.0 * eta * nu / phi * (EPS @ np.conj(zz) @ EPS)
    S = zw + wz
    D = zw - wz
    hl = eta * nu / (2.0 * phi) * (S + EPS @ np.conj(S) @ EPS)
    hg = 1j * eta * nu / (2.0 * phi) * (D - EPS @ np.conj(D) @ EPS)
    P = h_inv(hP)
    l = h_inv(hl)[:3]
    g = h_inv(hg)[:3]
    W = -eta * nu * P
    return P, l, g, W


def omega0(Z, V, nu: float, eta: int) -> float:
    """The real 1-form ``omega_0`` at ``Z`` applied to the tangent vector ``V``."""
    w, z = _split(Z)
    vw, vz = _split(V)
    phi = phi_form(Z)
    s = np.sum(z * np.conj(vw) + w * np.conj(vz) - np.conj(z) * vw - np.conj(w) * vz)
    return float(np.real(1j * eta * nu / (2.0 * phi) * s))


def fd_derivative(f: Callable[[float], np.ndarray], h: float = 1e-3) -> np.ndarray:
    """Derivative at 0 by the 5-point central stencil, Richardson-extrapolated once."""
    def d(step):
        return (-f(2 * step) + 8 * f(step) - 8 * f(-step) + f(-2 * step)) / (12.0 * step)

    d1, d2 = np.asarray(d(h)), np.asarray(d(h / 2))
    return (16.0 * d2 - d1) / 15.0


def generator_tangent(Z, X: AlgElem, method: str = "analytic", h: float = 1e-3) -> np.ndarray:
    """Tangent at ``Z`` of ``t -> mu_1(Exp(-t X)) Z``."""
    Z = np.asarray(Z, dtype=complex)
    if method == "analytic":
        return -(dmu1(X) @ Z)
    from .spinor import alg_exp

    return fd_derivative(lambda t: mu1_act(alg_exp(X, -t), Z), h)


def omega0_pair(Z, X: AlgElem, nu: float, eta: int, method: str = "fd") -> tuple[float, float]:
    """``(omega_0(X~), -<Pi(Z), X>)``: the two sides of the generator identity.

    ``Pi`` depends only on the projective class of ``Z``, so the right-hand
    side is the dynamical variable of ``X`` read through the projection.
    """
    V = generator_tangent(Z, X, method)
    lhs = omega0(Z, V, nu, eta)
    rhs = -pairing(pi_map(Z, nu, eta), X)
    return lhs, rhs


# ---------------------------------------------------------------------------
# left-invariant forms and contact manifolds
# ---------------------------------------------------------------------------

def _group_inv_mul(g: GroupElem, g2: GroupElem) -> tuple[np.ndarray, np.ndarray]:
    """``g^{-1} g2`` as raw matrices (no SL(2) projection; used inside stencils)."""
    Ai = np.linalg.inv(g.A)
    return Ai @ g2.A, Ai @ (g2.H - g.H) @ Ai.conj().T


def left_invariant_pullback(alpha: CoForm, section: Callable[[np.ndarray], GroupElem], coords,
                            h: float = 1e-3) -> np.ndarray:
    """Coefficients of ``section^* alpha~`` at real chart coordinates ``coords``.

    ``alpha~`` is the left-invariant 1-form with value ``alpha`` at the
    identity; along coordinate ``i`` it evaluates ``alpha`` on the tangent at 0
    of ``s -> section(c)^{-1} section(c + s e_i)``.
    """
    c = np.asarray(coords, dtype=float)
    g0 = section(c)
    out = np.empty(len(c))
    for i in range(len(c)):
        e = np.zeros(len(c))
        e[i] = 1.0

        def curve(s, e=e):
            a, hh = _group_inv_mul(g0, section(c + s * e))
            return np.concatenate([a.ravel(), hh.ravel()])

        d = fd_derivative(curve, h)
        X = AlgElem(d[:4].reshape(2, 2), 0.5 * (d[4:].reshape(2, 2) + d[4:].reshape(2, 2).conj().T))
        out[i] = pairing(alpha, X)
    return out


def kg_section(m: float, eta: int, tau: float = 0.0) -> Callable[[np.ndarray], GroupElem]:
    """Section over the chart ``(k1, k2, k3, x1, x2, x3, t)`` of the KG contact manifold."""
    def section(c):
        k, x, t = c[:3], c[3:6], c[6]
        k4 = math.sqrt(1.0 + k @ k)
        q = 1.0 + k[0] ** 2 + k[1] ** 2
        a11 = math.sqrt((k4 + k[2]) / q)
        A = np.array([[a11, a11 * (k[0] - 1j * k[1])], [0.0, 1.0 / a11]], dtype=complex)
        H = h_map(np.append(x, 0.0)) - (eta / m) * (t + tau) * h_map(np.append(k, k4))
        return GroupElem(A, H)

    return section


def kg_contact_closed_form(c, m: float, eta: int) -> np.ndarray:
    """``dt + eta m k_i dx^i`` in the ordering (k, x, t)."""
    c = np.asarray(c, dtype=float)
    return np.concatenate([np.zeros(3), eta * m * c[:3], [1.0]])


def _z_of(w, y):
    w = np.asarray(w, dtype=complex)
    return (w + y * (EPS @ np.conj(w))) / np.real(np.conj(w) @ w)


def dirac_section(T: int = 1) -> Callable[[np.ndarray], GroupElem]:
    """Section over real coordinates ``(Re w1, Im w1, Re w2, Im w2, Re y, Im y, x1, x2, x3)``."""
    def section(c):
        w = np.array([c[0] + 1j * c[1], c[2] + 1j * c[3]])
        z = _z_of(w, c[4] + 1j * c[5])
        A = np.column_stack([w, -(EPS @ np.conj(z))])
        return GroupElem(A, h_map(np.append(c[6:9], 0.0)))

    return section


def dirac_alpha(m: float, eta: int, T: int = 1) -> CoForm:
    return CoForm(1j * T / (8.0 * math.pi) * PAULI[2], eta * m * I2.astype(complex))


def dirac_contact_closed_form(c, m: float, eta: int, T: int = 1) -> np.ndarray:
    """The contact form written in the twistor-like coordinates, restricted to the chart."""
    c = np.asarray(c, dtype=float)
    w = np.array([c[0] + 1j * c[1], c[2] + 1j * c[3]])
    z = _z_of(w, c[4] + 1j * c[5])
    Pc = -eta * m * (np.outer(w, w.conj()) - EPS @ np.conj(np.outer(z, z.conj())) @ EPS)
    P = h_inv(Pc)
    f = T / (2.0 * math.pi)
    out = np.zeros(9)
    out[0], out[1] = -f * z[0].imag, f * z[0].real
    out[2], out[3] = -f * z[1].imag, f * z[1].real
    out[6:9] = -P[:3]
    return out


def contact_pullback_check(family: str, coords, m: float = 1.0, eta: int = -1, T: int = 1) -> dict:
    """Numeric pullback of the left-invariant form vs the closed form."""
    if family.lower() == "kg":
        num = left_invariant_pullback(CoForm(np.zeros((2, 2), complex), eta * m * I2.astype(complex)),
                                      kg_section(m, eta), coords)
        ref = kg_contact_closed_form(coords, m, eta)
    elif family.lower() == "dirac":
        num = left_invariant_pullback(dirac_alpha(m, eta, T), dirac_section(T), coords)
        ref = dirac_contact_closed_form(coords, m, eta, T)
    else:
        raise ValueError(f"unknown contact family {family!r}")
    return {"numeric": num, "closed_form": ref, "residual": float(np.max(np.abs(num - ref)))}


def exterior_derivative(form: Callable[[np.ndarray], np.ndarray], coords, h: float = 1e-5) -> np.ndarray:
    """``(d theta)_{ij} = d_i theta_j - d_j theta_i`` by central differences with one Richardson step.

    ``h`` is relative to ``max(1, |coords|)``.
    """
    c = np.asarray(coords, dtype=float)
    n = len(c)
    step = h * max(1.0, float(np.max(np.abs(c))))
    J = np.empty((n, n))
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0

        def cd(s):
            return (np.asarray(form(c + s * e)) - np.asarray(form(c - s * e))) / (2 * s)

        J[i] = (4.0 * cd(step / 2) - cd(step)) / 3.0
    return J - J.T


def _pfaffian(M: np.ndarray) -> float:
    n = M.shape[0]
    if n == 0:
        return 1.0
    if n % 2:
        return 0.0
    total = 0.0
    for j in range(1, n):
        if M[0, j] == 0:
            continue
        keep = [k for k in range(n) if k not in (0, j)]
        total += (-1) ** (j + 1) * M[0, j] * _pfaffian(M[np.ix_(keep, keep)])
    return total


def top_form_coefficient(theta: np.ndarray, F: np.ndarray) -> float:
    """Coefficient of ``theta ^ F^n`` on ``dx^1 ^ ... ^ dx^{2n+1}``.

    ``F`` is the antisymmetric matrix of a 2-form (``F = 1/2 F_ij dx^i ^ dx^j``),
    and ``F^n = n! Pf(F) dx^1 ^ ... ^ dx^{2n}``.
    """
    dim = len(theta)
    n = (dim - 1) // 2
    tot = 0.0
    for i in range(dim):
        keep = [k for k in range(dim) if k != i]
        tot += (-1) ** i * theta[i] * _pfaffian(F[np.ix_(keep, keep)])
    return math.factorial(n) * tot


def kg_volume_coefficient(coords, m: float = 1.0, eta: int = -1, ordering: str = "t,k,x") -> float:
    """Coefficient of ``Omega ^ (dOmega)^3`` on ``dt^dk1^dk2^dk3^dx1^dx2^dx3``.

    ``Omega`` is taken from the numeric pullback and ``dOmega`` by finite
    differences of it.
    """
    if ordering != "t,k,x":
        raise ValueError("only the (t, k, x) ordering is supported")
    perm = [6, 0, 1, 2, 3, 4, 5]
    c = np.asarray(coords, dtype=float)
    alpha = CoForm(np.zeros((2, 2), complex), eta * m * I2.astype(complex))
    sec = kg_section(m, eta)

    def theta(cc):
        return left_invariant_pullback(alpha, sec, cc)

    th = theta(c)[perm]
    F = exterior_derivative(theta, c, h=1e-4)[np.ix_(perm, perm)]
    return top_form_coefficient(th, F)


# ---------------------------------------------------------------------------
# local charts of the projective twistor region
# ---------------------------------------------------------------------------

def _tuv(c):
    c = np.asarray(c, dtype=float)
    return c[0] + 1j * c[1], c[2] + 1j * c[3], c[4] + 1j * c[5]


def chart_twistor(k: int, coords, nu: float) -> np.ndarray:
    """``sigma_k(psi_k(t, u, v))``: the section landing in ``Phi = 2 nu``."""
    if k not in (1, 2, 3, 4):
        raise ValueError("charts are numbered 1..4")
    t, u, v = _tuv(coords)
    re_phi = (u + np.conj(t) * v).real
    if re_phi == 0 or np.sign(re_phi) != np.sign(nu):
        raise TwistorError("Re(phi) sign does not match sign(nu)")
    F = math.sqrt(2.0 * nu / re_phi)
    Z = np.empty(4, dtype=complex)
    c0 = k - 1
    Z[c0], Z[(c0 + 1) % 4], Z[(c0 + 2) % 4], Z[(c0 + 3) % 4] = 1.0, t, u, v
    return F * Z


def chart_coords(k: int, Z) -> np.ndarray:
    """Real coordinates ``(Re t, Im t, Re u, Im u, Re v, Im v)`` of ``[Z]`` in chart ``k``."""
    Z = np.asarray(Z, dtype=complex)
    c0 = k - 1
    if Z[c0] == 0:
        raise TwistorError(f"point outside chart {k}")
    Zn = Z / Z[c0]
    t, u, v = Zn[(c0 + 1) % 4], Zn[(c0 + 2) % 4], Zn[(c0 + 3) % 4]
    return np.array([t.real, t.imag, u.real, u.imag, v.real, v.imag])


def local_omega(k: int, coords, nu: float, eta: int, h: float = 1e-3) -> np.ndarray:
    """``(sigma_k o psi_k)^* omega`` by differentiating the section numerically."""
    c = np.asarray(coords, dtype=float)
    Z = chart_twistor(k, c, nu)
    out = np.empty(6)
    for i in range(6):
        e = np.zeros(6)
        e[i] = 1.0
        V = fd_derivative(lambda s, e=e: chart_twistor(k, c + s * e, nu), h)
        out[i] = omega0(Z, V, nu, eta)
    return out


def local_omega_closed_form(coords, nu: float, eta: int) -> np.ndarray:
    """``eta nu / Re(phi) (d Im(phi) + i (v d conj(t) - conj(v) dt))`` in real coordinates."""
    t, u, v = _tuv(coords)
    phi = u + np.conj(t) * v
    # d Im(phi) = Im(dt^bar v + t^bar dv + du)
    dIm = np.array([
        (v).imag * 1.0,            # d Re t: Im(v)
        (-1j * v).imag,            # d Im t: conj(i) v = -i v
        0.0, 1.0,                  # d Re u, d Im u
        np.conj(t).imag,           # d Re v
        (1j * np.conj(t)).imag,    # d Im v
    ], dtype=float)
    # i (v dt^bar - v^bar dt) = -2 Im(v dt^bar)
    rest = np.array([-2.0 * v.imag, -2.0 * (-1j * v).imag, 0, 0, 0, 0], dtype=float)
    return eta * nu / phi.real * (dIm + rest)


def local_symplectic(k: int, coords, nu: float, eta: int, method: str = "pullback") -> np.ndarray:
    """Antisymmetric 6x6 coefficient matrix of the symplectic form in chart ``k``.

    ``method="pullback"`` pulls the 2-form back through the chart section with
    a numerically differentiated Jacobian; ``method="derivative"`` takes the
    exterior derivative of :func:`local_omega_closed_form`.
    """
    c = np.asarray(coords, dtype=float)
    if method == "derivative":
        return exterior_derivative(lambda cc: local_omega_closed_form(cc, nu, eta), c)
    if method != "pullback":
        raise ValueError(f"unknown method {method!r}")
    Z = chart_twistor(k, c, nu)
    cols = []
    for i in range(6):
        e = np.zeros(6)
        e[i] = 1.0
        cols.append(fd_derivative(lambda s, e=e: chart_twistor(k, c + s * e, nu), 1e-3))
    J = np.array(cols)  # (6, 4)
    dw, dz = J[:, :2], J[:, 2:]
    phi = phi_form(Z)
    # (i eta nu / Phi)(dz ^ dw^bar + dw ^ dz^bar)
    t1 = dz @ np.conj(dw).T
    t2 = dw @ np.conj(dz).T
    M = t1 - t1.T + t2 - t2.T
    return np.real(1j * eta * nu / phi * M)
