"""Photons through symmetric 2x2 matrices, complex vector fields on the cone,
electromagnetic fields and potentials.

A photon state with energy sign ``-eta`` and helicity label ``ell`` is a
function on ``B = {s symmetric, s != 0, det s = 0}`` of degree -1 under
``s -> e^{i phi} s``.  For ``ell = -eta`` the fibre over ``K`` is
``r_+^{-1}(K)`` with ``r_+(s) = s conj(s) / sqrt(Tr s conj(s))``; for
``ell = eta`` it is ``r_-^{-1}(K)`` with ``r_- = r_+ o J``,
``J(s) = -eps conj(s) eps``.

A complex vector field ``A`` on the cone (``Tr A(K) eps conj(K) eps = 0``)
defines such a function through ``A(K) eps conj(K) = f_A(s) s``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .fields import as_points, plane_phase
from .massless import MasslessSpec, cone_section_values, helicity_apply
from .quadrature import NodeBatch, Profile, QuadratureGrid, integrate
from .spinor import EPS, I2, PAULI, h_inv, h_map

__all__ = [
    "PhotonSpec", "TangencyError", "ConeVectorField", "sym_from_spinor", "sym_r", "J_sym",
    "f_from_field", "fhat_from_field", "photon_prewave", "photon_prewave_via_f",
    "em_at_cone", "em_identity_check", "photon_wave", "potential_wave", "em_fields",
    "closed_form_wave", "gauge_shift", "gauge_potential_phi", "photon_inner", "photon_helicity",
    "matrix_of_components", "components_of_matrix", "sym_components",
]


class TangencyError(ValueError):
    """A(K) is not tangent to the cone at K."""


@dataclass(frozen=True)
class PhotonSpec:
    eta: int = -1
    ell: int = 1

    def __post_init__(self):
        if self.eta not in (-1, 1) or self.ell not in (-1, 1):
            raise ValueError("eta and ell must be +1 or -1")

    @property
    def chi(self) -> int:
        # ell = -eta chi
        return -self.eta * self.ell

    @property
    def massless(self) -> MasslessSpec:
        return MasslessSpec(self.eta, self.chi, 2)


# ---------------------------------------------------------------------------
# symmetric-matrix picture
# ---------------------------------------------------------------------------

def sym_from_spinor(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    return z[..., :, None] * z[..., None, :]


def _check_sym(s, tol=1e-12):
    s = np.asarray(s, dtype=complex)
    n2 = np.sum(np.abs(s) ** 2, axis=(-2, -1))
    if np.any(n2 == 0):
        raise ValueError("s must be nonzero")
    if np.any(np.abs(s - np.swapaxes(s, -1, -2)).max(axis=(-2, -1)) > tol * np.sqrt(n2)):
        raise ValueError("s must be symmetric")
    if np.any(np.abs(np.linalg.det(s)) > tol * n2):
        raise ValueError("s must be singular")
    return s


def J_sym(s) -> np.ndarray:
    """``J(s) = -eps conj(s) eps``; antilinear with ``J^2 = 1``."""
    return -(EPS @ np.conj(np.asarray(s, dtype=complex)) @ EPS)


def sym_r(s, sign: int = 1) -> np.ndarray:
    """``r_+(s) = s conj(s) / sqrt(Tr s conj(s))`` and ``r_- = r_+ o J``."""
    s = _check_sym(s)
    if sign == -1:
        s = J_sym(s)
    elif sign != 1:
        raise ValueError("sign must be +1 or -1")
    ss = s @ np.conj(s)
    tr = np.trace(ss, axis1=-2, axis2=-1).real
    C = ss / np.sqrt(tr)[..., None, None]
    return 0.5 * (C + np.conj(np.swapaxes(C, -1, -2)))


def sym_components(s) -> np.ndarray:
    """The three independent entries ``(s11, s12, s22)``."""
    s = np.asarray(s)
    return np.stack([s[..., 0, 0], s[..., 0, 1], s[..., 1, 1]], axis=-1)


# ---------------------------------------------------------------------------
# vector fields on the cone
# ---------------------------------------------------------------------------

def matrix_of_components(Amu) -> np.ndarray:
    """``A = A^4 I + sum_j A^j sigma_j`` for complex components (last axis)."""
    Amu = np.asarray(Amu, dtype=complex)
    return Amu[..., 3, None, None] * I2 + np.einsum("...j,jab->...ab", Amu[..., :3], PAULI)


def components_of_matrix(A) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    a1 = 0.5 * (A[..., 0, 1] + A[..., 1, 0])
    a2 = 0.5j * (A[..., 0, 1] - A[..., 1, 0])
    a3 = 0.5 * (A[..., 0, 0] - A[..., 1, 1])
    a4 = 0.5 * (A[..., 0, 0] + A[..., 1, 1])
    return np.stack([a1, a2, a3, a4], axis=-1)


def _mink_c(a, k):
    return a[..., 3] * k[..., 3] - np.sum(a[..., :3] * k[..., :3], axis=-1)


class ConeVectorField:
    """Complex vector field ``K -> A(K)`` on the cone.

    Built from four component callables (or :class:`Profile` objects on the
    ``CPLUS`` chart) returning ``A^mu`` at momentum coordinates ``p``.  With
    ``project=True`` the component along the cone normal is removed:
    ``A - <A, k>/(2 k4^2) h(-k, k4)``; :meth:`projection_magnitude` reports
    what was removed.
    """

    def __init__(self, components: Sequence[Callable | Profile | None], project: bool = True,
                 support: tuple | None = None, matrix_fn: Callable | None = None):
        if len(components) != 4:
            raise ValueError("a vector field needs four components A^1..A^4")
        self.components = list(components)
        self.project = project
        self.matrix_fn = matrix_fn
        self.support = support or self._support_from_profiles()

    def _support_from_profiles(self):
        profs = [c for c in self.components if isinstance(c, Profile)]
        if not profs:
            return None
        c0 = np.asarray(profs[0].center, float)
        R = max(np.linalg.norm(np.asarray(p.center) - c0) + p.radius for p in profs)
        return (tuple(c0), float(R))

    def raw_components(self, p) -> np.ndarray:
        p = np.atleast_2d(np.asarray(p, dtype=float))
        out = np.zeros((len(p), 4), dtype=complex)
        for mu, c in enumerate(self.components):
            if c is not None:
                out[:, mu] = c(p)
        return out

    def raw_matrix(self, K) -> np.ndarray:
        K = np.asarray(K, dtype=complex)
        single = K.ndim == 2
        Ks = K[None] if single else K
        if self.matrix_fn is not None:
            out = self.matrix_fn(Ks)
        else:
            out = matrix_of_components(self.raw_components(h_inv(Ks)[..., :3]))
        return out[0] if single else out

    def normal_part(self, K) -> np.ndarray:
        K = np.asarray(K, dtype=complex)
        k = h_inv(K)
        a = components_of_matrix(self.raw_matrix(K))
        c = _mink_c(a, k) / (2.0 * k[..., 3] ** 2)
        kt = np.concatenate([-k[..., :3], k[..., 3:]], axis=-1)
        return c[..., None, None] * h_map(kt)

    def __call__(self, K) -> np.ndarray:
        A = self.raw_matrix(K)
        if self.project:
            A = A - self.normal_part(K)
        return A

    def projection_magnitude(self, K) -> np.ndarray:
        return np.sqrt(np.sum(np.abs(self.normal_part(K)) ** 2, axis=(-2, -1)))

    def add(self, other: "ConeVectorField") -> "ConeVectorField":
        f = lambda K: self(K) + other(K)
        return ConeVectorField([None] * 4, project=False, support=self.support, matrix_fn=f)


def _tangency(A, K):
    return np.trace(A @ EPS @ np.conj(K) @ EPS, axis1=-2, axis2=-1)


def _field_at(A, K):
    return A(K) if callable(A) else np.asarray(A, dtype=complex)


def f_from_field(A, s, tol: float = 1e-10) -> complex:
    """Solve ``A(K) eps conj(K) = f s`` with ``K = r_+(s)``."""
    s = _check_sym(s)
    K = sym_r(s, 1)
    AK = _field_at(A, K)
    M = AK @ EPS @ np.conj(K)
    scale = np.sqrt(np.sum(np.abs(AK) ** 2)) * np.trace(K).real
    if abs(_tangency(AK, K)) > tol * max(scale, 1e-300):
        raise TangencyError("A(K) is not tangent to the cone")
    f = np.sum(np.conj(s) * M) / np.sum(np.abs(s) ** 2)
    if np.sqrt(np.sum(np.abs(M - f * s) ** 2)) > tol * max(scale, 1e-300):
        raise TangencyError("A(K) eps conj(K) is not proportional to s")
    return complex(f)


def fhat_from_field(A, s, tol: float = 1e-10) -> complex:
    """``conj(f_A(J s))``: the function used for the helicity ``ell = eta`` photons."""
    return complex(np.conj(f_from_field(A, J_sym(s), tol)))


def _phase(K, H, eta):
    return np.exp(-1j * math.pi * eta * np.trace(np.asarray(K) @ EPS @ np.conj(np.asarray(H)) @ EPS))


def photon_prewave(spec: PhotonSpec, A, H, K) -> np.ndarray:
    """Direct matrix form of the prewave at ``(H, K)``."""
    K = np.asarray(K, dtype=complex)
    AK = _field_at(A, K)
    if spec.ell == -spec.eta:
        M = AK @ EPS @ np.conj(K)
    else:
        M = -(EPS @ np.conj(AK) @ EPS @ K @ EPS)
    return M * _phase(K, H, spec.eta)


def photon_prewave_via_f(spec: PhotonSpec, A, H, K, phase_rep: complex = 1.0) -> np.ndarray:
    """``f(s) s e^{...}`` with ``s`` a point of the fibre over ``K``."""
    K = np.asarray(K, dtype=complex)
    p = h_inv(K)[:3]
    z = cone_section_values(p, spec.chi)[0]
    s = sym_from_spinor(z) * phase_rep
    f = f_from_field(A, s) if spec.ell == -spec.eta else fhat_from_field(A, s)
    return f * s * _phase(K, H, spec.eta)


def em_at_cone(A, K) -> tuple[np.ndarray, np.ndarray]:
    """``E(K) = A^4 k - k4 A`` and ``B(K) = A x k`` (complex 3-vectors)."""
    K = np.asarray(K, dtype=complex)
    a = components_of_matrix(_field_at(A, K))
    k = h_inv(K)
    E = a[..., 3, None] * k[..., :3] - k[..., 3, None] * a[..., :3]
    B = np.cross(a[..., :3], k[..., :3])
    return E, B


def em_identity_check(A, K) -> float:
    """Residual of ``A(K) eps conj(K) eps = (E + iB).sigma`` (entrywise max)."""
    K = np.asarray(K, dtype=complex)
    AK = _field_at(A, K)
    E, B = em_at_cone(AK, K)
    lhs = AK @ EPS @ np.conj(K) @ EPS
    rhs = np.einsum("...j,jab->...ab", E + 1j * B, PAULI)
    return float(np.max(np.abs(lhs - rhs)))


# ---------------------------------------------------------------------------
# waves, potentials, fields
# ---------------------------------------------------------------------------

def _node_matrices(spec: PhotonSpec, A, b: NodeBatch) -> np.ndarray:
    AK = A(b.K)
    if spec.ell == -spec.eta:
        return AK @ EPS @ np.conj(b.K)
    return -(EPS @ np.conj(AK) @ EPS @ b.K @ EPS)


def _wave(spec_eta: int, values: Callable[[NodeBatch], np.ndarray], X, grid, ncomp):
    if grid.measure_id != "OMEGA_CPLUS":
        raise ValueError("photon integrals use OMEGA_CPLUS")

    def integrand(b):
        v = values(b).reshape(len(b), -1)
        return plane_phase(b.K, X, spec_eta)[:, :, None] * v[:, None, :]

    return integrate(integrand, grid, out_size=len(X) * ncomp)


def photon_wave(spec: PhotonSpec, A, x, grid: QuadratureGrid) -> np.ndarray:
    """Symmetric-matrix wave at points ``x``: shape (n, 2, 2)."""
    X = as_points(x)
    out = _wave(spec.eta, lambda b: _node_matrices(spec, A, b), X, grid, 4)
    return out.reshape(len(X), 2, 2)


def potential_wave(A, x, grid: QuadratureGrid, eta: int = -1, derivative: int | None = None,
                   multiplier=None) -> np.ndarray:
    """``A~^mu(x) = int A^mu(K) exp(2 pi i eta <k, x>) omega``: shape (n, 4).

    ``derivative=nu`` returns ``d A~^mu / d x^nu`` by differentiating the
    exponential under the integral; ``multiplier(batch)`` (shape (n, 1) or
    (n, 4)) multiplies the integrand.
    """
    X = as_points(x)

    def values(b):
        a = components_of_matrix(A(b.K))
        if derivative is not None:
            k = h_inv(b.K)
            fac = k[:, 3] if derivative == 3 else -k[:, derivative]
            a = a * (2j * math.pi * eta * fac)[:, None]
        if multiplier is not None:
            a = a * multiplier(b)
        return a

    return _wave(eta, values, X, grid, 4)


def em_fields(A, x, grid: QuadratureGrid, eta: int = -1) -> tuple[np.ndarray, np.ndarray]:
    """``E(x)`` and ``B(x)`` from the integrals of ``E(K)`` and ``B(K)``."""
    X = as_points(x)

    def values(b):
        E, B = em_at_cone(A(b.K), b.K)
        return np.concatenate([E, B], axis=-1)

    out = (2j * math.pi * eta) * _wave(eta, values, X, grid, 6)
    return out[:, :3], out[:, 3:]


def closed_form_wave(spec: PhotonSpec, E: np.ndarray, B: np.ndarray) -> np.ndarray:
    """``(i eta / 2 pi) ((E + iB).sigma) eps`` for the helicity ``ell = -eta`` photon."""
    if spec.ell != -spec.eta:
        raise ValueError("closed form in terms of the same-energy fields holds for ell = -eta")
    F = np.einsum("...j,jab->...ab", E + 1j * B, PAULI)
    return (1j * spec.eta / (2.0 * math.pi)) * F @ EPS


def gauge_shift(A: ConeVectorField, L: Callable) -> ConeVectorField:
    """``A + L(K) K``; ``L`` maps a stack of cone matrices to 2x2 complex matrices."""
    return A.add(ConeVectorField([None] * 4, project=False, matrix_fn=lambda K: L(K) @ K))


def gauge_potential_phi(g: Callable, x, grid: QuadratureGrid, eta: int = -1, derivative: int | None = None):
    """``phi(x) = -(i eta / 2 pi) int g(K) exp(2 pi i eta <k, x>) omega`` (or its derivative)."""
    X = as_points(x)

    def values(b):
        v = g(b.K)
        if derivative is not None:
            k = h_inv(b.K)
            fac = k[:, 3] if derivative == 3 else -k[:, derivative]
            v = v * (2j * math.pi * eta * fac)
        return v[:, None]

    return (-1j * eta / (2.0 * math.pi)) * _wave(eta, values, X, grid, 1)[:, 0]


def photon_inner(spec: PhotonSpec, A, A2, grid: QuadratureGrid, via: str = "fields") -> complex:
    """Hermitian product of two photon states.

    ``via="fields"``: ``Tr(conj(A) eps K A' eps conj(K)) / (Tr K)^2``;
    ``via="functions"``: ``conj(f_A) f_A'`` on the fibre (``fhat`` for ``ell = eta``).
    """
    def integrand(b: NodeBatch):
        K = b.K
        if via == "fields":
            a1, a2 = A(K), A2(K)
            if spec.ell == -spec.eta:
                num = np.trace(np.conj(a1) @ EPS @ K @ a2 @ EPS @ np.conj(K), axis1=-2, axis2=-1)
                return num / np.trace(K, axis1=-2, axis2=-1).real ** 2
            # <psi_A, psi_A'> for ell = eta equals the ell = -eta product of (A', A)
            num = np.trace(np.conj(a2) @ EPS @ K @ a1 @ EPS @ np.conj(K), axis1=-2, axis2=-1)
            return num / np.trace(K, axis1=-2, axis2=-1).real ** 2
        z = cone_section_values(b.p, spec.chi)
        s = sym_from_spinor(z)
        out = np.empty(len(b), dtype=complex)
        for i in range(len(b)):
            if spec.ell == -spec.eta:
                f1, f2 = f_from_field(A, s[i]), f_from_field(A2, s[i])
            else:
                f1, f2 = fhat_from_field(A, s[i]), fhat_from_field(A2, s[i])
            out[i] = np.conj(f1) * f2
        return out

    return complex(integrate(integrand, grid))


def photon_helicity(spec: PhotonSpec, value, K) -> np.ndarray:
    """Helicity operator on a symmetric-matrix value (through ``s <-> z (x) z``)."""
    v = np.asarray(value, dtype=complex).reshape(-1)
    return helicity_apply(spec.massless, v, K).reshape(2, 2)
