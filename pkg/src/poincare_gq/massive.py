"""Massive particles: Klein-Gordon (T = 0), Dirac (T = 1) and higher spin (T > 1).

The orbit point ``{0, eta m I}`` (with ``{iT/8pi s3, eta m I}`` for spin)
gives momentum space the mass hyperboloid ``det K = m^2, Tr K > 0``.  Spinning
states live on the set of pairs ``(w, z)`` with ``z^* w = 1``, projected to
``H^m x P1(C)`` by ``r(w, z) = (m (w w^* - eps conj(z z^*) eps), [w])``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .fields import WaveField, as_points, plane_phase, tensor_power
from .quadrature import (
    NodeBatch,
    Profile,
    QuadratureGrid,
    direction_of_spinor,
    integrate,
)
from .sections import HomogeneousSection
from .spinor import EPS, I2, PAULI, h_inv

__all__ = [
    "MassiveSpec", "GAMMA", "SingularConfigurationError", "dirac_r", "dirac_r_inverse",
    "dirac_section", "proj_spinor", "beta_sphere", "kg_prewave", "kg_wave",
    "dirac_prewave", "dirac_wave", "highT_prewave", "massive_wave",
    "statespace_dynvars", "nu2_kg", "covering_shift", "dirac_inner", "kg_inner",
]


class SingularConfigurationError(ValueError):
    pass


@dataclass(frozen=True)
class MassiveSpec:
    m: float
    eta: int = -1
    T: int = 0

    def __post_init__(self):
        if not self.m > 0:
            raise ValueError("mass must be positive")
        if self.eta not in (-1, 1):
            raise ValueError("eta must be +1 or -1")
        if self.T < 0:
            raise ValueError("T must be >= 0")


def _gamma() -> np.ndarray:
    Z = np.zeros((2, 2), dtype=complex)
    g = np.empty((4, 4, 4), dtype=complex)
    for j in range(3):
        g[j] = np.block([[Z, -PAULI[j]], [PAULI[j], Z]])
    g[3] = np.block([[Z, I2], [I2, Z]])
    return g


#: gamma^1, gamma^2, gamma^3, gamma^4 (index 3 is gamma^4).
GAMMA = _gamma()


def _dag(M):
    return np.conj(np.swapaxes(M, -1, -2))


def proj_spinor(a) -> np.ndarray:
    """Canonical representative of ``[a]``: unit norm, first nonzero entry real >= 0."""
    a = np.asarray(a, dtype=complex)
    n = np.linalg.norm(a, axis=-1, keepdims=True)
    if np.any(n == 0):
        raise ValueError("the zero spinor has no projective class")
    a = a / n
    first = np.where(np.abs(a[..., 0]) > 1e-15, a[..., 0], a[..., 1])
    return a * (np.conj(first) / np.abs(first))[..., None]


def beta_sphere(a) -> np.ndarray:
    """Unit vector ``u`` with ``h(u, 1) z = 2 z`` and ``h(u, -1) z = 0``."""
    return direction_of_spinor(a)


def _on_B(w, z, tol=1e-12):
    c = np.sum(np.conj(z) * w, axis=-1)
    if np.any(np.abs(c - 1.0) > tol * np.maximum(1.0, np.linalg.norm(w, axis=-1) * np.linalg.norm(z, axis=-1))):
        raise ValueError("point is not on z^* w = 1")


def dirac_r(w, z, m: float) -> tuple[np.ndarray, np.ndarray]:
    """``(K, [w])`` for a point of the constraint set ``z^* w = 1``."""
    w = np.asarray(w, dtype=complex)
    z = np.asarray(z, dtype=complex)
    _on_B(w, z)
    ww = w[..., :, None] * np.conj(w[..., None, :])
    zz = z[..., :, None] * np.conj(z[..., None, :])
    K = m * (ww - EPS @ np.conj(zz) @ EPS)
    K = 0.5 * (K + _dag(K))
    return K, proj_spinor(w)


def dirac_r_inverse(K, a, m: float) -> np.ndarray:
    """Representative ``(a, m K^{-1} a) / sqrt(m a^* K^{-1} a)`` of the fibre over ``(K, [a])``."""
    K = np.asarray(K, dtype=complex)
    a = np.asarray(a, dtype=complex)
    Ki = np.linalg.inv(K)
    Kia = np.einsum("...ij,...j->...i", Ki, a)
    q = m * np.sum(np.conj(a) * Kia, axis=-1).real
    if np.any(q <= 0):
        raise ValueError("a^* K^{-1} a must be positive on the hyperboloid")
    s = 1.0 / np.sqrt(q)
    return np.concatenate([a * s[..., None], m * Kia * s[..., None]], axis=-1)


def dirac_section(K, w, m: float) -> np.ndarray:
    """``sigma(K, w) = (w | -(1/m) K eps conj(w)) / sqrt(m w^* K^{-1} w)``, unimodular."""
    K = np.asarray(K, dtype=complex)
    w = np.asarray(w, dtype=complex)
    if not np.any(w):
        raise ValueError("w must be nonzero")
    q = (m * np.conj(w) @ np.linalg.solve(K, w)).real
    if q <= 0:
        raise ValueError("w^* K^{-1} w must be positive")
    col2 = -(1.0 / m) * K @ EPS @ np.conj(w)
    return np.stack([w, col2], axis=1) / math.sqrt(q)


# ---------------------------------------------------------------------------
# prewaves
# ---------------------------------------------------------------------------

def _profile_on_K(f, K):
    if isinstance(f, Profile):
        return f(h_inv(K)[..., :3])
    return f(K)


def kg_prewave(spec: MassiveSpec, f, H, K) -> complex:
    """``f(K) exp(-i pi eta Tr(K eps conj(H) eps))`` for scalar particles."""
    K = np.asarray(K, dtype=complex)
    H = np.asarray(H, dtype=complex)
    phase = np.exp(-1j * math.pi * spec.eta * np.trace(K @ EPS @ np.conj(H) @ EPS))
    return complex(_profile_on_K(f, K[None])[0] * phase)


def _massive_values(spec: MassiveSpec, f: HomogeneousSection, K, a):
    """Phase-invariant products ``f(Z) Z^{(x)T}`` at representatives over (K, [a])."""
    Z = dirac_r_inverse(K, a, spec.m)
    fv = f.massive(K, Z)
    return fv[..., None] * tensor_power(Z, spec.T)


def highT_prewave(spec: MassiveSpec, f: HomogeneousSection, H, K, a, phase_rep: complex = 1.0):
    """``f(Z) exp(-i pi eta Tr(K eps conj(H) eps)) Z^{(x)T}`` as a flat 4^T vector.

    ``phase_rep`` multiplies the representative ``Z`` chosen in the fibre; the
    result does not depend on it.
    """
    K = np.asarray(K, dtype=complex)
    Z = dirac_r_inverse(K, np.asarray(a, dtype=complex), spec.m) * phase_rep
    fv = f.massive(K[None], Z[None])[0]
    phase = np.exp(-1j * math.pi * spec.eta * np.trace(K @ EPS @ np.conj(np.asarray(H)) @ EPS))
    return fv * phase * tensor_power(Z[None], spec.T)[0]


def dirac_prewave(spec: MassiveSpec, f: HomogeneousSection, H, K, a, phase_rep: complex = 1.0):
    if spec.T != 1:
        raise ValueError("the Dirac prewave needs T = 1")
    return highT_prewave(spec, f, H, K, a, phase_rep)


# ---------------------------------------------------------------------------
# waves
# ---------------------------------------------------------------------------

def _wave_integrand(spec: MassiveSpec, f, X: np.ndarray, weights_poly: Callable | None = None):
    def integrand(b: NodeBatch):
        ph = plane_phase(b.K, X, spec.eta)  # (n, nx)
        if spec.T == 0:
            vals = _profile_on_K(f, b.K)[:, None]
        else:
            vals = _massive_values(spec, f, b.K, b.spinor)
        if weights_poly is not None:
            vals = vals * weights_poly(b)
        return ph[:, :, None] * vals[:, None, :]

    return integrand


def massive_wave(spec: MassiveSpec, f, x, grid: QuadratureGrid, multiplier: Callable | None = None) -> np.ndarray:
    """Wave function at the points ``x`` (shape (n, 4)), values of shape (n, 4^T).

    ``multiplier(batch)`` optionally multiplies the integrand by a function of
    the node (used for analytic derivatives and operator checks).
    """
    X = as_points(x)
    if spec.T == 0 and grid.measure_id != "NU_HM":
        raise ValueError("scalar waves integrate against NU_HM")
    if spec.T > 0 and grid.measure_id != "MU_HM_P1":
        raise ValueError("spinning waves integrate against MU_HM_P1")
    comps = 4 ** spec.T
    return integrate(_wave_integrand(spec, f, X, multiplier), grid, out_size=len(X) * comps)


def kg_wave(spec: MassiveSpec, f, x, grid: QuadratureGrid) -> np.ndarray:
    if spec.T != 0:
        raise ValueError("Klein-Gordon waves need T = 0")
    return massive_wave(spec, f, x, grid)[:, 0]


def dirac_wave(spec: MassiveSpec, f: HomogeneousSection, x, grid: QuadratureGrid) -> np.ndarray:
    if spec.T != 1:
        raise ValueError("Dirac waves need T = 1")
    return massive_wave(spec, f, x, grid)


def synthesize(spec: MassiveSpec, f, points, grid: QuadratureGrid) -> WaveField:
    vals = massive_wave(spec, f, points, grid)
    return WaveField(as_points(points), vals, {"family": "massive", "m": spec.m, "eta": spec.eta, "T": spec.T})


# ---------------------------------------------------------------------------
# inner products
# ---------------------------------------------------------------------------

def kg_inner(spec: MassiveSpec, f1, f2, grid: QuadratureGrid) -> complex:
    return complex(integrate(lambda b: np.conj(_profile_on_K(f1, b.K)) * _profile_on_K(f2, b.K), grid))


def dirac_inner(spec: MassiveSpec, f1: HomogeneousSection, f2: HomogeneousSection, grid: QuadratureGrid,
                via: str = "functions") -> complex:
    """Hermitian product of two states.

    ``via="functions"`` integrates ``conj(f1) f2`` (the fibre form equals 1 on
    ``z^* w = 1``); ``via="spinors"`` integrates ``1/2 psi1^* gamma^4 psi2``
    of the prewaves at ``H = 0``.
    """
    def integrand(b: NodeBatch):
        Z = dirac_r_inverse(b.K, b.spinor, spec.m)
        v1 = f1.massive(b.K, Z)
        v2 = f2.massive(b.K, Z)
        if via == "functions":
            return np.conj(v1) * v2
        p1 = v1[:, None] * Z
        p2 = v2[:, None] * Z
        return 0.5 * np.einsum("ni,ij,nj->n", np.conj(p1), GAMMA[3], p2)

    return complex(integrate(integrand, grid))


# ---------------------------------------------------------------------------
# state-space dynamical variables
# ---------------------------------------------------------------------------

def statespace_dynvars(spec: MassiveSpec, K, u, x, tol: float = 1e-12):
    """``(P, l, g, W)`` at the state ``(K, u, x)``.

    With ``k = K/m`` and ``D = k4 - <k, u>``::

        P = -eta m (k, k4)
        l = (T/4pi)(k4 u - k)/D + x x P
        g = (T/4pi)(k x u)/D + P4 x - x4 P
        W = P4 l + P x g,  W4 = <P, l>
    """
    K = np.asarray(K, dtype=complex)
    u = np.asarray(u, dtype=float)
    x = np.asarray(x, dtype=float)
    kv = h_inv(K) / spec.m
    k, k4 = kv[:3], kv[3]
    D = k4 - k @ u
    if D <= tol * max(1.0, k4):
        raise SingularConfigurationError("k4 - <k, u> vanishes")
    c = spec.T / (4.0 * math.pi)
    P = -spec.eta * spec.m * kv
    xv, x4 = x[:3], x[3]
    l = c * (k4 * u - k) / D + np.cross(xv, P[:3])
    g = c * np.cross(k, u) / D + P[3] * xv - x4 * P[:3]
    W = np.append(P[3] * l + np.cross(P[:3], g), P[:3] @ l)
    return P, l, g, W


def nu2_kg(spec: MassiveSpec, K, H) -> tuple[np.ndarray, np.ndarray]:
    """``(K, x - (x4/k4) k)``: the straight world line through ``H`` seen at time 0."""
    kv = h_inv(np.asarray(K, dtype=complex))
    xv = h_inv(np.asarray(H, dtype=complex))
    return np.asarray(K, dtype=complex), xv[:3] - (xv[3] / kv[3]) * kv[:3]


def covering_shift(spec: MassiveSpec, N: int, K, H) -> tuple[np.ndarray, np.ndarray]:
    """Deck transformation ``N * (K, H) = (K, H - N eta K / m^2)``."""
    K = np.asarray(K, dtype=complex)
    return K, np.asarray(H, dtype=complex) - N * spec.eta * K / spec.m ** 2
