"""Massless particles of helicity type: Weyl (T = 1) and Penrose (T >= 1) waves.

Momentum space is the future cone ``C+`` (``det K = 0``, ``Tr K > 0``).  For
``chi = +1`` a fibre point over ``K`` is a spinor with ``z z^* = K``; for
``chi = -1`` it is a spinor with ``-eps conj(z z^*) eps = K``, obtained from
the former through ``z -> eps conj(z)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fields import WaveField, as_points, plane_phase, tensor_power
from .massive import SingularConfigurationError
from .quadrature import NodeBatch, QuadratureGrid, integrate
from .sections import HomogeneousSection
from .spinor import EPS, PAULI, h_inv, h_map

__all__ = [
    "MasslessSpec", "ChartDomainError", "r_plus", "r_minus", "J_spinor", "sigma_U", "sigma_V",
    "cone_sections", "cone_section_values", "fiber_spinor", "weyl_prewave", "penrose_prewave",
    "massless_wave", "penrose_wave", "weyl_wave", "helicity_apply", "massless_statespace",
    "iota4", "massless_inner", "SPIN_GENERATORS",
]

#: Spin generators s^k = sigma_k / (4 pi) acting on one spinor index.
SPIN_GENERATORS = PAULI / (4.0 * math.pi)


class ChartDomainError(ValueError):
    pass


@dataclass(frozen=True)
class MasslessSpec:
    eta: int = -1
    chi: int = 1
    T: int = 1

    def __post_init__(self):
        if self.eta not in (-1, 1) or self.chi not in (-1, 1):
            raise ValueError("eta and chi must be +1 or -1")
        if self.T < 1:
            raise ValueError("T must be >= 1")

    @property
    def nu(self) -> float:
        return -self.eta * self.chi * self.T / (4.0 * math.pi)


def _outer(z):
    return z[..., :, None] * np.conj(z[..., None, :])


def _nonzero(z):
    if np.any(np.linalg.norm(z, axis=-1) == 0):
        raise ValueError("the zero spinor is not in the domain")


def r_plus(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    _nonzero(z)
    return _outer(z)


def J_spinor(z) -> np.ndarray:
    """``z -> eps conj(z)``."""
    return np.einsum("ij,...j->...i", EPS, np.conj(np.asarray(z, dtype=complex)))


def r_minus(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    _nonzero(z)
    return -(EPS @ np.conj(_outer(z)) @ EPS)


def sigma_U(p) -> np.ndarray:
    """Section of ``r_+`` away from the negative p3 axis."""
    p = np.asarray(p, dtype=float)
    n = np.linalg.norm(p, axis=-1)
    s = np.sqrt(n + p[..., 2])
    return np.stack([s + 0j, (p[..., 0] + 1j * p[..., 1]) / s], axis=-1)


def sigma_V(p) -> np.ndarray:
    """Section of ``r_+`` away from the positive p3 axis."""
    p = np.asarray(p, dtype=float)
    n = np.linalg.norm(p, axis=-1)
    s = np.sqrt(n - p[..., 2])
    return np.stack([(p[..., 0] - 1j * p[..., 1]) / s, s + 0j], axis=-1)


def _auto_chart(p, angle: float = 1e-6):
    p = np.asarray(p, dtype=float)
    n = np.linalg.norm(p, axis=-1)
    # within `angle` of the negative p3 axis: 1 + cos(theta) small
    return np.where(n + p[..., 2] <= 0.5 * angle * angle * n, "V", "U")


def cone_section_values(p, chi: int = 1, chart: str = "auto") -> np.ndarray:
    """Fibre representatives over cone points ``p`` for ``r_+`` (chi=1) or ``r_-`` (chi=-1)."""
    p = np.atleast_2d(np.asarray(p, dtype=float))
    if np.any(np.linalg.norm(p, axis=-1) == 0):
        raise ChartDomainError("the apex is not a cone point")
    if chart == "auto":
        which = _auto_chart(p)
    else:
        which = np.full(len(p), chart)
    z = np.empty((len(p), 2), dtype=complex)
    u, v = which == "U", which == "V"
    if np.any(u):
        bad = np.linalg.norm(p[u], axis=-1) + p[u, 2] <= 0
        if np.any(bad):
            raise ChartDomainError("point on the negative p3 axis is outside chart U")
        z[u] = sigma_U(p[u])
    if np.any(v):
        bad = np.linalg.norm(p[v], axis=-1) - p[v, 2] <= 0
        if np.any(bad):
            raise ChartDomainError("point on the positive p3 axis is outside chart V")
        z[v] = sigma_V(p[v])
    return z if chi == 1 else J_spinor(z)


def cone_sections(K, chart: str = "auto") -> np.ndarray:
    """Section of ``r_+`` at a cone point given as a hermitian matrix."""
    p = h_inv(np.asarray(K, dtype=complex))[..., :3]
    return cone_section_values(p, 1, chart)[0] if np.ndim(K) == 2 else cone_section_values(p, 1, chart)


def fiber_spinor(K, chi: int) -> np.ndarray:
    p = h_inv(np.asarray(K, dtype=complex))[..., :3]
    return cone_section_values(p, chi)


# ---------------------------------------------------------------------------
# prewaves and waves
# ---------------------------------------------------------------------------

def _phase(K, H, eta):
    return np.exp(-1j * math.pi * eta * np.trace(np.asarray(K) @ EPS @ np.conj(np.asarray(H)) @ EPS))


def penrose_prewave(spec: MasslessSpec, f: HomogeneousSection, K, H, phase_rep: complex = 1.0) -> np.ndarray:
    """``f(z) exp(-i pi eta Tr(K eps conj(H) eps)) z^{(x)T}`` as a flat 2^T vector."""
    K = np.asarray(K, dtype=complex)
    z = fiber_spinor(K, spec.chi)[0] * phase_rep
    fv = f.massless(K[None], z[None], spec.chi)[0]
    return fv * _phase(K, H, spec.eta) * tensor_power(z[None], spec.T)[0]


def weyl_prewave(spec: MasslessSpec, f: HomogeneousSection, K, H, phase_rep: complex = 1.0) -> np.ndarray:
    if spec.T != 1:
        raise ValueError("Weyl prewaves need T = 1")
    return penrose_prewave(spec, f, K, H, phase_rep)


def _node_values(spec: MasslessSpec, f: HomogeneousSection, b: NodeBatch) -> np.ndarray:
    z = cone_section_values(b.p, spec.chi)
    return f.massless(b.K, z, spec.chi)[:, None] * tensor_power(z, spec.T)


def massless_wave(spec: MasslessSpec, f: HomogeneousSection, x, grid: QuadratureGrid, multiplier=None) -> np.ndarray:
    """Wave function at points ``x``; values of shape (n, 2^T)."""
    if grid.measure_id != "OMEGA_CPLUS":
        raise ValueError("massless waves integrate against OMEGA_CPLUS")
    X = as_points(x)

    def integrand(b: NodeBatch):
        vals = _node_values(spec, f, b)
        if multiplier is not None:
            vals = vals * multiplier(b)
        return plane_phase(b.K, X, spec.eta)[:, :, None] * vals[:, None, :]

    return integrate(integrand, grid, out_size=len(X) * 2 ** spec.T)


def weyl_wave(spec, f, x, grid):
    if spec.T != 1:
        raise ValueError("Weyl waves need T = 1")
    return massless_wave(spec, f, x, grid)


penrose_wave = massless_wave


def synthesize(spec: MasslessSpec, f, points, grid) -> WaveField:
    vals = massless_wave(spec, f, points, grid)
    return WaveField(as_points(points), vals, {"family": "massless", "eta": spec.eta, "chi": spec.chi, "T": spec.T})


def massless_inner(spec: MasslessSpec, f1: HomogeneousSection, f2: HomogeneousSection, grid: QuadratureGrid,
                   via: str = "functions") -> complex:
    """``int conj(f1) f2 omega`` or, for T = 1, ``1/2 int psi1^* psi2 / |p|^2 d^3p``.

    The two agree because ``psi^* psi' = conj(f) f' |z|^2`` and ``|z|^2 = 2|p|``.
    """
    def integrand(b: NodeBatch):
        z = cone_section_values(b.p, spec.chi)
        v1 = f1.massless(b.K, z, spec.chi)
        v2 = f2.massless(b.K, z, spec.chi)
        if via == "functions":
            return np.conj(v1) * v2
        if spec.T != 1:
            raise ValueError("the spinor form is stated for T = 1")
        p1, p2 = v1[:, None] * z, v2[:, None] * z
        r = np.linalg.norm(b.p, axis=-1)
        # grid weights carry 1/|p|; the displayed form has 1/|p|^2 per d^3p
        return 0.5 * np.sum(np.conj(p1) * p2, axis=-1) / r

    return complex(integrate(integrand, grid))


# ---------------------------------------------------------------------------
# helicity
# ---------------------------------------------------------------------------

def helicity_apply(spec: MasslessSpec, value, K) -> np.ndarray:
    """Apply ``(1/|P|) sum_k P^k s^k`` (spin acting on every tensor factor).

    ``P = -eta k`` on the momentum point ``K = h(k)``.
    """
    k = h_inv(np.asarray(K, dtype=complex))
    P = -spec.eta * k
    n = np.linalg.norm(P[:3])
    M = np.einsum("k,kij->ij", P[:3] / n, SPIN_GENERATORS)
    T = spec.T
    v = np.asarray(value, dtype=complex).reshape((2,) * T)
    out = np.zeros_like(v)
    for axis in range(T):
        out += np.moveaxis(np.tensordot(M, v, axes=([1], [axis])), 0, axis)
    return out.reshape(-1)


# ---------------------------------------------------------------------------
# state space
# ---------------------------------------------------------------------------

def _denominator(K, v, tol):
    kv = h_inv(np.asarray(K, dtype=complex))
    D = kv[3] - kv[:3] @ np.asarray(v, float)
    if D <= tol * max(1.0, kv[3]):
        raise SingularConfigurationError("k4 - <k, v> vanishes")
    return kv, D


def massless_statespace(spec: MasslessSpec, K, v, x, tol: float = 1e-12):
    """``(P, l, g, W)`` at the state labelled by an auxiliary ``K`` on the unit
    hyperboloid (any mass; only ratios enter), a direction ``v`` and a point ``x``."""
    kv, D = _denominator(K, v, tol)
    v = np.asarray(v, float)
    x = np.asarray(x, float)
    k, k4 = kv[:3], kv[3]
    c = spec.chi * spec.T / (4.0 * math.pi)
    P4 = -spec.eta / (2.0 * D)
    P = np.append(P4 * v, P4)
    xv, x4 = x[:3], x[3]
    l = c * (k4 * v - k) / D + np.cross(xv, P[:3])
    g = c * np.cross(k, v) / D + P4 * xv - x4 * P[:3]
    W = c * P
    return P, l, g, W


def iota4(spec: MasslessSpec, K, v, x, tol: float = 1e-12):
    """``(h(v, 1) / (2(k4 - <k, v>)), h(x))``: cone momentum and spacetime point."""
    kv, D = _denominator(K, v, tol)
    return h_map(np.append(np.asarray(v, float), 1.0)) / (2.0 * D), h_map(np.asarray(x, float))
