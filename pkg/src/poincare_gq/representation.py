"""The Poincare-group representation on states, prewaves and waves, and the
quantum operators acting on sampled wave fields.

States are functions on a fibre space ``B`` (momentum points for scalar
particles, spinor data otherwise).  A :class:`Trivialization` fixes how the
group acts on ``B`` (``rho``) and how ``B`` projects to momentum (``r``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .fields import tensor_power
from .massive import dirac_r, dirac_r_inverse
from .massless import J_spinor, cone_section_values, r_minus, r_plus
from .quadrature import NodeBatch, Profile, QuadratureGrid, integrate
from .sections import HomogeneousSection
from .spinor import EPS, I2, PAULI, GroupElem, group_inv, h_inv

__all__ = [
    "Trivialization", "FamilyMismatchError", "StencilError", "State", "SectionState", "TransformedState",
    "rep_on_f", "prewave_value", "rep_on_prewave", "state_inner", "infinitesimal_X", "apply_vector_field",
    "flow_derivative",
    "SampledField", "sample_field", "wave_operator", "GENERATORS",
]


class FamilyMismatchError(ValueError):
    pass


class StencilError(ValueError):
    """Sampled grid too small for the finite-difference stencil."""


@dataclass(frozen=True)
class Trivialization:
    """``family`` is ``"kg"`` (points are momentum matrices), ``"massive"``
    (points ``Z = (w, z)`` in C^4 with ``z^* w = 1``) or ``"massless"``
    (points ``z`` in C^2 - 0)."""

    family: str
    m: float = 1.0
    eta: int = -1
    chi: int = 1
    T: int = 0

    def __post_init__(self):
        if self.family not in ("kg", "massive", "massless"):
            raise FamilyMismatchError(f"unknown family {self.family!r}")

    # -- the action -----------------------------------------------------------
    def rho(self, A) -> np.ndarray:
        A = np.asarray(A, dtype=complex)
        if self.family == "kg":
            raise FamilyMismatchError("scalar particles carry no spinor representation")
        Ais = np.linalg.inv(A.conj().T)
        if self.family == "massive":
            return np.block([[A, np.zeros((2, 2))], [np.zeros((2, 2)), Ais]])
        return A if self.chi == 1 else Ais

    def drho(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=complex)
        if self.family == "kg":
            return np.zeros((0, 0), dtype=complex)
        if self.family == "massive":
            return np.block([[a, np.zeros((2, 2))], [np.zeros((2, 2)), -a.conj().T]])
        return a if self.chi == 1 else -a.conj().T

    def act(self, A, point) -> np.ndarray:
        A = np.asarray(A, dtype=complex)
        point = np.asarray(point, dtype=complex)
        if self.family == "kg":
            return A @ point @ A.conj().T
        return point @ self.rho(A).T

    def tangent(self, a, point) -> np.ndarray:
        """Tangent at ``point`` of ``t -> rho(exp(-t a)) point``."""
        a = np.asarray(a, dtype=complex)
        point = np.asarray(point, dtype=complex)
        if self.family == "kg":
            return -(a @ point + point @ a.conj().T)
        return -(point @ self.drho(a).T)

    def retract(self, point) -> np.ndarray:
        """Map a nearby point back onto the fibre space (identity off the massive family)."""
        point = np.asarray(point, dtype=complex)
        if self.family != "massive":
            return point
        c = np.sum(np.conj(point[..., 2:]) * point[..., :2], axis=-1)
        out = point.copy()
        out[..., 2:] = point[..., 2:] / np.conj(c)[..., None]
        return out

    def r(self, point) -> np.ndarray:
        point = np.asarray(point, dtype=complex)
        if self.family == "kg":
            return point
        if self.family == "massive":
            return dirac_r(point[..., :2], point[..., 2:], self.m)[0]
        return r_plus(point) if self.chi == 1 else r_minus(point)

    def momentum(self, point) -> np.ndarray:
        """Hermitian form of the linear momentum ``P = -eta r(point)``."""
        return -self.eta * self.r(point)

    @property
    def base_point(self) -> np.ndarray:
        if self.family == "kg":
            return self.m * I2.astype(complex)
        if self.family == "massive":
            return np.array([1, 0, 1, 0], dtype=complex)
        z0 = np.array([1, 0], dtype=complex)
        return z0 if self.chi == 1 else J_spinor(z0)

    def stabilizer_phase(self, A) -> complex:
        """``lambda`` with ``rho(A) z0 = lambda z0`` (A in the isotropy group of the base momentum)."""
        z0 = self.base_point
        if self.family == "kg":
            raise FamilyMismatchError("scalar particles have a trivial fibre")
        v = self.rho(A) @ z0
        lam = np.vdot(z0, v) / np.vdot(z0, z0)
        if np.linalg.norm(v - lam * z0) > 1e-10 * np.linalg.norm(v):
            raise ValueError("rho(A) z0 is not a multiple of z0")
        return complex(lam)

    def fibre_points(self, b: NodeBatch) -> np.ndarray:
        """Representatives over the quadrature nodes."""
        if self.family == "kg":
            return b.K
        if self.family == "massive":
            return dirac_r_inverse(b.K, b.spinor, self.m)
        return cone_section_values(b.p, self.chi)

    @property
    def value_dim(self) -> int:
        if self.family == "kg":
            return 1
        return (4 if self.family == "massive" else 2) ** self.T


# ---------------------------------------------------------------------------
# states
# ---------------------------------------------------------------------------

class State:
    """A function on the fibre space of a trivialization (vectorised over points)."""

    triv: Trivialization

    def __call__(self, points) -> np.ndarray:  # pragma: no cover - interface
        raise NotImplementedError


@dataclass
class SectionState(State):
    triv: Trivialization
    f: HomogeneousSection | Profile

    def __call__(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=complex)
        single = pts.ndim == (2 if self.triv.family == "kg" else 1)
        if single:
            pts = pts[None]
        K = self.triv.r(pts)
        fam = self.triv.family
        if fam == "kg":
            f = self.f.profile if isinstance(self.f, HomogeneousSection) else self.f
            out = f(h_inv(K)[..., :3])
        elif fam == "massive":
            out = self.f.massive(K, pts)
        else:
            out = self.f.massless(K, pts, self.triv.chi)
        return out[0] if single else out


@dataclass
class TransformedState(State):
    """``(delta'(g) f)(z) = f(rho(A^{-1}) z) exp(-i pi Tr(P(r(z)) eps conj(H) eps))``."""

    triv: Trivialization
    base: State
    g: GroupElem

    def __call__(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=complex)
        Ai = np.linalg.inv(self.g.A)
        moved = self.triv.act(Ai, pts)
        P = self.triv.momentum(pts)
        M = EPS @ np.conj(self.g.H) @ EPS
        tr = np.trace(P @ M, axis1=-2, axis2=-1)
        return self.base(moved) * np.exp(-1j * math.pi * tr)


def rep_on_f(g: GroupElem, state: State) -> TransformedState:
    return TransformedState(state.triv, state, g)


def _fibre_power(triv: Trivialization, point) -> np.ndarray:
    if triv.family == "kg":
        return np.ones(1, dtype=complex)
    return tensor_power(np.asarray(point)[None], triv.T)[0]


def prewave_value(state: State, X, point) -> np.ndarray:
    """``psi_f(X, point) = f(point) exp(i pi Tr(P eps conj(X) eps)) point^{(x)T}``.

    ``X`` is the hermitian matrix of a spacetime point.
    """
    triv = state.triv
    P = triv.momentum(point)
    ph = np.exp(1j * math.pi * np.trace(P @ EPS @ np.conj(np.asarray(X)) @ EPS))
    return state(point) * ph * _fibre_power(triv, point)


def _rho_power(triv: Trivialization, A) -> np.ndarray:
    if triv.family == "kg":
        return np.ones((1, 1), dtype=complex)
    R = triv.rho(A)
    out = np.ones((1, 1), dtype=complex)
    for _ in range(triv.T):
        out = np.kron(out, R)
    return out


def rep_on_prewave(g: GroupElem, state: State, X, point, path: str = "geometric") -> np.ndarray:
    """Transformed prewave at ``(X, point)``.

    ``path="state"``: prewave of ``delta'(g) f``.  ``path="geometric"``:
    ``rho(A) psi_f((A, H)^{-1} * (X, point))``.
    """
    if path == "state":
        return prewave_value(rep_on_f(g, state), X, point)
    if path != "geometric":
        raise ValueError(f"unknown path {path!r}")
    triv = state.triv
    gi = group_inv(g)
    X2 = gi.A @ np.asarray(X, dtype=complex) @ gi.A.conj().T + gi.H
    p2 = triv.act(gi.A, point)
    return _rho_power(triv, g.A) @ prewave_value(state, X2, p2)


def state_inner(s1: State, s2: State, grid: QuadratureGrid) -> complex:
    """``int conj(f1) f2`` over the momentum-type manifold of the family."""
    triv = s1.triv
    if triv != s2.triv:
        raise FamilyMismatchError("states belong to different trivializations")

    def integrand(b: NodeBatch):
        pts = triv.fibre_points(b)
        return np.conj(s1(pts)) * s2(pts)

    return complex(integrate(integrand, grid))


# ---------------------------------------------------------------------------
# infinitesimal generators on the fibre space
# ---------------------------------------------------------------------------

def infinitesimal_X(a, triv: Trivialization) -> Callable[[np.ndarray], np.ndarray]:
    """Vector field ``X_a``: ``point -> d/dt rho(exp(-t a)) point`` at 0."""
    a = np.asarray(a, dtype=complex)
    return lambda point: triv.tangent(a, point)


def _stencil(f, h):
    return (-f(2 * h) + 8 * f(h) - 8 * f(-h) + f(-2 * h)) / (12.0 * h)


def apply_vector_field(V: Callable, fn: Callable, point, h: float = 1e-3,
                       retract: Callable | None = None) -> complex:
    """``(X fn)(point)`` as the derivative of ``fn`` along the straight line with velocity ``V(point)``.

    ``retract`` maps the line back onto a constraint surface (first-order
    neutral, so the derivative is unchanged).
    """
    point = np.asarray(point, dtype=complex)
    v = V(point)
    ret = retract or (lambda q: q)
    return complex(_stencil(lambda s: fn(ret(point + s * v)), h))


def flow_derivative(a, triv: Trivialization, fn: Callable, point, h: float = 1e-3) -> complex:
    """``d/dt fn(rho(exp(-t a)) point)`` at 0 by finite differences along the group orbit."""
    from scipy.linalg import expm

    a = np.asarray(a, dtype=complex)
    return complex(_stencil(lambda t: fn(triv.act(expm(-t * a), point)), h))


# ---------------------------------------------------------------------------
# quantum operators on sampled wave fields
# ---------------------------------------------------------------------------

#: Algebra elements of the generators: (a part, h part).
GENERATORS = {
    "P1": (None, 0), "P2": (None, 1), "P3": (None, 2), "P4": (None, 3),
    "l1": ("l", 0), "l2": ("l", 1), "l3": ("l", 2),
    "g1": ("g", 0), "g2": ("g", 1), "g3": ("g", 2),
}


@dataclass
class SampledField:
    """Wave-field samples on a regular spacetime grid.

    ``values`` has shape ``(n1, n2, n3, n4, ncomp)``; ``axes`` holds the four
    coordinate arrays (uniformly spaced).
    """

    axes: list
    values: np.ndarray
    triv: Trivialization | None = None
    metadata: dict = field(default_factory=dict)

    @property
    def steps(self) -> list[float]:
        return [float(a[1] - a[0]) if len(a) > 1 else 0.0 for a in self.axes]

    def derivative(self, axis: int) -> np.ndarray:
        """5-point central derivative on the interior (margin 2 on every axis)."""
        n = self.values.shape[axis]
        if n < 5:
            raise StencilError("need at least 5 samples per axis for the 5-point stencil")
        h = self.steps[axis]
        v = np.moveaxis(self.values, axis, 0)
        d = (v[:-4] - 8 * v[1:-3] + 8 * v[3:-1] - v[4:]) / (12.0 * h)
        d = np.moveaxis(d, 0, axis)
        sl = [slice(2, -2)] * 4 + [slice(None)]
        sl[axis] = slice(None)
        return d[tuple(sl)]

    def interior(self) -> np.ndarray:
        return self.values[2:-2, 2:-2, 2:-2, 2:-2]

    def interior_axes(self) -> list:
        return [a[2:-2] for a in self.axes]

    def interior_points(self) -> np.ndarray:
        ax = self.interior_axes()
        return np.stack(np.meshgrid(*ax, indexing="ij"), -1)


def sample_field(wave: Callable[[np.ndarray], np.ndarray], axes, triv: Trivialization | None = None) -> SampledField:
    """Evaluate ``wave`` (points (n, 4) -> values (n, c)) on the tensor grid of ``axes``."""
    axes = [np.asarray(a, float) for a in axes]
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, 4)
    vals = np.asarray(wave(pts))
    if vals.ndim == 1:
        vals = vals[:, None]
    shape = tuple(len(a) for a in axes)
    return SampledField(axes, vals.reshape(shape + (vals.shape[-1],)), triv)


def _spin_matrix(triv: Trivialization | None, a) -> np.ndarray | None:
    if triv is None or triv.family == "kg":
        return None
    d = triv.drho(a)
    n = d.shape[0]
    out = np.zeros((n ** triv.T, n ** triv.T), dtype=complex)
    eye = np.eye(n)
    for slot in range(triv.T):
        term = np.ones((1, 1))
        for j in range(triv.T):
            term = np.kron(term, d if j == slot else eye)
        out = out + term
    return out


def wave_operator(sym: str, fld: SampledField) -> np.ndarray:
    """Quantum operator of the generator ``sym`` on the interior of a sampled field.

    ``P^k = (1/2 pi i) d_k``, ``P^4 = (i/2 pi) d_4``,
    ``l^k = (1/2 pi i)(drho(i sigma_k/2) + (x x grad)_k)``,
    ``g^k = (1/2 pi i)(drho(sigma_k/2) - (x^4 d_k + x^k d_4))``.
    """
    if sym not in GENERATORS:
        raise ValueError(f"unknown generator {sym!r}")
    kind, idx = GENERATORS[sym]
    c = 1.0 / (2j * math.pi)
    if kind is None:
        d = fld.derivative(idx)
        return (1j / (2 * math.pi)) * d if idx == 3 else c * d
    X = fld.interior_points()
    psi = fld.interior()
    if kind == "l":
        j, r = (idx + 1) % 3, (idx + 2) % 3
        orb = X[..., j, None] * fld.derivative(r) - X[..., r, None] * fld.derivative(j)
        a = 0.5j * PAULI[idx]
    else:
        orb = -(X[..., 3, None] * fld.derivative(idx) + X[..., idx, None] * fld.derivative(3))
        a = 0.5 * PAULI[idx]
    S = _spin_matrix(fld.triv, a)
    spin = 0.0 if S is None else np.einsum("ij,...j->...i", S, psi)
    return c * (spin + orb)
